#include "chipfire/render.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace chipfire {

std::string Image::to_ppm() const {
    std::string out = "P6\n" + std::to_string(width) + " " +
                      std::to_string(height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(rgb.data()), rgb.size());
    return out;
}

Box render_canvas(const Box& content) {
    if (content.dim() != 2)
        throw std::invalid_argument("render: only 2-d fields supported");
    Point hi(2);
    for (int a = 0; a < 2; ++a)
        hi[a] = std::max(std::abs(content.lo[a]), std::abs(content.hi[a])) + 2;
    return Box({-hi[0], -hi[1]}, hi);
}

namespace {

template <typename ColorAt>
Image paint(const Box& canvas, int cell_px, ColorAt color_at) {
    if (cell_px < 1) throw std::invalid_argument("render: cell_px must be >= 1");
    Image img;
    img.width = canvas.extent(0) * cell_px;
    img.height = canvas.extent(1) * cell_px;
    img.rgb.resize(static_cast<std::size_t>(img.width) * img.height * 3);
    Point p(2);
    for (int row = 0; row < img.height; ++row) {
        p[1] = canvas.hi[1] - row / cell_px;  // top row = largest x2
        for (int col = 0; col < img.width; ++col) {
            p[0] = canvas.lo[0] + col / cell_px;
            Rgb c = color_at(p);
            std::size_t off =
                (static_cast<std::size_t>(row) * img.width + col) * 3;
            img.rgb[off] = c[0];
            img.rgb[off + 1] = c[1];
            img.rgb[off + 2] = c[2];
        }
    }
    return img;
}

}  // namespace

Image render_domain(const DomainSet& domain, int cell_px) {
    Box canvas = render_canvas(domain.box);
    return paint(canvas, cell_px, [&](const Point& p) {
        return domain.contains(p) ? kDomainInk : kBackground;
    });
}

Image render_rotors(const RotorAggregate& agg, int cell_px) {
    if (agg.occupied.dim() != 2)
        throw std::invalid_argument("render: only 2-d fields supported");
    Box canvas = render_canvas(agg.occupied.box);
    return paint(canvas, cell_px, [&](const Point& p) {
        if (!agg.occupied.contains(p)) return kBackground;
        return kRotorPalette[agg.rotors.direction.at(p) & 3];
    });
}

Image render_heights(const IntField& chips, int cell_px) {
    Box canvas = render_canvas(chips.box);
    return paint(canvas, cell_px, [&](const Point& p) {
        auto h = std::clamp<std::int64_t>(chips.at(p), 0, 3);
        return kHeightPalette[static_cast<std::size_t>(h)];
    });
}

void write_ppm(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("render: cannot open " + path);
    std::string data = img.to_ppm();
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("render: write failed for " + path);
}

}  // namespace chipfire
