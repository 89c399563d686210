#include "chipfire/grid.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <limits>

#include <json.hpp>

namespace chipfire {

std::int64_t max_cells() {
    static std::int64_t cap = [] {
        if (const char* env = std::getenv("CHIPFIRE_MAX_CELLS")) {
            long long v = std::atoll(env);
            if (v > 0) return static_cast<std::int64_t>(v);
        }
        return std::int64_t{1} << 31;
    }();
    return cap;
}

Box::Box(Point lo_, Point hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size() || lo.empty())
        throw std::invalid_argument("box bounds must have equal dimension >= 1");
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (lo[i] > hi[i]) throw std::invalid_argument("box min > max");
}

Box Box::centered(int dim, int half) {
    return Box(Point(dim, -half), Point(dim, half));
}

std::int64_t Box::size() const {
    std::int64_t n = 1;
    for (int a = 0; a < dim(); ++a) n *= extent(a);
    return n;
}

bool Box::contains(const Point& p) const {
    for (int a = 0; a < dim(); ++a)
        if (p[a] < lo[a] || p[a] > hi[a]) return false;
    return true;
}

bool Box::near_edge(const Point& p, int margin) const {
    for (int a = 0; a < dim(); ++a)
        if (p[a] - lo[a] < margin || hi[a] - p[a] < margin) return true;
    return false;
}

std::int64_t Box::index(const Point& p) const {
    std::int64_t idx = 0;
    for (int a = 0; a < dim(); ++a) idx = idx * extent(a) + (p[a] - lo[a]);
    return idx;
}

Point Box::point_at(std::int64_t idx) const {
    Point p(dim());
    for (int a = dim() - 1; a >= 0; --a) {
        p[a] = lo[a] + static_cast<int>(idx % extent(a));
        idx /= extent(a);
    }
    return p;
}

std::vector<std::int64_t> Box::strides() const {
    std::vector<std::int64_t> s(dim());
    std::int64_t acc = 1;
    for (int a = dim() - 1; a >= 0; --a) {
        s[a] = acc;
        acc *= extent(a);
    }
    return s;
}

DomainSet::DomainSet(Box b) : box(std::move(b)) {
    auto n = box.size();
    if (n > max_cells())
        throw box_overflow_error("domain exceeds CHIPFIRE_MAX_CELLS");
    bits.assign(static_cast<std::size_t>(n), 0);
}

void DomainSet::insert(const Point& p) {
    if (!box.contains(p)) {
        // Grow by doubling until the point fits.
        Box nb = box;
        for (int a = 0; a < box.dim(); ++a) {
            while (p[a] < nb.lo[a] || p[a] > nb.hi[a]) {
                int w = nb.extent(a);
                nb.lo[a] -= w;
                nb.hi[a] += w;
            }
        }
        DomainSet bigger(nb);
        for (std::int64_t i = 0; i < box.size(); ++i)
            if (bits[i]) bigger.bits[nb.index(box.point_at(i))] = 1;
        bigger.count = count;
        *this = std::move(bigger);
    }
    auto& b = bits[box.index(p)];
    if (!b) {
        b = 1;
        ++count;
    }
}

void DomainSet::erase(const Point& p) {
    if (!box.contains(p)) return;
    auto& b = bits[box.index(p)];
    if (b) {
        b = 0;
        --count;
    }
}

std::vector<Point> DomainSet::points_sorted() const {
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(count));
    auto n = static_cast<std::int64_t>(bits.size());
    for (std::int64_t i = 0; i < n; ++i)
        if (bits[i]) pts.push_back(box.point_at(i));
    std::sort(pts.begin(), pts.end());
    return pts;
}

bool DomainSet::includes(const DomainSet& other) const {
    auto n = static_cast<std::int64_t>(other.bits.size());
    for (std::int64_t i = 0; i < n; ++i)
        if (other.bits[i] && !contains(other.box.point_at(i))) return false;
    return true;
}

std::int64_t DomainSet::symmetric_difference_count(const DomainSet& other) const {
    std::int64_t diff = 0;
    auto n = static_cast<std::int64_t>(bits.size());
    auto no = static_cast<std::int64_t>(other.bits.size());
    for (std::int64_t i = 0; i < n; ++i)
        if (bits[i] && !other.contains(box.point_at(i))) ++diff;
    for (std::int64_t i = 0; i < no; ++i)
        if (other.bits[i] && !contains(other.box.point_at(i))) ++diff;
    return diff;
}

std::vector<Point> DomainSet::boundary_cells() const {
    std::vector<Point> out;
    auto n = static_cast<std::int64_t>(bits.size());
    for (std::int64_t i = 0; i < n; ++i) {
        if (!bits[i]) continue;
        Point p = box.point_at(i);
        for (const Point& q : chipfire::neighbors(p)) {
            if (!contains(q)) {
                out.push_back(p);
                break;
            }
        }
    }
    return out;
}

std::vector<Point> neighbors(const Point& p) {
    std::vector<Point> out;
    out.reserve(2 * p.size());
    for (std::size_t a = 0; a < p.size(); ++a) {
        Point q = p;
        q[a] = p[a] + 1;
        out.push_back(q);
        q[a] = p[a] - 1;
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<Point> neighbors(const Point& p, const Box& box) {
    if (!box.contains(p) || box.near_edge(p, 1))
        throw out_of_box_error("neighbors: point too close to box edge");
    return neighbors(p);
}

double euclidean_norm(const Point& p) {
    double s = 0;
    for (int c : p) s += static_cast<double>(c) * c;
    return std::sqrt(s);
}

DomainSet ball_domain(double r, int dim) {
    if (r < 0) throw std::invalid_argument("ball_domain: negative radius");
    int half = std::max(0, static_cast<int>(std::ceil(r)));
    DomainSet D(Box::centered(dim, half));
    const double r2 = r * r;
    for (std::int64_t i = 0; i < D.box.size(); ++i) {
        Point p = D.box.point_at(i);
        double s = 0;
        for (int c : p) s += static_cast<double>(c) * c;
        if (s < r2) {
            D.bits[i] = 1;
            ++D.count;
        }
    }
    return D;
}

ShapeMetrics shape_metrics(const DomainSet& D) {
    ShapeMetrics m;
    m.volume = D.count;
    m.centroid.assign(D.dim(), 0.0);
    if (D.count == 0) {
        m.inradius = 0.0;
        m.outradius_defined = false;
        return m;
    }
    double in2 = std::numeric_limits<double>::infinity();
    double out2 = 0.0;
    // Scan the box expanded by one cell: every complement site outside that
    // shell is farther from the origin than some site on the shell.
    Box ext(D.box);
    for (int a = 0; a < ext.dim(); ++a) {
        ext.lo[a] -= 1;
        ext.hi[a] += 1;
    }
    for (std::int64_t i = 0; i < ext.size(); ++i) {
        Point p = ext.point_at(i);
        double s = 0;
        for (int c : p) s += static_cast<double>(c) * c;
        if (D.contains(p)) {
            out2 = std::max(out2, s);
            for (int a = 0; a < D.dim(); ++a) m.centroid[a] += p[a];
        } else {
            in2 = std::min(in2, s);
        }
    }
    m.inradius = std::sqrt(in2);
    m.outradius = std::sqrt(out2);
    m.outradius_defined = true;
    for (auto& c : m.centroid) c /= static_cast<double>(D.count);
    return m;
}

int DensitySpec::dim() const {
    if (shapes.empty()) throw std::invalid_argument("empty density spec");
    const Shape& s = shapes.front();
    return static_cast<int>(s.kind == Shape::Ball ? s.center.size() : s.lo.size());
}

double DensitySpec::value_at(const std::vector<double>& x) const {
    double v = 0;
    for (const Shape& s : shapes) {
        if (s.kind == Shape::Ball) {
            double d2 = 0;
            for (std::size_t a = 0; a < x.size(); ++a) {
                double t = x[a] - s.center[a];
                d2 += t * t;
            }
            if (d2 < s.radius * s.radius) v += s.weight;
        } else {
            bool in = true;
            for (std::size_t a = 0; a < x.size(); ++a)
                if (x[a] < s.lo[a] || x[a] >= s.hi[a]) {
                    in = false;
                    break;
                }
            if (in) v += s.weight;
        }
    }
    return v;
}

void DensitySpec::support_bounds(std::vector<double>& lo,
                                 std::vector<double>& hi) const {
    int d = dim();
    lo.assign(d, std::numeric_limits<double>::infinity());
    hi.assign(d, -std::numeric_limits<double>::infinity());
    for (const Shape& s : shapes) {
        for (int a = 0; a < d; ++a) {
            double slo = s.kind == Shape::Ball ? s.center[a] - s.radius : s.lo[a];
            double shi = s.kind == Shape::Ball ? s.center[a] + s.radius : s.hi[a];
            lo[a] = std::min(lo[a], slo);
            hi[a] = std::max(hi[a], shi);
        }
    }
    for (int a = 0; a < d; ++a)
        if (!std::isfinite(lo[a]) || !std::isfinite(hi[a]))
            throw std::invalid_argument("density spec has unbounded support");
}

DensitySpec DensitySpec::disk(std::vector<double> center, double radius,
                              double weight) {
    DensitySpec s;
    s.add_disk(std::move(center), radius, weight);
    return s;
}

DensitySpec& DensitySpec::add_disk(std::vector<double> center, double radius,
                                   double weight) {
    Shape s;
    s.kind = Shape::Ball;
    s.center = std::move(center);
    s.radius = radius;
    s.weight = weight;
    shapes.push_back(std::move(s));
    return *this;
}

DensitySpec& DensitySpec::add_box(std::vector<double> lo, std::vector<double> hi,
                                  double weight) {
    Shape s;
    s.kind = Shape::Cuboid;
    s.lo = std::move(lo);
    s.hi = std::move(hi);
    s.weight = weight;
    shapes.push_back(std::move(s));
    return *this;
}

namespace {

// Fraction-weighted integral of the density over an axis-aligned real cell,
// by recursive subdivision; cells fully inside / outside every shape resolve
// exactly.
double cell_integral(const DensitySpec& spec, std::vector<double> lo,
                     std::vector<double> hi, int depth) {
    // Classify the cell against each shape: 0 = outside, 1 = inside, 2 = cut.
    double sure = 0;
    bool cut = false;
    for (const auto& s : spec.shapes) {
        int cls;
        if (s.kind == DensitySpec::Shape::Ball) {
            double near2 = 0, far2 = 0;
            for (std::size_t a = 0; a < lo.size(); ++a) {
                double lodist = lo[a] - s.center[a], hidist = hi[a] - s.center[a];
                double nd = (lodist > 0) ? lodist : (hidist < 0 ? -hidist : 0.0);
                double fd = std::max(std::abs(lodist), std::abs(hidist));
                near2 += nd * nd;
                far2 += fd * fd;
            }
            double r2 = s.radius * s.radius;
            cls = (far2 < r2) ? 1 : (near2 >= r2 ? 0 : 2);
        } else {
            bool inside = true, outside = false;
            for (std::size_t a = 0; a < lo.size(); ++a) {
                if (!(lo[a] >= s.lo[a] && hi[a] <= s.hi[a])) inside = false;
                if (hi[a] <= s.lo[a] || lo[a] >= s.hi[a]) outside = true;
            }
            cls = inside ? 1 : (outside ? 0 : 2);
        }
        if (cls == 1) sure += s.weight;
        if (cls == 2) cut = true;
    }
    double vol = 1;
    for (std::size_t a = 0; a < lo.size(); ++a) vol *= hi[a] - lo[a];
    if (!cut) return sure * vol;
    if (depth == 0) {
        std::vector<double> mid(lo.size());
        for (std::size_t a = 0; a < lo.size(); ++a) mid[a] = 0.5 * (lo[a] + hi[a]);
        return spec.value_at(mid) * vol;
    }
    // Split along every axis.
    double total = 0;
    int d = static_cast<int>(lo.size());
    for (int corner = 0; corner < (1 << d); ++corner) {
        std::vector<double> clo(lo), chi(hi);
        for (int a = 0; a < d; ++a) {
            double mid = 0.5 * (lo[a] + hi[a]);
            if (corner & (1 << a))
                clo[a] = mid;
            else
                chi[a] = mid;
        }
        total += cell_integral(spec, std::move(clo), std::move(chi), depth - 1);
    }
    return total;
}

double round_ties_even(double t) {
    double r = std::nearbyint(t);  // default FE_TONEAREST rounds ties to even
    return r;
}

}  // namespace

ScalarField discretize_density(const DensitySpec& spec, double delta) {
    if (delta <= 0) throw std::invalid_argument("spacing must be positive");
    std::vector<double> lo, hi;
    spec.support_bounds(lo, hi);
    int d = spec.dim();
    Point blo(d), bhi(d);
    for (int a = 0; a < d; ++a) {
        blo[a] = static_cast<int>(std::floor(lo[a] / delta)) - 1;
        bhi[a] = static_cast<int>(std::ceil(hi[a] / delta)) + 1;
    }
    ScalarField f(Box(blo, bhi));
    double cellvol = std::pow(delta, d);
    for (std::int64_t i = 0; i < f.box.size(); ++i) {
        Point p = f.box.point_at(i);
        std::vector<double> clo(d), chi(d);
        for (int a = 0; a < d; ++a) {
            clo[a] = (p[a] - 0.5) * delta;
            chi[a] = (p[a] + 0.5) * delta;
        }
        double integral = cell_integral(spec, std::move(clo), std::move(chi), 7);
        f.values[i] = round_ties_even(integral / cellvol);
    }
    return f;
}

std::string domain_to_json(const DomainSet& D) {
    nlohmann::json j;
    j["dim"] = D.dim();
    auto pts = D.points_sorted();
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : pts) arr.push_back(p);
    j["points"] = std::move(arr);
    return j.dump();
}

DomainSet domain_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    int d = j.at("dim").get<int>();
    auto pts = j.at("points").get<std::vector<Point>>();
    DomainSet D(Box::centered(d, 1));
    for (const auto& p : pts) {
        if (static_cast<int>(p.size()) != d)
            throw std::invalid_argument("point dimension mismatch in domain JSON");
        D.insert(p);
    }
    return D;
}

}  // namespace chipfire
