#pragma once

// Deterministic raster output: binary PPM (P6) images of 2-d domains,
// rotor directions, and sandpile heights.  Canvases are centered on the
// origin and sized to the content bounding box plus a 2-cell margin.

#include "chipfire/grid.hpp"
#include "chipfire/rotor.hpp"

#include <array>
#include <string>

namespace chipfire {

using Rgb = std::array<std::uint8_t, 3>;

/// Frozen palette for rotor directions 0..3.
constexpr std::array<Rgb, 4> kRotorPalette = {
    Rgb{230, 57, 70}, Rgb{69, 123, 157}, Rgb{42, 157, 143}, Rgb{244, 162, 97}};

/// Frozen palette for stable 2-d sandpile heights 0..3 (clamped).
constexpr std::array<Rgb, 4> kHeightPalette = {
    Rgb{250, 250, 250}, Rgb{189, 201, 225}, Rgb{116, 169, 207},
    Rgb{5, 112, 176}};

constexpr Rgb kBackground = {255, 255, 255};
constexpr Rgb kDomainInk = {30, 30, 30};

struct Image {
    int width = 0, height = 0;
    std::vector<std::uint8_t> rgb;  // rows top to bottom, left to right

    /// Binary PPM: "P6\n<w> <h>\n255\n" followed by the pixel payload.
    std::string to_ppm() const;
};

/// Symmetric canvas around the origin covering `content` plus a 2-cell
/// margin; throws unless the box is 2-dimensional.
Box render_canvas(const Box& content);

Image render_domain(const DomainSet& domain, int cell_px = 1);

/// Occupied cells colored by rotor direction (2-d only).
Image render_rotors(const RotorAggregate& agg, int cell_px = 1);

/// Cells colored by chip count through the height palette; values are
/// clamped to [0, 3].
Image render_heights(const IntField& chips, int cell_px = 1);

void write_ppm(const Image& img, const std::string& path);

}  // namespace chipfire
