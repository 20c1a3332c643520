#pragma once

#include <filesystem>
#include <vector>

#include "ensreg/contour.hpp"
#include "ensreg/types.hpp"

namespace ensreg {

/// Parses a PGM file (P2 ASCII or P5 binary, maxval <= 65535) into an Image.
/// Intensities are taken as-is, no normalization. Throws parse_error (naming
/// the byte offset) on malformed input and io_error if the file is missing.
Image read_pgm(const std::filesystem::path& path);

/// Writes binary P5 PGM after clamping intensities to [0, 255] and rounding
/// half up. Writes to a temporary file and renames on success.
void write_pgm(const Image& img, const std::filesystem::path& path);

/// Writes a P6 PPM of the field through a fixed 5-stop heat map over
/// t = clamp((v - lo) / (hi - lo), 0, 1):
///   t=0 -> (0,0,128), 0.25 -> (0,128,255), 0.5 -> (0,255,0),
///   0.75 -> (255,255,0), 1 -> (255,0,0), linear per channel.
/// Requires hi > lo.
void write_ppm_heatmap(const ScalarField& field, const std::filesystem::path& path,
                       double lo, double hi);

/// Heat map with contour polylines rasterized on top in white.
void write_ppm_heatmap_with_contours(const ScalarField& field,
                                     const std::vector<ContourSet>& contour_sets,
                                     const std::filesystem::path& path,
                                     double lo, double hi);

/// Rounds intensities to the nearest integer and checks non-negativity.
LabelImage to_label_image(const Image& img);

/// Heat-map color for a normalized value t in [0, 1] (exposed for tests).
std::array<int, 3> heatmap_color(double t);

} // namespace ensreg
