#pragma once

#include <cstdint>

#include "ensreg/types.hpp"

namespace ensreg {

/// Filled circle: fg where (x-cx)^2 + (y-cy)^2 <= r^2, bg elsewhere.
Image make_filled_circle(int w, int h, double cx, double cy, double r,
                         double fg, double bg);

/// Filled axis-aligned ellipse with semi-axes (a, b).
Image make_filled_ellipse(int w, int h, double cx, double cy, double a, double b,
                          double fg, double bg);

/// Binary label mask of a filled circle (label 1 inside, 0 outside).
LabelImage make_circle_label(int w, int h, double cx, double cy, double r);

/// Separable Gaussian blur with border clamping; kernel radius ceil(3*sigma).
/// sigma <= 0 returns the image unchanged.
Image gaussian_blur(const Image& img, double sigma);

/// Smooth value noise on [-amplitude, amplitude]: per-pixel uniform draws
/// from a fixed-seed generator, Gaussian-blurred and rescaled to the target
/// amplitude. Deterministic for a given seed.
Image make_value_noise(int w, int h, double amplitude, double blur_sigma,
                       std::uint32_t seed);

/// Backward warp with the sinusoidal displacement
///   u(x, y) = (amplitude * sin(2 pi y / wavelength),
///              amplitude * sin(2 pi x / wavelength)),
/// sampled bilinearly with border clamping.
Image warp_sinusoidal(const Image& img, double amplitude, double wavelength);

/// Deterministic uniform double in [0, 1) from a splitmix64 stream; avoids
/// distribution implementations that vary between standard libraries.
class NoiseGenerator {
  public:
    explicit NoiseGenerator(std::uint32_t seed) : state_(seed) {}
    double next_unit();
    std::uint32_t next_u32();

  private:
    std::uint64_t state_;
};

} // namespace ensreg
