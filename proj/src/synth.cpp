#include "ensreg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace ensreg {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace

double NoiseGenerator::next_unit() {
    return static_cast<double>(splitmix64(state_) >> 11) * 0x1.0p-53;
}

std::uint32_t NoiseGenerator::next_u32() {
    return static_cast<std::uint32_t>(splitmix64(state_) >> 32);
}

Image make_filled_circle(int w, int h, double cx, double cy, double r,
                         double fg, double bg) {
    Image img(w, h, bg);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double dx = x - cx;
            const double dy = y - cy;
            if (dx * dx + dy * dy <= r * r) img.at(x, y) = fg;
        }
    }
    return img;
}

Image make_filled_ellipse(int w, int h, double cx, double cy, double a, double b,
                          double fg, double bg) {
    Image img(w, h, bg);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double dx = (x - cx) / a;
            const double dy = (y - cy) / b;
            if (dx * dx + dy * dy <= 1.0) img.at(x, y) = fg;
        }
    }
    return img;
}

LabelImage make_circle_label(int w, int h, double cx, double cy, double r) {
    LabelImage img(w, h, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double dx = x - cx;
            const double dy = y - cy;
            if (dx * dx + dy * dy <= r * r) img.at(x, y) = 1;
        }
    }
    return img;
}

Image gaussian_blur(const Image& img, double sigma) {
    if (sigma <= 0.0) return img;
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    Image horiz(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                acc += kernel[i + radius] * img.at_clamped(x + i, y);
            }
            horiz.at(x, y) = acc;
        }
    }
    Image out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                acc += kernel[i + radius] * horiz.at_clamped(x, y + i);
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

Image make_value_noise(int w, int h, double amplitude, double blur_sigma,
                       std::uint32_t seed) {
    NoiseGenerator gen(seed);
    Image noise(w, h);
    for (double& p : noise.pixels) {
        p = 2.0 * gen.next_unit() - 1.0;
    }
    noise = gaussian_blur(noise, blur_sigma);
    double peak = 0.0;
    for (double p : noise.pixels) peak = std::max(peak, std::abs(p));
    if (peak > 0.0) {
        for (double& p : noise.pixels) p *= amplitude / peak;
    }
    return noise;
}

namespace {

double bilinear_clamped(const Image& img, double x, double y) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    const double v00 = img.at_clamped(x0, y0);
    const double v10 = img.at_clamped(x0 + 1, y0);
    const double v01 = img.at_clamped(x0, y0 + 1);
    const double v11 = img.at_clamped(x0 + 1, y0 + 1);
    return (1 - fy) * ((1 - fx) * v00 + fx * v10) + fy * ((1 - fx) * v01 + fx * v11);
}

} // namespace

Image warp_sinusoidal(const Image& img, double amplitude, double wavelength) {
    Image out(img.width, img.height);
    const double two_pi = 2.0 * std::numbers::pi;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double ux = amplitude * std::sin(two_pi * y / wavelength);
            const double uy = amplitude * std::sin(two_pi * x / wavelength);
            out.at(x, y) = bilinear_clamped(img, x + ux, y + uy);
        }
    }
    return out;
}

} // namespace ensreg
