#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ensreg {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class invalid_argument_error : public error {
  public:
    using error::error;
};

// A categorical distribution violated non-negativity or unity-sum.
class invalid_distribution_error : public error {
  public:
    using error::error;
};

// An ensemble cell holds no realizations.
class empty_cell_error : public error {
  public:
    using error::error;
};

class convergence_error : public error {
  public:
    convergence_error(const std::string& msg, double worst_residual)
        : error(msg), worst_residual(worst_residual) {}
    double worst_residual = 0.0;
};

class parse_error : public error {
  public:
    parse_error(const std::string& msg, std::size_t byte_offset)
        : error(msg), byte_offset(byte_offset) {}
    std::size_t byte_offset = 0;
};

class io_error : public error {
  public:
    using error::error;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

using Vec2 = std::array<double, 2>;

/// 2D scalar grid, row-major. Used for both the fixed and the moving image.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    Image() = default;
    Image(int w, int h, double fill = 0.0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width + x;
    }
    double& at(int x, int y) { return pixels[index(x, y)]; }
    double at(int x, int y) const { return pixels[index(x, y)]; }

    /// Out-of-bounds coordinates clamp to the nearest border pixel.
    double at_clamped(int x, int y) const {
        if (x < 0) x = 0;
        if (x >= width) x = width - 1;
        if (y < 0) y = 0;
        if (y >= height) y = height - 1;
        return at(x, y);
    }

    bool same_size(const Image& o) const {
        return width == o.width && height == o.height;
    }
};

/// Throws invalid_argument_error if dimensions and pixel count disagree or
/// any intensity is non-finite.
void validate(const Image& img);

/// Non-negative integer labels on a pixel grid; 0 is background.
struct LabelImage {
    int width = 0;
    int height = 0;
    std::vector<int> labels;

    LabelImage() = default;
    LabelImage(int w, int h, int fill = 0)
        : width(w), height(h), labels(static_cast<std::size_t>(w) * h, fill) {}

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width + x;
    }
    int& at(int x, int y) { return labels[index(x, y)]; }
    int at(int x, int y) const { return labels[index(x, y)]; }
    int at_clamped(int x, int y) const {
        if (x < 0) x = 0;
        if (x >= width) x = width - 1;
        if (y < 0) y = 0;
        if (y >= height) y = height - 1;
        return at(x, y);
    }
};

void validate(const LabelImage& img);

/// Integer pixel offset from a fixed-image voxel to a candidate moving-image
/// location.
struct Displacement {
    int dx = 0;
    int dy = 0;

    bool operator==(const Displacement& o) const = default;
    bool operator<(const Displacement& o) const {
        return dy != o.dy ? dy < o.dy : dx < o.dx;
    }
};

/// Ordered set of K candidate displacements; index k is the canonical
/// identity of d_k.
struct DisplacementSet {
    std::vector<Displacement> vectors;

    int size() const { return static_cast<int>(vectors.size()); }
    const Displacement& operator[](int k) const { return vectors[k]; }
};

/// Throws invalid_argument_error unless K >= 1 and all vectors are distinct.
void validate(const DisplacementSet& disps);

/// Square displacement grid {-radius..radius}^2 in row-major order
/// (dy outer, dx inner), so k = (dy + r) * (2r + 1) + (dx + r).
DisplacementSet make_grid_displacement_set(int radius);

/// Per-voxel unity-sum categorical distribution over K displacements.
/// Layout: probs[(y * width + x) * K + k].
struct PosteriorField {
    int width = 0;
    int height = 0;
    int num_displacements = 0;
    std::vector<double> probs;

    PosteriorField() = default;
    PosteriorField(int w, int h, int k, double fill = 0.0)
        : width(w), height(h), num_displacements(k),
          probs(static_cast<std::size_t>(w) * h * k, fill) {}

    std::size_t offset(int x, int y) const {
        return (static_cast<std::size_t>(y) * width + x) * num_displacements;
    }
    std::span<double> at(int x, int y) {
        return {probs.data() + offset(x, y),
                static_cast<std::size_t>(num_displacements)};
    }
    std::span<const double> at(int x, int y) const {
        return {probs.data() + offset(x, y),
                static_cast<std::size_t>(num_displacements)};
    }
    std::size_t voxel_count() const {
        return static_cast<std::size_t>(width) * height;
    }
};

/// Throws invalid_distribution_error unless every probability is in [0, 1]
/// and each voxel sums to 1 within `tol` absolute.
void validate(const PosteriorField& post, double tol = 1e-9);

/// Per-voxel real value; carrier for entropy maps, variance maps and
/// probability maps.
struct ScalarField {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    ScalarField() = default;
    ScalarField(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width + x;
    }
    double& at(int x, int y) { return values[index(x, y)]; }
    double at(int x, int y) const { return values[index(x, y)]; }
};

void validate(const ScalarField& field);

/// Per-voxel real 2-vector (e.g. component-wise inter-quartile ranges).
struct Vec2Field {
    int width = 0;
    int height = 0;
    std::vector<Vec2> values;

    Vec2Field() = default;
    Vec2Field(int w, int h)
        : width(w), height(h),
          values(static_cast<std::size_t>(w) * h, Vec2{0.0, 0.0}) {}

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width + x;
    }
    Vec2& at(int x, int y) { return values[index(x, y)]; }
    const Vec2& at(int x, int y) const { return values[index(x, y)]; }
};

/// Per-voxel chosen displacement (the posterior mode).
struct DisplacementField {
    int width = 0;
    int height = 0;
    std::vector<Displacement> vectors;

    DisplacementField() = default;
    DisplacementField(int w, int h)
        : width(w), height(h),
          vectors(static_cast<std::size_t>(w) * h, Displacement{}) {}

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width + x;
    }
    Displacement& at(int x, int y) { return vectors[index(x, y)]; }
    const Displacement& at(int x, int y) const { return vectors[index(x, y)]; }
};

// ---------------------------------------------------------------------------
// Ensemble fields
// ---------------------------------------------------------------------------

/// One possible outcome of a registered value together with its probability.
template <typename V>
struct Realization {
    V value{};
    double weight = 0.0;
};

/// A grid in which every voxel stores a distribution of values instead of a
/// single value. Cells hold aggregated realizations: values pairwise distinct
/// under the aggregation key, weights in (0, 1] summing to 1.
template <typename V>
struct EnsembleField {
    int width = 0;
    int height = 0;
    std::vector<std::vector<Realization<V>>> cells;

    EnsembleField() = default;
    EnsembleField(int w, int h)
        : width(w), height(h), cells(static_cast<std::size_t>(w) * h) {}

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width + x;
    }
    std::vector<Realization<V>>& cell(int x, int y) {
        return cells[index(x, y)];
    }
    const std::vector<Realization<V>>& cell(int x, int y) const {
        return cells[index(x, y)];
    }
};

using ScalarEnsembleField = EnsembleField<double>;
using LabelEnsembleField = EnsembleField<int>;
using VectorEnsembleField = EnsembleField<Vec2>;

void validate(const ScalarEnsembleField& field, double tol = 1e-9);
void validate(const LabelEnsembleField& field, double tol = 1e-9);
void validate(const VectorEnsembleField& field, double tol = 1e-9);

} // namespace ensreg
