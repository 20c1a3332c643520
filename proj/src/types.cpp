#include "ensreg/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ensreg {

void validate(const Image& img) {
    if (img.width <= 0 || img.height <= 0) {
        throw invalid_argument_error("image dimensions must be positive, got " +
                                     std::to_string(img.width) + "x" +
                                     std::to_string(img.height));
    }
    if (img.pixels.size() != static_cast<std::size_t>(img.width) * img.height) {
        throw invalid_argument_error("image pixel count does not match dimensions");
    }
    for (double p : img.pixels) {
        if (!std::isfinite(p)) {
            throw invalid_argument_error("image contains a non-finite intensity");
        }
    }
}

void validate(const LabelImage& img) {
    if (img.width <= 0 || img.height <= 0) {
        throw invalid_argument_error("label image dimensions must be positive");
    }
    if (img.labels.size() != static_cast<std::size_t>(img.width) * img.height) {
        throw invalid_argument_error("label count does not match dimensions");
    }
    for (int l : img.labels) {
        if (l < 0) {
            throw invalid_argument_error("labels must be non-negative");
        }
    }
}

void validate(const DisplacementSet& disps) {
    if (disps.vectors.empty()) {
        throw invalid_argument_error("displacement set must contain at least one vector");
    }
    auto sorted = disps.vectors;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw invalid_argument_error("displacement vectors must be pairwise distinct");
    }
}

DisplacementSet make_grid_displacement_set(int radius) {
    if (radius < 0) {
        throw invalid_argument_error("grid radius must be non-negative");
    }
    DisplacementSet disps;
    disps.vectors.reserve(static_cast<std::size_t>(2 * radius + 1) * (2 * radius + 1));
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            disps.vectors.push_back({dx, dy});
        }
    }
    return disps;
}

void validate(const PosteriorField& post, double tol) {
    if (post.width <= 0 || post.height <= 0 || post.num_displacements <= 0) {
        throw invalid_distribution_error("posterior field dimensions must be positive");
    }
    if (post.probs.size() != post.voxel_count() * post.num_displacements) {
        throw invalid_distribution_error("posterior probability count does not match dimensions");
    }
    for (int y = 0; y < post.height; ++y) {
        for (int x = 0; x < post.width; ++x) {
            double sum = 0.0;
            for (double p : post.at(x, y)) {
                if (!(p >= 0.0 && p <= 1.0)) {
                    throw invalid_distribution_error(
                        "posterior probability outside [0, 1] at voxel (" +
                        std::to_string(x) + ", " + std::to_string(y) + ")");
                }
                sum += p;
            }
            if (std::abs(sum - 1.0) > tol) {
                throw invalid_distribution_error(
                    "posterior does not sum to 1 at voxel (" + std::to_string(x) +
                    ", " + std::to_string(y) + "), sum = " + std::to_string(sum));
            }
        }
    }
}

void validate(const ScalarField& field) {
    if (field.width <= 0 || field.height <= 0) {
        throw invalid_argument_error("scalar field dimensions must be positive");
    }
    if (field.values.size() != static_cast<std::size_t>(field.width) * field.height) {
        throw invalid_argument_error("scalar field value count does not match dimensions");
    }
    for (double v : field.values) {
        if (!std::isfinite(v)) {
            throw invalid_argument_error("scalar field contains a non-finite value");
        }
    }
}

namespace {

template <typename V>
void validate_ensemble(const EnsembleField<V>& field, double tol) {
    if (field.width <= 0 || field.height <= 0) {
        throw invalid_argument_error("ensemble field dimensions must be positive");
    }
    if (field.cells.size() != static_cast<std::size_t>(field.width) * field.height) {
        throw invalid_argument_error("ensemble cell count does not match dimensions");
    }
    for (const auto& cell : field.cells) {
        double sum = 0.0;
        for (const auto& r : cell) {
            // Merged weights are sums of renormalized probabilities and may
            // overshoot 1 by rounding, within the unity-sum tolerance.
            if (!(r.weight > 0.0 && r.weight <= 1.0 + tol)) {
                throw invalid_distribution_error("ensemble weight outside (0, 1]");
            }
            sum += r.weight;
        }
        if (std::abs(sum - 1.0) > tol) {
            throw invalid_distribution_error("ensemble cell weights do not sum to 1");
        }
    }
}

} // namespace

void validate(const ScalarEnsembleField& field, double tol) { validate_ensemble(field, tol); }
void validate(const LabelEnsembleField& field, double tol) { validate_ensemble(field, tol); }
void validate(const VectorEnsembleField& field, double tol) { validate_ensemble(field, tol); }

} // namespace ensreg
