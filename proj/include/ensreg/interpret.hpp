#pragma once

#include "ensreg/types.hpp"

namespace ensreg {

/// Per-voxel displacement mean and covariance of the transformation
/// posterior. Covariance is row-major [xx, xy, yx, yy].
struct DisplacementMoments {
    Vec2 mean{0.0, 0.0};
    std::array<double, 4> covariance{0.0, 0.0, 0.0, 0.0};
};

struct MomentsField {
    int width = 0;
    int height = 0;
    std::vector<DisplacementMoments> values;

    MomentsField() = default;
    MomentsField(int w, int h)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h) {}

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width + x;
    }
    DisplacementMoments& at(int x, int y) { return values[index(x, y)]; }
    const DisplacementMoments& at(int x, int y) const { return values[index(x, y)]; }
};

/// Per-voxel argmax displacement; ties break on the lowest index k.
DisplacementField mode_transformation(const PosteriorField& post,
                                      const DisplacementSet& disps);

/// Registered image: I_rm(v) = I_m(v + d(v)), border-clamped integer lookup.
Image warp_by_mode(const Image& moving, const DisplacementField& field);

/// Per-voxel Shannon entropy of the transformation posterior, in bits.
ScalarField entropy_map(const PosteriorField& post);

/// mean = sum_k P_k d_k, covariance = sum_k P_k (d_k - mean)(d_k - mean)^T.
MomentsField displacement_moments(const PosteriorField& post,
                                  const DisplacementSet& disps);

/// Frobenius norm of the per-voxel displacement covariance.
ScalarField covariance_frobenius_map(const PosteriorField& post,
                                     const DisplacementSet& disps);

/// Component-wise inter-quartile range of the displacement posterior:
/// IQR_c = quantile(0.75) - quantile(0.25) of the c-th displacement component.
Vec2Field displacement_iqr_map(const PosteriorField& post,
                               const DisplacementSet& disps);

} // namespace ensreg
