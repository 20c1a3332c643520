#pragma once

#include "ensreg/types.hpp"

namespace ensreg {

/// Free parameters of the discrete registration engine.
struct RwirConfig {
    /// Half-width of the square similarity patch, in pixels.
    int patch_radius = 1;
    /// Likelihood temperature in intensity units (for 0-255 images).
    double sigma = 25.0;
    /// Regularization strength; the per-label system is (L + gamma*I) x = gamma*p.
    double gamma = 0.5;
    /// Edge-weight contrast sensitivity: w_ij = exp(-beta_g * (I_i - I_j)^2) + epsilon_w.
    double beta_g = 0.005;
    /// Edge-weight floor keeping the grid graph connected.
    double epsilon_w = 1e-6;
    /// Relative residual tolerance of the conjugate-gradient solver.
    double solver_tol = 1e-10;
    /// Iteration cap; 0 means 10 * (number of voxels).
    int solver_max_iter = 0;
};

void validate(const RwirConfig& cfg);

/// Patch-similarity likelihood: per voxel v and displacement d_k the
/// unnormalized score is exp(-SSD_k(v) / (2 sigma^2 A)) where SSD_k sums
/// squared intensity differences between the patch around v in `fixed` and
/// around v + d_k in `moving` (border-clamped) and A is the patch pixel
/// count. Scores are normalized to unity-sum per voxel; a voxel whose scores
/// all underflow to zero falls back to the uniform distribution.
PosteriorField data_likelihood(const Image& fixed, const Image& moving,
                               const DisplacementSet& disps, const RwirConfig& cfg);

/// Raw per-label random-walker solves, before clamping and renormalization:
/// for each k, x_k solves (L + gamma*I) x_k = gamma * p_k over the
/// 4-connected grid graph weighted by `fixed` intensities. Per-voxel sums
/// deviate from 1 only by the solver residual. Throws convergence_error if
/// any label fails to reach solver_tol.
PosteriorField random_walker_solve_raw(const PosteriorField& likelihood,
                                       const Image& fixed, const RwirConfig& cfg);

/// random_walker_solve_raw followed by clamping tiny negatives to zero and
/// per-voxel renormalization, yielding a valid PosteriorField.
PosteriorField random_walker_regularize(const PosteriorField& likelihood,
                                        const Image& fixed, const RwirConfig& cfg);

/// Full engine: data_likelihood then random_walker_regularize.
PosteriorField register_images(const Image& fixed, const Image& moving,
                               const DisplacementSet& disps, const RwirConfig& cfg);

} // namespace ensreg
