#pragma once

#include "ensreg/interpret.hpp"
#include "ensreg/rwir.hpp"
#include "ensreg/types.hpp"

// Serial, deliberately straightforward reference implementations. They share
// no code with the parallel kernels and exist as independent oracles for the
// test suites and as the baseline for the benchmark.
namespace ensreg::reference {

/// Patch-SSD likelihood, plain serial loops.
PosteriorField data_likelihood_serial(const Image& fixed, const Image& moving,
                                      const DisplacementSet& disps,
                                      const RwirConfig& cfg);

/// Random-walker solves via a dense (L + gamma*I) Cholesky factorization.
/// Returns the raw per-label solutions (no renormalization). Intended for
/// small grids; memory grows with the square of the voxel count.
PosteriorField random_walker_dense(const PosteriorField& likelihood,
                                   const Image& fixed, const RwirConfig& cfg);

/// Row-major dense (L + gamma*I) over the 4-connected grid of `fixed`.
std::vector<double> dense_system_matrix(const Image& fixed, const RwirConfig& cfg);

/// Serial pushforward + per-voxel statistics computed by brute-force
/// enumeration over all K atoms, without the aggregation machinery.
double ensemble_mode_brute(const PosteriorField& post, const DisplacementSet& disps,
                           const Image& moving, int x, int y);
double ensemble_variance_brute(const PosteriorField& post, const DisplacementSet& disps,
                               const Image& moving, int x, int y);
double ensemble_entropy_brute(const PosteriorField& post, const DisplacementSet& disps,
                              const Image& moving, int x, int y);
double exceedance_brute(const PosteriorField& post, const DisplacementSet& disps,
                        const Image& moving, int x, int y, double threshold);
double label_probability_brute(const PosteriorField& post, const DisplacementSet& disps,
                               const LabelImage& labels, int x, int y, int label);
DisplacementMoments displacement_moments_brute(const PosteriorField& post,
                                               const DisplacementSet& disps,
                                               int x, int y);

/// Serial whole-field scalar pushforward variance (for the benchmark).
ScalarField pushforward_variance_serial(const PosteriorField& post,
                                        const DisplacementSet& disps,
                                        const Image& moving);

} // namespace ensreg::reference
