#pragma once

#include "ensreg/types.hpp"

namespace ensreg {

/// Pushforward of the transformation posterior through the moving-image
/// intensity lookup: per voxel v the realizations are
/// { (I_m(v + d_k), P_k(v)) } aggregated over equal intensities.
ScalarEnsembleField pushforward_scalar(const PosteriorField& post,
                                       const DisplacementSet& disps,
                                       const Image& moving);

/// Same pushforward with a label lookup instead of an intensity lookup.
LabelEnsembleField pushforward_label(const PosteriorField& post,
                                     const DisplacementSet& disps,
                                     const LabelImage& labels);

/// Pushforward through the identity lookup: realizations are the
/// displacement vectors themselves.
VectorEnsembleField pushforward_vector(const PosteriorField& post,
                                       const DisplacementSet& disps);

/// Most likely value of one aggregated cell; ties break on the smallest
/// value (lexicographic for vectors). Throws empty_cell_error.
double ensemble_mode_cell(std::span<const Realization<double>> cell);
int ensemble_mode_cell(std::span<const Realization<int>> cell);
Vec2 ensemble_mode_cell(std::span<const Realization<Vec2>> cell);

/// Per-voxel most likely intensity of a scalar ensemble.
ScalarField ensemble_mode_map(const ScalarEnsembleField& field);

/// Per-voxel most likely label of a label ensemble.
LabelImage ensemble_mode_labels(const LabelEnsembleField& field);

/// Per-voxel variance of the value distribution of a scalar ensemble.
ScalarField ensemble_variance_map(const ScalarEnsembleField& field);

/// Per-voxel Shannon entropy (bits) of the aggregated weights.
ScalarField ensemble_entropy_map(const ScalarEnsembleField& field);
ScalarField ensemble_entropy_map(const LabelEnsembleField& field);
ScalarField ensemble_entropy_map(const VectorEnsembleField& field);

/// 0/1 indicator: 1 where the most likely ensemble intensity differs (under
/// the aggregation key) from the intensity selected by the posterior mode.
ScalarField mode_mismatch_map(const PosteriorField& post,
                              const DisplacementSet& disps, const Image& moving);

/// Per-voxel total weight carried by `label`.
ScalarField label_probability_map(const LabelEnsembleField& field, int label);

/// Per-voxel probability that the ensemble value is >= threshold.
ScalarField exceedance_map(const ScalarEnsembleField& field, double threshold);

} // namespace ensreg
