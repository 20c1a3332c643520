#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ensreg/types.hpp"

namespace ensreg {

/// Aggregation key for scalar values: 6-decimal rounding makes float
/// aggregation deterministic. Labels and integer vectors compare exactly.
std::int64_t scalar_aggregation_key(double v);

/// Merges realizations whose values are equal under the aggregation key by
/// summing their weights. Zero-weight entries are dropped and the output is
/// sorted by value ascending (lexicographic for vectors). The merged value is
/// the first group member in sorted order; total weight is preserved.
/// Throws invalid_distribution_error on a negative weight.
std::vector<Realization<double>> aggregate(std::vector<Realization<double>> xs);
std::vector<Realization<int>> aggregate(std::vector<Realization<int>> xs);
std::vector<Realization<Vec2>> aggregate(std::vector<Realization<Vec2>> xs);

/// Shannon entropy in bits, with 0 * log2(0) := 0.
/// Throws invalid_distribution_error unless probs are non-negative and sum
/// to 1 within 1e-9.
double entropy(std::span<const double> probs);

struct MeanVariance {
    double mean = 0.0;
    double variance = 0.0; // population variance; weights are probabilities
};

/// mean = sum w*v, variance = sum w*(v - mean)^2 over an aggregated
/// (unity-sum) distribution. Throws empty_cell_error on an empty list.
MeanVariance weighted_mean_and_variance(std::span<const Realization<double>> xs);

/// Step-function quantile: the smallest value whose cumulative weight
/// (values ascending) reaches q. Throws invalid_argument_error for q outside
/// [0, 1] and empty_cell_error on an empty list.
double weighted_quantile(std::span<const Realization<double>> xs, double q);

} // namespace ensreg
