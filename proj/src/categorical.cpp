#include "ensreg/categorical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ensreg {

std::int64_t scalar_aggregation_key(double v) {
    return static_cast<std::int64_t>(std::llround(v * 1e6));
}

namespace {

struct ScalarKey {
    std::int64_t k;
    bool operator==(const ScalarKey&) const = default;
    bool operator<(const ScalarKey& o) const { return k < o.k; }
};

struct LabelKey {
    int k;
    bool operator==(const LabelKey&) const = default;
    bool operator<(const LabelKey& o) const { return k < o.k; }
};

struct VectorKey {
    std::int64_t kx, ky;
    bool operator==(const VectorKey&) const = default;
    bool operator<(const VectorKey& o) const {
        return kx != o.kx ? kx < o.kx : ky < o.ky;
    }
};

ScalarKey key_of(double v) { return {scalar_aggregation_key(v)}; }
LabelKey key_of(int v) { return {v}; }
VectorKey key_of(const Vec2& v) {
    return {scalar_aggregation_key(v[0]), scalar_aggregation_key(v[1])};
}

template <typename V>
std::vector<Realization<V>> aggregate_impl(std::vector<Realization<V>>&& xs) {
    for (const auto& r : xs) {
        if (r.weight < 0.0) {
            throw invalid_distribution_error("realization weight is negative");
        }
    }
    // Stable sort by key keeps the within-group summation order fixed.
    std::stable_sort(xs.begin(), xs.end(),
                     [](const Realization<V>& a, const Realization<V>& b) {
                         return key_of(a.value) < key_of(b.value);
                     });
    std::vector<Realization<V>> out;
    out.reserve(xs.size());
    std::size_t i = 0;
    while (i < xs.size()) {
        Realization<V> merged = xs[i];
        std::size_t j = i + 1;
        while (j < xs.size() && key_of(xs[j].value) == key_of(xs[i].value)) {
            merged.weight += xs[j].weight;
            ++j;
        }
        if (merged.weight > 0.0) {
            out.push_back(merged);
        }
        i = j;
    }
    return out;
}

} // namespace

std::vector<Realization<double>> aggregate(std::vector<Realization<double>> xs) {
    return aggregate_impl(std::move(xs));
}
std::vector<Realization<int>> aggregate(std::vector<Realization<int>> xs) {
    return aggregate_impl(std::move(xs));
}
std::vector<Realization<Vec2>> aggregate(std::vector<Realization<Vec2>> xs) {
    return aggregate_impl(std::move(xs));
}

double entropy(std::span<const double> probs) {
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0) {
            throw invalid_distribution_error("probability is negative");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw invalid_distribution_error("distribution does not sum to 1, sum = " +
                                         std::to_string(sum));
    }
    double h = 0.0;
    for (double p : probs) {
        if (p > 0.0) {
            h -= p * std::log2(p);
        }
    }
    return h;
}

MeanVariance weighted_mean_and_variance(std::span<const Realization<double>> xs) {
    if (xs.empty()) {
        throw empty_cell_error("cannot take moments of an empty realization list");
    }
    double mean = 0.0;
    for (const auto& r : xs) {
        if (r.weight < 0.0) {
            throw invalid_distribution_error("realization weight is negative");
        }
        mean += r.weight * r.value;
    }
    double var = 0.0;
    for (const auto& r : xs) {
        const double d = r.value - mean;
        var += r.weight * d * d;
    }
    return {mean, var};
}

double weighted_quantile(std::span<const Realization<double>> xs, double q) {
    if (!(q >= 0.0 && q <= 1.0)) {
        throw invalid_argument_error("quantile level must lie in [0, 1]");
    }
    if (xs.empty()) {
        throw empty_cell_error("cannot take a quantile of an empty realization list");
    }
    std::vector<Realization<double>> sorted(xs.begin(), xs.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Realization<double>& a, const Realization<double>& b) {
                         return a.value < b.value;
                     });
    double cum = 0.0;
    for (const auto& r : sorted) {
        if (r.weight < 0.0) {
            throw invalid_distribution_error("realization weight is negative");
        }
        cum += r.weight;
        if (cum >= q) {
            return r.value;
        }
    }
    // Total weight fell short of q by rounding; the maximum is the answer.
    return sorted.back().value;
}

} // namespace ensreg
