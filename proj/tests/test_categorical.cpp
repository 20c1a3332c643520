#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "ensreg/categorical.hpp"
#include "ensreg/synth.hpp"

using namespace ensreg;

namespace {

std::vector<Realization<double>> scalars(
    std::initializer_list<std::pair<double, double>> xs) {
    std::vector<Realization<double>> out;
    for (const auto& [v, w] : xs) out.push_back({v, w});
    return out;
}

} // namespace

TEST_CASE("aggregate merges equal values and sorts ascending") {
    const auto out = aggregate(scalars({{50, 0.1}, {50, 0.1}, {200, 0.3}, {50, 0.5}}));
    REQUIRE(out.size() == 2);
    CHECK(out[0].value == 50.0);
    CHECK(std::abs(out[0].weight - 0.7) <= 1e-12);
    CHECK(out[1].value == 200.0);
    CHECK(std::abs(out[1].weight - 0.3) <= 1e-12);
}

TEST_CASE("aggregate identity and all-equal cases") {
    const auto single = aggregate(scalars({{7, 1.0}}));
    REQUIRE(single.size() == 1);
    CHECK(single[0].value == 7.0);
    CHECK(single[0].weight == 1.0);

    const auto merged =
        aggregate(scalars({{3, 0.25}, {3, 0.25}, {3, 0.25}, {3, 0.25}}));
    REQUIRE(merged.size() == 1);
    CHECK(merged[0].value == 3.0);
    CHECK(merged[0].weight == 1.0);
}

TEST_CASE("aggregate drops zero weights and rejects negative ones") {
    const auto out = aggregate(scalars({{1, 0.0}, {2, 1.0}}));
    REQUIRE(out.size() == 1);
    CHECK(out[0].value == 2.0);
    CHECK_THROWS_AS(aggregate(scalars({{1, -0.1}, {2, 1.1}})),
                    invalid_distribution_error);
}

TEST_CASE("aggregate groups by the 6-decimal key") {
    const auto out = aggregate(scalars({{1.0000004, 0.5}, {1.0000001, 0.5}}));
    REQUIRE(out.size() == 1);
    // Representative is the first group member in sorted order.
    CHECK(out[0].value == 1.0000004);
    CHECK(out[0].weight == 1.0);

    const auto distinct = aggregate(scalars({{1.0, 0.5}, {1.00001, 0.5}}));
    CHECK(distinct.size() == 2);
}

TEST_CASE("aggregate is idempotent and preserves total weight") {
    NoiseGenerator gen(42);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<Realization<double>> xs;
        const int n = 1 + static_cast<int>(gen.next_u32() % 12);
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            const double v = 0.5 * static_cast<double>(gen.next_u32() % 10);
            const double w = gen.next_unit();
            xs.push_back({v, w});
            total += w;
        }
        for (auto& r : xs) r.weight /= total;

        const auto once = aggregate(xs);
        const auto twice = aggregate(once);
        REQUIRE(twice.size() == once.size());
        for (std::size_t i = 0; i < once.size(); ++i) {
            CHECK(twice[i].value == once[i].value);
            CHECK(twice[i].weight == once[i].weight);
        }
        double in_sum = 0.0, out_sum = 0.0;
        for (const auto& r : xs) in_sum += r.weight;
        for (const auto& r : once) out_sum += r.weight;
        CHECK(std::abs(in_sum - out_sum) <= 1e-12);
        CHECK(std::is_sorted(once.begin(), once.end(),
                             [](const auto& a, const auto& b) {
                                 return a.value < b.value;
                             }));
    }
}

TEST_CASE("entropy of a 4-outcome uniform distribution is 2 bits") {
    const std::vector<double> uniform{0.25, 0.25, 0.25, 0.25};
    CHECK(entropy(uniform) == 2.0);

    const std::vector<double> point{1.0, 0.0, 0.0};
    CHECK(entropy(point) == 0.0);

    const std::vector<double> half{0.5, 0.5};
    CHECK(entropy(half) == 1.0);
}

TEST_CASE("entropy rejects invalid distributions") {
    const std::vector<double> short_sum{0.5, 0.4};
    CHECK_THROWS_AS(entropy(short_sum), invalid_distribution_error);
    const std::vector<double> negative{1.5, -0.5};
    CHECK_THROWS_AS(entropy(negative), invalid_distribution_error);
}

TEST_CASE("entropy is permutation-invariant and maximal at uniform") {
    NoiseGenerator gen(7);
    for (int rep = 0; rep < 30; ++rep) {
        const int k = 2 + static_cast<int>(gen.next_u32() % 8);
        std::vector<double> p(k);
        double sum = 0.0;
        for (double& v : p) {
            v = 0.01 + gen.next_unit();
            sum += v;
        }
        for (double& v : p) v /= sum;

        std::vector<double> shuffled = p;
        for (int i = k - 1; i > 0; --i) {
            std::swap(shuffled[i], shuffled[gen.next_u32() % (i + 1)]);
        }
        CHECK(std::abs(entropy(p) - entropy(shuffled)) <= 1e-12);
        CHECK(entropy(p) <= std::log2(double(k)) + 1e-12);

        const std::vector<double> uniform(k, 1.0 / k);
        CHECK(std::abs(entropy(uniform) - std::log2(double(k))) <= 1e-12);
    }
}

TEST_CASE("weighted mean and variance on frozen examples") {
    const auto mv = weighted_mean_and_variance(scalars({{50, 0.7}, {200, 0.3}}));
    CHECK(std::abs(mv.mean - 95.0) <= 1e-9);
    CHECK(std::abs(mv.variance - 4725.0) <= 1e-9);

    const auto point = weighted_mean_and_variance(scalars({{3, 1.0}}));
    CHECK(point.mean == 3.0);
    CHECK(point.variance == 0.0);

    const auto sym = weighted_mean_and_variance(scalars({{0, 0.5}, {2, 0.5}}));
    CHECK(sym.mean == 1.0);
    CHECK(sym.variance == 1.0);

    CHECK_THROWS_AS(weighted_mean_and_variance(scalars({})), empty_cell_error);
}

TEST_CASE("aggregation does not change moments") {
    NoiseGenerator gen(19);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<Realization<double>> xs;
        const int n = 1 + static_cast<int>(gen.next_u32() % 10);
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            xs.push_back({0.5 * static_cast<double>(gen.next_u32() % 8),
                          0.01 + gen.next_unit()});
            total += xs.back().weight;
        }
        for (auto& r : xs) r.weight /= total;
        const auto before = weighted_mean_and_variance(xs);
        const auto after = weighted_mean_and_variance(aggregate(xs));
        CHECK(std::abs(before.mean - after.mean) <= 1e-9);
        CHECK(std::abs(before.variance - after.variance) <= 1e-9);
    }
}

TEST_CASE("weighted quantile follows the CDF steps") {
    const auto quarters =
        scalars({{1, 0.25}, {2, 0.25}, {3, 0.25}, {4, 0.25}});
    CHECK(weighted_quantile(quarters, 0.25) == 1.0);
    CHECK(weighted_quantile(quarters, 0.75) == 3.0);
    CHECK(weighted_quantile(quarters, 0.75) - weighted_quantile(quarters, 0.25) == 2.0);

    const auto point = scalars({{9, 1.0}});
    CHECK(weighted_quantile(point, 0.0) == 9.0);
    CHECK(weighted_quantile(point, 0.37) == 9.0);
    CHECK(weighted_quantile(point, 1.0) == 9.0);

    CHECK(weighted_quantile(scalars({{50, 0.7}, {200, 0.3}}), 0.5) == 50.0);

    CHECK_THROWS_AS(weighted_quantile(quarters, -0.1), invalid_argument_error);
    CHECK_THROWS_AS(weighted_quantile(quarters, 1.1), invalid_argument_error);
    CHECK_THROWS_AS(weighted_quantile(scalars({}), 0.5), empty_cell_error);
}

TEST_CASE("quantile endpoints are the minimum and maximum") {
    NoiseGenerator gen(23);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<Realization<double>> xs;
        const int n = 1 + static_cast<int>(gen.next_u32() % 9);
        double total = 0.0;
        double lo = 1e300, hi = -1e300;
        for (int i = 0; i < n; ++i) {
            const double v = gen.next_unit() * 10.0;
            xs.push_back({v, 0.01 + gen.next_unit()});
            total += xs.back().weight;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        for (auto& r : xs) r.weight /= total;
        CHECK(weighted_quantile(xs, 0.0) == lo);
        CHECK(weighted_quantile(xs, 1.0) == hi);
    }
}

TEST_CASE("vector aggregation orders lexicographically") {
    std::vector<Realization<Vec2>> xs{
        {{1.0, 0.0}, 0.25}, {{0.0, 1.0}, 0.25}, {{1.0, 0.0}, 0.25}, {{-1.0, 0.0}, 0.25}};
    const auto out = aggregate(xs);
    REQUIRE(out.size() == 3);
    CHECK(out[0].value == Vec2{-1.0, 0.0});
    CHECK(out[1].value == Vec2{0.0, 1.0});
    CHECK(out[2].value == Vec2{1.0, 0.0});
    CHECK(out[2].weight == 0.5);
}

TEST_CASE("label aggregation compares exactly") {
    std::vector<Realization<int>> xs{{1, 0.5}, {0, 0.25}, {1, 0.25}};
    const auto out = aggregate(xs);
    REQUIRE(out.size() == 2);
    CHECK(out[0].value == 0);
    CHECK(out[1].value == 1);
    CHECK(out[1].weight == 0.75);
}
