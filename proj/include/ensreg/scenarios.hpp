#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ensreg/types.hpp"

namespace ensreg {

/// Outcome of one scenario run: named scalar metrics (insertion-ordered) and
/// the files written under the output directory.
struct ScenarioReport {
    std::string name;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::string> artifacts;

    void add_metric(std::string key, double value) {
        metrics.emplace_back(std::move(key), value);
    }
    double metric(std::string_view key) const;
    bool has_metric(std::string_view key) const;
};

/// Single-voxel counterexample: the intensity of the most likely
/// transformation (200) is not the most likely intensity (50).
ScenarioReport scenario_correctness(const std::filesystem::path& out_dir,
                                    std::uint32_t seed = 0);

/// Single-voxel counterexample: transformation entropy of 2 bits with a
/// single possible intensity, so zero registration uncertainty.
ScenarioReport scenario_usefulness(const std::filesystem::path& out_dir,
                                   std::uint32_t seed = 0);

/// Registers a circle to an ellipse with 121 displacement vectors and
/// compares transformation entropy against ensemble intensity variance in a
/// center disk and in a band around the ellipse boundary.
ScenarioReport scenario_circle_ellipse(const std::filesystem::path& out_dir,
                                       std::uint32_t seed = 0);

/// Propagates a binary blob label through the posterior and reports the
/// label probability inside and outside the true target region.
ScenarioReport scenario_label_propagation(const std::filesystem::path& out_dir,
                                          std::uint32_t seed = 0);

/// Registers a synthetically distorted tumor image, thresholds the scalar
/// ensemble and extracts exceedance iso-contours as possible boundaries.
ScenarioReport scenario_distortion(const std::filesystem::path& out_dir,
                                   std::uint32_t seed = 7);

/// Dispatch by scenario name: correctness, usefulness, circle_ellipse,
/// label_propagation, distortion. Throws invalid_argument_error for an
/// unknown name.
ScenarioReport run_scenario(std::string_view name,
                            const std::filesystem::path& out_dir,
                            std::uint32_t seed);

/// Names accepted by run_scenario.
const std::vector<std::string>& scenario_names();

} // namespace ensreg
