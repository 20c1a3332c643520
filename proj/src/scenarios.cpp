#include "ensreg/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ensreg/categorical.hpp"
#include "ensreg/contour.hpp"
#include "ensreg/csv.hpp"
#include "ensreg/ensemble.hpp"
#include "ensreg/image_io.hpp"
#include "ensreg/interpret.hpp"
#include "ensreg/rwir.hpp"
#include "ensreg/synth.hpp"
#include "fs_util.hpp"

namespace ensreg {

double ScenarioReport::metric(std::string_view key) const {
    for (const auto& [k, v] : metrics) {
        if (k == key) return v;
    }
    throw invalid_argument_error("scenario report has no metric named '" +
                                 std::string(key) + "'");
}

bool ScenarioReport::has_metric(std::string_view key) const {
    for (const auto& [k, v] : metrics) {
        if (k == key) return true;
    }
    return false;
}

namespace {

namespace fs = std::filesystem;

void write_report_csv(ScenarioReport& report, const fs::path& out_dir) {
    std::string out = "metric,value\n";
    for (const auto& [k, v] : report.metrics) {
        out += k + "," + csv_real(v) + "\n";
    }
    const fs::path path = out_dir / "report.csv";
    detail::write_file_atomic(path, out);
    report.artifacts.push_back(path.string());
}

fs::path prepare_out_dir(const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw io_error("cannot create output directory " + out_dir.string() + ": " +
                       ec.message());
    }
    return out_dir;
}

// Mean of a scalar field over the voxels selected by `mask`.
double masked_mean(const ScalarField& field, const std::vector<bool>& mask) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        if (mask[i]) {
            sum += field.values[i];
            ++count;
        }
    }
    if (count == 0) throw invalid_argument_error("empty region mask");
    return sum / static_cast<double>(count);
}

// Euclidean distance from every voxel to the nearest boundary pixel of the
// foreground mask (a pixel of the set adjacent to a non-member).
std::vector<double> distance_to_boundary(const std::vector<bool>& fg, int w, int h) {
    std::vector<std::pair<int, int>> boundary;
    auto at = [&](int x, int y) { return fg[static_cast<std::size_t>(y) * w + x]; };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!at(x, y)) continue;
            const bool edge = (x == 0 || !at(x - 1, y)) || (x + 1 >= w || !at(x + 1, y)) ||
                              (y == 0 || !at(x, y - 1)) || (y + 1 >= h || !at(x, y + 1));
            if (edge) boundary.emplace_back(x, y);
        }
    }
    std::vector<double> dist(static_cast<std::size_t>(w) * h,
                             std::numeric_limits<double>::infinity());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& [bx, by] : boundary) {
                const double dx = x - bx;
                const double dy = y - by;
                best = std::min(best, dx * dx + dy * dy);
            }
            dist[static_cast<std::size_t>(y) * w + x] = std::sqrt(best);
        }
    }
    return dist;
}

// The section-2.1 figure setting: eight displacement vectors, one of which
// (d_3, 1-based) lands on intensity 200 while the other seven land on 50.
struct HypotheticalVoxel {
    DisplacementSet disps;
    Image moving;
    PosteriorField posterior;
    int center_x = 1;
    int center_y = 1;
};

HypotheticalVoxel make_correctness_setting() {
    HypotheticalVoxel s;
    s.disps.vectors = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0},
                       {1, 0},   {-1, 1}, {0, 1},  {1, 1}};
    s.moving = Image(3, 3, 50.0);
    // d_3 = (1, -1) from the center voxel (1, 1) lands on (2, 0).
    s.moving.at(2, 0) = 200.0;
    const std::vector<double> probs{0.1, 0.1, 0.3, 0.1, 0.1, 0.1, 0.1, 0.1};
    s.posterior = PosteriorField(3, 3, 8);
    for (int y = 0; y < 3; ++y) {
        for (int x = 0; x < 3; ++x) {
            std::copy(probs.begin(), probs.end(), s.posterior.at(x, y).begin());
        }
    }
    return s;
}

HypotheticalVoxel make_usefulness_setting() {
    HypotheticalVoxel s;
    s.disps.vectors = {{0, -1}, {-1, 0}, {1, 0}, {0, 1}};
    s.moving = Image(3, 3, 100.0);
    s.posterior = PosteriorField(3, 3, 4, 0.25);
    return s;
}

ScenarioReport report_hypothetical(const std::string& name,
                                   const HypotheticalVoxel& s,
                                   const fs::path& out_dir, std::uint32_t seed) {
    prepare_out_dir(out_dir);
    ScenarioReport report;
    report.name = name;

    const int cx = s.center_x;
    const int cy = s.center_y;
    validate(s.posterior);
    const ScalarEnsembleField ensemble = pushforward_scalar(s.posterior, s.disps, s.moving);
    validate(ensemble);
    const DisplacementField mode_field = mode_transformation(s.posterior, s.disps);
    const ScalarField mismatch = mode_mismatch_map(s.posterior, s.disps, s.moving);

    const auto probs = s.posterior.at(cx, cy);
    int mode_k = 0;
    for (int k = 1; k < s.posterior.num_displacements; ++k) {
        if (probs[k] > probs[mode_k]) mode_k = k;
    }
    const Displacement dm = mode_field.at(cx, cy);
    const double intensity_of_mode = s.moving.at_clamped(cx + dm.dx, cy + dm.dy);
    const auto& cell = ensemble.cell(cx, cy);
    const MeanVariance mv = weighted_mean_and_variance(cell);
    std::vector<double> weights;
    for (const auto& r : cell) weights.push_back(r.weight);

    report.add_metric("seed", seed);
    report.add_metric("mode_index", mode_k + 1); // 1-based, matching d_k naming
    report.add_metric("I_of_mode", intensity_of_mode);
    report.add_metric("ensemble_mode",
                      ensemble_mode_cell(std::span<const Realization<double>>(cell)));
    report.add_metric("mismatch", mismatch.at(cx, cy));
    report.add_metric("transformation_entropy", entropy(probs));
    report.add_metric("intensity_entropy", entropy(weights));
    report.add_metric("intensity_variance", mv.variance);

    const fs::path posterior_path = out_dir / "posterior.csv";
    write_csv(s.posterior, posterior_path);
    report.artifacts.push_back(posterior_path.string());
    const fs::path ensemble_path = out_dir / "ensemble.csv";
    write_csv(ensemble, ensemble_path);
    report.artifacts.push_back(ensemble_path.string());
    write_report_csv(report, out_dir);
    return report;
}

} // namespace

ScenarioReport scenario_correctness(const fs::path& out_dir, std::uint32_t seed) {
    return report_hypothetical("correctness", make_correctness_setting(), out_dir, seed);
}

ScenarioReport scenario_usefulness(const fs::path& out_dir, std::uint32_t seed) {
    return report_hypothetical("usefulness", make_usefulness_setting(), out_dir, seed);
}

ScenarioReport scenario_circle_ellipse(const fs::path& out_dir, std::uint32_t seed) {
    prepare_out_dir(out_dir);
    ScenarioReport report;
    report.name = "circle_ellipse";

    const int size = 64;
    const double cx = (size - 1) / 2.0;
    const double cy = (size - 1) / 2.0;
    const double circle_radius = 15.0;
    const double ellipse_a = 20.0;
    const double ellipse_b = 12.0;
    const double fg = 200.0;
    const double bg = 50.0;

    const Image fixed =
        gaussian_blur(make_filled_ellipse(size, size, cx, cy, ellipse_a, ellipse_b, fg, bg), 1.0);
    const Image moving =
        gaussian_blur(make_filled_circle(size, size, cx, cy, circle_radius, fg, bg), 1.0);

    const DisplacementSet disps = make_grid_displacement_set(5); // K = 121
    const RwirConfig cfg; // engine defaults
    const PosteriorField posterior = register_images(fixed, moving, disps, cfg);
    validate(posterior);

    const ScalarField entropy = entropy_map(posterior);
    const ScalarEnsembleField ensemble = pushforward_scalar(posterior, disps, moving);
    validate(ensemble);
    const ScalarField variance = ensemble_variance_map(ensemble);
    const Image registered = warp_by_mode(moving, mode_transformation(posterior, disps));

    // Regions: a 5-px disk at the image center, and a 3-px band around the
    // boundary of the unsmoothed ellipse mask.
    const std::size_t n = static_cast<std::size_t>(size) * size;
    std::vector<bool> ellipse_mask(n, false);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double ex = (x - cx) / ellipse_a;
            const double ey = (y - cy) / ellipse_b;
            ellipse_mask[static_cast<std::size_t>(y) * size + x] = ex * ex + ey * ey <= 1.0;
        }
    }
    const std::vector<double> boundary_dist = distance_to_boundary(ellipse_mask, size, size);
    std::vector<bool> center_disk(n, false), edge_band(n, false);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * size + x;
            const double dx = x - cx;
            const double dy = y - cy;
            center_disk[i] = dx * dx + dy * dy <= 5.0 * 5.0;
            edge_band[i] = boundary_dist[i] <= 3.0;
        }
    }

    // Top decile of ensemble intensity variance.
    std::vector<double> sorted_var = variance.values;
    std::sort(sorted_var.begin(), sorted_var.end());
    const double decile_threshold = sorted_var[static_cast<std::size_t>(0.9 * (n - 1))];
    std::size_t top_count = 0, top_near_edge = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (variance.values[i] >= decile_threshold && variance.values[i] > 0.0) {
            ++top_count;
            if (boundary_dist[i] <= 3.0) ++top_near_edge;
        }
    }

    report.add_metric("seed", seed);
    report.add_metric("num_displacements", disps.size());
    report.add_metric("center_transformation_entropy", masked_mean(entropy, center_disk));
    report.add_metric("edge_band_transformation_entropy", masked_mean(entropy, edge_band));
    report.add_metric("center_intensity_variance", masked_mean(variance, center_disk));
    report.add_metric("edge_band_intensity_variance", masked_mean(variance, edge_band));
    report.add_metric("top_decile_variance_threshold", decile_threshold);
    report.add_metric("top_decile_count", static_cast<double>(top_count));
    report.add_metric("top_decile_near_edge_fraction",
                      top_count == 0 ? 0.0
                                     : static_cast<double>(top_near_edge) /
                                           static_cast<double>(top_count));

    auto save_pgm = [&](const Image& img, const char* file) {
        const fs::path p = out_dir / file;
        write_pgm(img, p);
        report.artifacts.push_back(p.string());
    };
    auto save_map = [&](const ScalarField& map, const char* stem) {
        const fs::path csv_path = out_dir / (std::string(stem) + ".csv");
        write_csv(map, csv_path);
        report.artifacts.push_back(csv_path.string());
        const double lo = *std::min_element(map.values.begin(), map.values.end());
        double hi = *std::max_element(map.values.begin(), map.values.end());
        if (!(hi > lo)) hi = lo + 1.0;
        const fs::path ppm_path = out_dir / (std::string(stem) + ".ppm");
        write_ppm_heatmap(map, ppm_path, lo, hi);
        report.artifacts.push_back(ppm_path.string());
    };
    save_pgm(fixed, "fixed.pgm");
    save_pgm(moving, "moving.pgm");
    save_pgm(registered, "registered.pgm");
    save_map(entropy, "transformation_entropy");
    save_map(variance, "intensity_variance");
    write_report_csv(report, out_dir);
    return report;
}

ScenarioReport scenario_label_propagation(const fs::path& out_dir, std::uint32_t seed) {
    prepare_out_dir(out_dir);
    ScenarioReport report;
    report.name = "label_propagation";

    const int size = 64;
    const double fg = 200.0;
    const double bg = 50.0;
    // Moving blob carries the label; the fixed blob is translated by (2, 1)
    // and grown by one pixel of radius.
    const double moving_cx = 30.0, moving_cy = 31.0, moving_r = 8.0;
    const double fixed_cx = 32.0, fixed_cy = 32.0, fixed_r = 9.0;

    const Image moving =
        gaussian_blur(make_filled_circle(size, size, moving_cx, moving_cy, moving_r, fg, bg), 1.0);
    const Image fixed =
        gaussian_blur(make_filled_circle(size, size, fixed_cx, fixed_cy, fixed_r, fg, bg), 1.0);
    const LabelImage labels = make_circle_label(size, size, moving_cx, moving_cy, moving_r);

    const DisplacementSet disps = make_grid_displacement_set(4); // K = 81
    const RwirConfig cfg;
    const PosteriorField posterior = register_images(fixed, moving, disps, cfg);
    validate(posterior);
    const LabelEnsembleField ensemble = pushforward_label(posterior, disps, labels);
    validate(ensemble);
    const ScalarField prob = label_probability_map(ensemble, 1);

    const std::size_t n = static_cast<std::size_t>(size) * size;
    std::vector<bool> target(n, false), outside(n, false);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double dx = x - fixed_cx;
            const double dy = y - fixed_cy;
            const bool in = dx * dx + dy * dy <= fixed_r * fixed_r;
            target[static_cast<std::size_t>(y) * size + x] = in;
            outside[static_cast<std::size_t>(y) * size + x] = !in;
        }
    }

    report.add_metric("seed", seed);
    report.add_metric("num_displacements", disps.size());
    report.add_metric("inside_mean_probability", masked_mean(prob, target));
    report.add_metric("outside_mean_probability", masked_mean(prob, outside));
    double lo = 0.0, hi = 1.0;
    const fs::path prob_csv = out_dir / "label_prob.csv";
    write_csv(prob, prob_csv);
    report.artifacts.push_back(prob_csv.string());
    const fs::path prob_ppm = out_dir / "label_prob.ppm";
    write_ppm_heatmap(prob, prob_ppm, lo, hi);
    report.artifacts.push_back(prob_ppm.string());

    const fs::path fixed_path = out_dir / "fixed.pgm";
    write_pgm(fixed, fixed_path);
    report.artifacts.push_back(fixed_path.string());
    const fs::path moving_path = out_dir / "moving.pgm";
    write_pgm(moving, moving_path);
    report.artifacts.push_back(moving_path.string());
    Image label_img(size, size);
    for (std::size_t i = 0; i < n; ++i) label_img.pixels[i] = labels.labels[i];
    const fs::path labels_path = out_dir / "labels.pgm";
    write_pgm(label_img, labels_path);
    report.artifacts.push_back(labels_path.string());

    write_report_csv(report, out_dir);
    return report;
}

ScenarioReport scenario_distortion(const fs::path& out_dir, std::uint32_t seed) {
    prepare_out_dir(out_dir);
    ScenarioReport report;
    report.name = "distortion";

    const int size = 64;
    const double tumor_cx = (size - 1) / 2.0;
    const double tumor_cy = (size - 1) / 2.0;
    const double tumor_r = 10.0;
    const double fg = 200.0;
    const double bg = 50.0;
    const double threshold = 0.5 * (fg + bg); // 125

    // Bright "tumor" on a textured background, then a smooth synthetic
    // distortion produces the fixed image.
    Image moving = make_filled_circle(size, size, tumor_cx, tumor_cy, tumor_r, fg, bg);
    const Image noise = make_value_noise(size, size, 25.0, 1.5, seed);
    for (std::size_t i = 0; i < moving.pixels.size(); ++i) {
        moving.pixels[i] += noise.pixels[i];
    }
    moving = gaussian_blur(moving, 1.0);
    const Image fixed = warp_sinusoidal(moving, 2.0, 32.0);

    const DisplacementSet disps = make_grid_displacement_set(3); // K = 49
    const RwirConfig cfg;
    const PosteriorField posterior = register_images(fixed, moving, disps, cfg);
    validate(posterior);
    const ScalarEnsembleField ensemble = pushforward_scalar(posterior, disps, moving);
    validate(ensemble);
    const ScalarField exceedance = exceedance_map(ensemble, threshold);

    const std::vector<double> levels{0.05, 0.5, 0.95};
    std::vector<ContourSet> contour_sets;
    for (double level : levels) {
        contour_sets.push_back(iso_contours(exceedance, level));
    }

    report.add_metric("seed", seed);
    report.add_metric("num_displacements", disps.size());
    report.add_metric("threshold", threshold);
    const char* level_tags[] = {"l05", "l50", "l95"};
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const ContourSet& set = contour_sets[i];
        report.add_metric(std::string("contour_count_") + level_tags[i],
                          static_cast<double>(set.contours.size()));
        // A closed contour encircling the tumor: closed, and its centroid
        // lies near the tumor center.
        double around = 0.0;
        for (const Contour& c : set.contours) {
            if (!c.closed) continue;
            double sx = 0.0, sy = 0.0;
            for (const Vec2& p : c.points) {
                sx += p[0];
                sy += p[1];
            }
            sx /= static_cast<double>(c.points.size());
            sy /= static_cast<double>(c.points.size());
            if (std::hypot(sx - tumor_cx, sy - tumor_cy) <= 3.0) around = 1.0;
        }
        report.add_metric(std::string("closed_around_tumor_") + level_tags[i], around);
    }
    report.add_metric("hausdorff_05_95",
                      hausdorff_distance(contour_sets.front(), contour_sets.back()));
    report.add_metric("hausdorff_50_50",
                      hausdorff_distance(contour_sets[1], contour_sets[1]));

    const fs::path fixed_path = out_dir / "fixed.pgm";
    write_pgm(fixed, fixed_path);
    report.artifacts.push_back(fixed_path.string());
    const fs::path moving_path = out_dir / "moving.pgm";
    write_pgm(moving, moving_path);
    report.artifacts.push_back(moving_path.string());
    const fs::path exceed_csv = out_dir / "exceedance.csv";
    write_csv(exceedance, exceed_csv);
    report.artifacts.push_back(exceed_csv.string());
    const fs::path exceed_ppm = out_dir / "exceedance.ppm";
    write_ppm_heatmap(exceedance, exceed_ppm, 0.0, 1.0);
    report.artifacts.push_back(exceed_ppm.string());
    const fs::path contours_path = out_dir / "contours.csv";
    write_contours_csv(contour_sets, contours_path);
    report.artifacts.push_back(contours_path.string());
    const fs::path overlay_path = out_dir / "overlay.ppm";
    write_ppm_heatmap_with_contours(exceedance, contour_sets, overlay_path, 0.0, 1.0);
    report.artifacts.push_back(overlay_path.string());

    write_report_csv(report, out_dir);
    return report;
}

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{
        "correctness", "usefulness", "circle_ellipse", "label_propagation",
        "distortion"};
    return names;
}

ScenarioReport run_scenario(std::string_view name, const fs::path& out_dir,
                            std::uint32_t seed) {
    if (name == "correctness") return scenario_correctness(out_dir, seed);
    if (name == "usefulness") return scenario_usefulness(out_dir, seed);
    if (name == "circle_ellipse") return scenario_circle_ellipse(out_dir, seed);
    if (name == "label_propagation") return scenario_label_propagation(out_dir, seed);
    if (name == "distortion") return scenario_distortion(out_dir, seed);
    throw invalid_argument_error("unknown scenario '" + std::string(name) + "'");
}

} // namespace ensreg
