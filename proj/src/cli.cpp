#include "ensreg/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "ensreg/contour.hpp"
#include "ensreg/csv.hpp"
#include "ensreg/ensemble.hpp"
#include "ensreg/image_io.hpp"
#include "ensreg/interpret.hpp"
#include "ensreg/rwir.hpp"
#include "ensreg/scenarios.hpp"
#include "ensreg/types.hpp"

namespace ensreg {

namespace {

namespace fs = std::filesystem;

struct CliConfig {
    std::string fixed_path;
    std::string moving_path;
    std::string labels_path;
    std::string input_path; // positional posterior/ensemble CSV
    std::string out_dir = ".";
    int grid_radius = 2;
    double threshold = 0.0;
    std::string levels = "0.05,0.5,0.95";
    std::string scenario;
    std::uint32_t seed = 7;
    RwirConfig rwir;
};

std::vector<double> parse_levels(const std::string& csv) {
    std::vector<double> levels;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t consumed = 0;
        const double v = std::stod(item, &consumed);
        if (consumed != item.size()) {
            throw invalid_argument_error("malformed --levels entry '" + item + "'");
        }
        levels.push_back(v);
    }
    if (levels.empty()) {
        throw invalid_argument_error("--levels must name at least one level");
    }
    return levels;
}

fs::path ensure_out_dir(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) {
        throw io_error("cannot create output directory " + dir + ": " + ec.message());
    }
    return p;
}

void add_rwir_flags(CLI::App* cmd, CliConfig& cfg) {
    cmd->add_option("--grid-radius", cfg.grid_radius,
                    "Displacement grid radius r; K = (2r+1)^2, row-major (dy, dx) order");
    cmd->add_option("--patch-radius", cfg.rwir.patch_radius, "Similarity patch radius");
    cmd->add_option("--sigma", cfg.rwir.sigma, "Likelihood temperature");
    cmd->add_option("--gamma", cfg.rwir.gamma, "Regularization strength");
    cmd->add_option("--beta-g", cfg.rwir.beta_g, "Edge-weight contrast sensitivity");
}

void save_scalar_map(const ScalarField& map, const fs::path& out_dir,
                     const std::string& stem) {
    write_csv(map, out_dir / (stem + ".csv"));
    double lo = *std::min_element(map.values.begin(), map.values.end());
    double hi = *std::max_element(map.values.begin(), map.values.end());
    if (!(hi > lo)) hi = lo + 1.0;
    write_ppm_heatmap(map, out_dir / (stem + ".ppm"), lo, hi);
}

int cmd_register(const CliConfig& cfg) {
    const Image fixed = read_pgm(cfg.fixed_path);
    const Image moving = read_pgm(cfg.moving_path);
    const DisplacementSet disps = make_grid_displacement_set(cfg.grid_radius);
    const PosteriorField posterior = register_images(fixed, moving, disps, cfg.rwir);
    const fs::path out = ensure_out_dir(cfg.out_dir);
    write_csv(posterior, out / "posterior.csv");
    write_pgm(warp_by_mode(moving, mode_transformation(posterior, disps)),
              out / "registered.pgm");
    return 0;
}

int cmd_stats(const CliConfig& cfg) {
    const PosteriorField posterior = read_posterior_csv(cfg.input_path);
    const DisplacementSet disps = make_grid_displacement_set(cfg.grid_radius);
    if (disps.size() != posterior.num_displacements) {
        throw invalid_argument_error(
            "--grid-radius " + std::to_string(cfg.grid_radius) + " implies K = " +
            std::to_string(disps.size()) + " but the posterior stores K = " +
            std::to_string(posterior.num_displacements));
    }
    const fs::path out = ensure_out_dir(cfg.out_dir);

    save_scalar_map(entropy_map(posterior), out, "entropy");
    save_scalar_map(covariance_frobenius_map(posterior, disps), out, "frobenius");

    const MomentsField moments = displacement_moments(posterior, disps);
    ScalarField var_x(posterior.width, posterior.height);
    ScalarField var_y(posterior.width, posterior.height);
    for (std::size_t i = 0; i < moments.values.size(); ++i) {
        var_x.values[i] = moments.values[i].covariance[0];
        var_y.values[i] = moments.values[i].covariance[3];
    }
    save_scalar_map(var_x, out, "variance_x");
    save_scalar_map(var_y, out, "variance_y");

    const Vec2Field iqr = displacement_iqr_map(posterior, disps);
    ScalarField iqr_x(posterior.width, posterior.height);
    ScalarField iqr_y(posterior.width, posterior.height);
    for (std::size_t i = 0; i < iqr.values.size(); ++i) {
        iqr_x.values[i] = iqr.values[i][0];
        iqr_y.values[i] = iqr.values[i][1];
    }
    save_scalar_map(iqr_x, out, "iqr_x");
    save_scalar_map(iqr_y, out, "iqr_y");
    return 0;
}

int cmd_push(const CliConfig& cfg) {
    const PosteriorField posterior = read_posterior_csv(cfg.input_path);
    const Image moving = read_pgm(cfg.moving_path);
    const DisplacementSet disps = make_grid_displacement_set(cfg.grid_radius);
    if (disps.size() != posterior.num_displacements) {
        throw invalid_argument_error(
            "--grid-radius implies K = " + std::to_string(disps.size()) +
            " but the posterior stores K = " +
            std::to_string(posterior.num_displacements));
    }
    const fs::path out = ensure_out_dir(cfg.out_dir);

    const ScalarEnsembleField ensemble = pushforward_scalar(posterior, disps, moving);
    write_csv(ensemble, out / "ensemble.csv");
    save_scalar_map(ensemble_variance_map(ensemble), out, "variance");
    const ScalarField mode_map = ensemble_mode_map(ensemble);
    Image mode_img(mode_map.width, mode_map.height);
    mode_img.pixels = mode_map.values;
    write_pgm(mode_img, out / "mode.pgm");
    const ScalarField mismatch = mode_mismatch_map(posterior, disps, moving);
    write_csv(mismatch, out / "mismatch.csv");
    Image mismatch_img(mismatch.width, mismatch.height);
    for (std::size_t i = 0; i < mismatch.values.size(); ++i) {
        mismatch_img.pixels[i] = mismatch.values[i] * 255.0;
    }
    write_pgm(mismatch_img, out / "mismatch.pgm");

    if (!cfg.labels_path.empty()) {
        const LabelImage labels = to_label_image(read_pgm(cfg.labels_path));
        const LabelEnsembleField label_ens = pushforward_label(posterior, disps, labels);
        write_csv(label_ens, out / "label_ensemble.csv");
        std::set<int> distinct(labels.labels.begin(), labels.labels.end());
        for (int label : distinct) {
            if (label == 0) continue;
            const ScalarField prob = label_probability_map(label_ens, label);
            write_csv(prob, out / ("label_prob_" + std::to_string(label) + ".csv"));
            write_ppm_heatmap(prob, out / ("label_prob_" + std::to_string(label) + ".ppm"),
                              0.0, 1.0);
        }
    }
    return 0;
}

int cmd_contour(const CliConfig& cfg) {
    const ScalarEnsembleField ensemble = read_scalar_ensemble_csv(cfg.input_path);
    const std::vector<double> levels = parse_levels(cfg.levels);
    const fs::path out = ensure_out_dir(cfg.out_dir);

    const ScalarField exceedance = exceedance_map(ensemble, cfg.threshold);
    write_csv(exceedance, out / "exceedance.csv");
    write_ppm_heatmap(exceedance, out / "exceedance.ppm", 0.0, 1.0);
    std::vector<ContourSet> sets;
    for (double level : levels) {
        sets.push_back(iso_contours(exceedance, level));
    }
    write_contours_csv(sets, out / "contours.csv");
    write_ppm_heatmap_with_contours(exceedance, sets, out / "overlay.ppm", 0.0, 1.0);
    return 0;
}

int cmd_scenario(const CliConfig& cfg) {
    run_scenario(cfg.scenario, ensure_out_dir(cfg.out_dir), cfg.seed);
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Discrete probabilistic registration with ensemble-field "
                 "uncertainty maps"};
    app.require_subcommand(1);
    CliConfig cfg;

    CLI::App* reg = app.add_subcommand(
        "register", "Register two PGM images; writes posterior.csv and registered.pgm");
    reg->add_option("--fixed", cfg.fixed_path, "Fixed image (PGM)")->required();
    reg->add_option("--moving", cfg.moving_path, "Moving image (PGM)")->required();
    reg->add_option("--out", cfg.out_dir, "Output directory")->required();
    add_rwir_flags(reg, cfg);

    CLI::App* stats = app.add_subcommand(
        "stats", "Summary-statistic uncertainty maps of a stored posterior");
    stats->add_option("posterior", cfg.input_path, "Posterior CSV from 'register'")
        ->required();
    stats->add_option("--out", cfg.out_dir, "Output directory")->required();
    stats->add_option("--grid-radius", cfg.grid_radius,
                      "Displacement grid radius used at registration time");

    CLI::App* push = app.add_subcommand(
        "push", "Push a posterior through intensity (and label) lookups");
    push->add_option("posterior", cfg.input_path, "Posterior CSV from 'register'")
        ->required();
    push->add_option("--moving", cfg.moving_path, "Moving image (PGM)")->required();
    push->add_option("--labels", cfg.labels_path, "Label image (PGM, optional)");
    push->add_option("--out", cfg.out_dir, "Output directory")->required();
    push->add_option("--grid-radius", cfg.grid_radius,
                     "Displacement grid radius used at registration time");

    CLI::App* contour = app.add_subcommand(
        "contour", "Exceedance map and iso-contours of a scalar ensemble");
    contour->add_option("ensemble", cfg.input_path, "Scalar ensemble CSV from 'push'")
        ->required();
    contour->add_option("--threshold", cfg.threshold, "Intensity threshold")->required();
    contour->add_option("--levels", cfg.levels, "Comma-separated probability levels");
    contour->add_option("--out", cfg.out_dir, "Output directory")->required();

    CLI::App* scenario = app.add_subcommand("scenario", "Run a built-in scenario");
    scenario->add_option("name", cfg.scenario, "One of: correctness, usefulness, "
                                               "circle_ellipse, label_propagation, "
                                               "distortion")
        ->required()
        ->check(CLI::IsMember(scenario_names()));
    scenario->add_option("--out", cfg.out_dir, "Output directory")->required();
    scenario->add_option("--seed", cfg.seed, "Noise seed for synthetic inputs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (reg->parsed()) return cmd_register(cfg);
        if (stats->parsed()) return cmd_stats(cfg);
        if (push->parsed()) return cmd_push(cfg);
        if (contour->parsed()) return cmd_contour(cfg);
        if (scenario->parsed()) return cmd_scenario(cfg);
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

} // namespace ensreg
