// Acceptance suite: one pass/fail line per criterion. Exit code is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ensreg/categorical.hpp"
#include "ensreg/contour.hpp"
#include "ensreg/csv.hpp"
#include "ensreg/ensemble.hpp"
#include "ensreg/image_io.hpp"
#include "ensreg/interpret.hpp"
#include "ensreg/reference.hpp"
#include "ensreg/rwir.hpp"
#include "ensreg/scenarios.hpp"
#include "ensreg/synth.hpp"

using namespace ensreg;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    int number;
    std::string title;
    std::function<void(std::string&)> run; // throws or appends detail on failure
};

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw CheckFailure(what);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path scratch_root() {
    static const fs::path root =
        fs::temp_directory_path() /
        ("ensreg_acceptance_" + std::to_string(::getpid()));
    return root;
}

fs::path scratch_dir() {
    static int counter = 0;
    const fs::path p = scratch_root() / std::to_string(++counter);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

Image random_image(NoiseGenerator& gen, int w, int h, double scale) {
    Image img(w, h);
    for (double& p : img.pixels) p = gen.next_unit() * scale;
    return img;
}

Image lattice_image(NoiseGenerator& gen, int w, int h) {
    Image img(w, h);
    for (double& p : img.pixels) p = 0.5 * static_cast<double>(gen.next_u32() % 16);
    return img;
}

LabelImage random_labels(NoiseGenerator& gen, int w, int h, int max_label) {
    LabelImage img(w, h);
    for (int& l : img.labels) l = static_cast<int>(gen.next_u32() % (max_label + 1));
    return img;
}

PosteriorField random_posterior(NoiseGenerator& gen, int w, int h, int k) {
    PosteriorField post(w, h, k);
    for (std::size_t v = 0; v < post.voxel_count(); ++v) {
        double sum = 0.0;
        for (int i = 0; i < k; ++i) {
            post.probs[v * k + i] = 0.05 + gen.next_unit();
            sum += post.probs[v * k + i];
        }
        for (int i = 0; i < k; ++i) post.probs[v * k + i] /= sum;
    }
    return post;
}

DisplacementSet random_displacements(NoiseGenerator& gen, int k, int radius) {
    DisplacementSet disps;
    while (disps.size() < k) {
        const int span = 2 * radius + 1;
        const Displacement d{static_cast<int>(gen.next_u32() % span) - radius,
                             static_cast<int>(gen.next_u32() % span) - radius};
        bool dup = false;
        for (const Displacement& e : disps.vectors) dup = dup || e == d;
        if (!dup) disps.vectors.push_back(d);
    }
    return disps;
}

// --- criterion 1: section 2.2 reproduction --------------------------------

void criterion_usefulness(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    const ScenarioReport report = scenario_usefulness(scratch_dir());
    const double elapsed = seconds_since(t0);
    const double entropy = report.metric("transformation_entropy");
    require(std::abs(entropy - 2.0) <= 0.05, "transformation entropy not 2 +- 0.05");
    require(report.metric("intensity_entropy") == 0.0, "intensity entropy not exactly 0");
    require(report.metric("intensity_variance") == 0.0, "intensity variance not exactly 0");
    require(elapsed < 1.0, "runtime exceeded 1 s");
    std::ostringstream os;
    os << "entropy = " << entropy << ", intensity entropy/variance = 0, "
       << elapsed << " s";
    detail = os.str();
}

// --- criterion 2: section 2.1 reproduction --------------------------------

void criterion_correctness(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    const ScenarioReport report = scenario_correctness(scratch_dir());
    const double elapsed = seconds_since(t0);
    require(report.metric("mode_index") == 3.0, "mode index is not 3");
    require(report.metric("I_of_mode") == 200.0, "I(d_m) is not 200");
    require(report.metric("ensemble_mode") == 50.0, "ensemble mode is not 50");
    require(report.metric("mismatch") == 1.0, "mismatch flag is not 1");
    require(elapsed < 1.0, "runtime exceeded 1 s");
    std::ostringstream os;
    os << "mode d_3, I(d_m) = 200, ensemble mode = 50, mismatch = 1, " << elapsed
       << " s";
    detail = os.str();
}

// --- criterion 3: conservation suite --------------------------------------

void criterion_conservation(std::string& detail) {
    NoiseGenerator gen(1001);
    double worst_sum = 0.0;
    double worst_dpi = -1.0;
    for (int rep = 0; rep < 100; ++rep) {
        const int w = 1 + static_cast<int>(gen.next_u32() % 16);
        const int h = 1 + static_cast<int>(gen.next_u32() % 16);
        const int k = 1 + static_cast<int>(gen.next_u32() % 9);
        const Image fixed = random_image(gen, w, h, 255.0);
        const Image moving = lattice_image(gen, w, h);
        const LabelImage labels = random_labels(gen, w, h, 2);
        const DisplacementSet disps = random_displacements(gen, k, 3);
        const PosteriorField like = random_posterior(gen, w, h, k);

        const PosteriorField raw = random_walker_solve_raw(like, fixed, RwirConfig{});
        for (std::size_t v = 0; v < raw.voxel_count(); ++v) {
            double sum = 0.0;
            for (int i = 0; i < k; ++i) sum += raw.probs[v * k + i];
            worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
        }
        require(worst_sum <= 1e-9, "regularizer unity-sum violated beyond 1e-9");

        const PosteriorField post = random_walker_regularize(like, fixed, RwirConfig{});
        validate(post);

        const ScalarEnsembleField s_ens = pushforward_scalar(post, disps, moving);
        const LabelEnsembleField l_ens = pushforward_label(post, disps, labels);
        const VectorEnsembleField v_ens = pushforward_vector(post, disps);
        const ScalarField s_entropy = ensemble_entropy_map(s_ens);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double s1 = 0.0, s2 = 0.0, s3 = 0.0;
                for (const auto& r : s_ens.cell(x, y)) s1 += r.weight;
                for (const auto& r : l_ens.cell(x, y)) s2 += r.weight;
                for (const auto& r : v_ens.cell(x, y)) s3 += r.weight;
                worst_sum = std::max({worst_sum, std::abs(s1 - 1.0),
                                      std::abs(s2 - 1.0), std::abs(s3 - 1.0)});
                const double gap = s_entropy.at(x, y) - entropy(post.at(x, y));
                worst_dpi = std::max(worst_dpi, gap);
            }
        }
        require(worst_sum <= 1e-9, "pushforward unity-sum violated beyond 1e-9");
        require(worst_dpi <= 1e-12, "ensemble entropy exceeded posterior entropy");
    }
    std::ostringstream os;
    os << "100 cases; worst |sum - 1| = " << worst_sum
       << ", worst entropy gap = " << worst_dpi;
    detail = os.str();
}

// --- criterion 4: oracle equivalence --------------------------------------

void criterion_oracle(std::string& detail) {
    NoiseGenerator gen(2002);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const int w = 1 + static_cast<int>(gen.next_u32() % 16);
        const int h = 1 + static_cast<int>(gen.next_u32() % 16);
        const int k = 1 + static_cast<int>(gen.next_u32() % 9);
        const DisplacementSet disps = random_displacements(gen, k, 3);
        const PosteriorField post = random_posterior(gen, w, h, k);
        const Image moving =
            rep % 2 == 0 ? lattice_image(gen, w, h) : random_image(gen, w, h, 8.0);
        const LabelImage labels = random_labels(gen, w, h, 2);
        const double threshold = gen.next_unit() * 8.0;

        const ScalarEnsembleField ens = pushforward_scalar(post, disps, moving);
        const ScalarField mode = ensemble_mode_map(ens);
        const ScalarField var = ensemble_variance_map(ens);
        const ScalarField ent = ensemble_entropy_map(ens);
        const ScalarField exc = exceedance_map(ens, threshold);
        const ScalarField lp =
            label_probability_map(pushforward_label(post, disps, labels), 1);
        const MomentsField moments = displacement_moments(post, disps);

        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                worst = std::max(
                    worst, std::abs(mode.at(x, y) - reference::ensemble_mode_brute(
                                                        post, disps, moving, x, y)));
                worst = std::max(
                    worst, std::abs(var.at(x, y) - reference::ensemble_variance_brute(
                                                       post, disps, moving, x, y)));
                worst = std::max(
                    worst, std::abs(ent.at(x, y) - reference::ensemble_entropy_brute(
                                                       post, disps, moving, x, y)));
                worst = std::max(worst,
                                 std::abs(exc.at(x, y) -
                                          reference::exceedance_brute(
                                              post, disps, moving, x, y, threshold)));
                worst = std::max(worst,
                                 std::abs(lp.at(x, y) -
                                          reference::label_probability_brute(
                                              post, disps, labels, x, y, 1)));
                const DisplacementMoments brute =
                    reference::displacement_moments_brute(post, disps, x, y);
                const DisplacementMoments& ours = moments.at(x, y);
                worst = std::max(worst, std::abs(ours.mean[0] - brute.mean[0]));
                worst = std::max(worst, std::abs(ours.mean[1] - brute.mean[1]));
                for (int c = 0; c < 4; ++c) {
                    worst = std::max(worst,
                                     std::abs(ours.covariance[c] - brute.covariance[c]));
                }
                require(worst <= 1e-12, "ensemble statistic deviates from brute force");
            }
        }
    }
    std::ostringstream os;
    os << "100 cases; worst |engine - brute| = " << worst;
    detail = os.str();
}

// --- criterion 5: regularizer fixed points ---------------------------------

void criterion_fixed_points(std::string& detail) {
    NoiseGenerator gen(3003);

    // Spatially constant likelihood passes through unchanged.
    const Image img = random_image(gen, 7, 6, 255.0);
    PosteriorField constant(7, 6, 3);
    for (std::size_t v = 0; v < constant.voxel_count(); ++v) {
        constant.probs[v * 3 + 0] = 0.2;
        constant.probs[v * 3 + 1] = 0.3;
        constant.probs[v * 3 + 2] = 0.5;
    }
    const PosteriorField fixed_out = random_walker_regularize(constant, img, RwirConfig{});
    double worst_const = 0.0;
    for (std::size_t i = 0; i < constant.probs.size(); ++i) {
        worst_const = std::max(worst_const,
                               std::abs(fixed_out.probs[i] - constant.probs[i]));
    }
    require(worst_const <= 1e-10, "constant likelihood is not a fixed point");

    // A 1x1 grid returns the input exactly.
    const Image tiny(1, 1, 9.0);
    PosteriorField one(1, 1, 4);
    one.probs = {0.1, 0.2, 0.3, 0.4};
    const PosteriorField one_out = random_walker_regularize(one, tiny, RwirConfig{});
    for (int i = 0; i < 4; ++i) {
        require(one_out.probs[i] == one.probs[i], "1x1 grid did not return the input");
    }

    // gamma = 1000 on an 8x8 random likelihood matches the dense solve.
    const Image img8 = random_image(gen, 8, 8, 255.0);
    const PosteriorField like8 = random_posterior(gen, 8, 8, 5);
    RwirConfig strong;
    strong.gamma = 1000.0;
    const PosteriorField cg = random_walker_solve_raw(like8, img8, strong);
    const PosteriorField dense = reference::random_walker_dense(like8, img8, strong);
    double worst_dense = 0.0;
    for (std::size_t i = 0; i < cg.probs.size(); ++i) {
        worst_dense = std::max(worst_dense, std::abs(cg.probs[i] - dense.probs[i]));
    }
    require(worst_dense <= 1e-3, "CG deviates from the dense solve beyond 1e-3");

    std::ostringstream os;
    os << "constant max dev = " << worst_const << ", 1x1 exact, CG vs dense = "
       << worst_dense;
    detail = os.str();
}

// --- criterion 6: circle-ellipse qualitative reproduction ------------------

void criterion_circle_ellipse(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    const ScenarioReport report = scenario_circle_ellipse(scratch_dir());
    const double elapsed = seconds_since(t0);
    require(report.metric("num_displacements") == 121.0, "K is not 121");
    const double center_h = report.metric("center_transformation_entropy");
    const double edge_h = report.metric("edge_band_transformation_entropy");
    const double center_v = report.metric("center_intensity_variance");
    const double edge_v = report.metric("edge_band_intensity_variance");
    const double frac = report.metric("top_decile_near_edge_fraction");
    require(center_h > edge_h, "center entropy does not exceed edge entropy");
    require(edge_v > center_v, "edge variance does not exceed center variance");
    require(frac >= 0.8, "top-decile variance voxels are not concentrated at the edge");
    require(elapsed < 60.0, "runtime exceeded 60 s");
    std::ostringstream os;
    os.precision(4);
    os << "entropy center/edge = " << center_h << "/" << edge_h
       << ", variance edge/center = " << edge_v << "/" << center_v
       << ", top-decile fraction = " << frac << ", " << elapsed << " s";
    detail = os.str();
}

// --- criterion 7: contour geometry -----------------------------------------

void criterion_contours(std::string& detail) {
    const int size = 32;
    const double cx = 15.5, cy = 15.5, radius = 10.0;
    const Image disk = make_filled_circle(size, size, cx, cy, radius, 200.0, 50.0);
    DisplacementSet identity;
    identity.vectors = {{0, 0}};
    const PosteriorField point(size, size, 1, 1.0);
    const ScalarField exc =
        exceedance_map(pushforward_scalar(point, identity, disk), 125.0);

    const ContourSet mid = iso_contours(exc, 0.5);
    require(mid.contours.size() == 1, "0.5-level contour is not a single curve");
    require(mid.contours[0].closed, "0.5-level contour is not closed");
    double mean_r = 0.0;
    for (const Vec2& p : mid.contours[0].points) {
        mean_r += std::hypot(p[0] - cx, p[1] - cy);
    }
    mean_r /= static_cast<double>(mid.contours[0].points.size());
    require(std::abs(mean_r - radius) <= 1.0, "mean contour radius deviates beyond 1 px");

    // Point-mass posterior: every level collapses onto the median contour.
    double worst_collapse = 0.0;
    for (double level : {0.05, 0.5, 0.95}) {
        const ContourSet c = iso_contours(exc, level);
        require(!c.contours.empty(), "missing contour at a probability level");
        worst_collapse = std::max(worst_collapse, hausdorff_distance(c, mid));
    }
    require(worst_collapse <= 0.5, "contour levels do not collapse within 0.5 px");

    std::ostringstream os;
    os << "mean radius = " << mean_r << " (true " << radius
       << "), collapse spread = " << worst_collapse << " px";
    detail = os.str();
}

// --- criterion 8: determinism ----------------------------------------------

void criterion_determinism(std::string& detail) {
    const std::vector<std::string> names{"correctness", "usefulness", "circle_ellipse",
                                         "label_propagation", "distortion"};
    int compared = 0;
    for (const std::string& name : names) {
        const fs::path dir_a = scratch_dir();
        const fs::path dir_b = scratch_dir();
#ifdef _OPENMP
        const int saved = omp_get_max_threads();
        omp_set_num_threads(1);
#endif
        const ScenarioReport a = run_scenario(name, dir_a, 7);
#ifdef _OPENMP
        omp_set_num_threads(3);
#endif
        const ScenarioReport b = run_scenario(name, dir_b, 7);
#ifdef _OPENMP
        omp_set_num_threads(saved);
#endif
        require(a.artifacts.size() == b.artifacts.size(), "artifact lists differ");
        for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
            if (!a.artifacts[i].ends_with(".csv")) continue;
            require(slurp(a.artifacts[i]) == slurp(b.artifacts[i]),
                    name + ": " + fs::path(a.artifacts[i]).filename().string() +
                        " differs between runs/thread counts");
            ++compared;
        }
    }
    std::ostringstream os;
    os << compared << " CSV artifacts byte-identical across runs and thread counts";
    detail = os.str();
}

// --- criterion 9: format round trips ----------------------------------------

void criterion_formats(std::string& detail) {
    NoiseGenerator gen(4004);
    const fs::path dir = scratch_dir();
    int checked = 0;
    for (int rep = 0; rep < 20; ++rep) {
        const int w = 1 + static_cast<int>(gen.next_u32() % 24);
        const int h = 1 + static_cast<int>(gen.next_u32() % 24);
        Image img(w, h);
        for (double& p : img.pixels) p = gen.next_u32() % 256;

        const fs::path p5 = dir / "round.pgm";
        write_pgm(img, p5);
        const Image back = read_pgm(p5);
        require(back.pixels == img.pixels, "P5 write-read round trip is not exact");

        std::string p2_text = "P2\n" + std::to_string(w) + " " + std::to_string(h) +
                              "\n255\n";
        for (double p : img.pixels) {
            p2_text += std::to_string(static_cast<int>(p)) + "\n";
        }
        const fs::path p2 = dir / "round_ascii.pgm";
        std::ofstream(p2, std::ios::binary) << p2_text;
        const Image ascii = read_pgm(p2);
        require(ascii.pixels == back.pixels, "P2 and P5 parses disagree");
        ++checked;
    }
    std::ostringstream os;
    os << checked << " random byte images round-tripped exactly (P5) and matched P2";
    detail = os.str();
}

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "scenario usefulness: entropy 2 +- 0.05 bits, zero intensity spread, < 1 s",
         criterion_usefulness},
        {2, "scenario correctness: mode d_3, I(d_m) = 200, ensemble mode = 50, mismatch",
         criterion_correctness},
        {3, "conservation: unity sums within 1e-9, entropy never increases",
         criterion_conservation},
        {4, "oracle equivalence: ensemble statistics match brute force within 1e-12",
         criterion_oracle},
        {5, "regularizer fixed points: constant, 1x1, gamma = 1000 vs dense solve",
         criterion_fixed_points},
        {6, "circle-ellipse: entropy/variance contrast and edge concentration, < 60 s",
         criterion_circle_ellipse},
        {7, "contour geometry: disk radius within 1 px, point-mass collapse within 0.5 px",
         criterion_contours},
        {8, "determinism: byte-identical CSV artifacts across runs and thread counts",
         criterion_determinism},
        {9, "format round trips: PGM write-read exact, P2 = P5",
         criterion_formats},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        std::string detail;
        bool passed = true;
        try {
            c.run(detail);
        } catch (const std::exception& e) {
            passed = false;
            detail = e.what();
        }
        std::printf("[%s] criterion %d: %s — %s\n", passed ? "PASS" : "FAIL", c.number,
                    c.title.c_str(), detail.c_str());
        std::fflush(stdout);
        if (!passed) ++failures;
    }
    if (failures > 0) {
        std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    } else {
        std::printf("all %zu criteria passed\n", criteria.size());
    }
    std::error_code ec;
    fs::remove_all(scratch_root(), ec);
    return failures;
}
