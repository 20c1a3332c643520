#include "ensreg/rwir.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace ensreg {

void validate(const RwirConfig& cfg) {
    if (cfg.patch_radius < 0) throw invalid_argument_error("patch_radius must be >= 0");
    if (!(cfg.sigma > 0.0)) throw invalid_argument_error("sigma must be > 0");
    if (!(cfg.gamma > 0.0)) throw invalid_argument_error("gamma must be > 0");
    if (cfg.beta_g < 0.0) throw invalid_argument_error("beta_g must be >= 0");
    if (!(cfg.epsilon_w > 0.0)) throw invalid_argument_error("epsilon_w must be > 0");
    if (!(cfg.solver_tol > 0.0)) throw invalid_argument_error("solver_tol must be > 0");
    if (cfg.solver_max_iter < 0) throw invalid_argument_error("solver_max_iter must be >= 0");
}

PosteriorField data_likelihood(const Image& fixed, const Image& moving,
                               const DisplacementSet& disps, const RwirConfig& cfg) {
    validate(fixed);
    validate(moving);
    validate(disps);
    validate(cfg);
    if (!fixed.same_size(moving)) {
        throw invalid_argument_error(
            "fixed and moving image dimensions differ: " + std::to_string(fixed.width) +
            "x" + std::to_string(fixed.height) + " vs " + std::to_string(moving.width) +
            "x" + std::to_string(moving.height));
    }

    const int w = fixed.width;
    const int h = fixed.height;
    const int k_count = disps.size();
    const int r = cfg.patch_radius;
    const double patch_area = static_cast<double>(2 * r + 1) * (2 * r + 1);
    const double denom = 2.0 * cfg.sigma * cfg.sigma * patch_area;

    PosteriorField post(w, h, k_count);

#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto probs = post.at(x, y);
            double sum = 0.0;
            for (int k = 0; k < k_count; ++k) {
                const Displacement d = disps[k];
                double ssd = 0.0;
                for (int oy = -r; oy <= r; ++oy) {
                    for (int ox = -r; ox <= r; ++ox) {
                        const double f = fixed.at_clamped(x + ox, y + oy);
                        const double m = moving.at_clamped(x + d.dx + ox, y + d.dy + oy);
                        const double diff = f - m;
                        ssd += diff * diff;
                    }
                }
                const double score = std::exp(-ssd / denom);
                probs[k] = score;
                sum += score;
            }
            if (sum > 0.0) {
                for (int k = 0; k < k_count; ++k) probs[k] /= sum;
            } else {
                // All scores underflowed; fall back to the uniform distribution.
                const double u = 1.0 / k_count;
                for (int k = 0; k < k_count; ++k) probs[k] = u;
            }
        }
    }
    return post;
}

namespace {

// 4-connected grid graph with intensity-dependent edge weights. Only right
// and down edges are stored; degree is the per-voxel weight sum.
struct GridGraph {
    int w = 0;
    int h = 0;
    std::vector<double> right;  // edge (x,y)-(x+1,y), last column unused
    std::vector<double> down;   // edge (x,y)-(x,y+1), last row unused
    std::vector<double> degree;

    GridGraph(const Image& img, const RwirConfig& cfg)
        : w(img.width), h(img.height),
          right(static_cast<std::size_t>(w) * h, 0.0),
          down(static_cast<std::size_t>(w) * h, 0.0),
          degree(static_cast<std::size_t>(w) * h, 0.0) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const std::size_t i = img.index(x, y);
                if (x + 1 < w) {
                    const double d = img.at(x, y) - img.at(x + 1, y);
                    const double wgt = std::exp(-cfg.beta_g * d * d) + cfg.epsilon_w;
                    right[i] = wgt;
                    degree[i] += wgt;
                    degree[img.index(x + 1, y)] += wgt;
                }
                if (y + 1 < h) {
                    const double d = img.at(x, y) - img.at(x, y + 1);
                    const double wgt = std::exp(-cfg.beta_g * d * d) + cfg.epsilon_w;
                    down[i] = wgt;
                    degree[i] += wgt;
                    degree[img.index(x, y + 1)] += wgt;
                }
            }
        }
    }

    // y = (L + gamma*I) x, with L = D - W.
    void apply(const std::vector<double>& x, double gamma, std::vector<double>& y) const {
        for (int gy = 0; gy < h; ++gy) {
            for (int gx = 0; gx < w; ++gx) {
                const std::size_t i = static_cast<std::size_t>(gy) * w + gx;
                double acc = (degree[i] + gamma) * x[i];
                if (gx > 0) acc -= right[i - 1] * x[i - 1];
                if (gx + 1 < w) acc -= right[i] * x[i + 1];
                if (gy > 0) acc -= down[i - w] * x[i - w];
                if (gy + 1 < h) acc -= down[i] * x[i + w];
                y[i] = acc;
            }
        }
    }
};

struct CgResult {
    bool converged = false;
    double rel_residual = 0.0;
    int iterations = 0;
};

// Jacobi-preconditioned conjugate gradient on (L + gamma*I) x = b. Fully
// serial with a fixed summation order, so results are bit-identical
// regardless of how many label solves run concurrently.
CgResult cg_solve(const GridGraph& g, double gamma, const std::vector<double>& b,
                  std::vector<double>& x, double tol, int max_iter) {
    const std::size_t n = b.size();
    double b_norm2 = 0.0;
    for (double v : b) b_norm2 += v * v;
    if (b_norm2 == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return {true, 0.0, 0};
    }
    const double b_norm = std::sqrt(b_norm2);

    std::vector<double> r(n), z(n), p(n), ap(n);
    g.apply(x, gamma, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];

    auto rel_res = [&]() {
        double s = 0.0;
        for (double v : r) s += v * v;
        return std::sqrt(s) / b_norm;
    };

    double res = rel_res();
    if (res <= tol) return {true, res, 0};

    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / (g.degree[i] + gamma);
    p = z;
    double rz = 0.0;
    for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];

    for (int iter = 1; iter <= max_iter; ++iter) {
        g.apply(p, gamma, ap);
        double p_ap = 0.0;
        for (std::size_t i = 0; i < n; ++i) p_ap += p[i] * ap[i];
        if (p_ap == 0.0) break;
        const double alpha = rz / p_ap;
        for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
        for (std::size_t i = 0; i < n; ++i) r[i] -= alpha * ap[i];
        res = rel_res();
        if (res <= tol) return {true, res, iter};
        for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / (g.degree[i] + gamma);
        double rz_next = 0.0;
        for (std::size_t i = 0; i < n; ++i) rz_next += r[i] * z[i];
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    return {false, res, max_iter};
}

} // namespace

PosteriorField random_walker_solve_raw(const PosteriorField& likelihood,
                                       const Image& fixed, const RwirConfig& cfg) {
    validate(cfg);
    validate(fixed);
    validate(likelihood);
    if (likelihood.width != fixed.width || likelihood.height != fixed.height) {
        throw invalid_argument_error("likelihood grid does not match the fixed image");
    }

    const int w = likelihood.width;
    const int h = likelihood.height;
    const int k_count = likelihood.num_displacements;
    const std::size_t n = likelihood.voxel_count();
    const int max_iter =
        cfg.solver_max_iter > 0 ? cfg.solver_max_iter : 10 * static_cast<int>(n);

    const GridGraph graph(fixed, cfg);
    PosteriorField out(w, h, k_count);
    std::vector<CgResult> results(k_count);

    // Label solves are independent; each one is internally serial so the
    // outcome does not depend on the schedule or thread count.
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < k_count; ++k) {
        std::vector<double> b(n), x(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double p = likelihood.probs[i * k_count + k];
            b[i] = cfg.gamma * p;
            x[i] = p; // likelihood is the natural initial guess
        }
        results[k] = cg_solve(graph, cfg.gamma, b, x, cfg.solver_tol, max_iter);
        for (std::size_t i = 0; i < n; ++i) {
            out.probs[i * k_count + k] = x[i];
        }
    }

    double worst = 0.0;
    int failed = 0;
    for (const auto& res : results) {
        if (!res.converged) {
            ++failed;
            worst = std::max(worst, res.rel_residual);
        }
    }
    if (failed > 0) {
        throw convergence_error("random-walker solver failed to converge for " +
                                    std::to_string(failed) + " of " +
                                    std::to_string(k_count) +
                                    " labels, worst relative residual = " +
                                    std::to_string(worst),
                                worst);
    }
    return out;
}

PosteriorField random_walker_regularize(const PosteriorField& likelihood,
                                        const Image& fixed, const RwirConfig& cfg) {
    PosteriorField out = random_walker_solve_raw(likelihood, fixed, cfg);
    const int k_count = out.num_displacements;
    const std::size_t n = out.voxel_count();

#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        double* probs = out.probs.data() + static_cast<std::size_t>(i) * k_count;
        double sum = 0.0;
        for (int k = 0; k < k_count; ++k) {
            if (probs[k] < 0.0) probs[k] = 0.0; // absorb solver residual
            sum += probs[k];
        }
        for (int k = 0; k < k_count; ++k) probs[k] /= sum;
    }
    return out;
}

PosteriorField register_images(const Image& fixed, const Image& moving,
                               const DisplacementSet& disps, const RwirConfig& cfg) {
    return random_walker_regularize(data_likelihood(fixed, moving, disps, cfg), fixed, cfg);
}

} // namespace ensreg
