#include "ensreg/reference.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace ensreg::reference {

PosteriorField data_likelihood_serial(const Image& fixed, const Image& moving,
                                      const DisplacementSet& disps,
                                      const RwirConfig& cfg) {
    if (!fixed.same_size(moving)) {
        throw invalid_argument_error("image dimensions differ");
    }
    const int r = cfg.patch_radius;
    const double area = static_cast<double>(2 * r + 1) * (2 * r + 1);
    PosteriorField post(fixed.width, fixed.height, disps.size());
    for (int y = 0; y < fixed.height; ++y) {
        for (int x = 0; x < fixed.width; ++x) {
            const auto probs = post.at(x, y);
            double sum = 0.0;
            for (int k = 0; k < disps.size(); ++k) {
                double ssd = 0.0;
                for (int oy = -r; oy <= r; ++oy) {
                    for (int ox = -r; ox <= r; ++ox) {
                        const double a = fixed.at_clamped(x + ox, y + oy);
                        const double b = moving.at_clamped(x + disps[k].dx + ox,
                                                           y + disps[k].dy + oy);
                        ssd += (a - b) * (a - b);
                    }
                }
                probs[k] = std::exp(-ssd / (2.0 * cfg.sigma * cfg.sigma * area));
                sum += probs[k];
            }
            for (int k = 0; k < disps.size(); ++k) {
                probs[k] = sum > 0.0 ? probs[k] / sum : 1.0 / disps.size();
            }
        }
    }
    return post;
}

namespace {

// Dense symmetric positive-definite system assembled the straightforward
// way: every off-diagonal entry written explicitly.
std::vector<double> assemble_dense(const Image& fixed, const RwirConfig& cfg) {
    const int w = fixed.width;
    const int h = fixed.height;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    std::vector<double> a(n * n, 0.0);
    auto weight = [&](int x0, int y0, int x1, int y1) {
        const double d = fixed.at(x0, y0) - fixed.at(x1, y1);
        return std::exp(-cfg.beta_g * d * d) + cfg.epsilon_w;
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            a[i * n + i] += cfg.gamma;
            const int nx[4] = {x - 1, x + 1, x, x};
            const int ny[4] = {y, y, y - 1, y + 1};
            for (int t = 0; t < 4; ++t) {
                if (nx[t] < 0 || nx[t] >= w || ny[t] < 0 || ny[t] >= h) continue;
                const std::size_t j = static_cast<std::size_t>(ny[t]) * w + nx[t];
                const double wgt = weight(x, y, nx[t], ny[t]);
                a[i * n + i] += wgt;
                a[i * n + j] -= wgt;
            }
        }
    }
    return a;
}

// In-place Cholesky A = L L^T on the lower triangle.
void cholesky(std::vector<double>& a, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
        if (d <= 0.0) {
            throw invalid_argument_error("dense system is not positive definite");
        }
        a[j * n + j] = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = s / a[j * n + j];
        }
    }
}

void cholesky_solve(const std::vector<double>& l, std::size_t n,
                    std::vector<double>& rhs) {
    for (std::size_t i = 0; i < n; ++i) {
        double s = rhs[i];
        for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * rhs[k];
        rhs[i] = s / l[i * n + i];
    }
    for (std::size_t ii = n; ii > 0; --ii) {
        const std::size_t i = ii - 1;
        double s = rhs[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= l[k * n + i] * rhs[k];
        rhs[i] = s / l[i * n + i];
    }
}

} // namespace

std::vector<double> dense_system_matrix(const Image& fixed, const RwirConfig& cfg) {
    return assemble_dense(fixed, cfg);
}

PosteriorField random_walker_dense(const PosteriorField& likelihood,
                                   const Image& fixed, const RwirConfig& cfg) {
    const std::size_t n = likelihood.voxel_count();
    const int k_count = likelihood.num_displacements;
    std::vector<double> a = assemble_dense(fixed, cfg);
    cholesky(a, n);

    PosteriorField out(likelihood.width, likelihood.height, k_count);
    std::vector<double> rhs(n);
    for (int k = 0; k < k_count; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] = cfg.gamma * likelihood.probs[i * k_count + k];
        }
        cholesky_solve(a, n, rhs);
        for (std::size_t i = 0; i < n; ++i) {
            out.probs[i * k_count + k] = rhs[i];
        }
    }
    return out;
}

namespace {

std::int64_t key6(double v) { return static_cast<std::int64_t>(std::llround(v * 1e6)); }

std::vector<double> lookup_values(const DisplacementSet& disps, const Image& moving,
                                  int x, int y) {
    std::vector<double> values(disps.size());
    for (int k = 0; k < disps.size(); ++k) {
        values[k] = moving.at_clamped(x + disps[k].dx, y + disps[k].dy);
    }
    return values;
}

} // namespace

double ensemble_mode_brute(const PosteriorField& post, const DisplacementSet& disps,
                           const Image& moving, int x, int y) {
    const std::vector<double> values = lookup_values(disps, moving, x, y);
    const auto probs = post.at(x, y);
    double best_value = 0.0;
    double best_mass = -1.0;
    std::int64_t best_key = 0;
    for (int k = 0; k < disps.size(); ++k) {
        bool seen = false;
        for (int j = 0; j < k; ++j) {
            if (key6(values[j]) == key6(values[k])) {
                seen = true;
                break;
            }
        }
        if (seen) continue;
        double mass = 0.0;
        for (int j = 0; j < disps.size(); ++j) {
            if (key6(values[j]) == key6(values[k])) mass += probs[j];
        }
        if (mass <= 0.0) continue;
        if (mass > best_mass || (mass == best_mass && key6(values[k]) < best_key)) {
            best_mass = mass;
            best_key = key6(values[k]);
            best_value = values[k];
        }
    }
    if (best_mass < 0.0) throw empty_cell_error("no positive-mass realization");
    return best_value;
}

double ensemble_variance_brute(const PosteriorField& post, const DisplacementSet& disps,
                               const Image& moving, int x, int y) {
    const std::vector<double> values = lookup_values(disps, moving, x, y);
    const auto probs = post.at(x, y);
    double mean = 0.0;
    for (int k = 0; k < disps.size(); ++k) mean += probs[k] * values[k];
    double var = 0.0;
    for (int k = 0; k < disps.size(); ++k) {
        var += probs[k] * (values[k] - mean) * (values[k] - mean);
    }
    return var;
}

double ensemble_entropy_brute(const PosteriorField& post, const DisplacementSet& disps,
                              const Image& moving, int x, int y) {
    const std::vector<double> values = lookup_values(disps, moving, x, y);
    const auto probs = post.at(x, y);
    double h = 0.0;
    for (int k = 0; k < disps.size(); ++k) {
        bool seen = false;
        for (int j = 0; j < k; ++j) {
            if (key6(values[j]) == key6(values[k])) {
                seen = true;
                break;
            }
        }
        if (seen) continue;
        double mass = 0.0;
        for (int j = 0; j < disps.size(); ++j) {
            if (key6(values[j]) == key6(values[k])) mass += probs[j];
        }
        if (mass > 0.0) h -= mass * std::log2(mass);
    }
    return h;
}

double exceedance_brute(const PosteriorField& post, const DisplacementSet& disps,
                        const Image& moving, int x, int y, double threshold) {
    const std::vector<double> values = lookup_values(disps, moving, x, y);
    const auto probs = post.at(x, y);
    double p = 0.0;
    for (int k = 0; k < disps.size(); ++k) {
        if (values[k] >= threshold) p += probs[k];
    }
    return p;
}

double label_probability_brute(const PosteriorField& post, const DisplacementSet& disps,
                               const LabelImage& labels, int x, int y, int label) {
    const auto probs = post.at(x, y);
    double p = 0.0;
    for (int k = 0; k < disps.size(); ++k) {
        if (labels.at_clamped(x + disps[k].dx, y + disps[k].dy) == label) p += probs[k];
    }
    return p;
}

DisplacementMoments displacement_moments_brute(const PosteriorField& post,
                                               const DisplacementSet& disps,
                                               int x, int y) {
    const auto probs = post.at(x, y);
    DisplacementMoments m;
    for (int k = 0; k < disps.size(); ++k) {
        m.mean[0] += probs[k] * disps[k].dx;
        m.mean[1] += probs[k] * disps[k].dy;
    }
    for (int k = 0; k < disps.size(); ++k) {
        const double cx = disps[k].dx - m.mean[0];
        const double cy = disps[k].dy - m.mean[1];
        m.covariance[0] += probs[k] * cx * cx;
        m.covariance[1] += probs[k] * cx * cy;
        m.covariance[2] += probs[k] * cy * cx;
        m.covariance[3] += probs[k] * cy * cy;
    }
    return m;
}

ScalarField pushforward_variance_serial(const PosteriorField& post,
                                        const DisplacementSet& disps,
                                        const Image& moving) {
    ScalarField out(post.width, post.height);
    for (int y = 0; y < post.height; ++y) {
        for (int x = 0; x < post.width; ++x) {
            out.at(x, y) = ensemble_variance_brute(post, disps, moving, x, y);
        }
    }
    return out;
}

} // namespace ensreg::reference
