#include "ensreg/interpret.hpp"

#include <cmath>
#include <vector>

#include "ensreg/categorical.hpp"

namespace ensreg {

namespace {

void check_disps_match(const PosteriorField& post, const DisplacementSet& disps) {
    validate(post);
    validate(disps);
    if (disps.size() != post.num_displacements) {
        throw invalid_argument_error("displacement set size does not match posterior K");
    }
}

} // namespace

DisplacementField mode_transformation(const PosteriorField& post,
                                      const DisplacementSet& disps) {
    check_disps_match(post, disps);
    DisplacementField field(post.width, post.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < post.height; ++y) {
        for (int x = 0; x < post.width; ++x) {
            const auto probs = post.at(x, y);
            int best = 0;
            for (int k = 1; k < post.num_displacements; ++k) {
                if (probs[k] > probs[best]) best = k;
            }
            field.at(x, y) = disps[best];
        }
    }
    return field;
}

Image warp_by_mode(const Image& moving, const DisplacementField& field) {
    validate(moving);
    if (field.width != moving.width || field.height != moving.height) {
        throw invalid_argument_error("displacement field grid does not match the image");
    }
    Image out(moving.width, moving.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < moving.height; ++y) {
        for (int x = 0; x < moving.width; ++x) {
            const Displacement d = field.at(x, y);
            out.at(x, y) = moving.at_clamped(x + d.dx, y + d.dy);
        }
    }
    return out;
}

ScalarField entropy_map(const PosteriorField& post) {
    validate(post);
    ScalarField out(post.width, post.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < post.height; ++y) {
        for (int x = 0; x < post.width; ++x) {
            out.at(x, y) = entropy(post.at(x, y));
        }
    }
    return out;
}

MomentsField displacement_moments(const PosteriorField& post,
                                  const DisplacementSet& disps) {
    check_disps_match(post, disps);
    MomentsField out(post.width, post.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < post.height; ++y) {
        for (int x = 0; x < post.width; ++x) {
            const auto probs = post.at(x, y);
            DisplacementMoments m;
            for (int k = 0; k < post.num_displacements; ++k) {
                m.mean[0] += probs[k] * disps[k].dx;
                m.mean[1] += probs[k] * disps[k].dy;
            }
            for (int k = 0; k < post.num_displacements; ++k) {
                const double cx = disps[k].dx - m.mean[0];
                const double cy = disps[k].dy - m.mean[1];
                m.covariance[0] += probs[k] * cx * cx;
                m.covariance[1] += probs[k] * cx * cy;
                m.covariance[3] += probs[k] * cy * cy;
            }
            m.covariance[2] = m.covariance[1];
            out.at(x, y) = m;
        }
    }
    return out;
}

ScalarField covariance_frobenius_map(const PosteriorField& post,
                                     const DisplacementSet& disps) {
    const MomentsField moments = displacement_moments(post, disps);
    ScalarField out(post.width, post.height);
    for (std::size_t i = 0; i < moments.values.size(); ++i) {
        const auto& c = moments.values[i].covariance;
        out.values[i] = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2] + c[3] * c[3]);
    }
    return out;
}

Vec2Field displacement_iqr_map(const PosteriorField& post,
                               const DisplacementSet& disps) {
    check_disps_match(post, disps);
    Vec2Field out(post.width, post.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < post.height; ++y) {
        std::vector<Realization<double>> xs(post.num_displacements);
        std::vector<Realization<double>> ys(post.num_displacements);
        for (int x = 0; x < post.width; ++x) {
            const auto probs = post.at(x, y);
            for (int k = 0; k < post.num_displacements; ++k) {
                xs[k] = {static_cast<double>(disps[k].dx), probs[k]};
                ys[k] = {static_cast<double>(disps[k].dy), probs[k]};
            }
            out.at(x, y) = {
                weighted_quantile(xs, 0.75) - weighted_quantile(xs, 0.25),
                weighted_quantile(ys, 0.75) - weighted_quantile(ys, 0.25),
            };
        }
    }
    return out;
}

} // namespace ensreg
