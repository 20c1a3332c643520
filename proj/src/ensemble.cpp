#include "ensreg/ensemble.hpp"

#include <cmath>
#include <vector>

#include "ensreg/categorical.hpp"
#include "ensreg/interpret.hpp"

namespace ensreg {

namespace {

template <typename V, typename LookupFn>
EnsembleField<V> pushforward(const PosteriorField& post, const DisplacementSet& disps,
                             LookupFn&& lookup) {
    validate(post);
    validate(disps);
    if (disps.size() != post.num_displacements) {
        throw invalid_argument_error("displacement set size does not match posterior K");
    }
    EnsembleField<V> field(post.width, post.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < post.height; ++y) {
        std::vector<Realization<V>> atoms(post.num_displacements);
        for (int x = 0; x < post.width; ++x) {
            const auto probs = post.at(x, y);
            for (int k = 0; k < post.num_displacements; ++k) {
                atoms[k] = {lookup(x, y, disps[k]), probs[k]};
            }
            field.cell(x, y) = aggregate(atoms);
        }
    }
    return field;
}

template <typename V>
const Realization<V>& mode_realization(std::span<const Realization<V>> cell) {
    if (cell.empty()) {
        throw empty_cell_error("ensemble cell holds no realizations");
    }
    // Cells are sorted ascending, so the first strict maximum is the
    // smallest (lexicographically smallest) value among ties.
    std::size_t best = 0;
    for (std::size_t i = 1; i < cell.size(); ++i) {
        if (cell[i].weight > cell[best].weight) best = i;
    }
    return cell[best];
}

template <typename F>
ScalarField entropy_map_impl(const F& field) {
    ScalarField out(field.width, field.height);
    std::vector<double> weights;
    for (std::size_t i = 0; i < field.cells.size(); ++i) {
        weights.clear();
        for (const auto& r : field.cells[i]) weights.push_back(r.weight);
        out.values[i] = entropy(weights);
    }
    return out;
}

} // namespace

ScalarEnsembleField pushforward_scalar(const PosteriorField& post,
                                       const DisplacementSet& disps,
                                       const Image& moving) {
    validate(moving);
    if (moving.width != post.width || moving.height != post.height) {
        throw invalid_argument_error("moving image grid does not match the posterior");
    }
    return pushforward<double>(post, disps, [&](int x, int y, const Displacement& d) {
        return moving.at_clamped(x + d.dx, y + d.dy);
    });
}

LabelEnsembleField pushforward_label(const PosteriorField& post,
                                     const DisplacementSet& disps,
                                     const LabelImage& labels) {
    validate(labels);
    if (labels.width != post.width || labels.height != post.height) {
        throw invalid_argument_error("label image grid does not match the posterior");
    }
    return pushforward<int>(post, disps, [&](int x, int y, const Displacement& d) {
        return labels.at_clamped(x + d.dx, y + d.dy);
    });
}

VectorEnsembleField pushforward_vector(const PosteriorField& post,
                                       const DisplacementSet& disps) {
    return pushforward<Vec2>(post, disps, [&](int, int, const Displacement& d) {
        return Vec2{static_cast<double>(d.dx), static_cast<double>(d.dy)};
    });
}

double ensemble_mode_cell(std::span<const Realization<double>> cell) {
    return mode_realization(cell).value;
}
int ensemble_mode_cell(std::span<const Realization<int>> cell) {
    return mode_realization(cell).value;
}
Vec2 ensemble_mode_cell(std::span<const Realization<Vec2>> cell) {
    return mode_realization(cell).value;
}

ScalarField ensemble_mode_map(const ScalarEnsembleField& field) {
    ScalarField out(field.width, field.height);
    for (std::size_t i = 0; i < field.cells.size(); ++i) {
        out.values[i] = mode_realization<double>(field.cells[i]).value;
    }
    return out;
}

LabelImage ensemble_mode_labels(const LabelEnsembleField& field) {
    LabelImage out(field.width, field.height);
    for (std::size_t i = 0; i < field.cells.size(); ++i) {
        out.labels[i] = mode_realization<int>(field.cells[i]).value;
    }
    return out;
}

ScalarField ensemble_variance_map(const ScalarEnsembleField& field) {
    ScalarField out(field.width, field.height);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(field.cells.size()); ++i) {
        out.values[i] = weighted_mean_and_variance(field.cells[i]).variance;
    }
    return out;
}

ScalarField ensemble_entropy_map(const ScalarEnsembleField& field) {
    return entropy_map_impl(field);
}
ScalarField ensemble_entropy_map(const LabelEnsembleField& field) {
    return entropy_map_impl(field);
}
ScalarField ensemble_entropy_map(const VectorEnsembleField& field) {
    return entropy_map_impl(field);
}

ScalarField mode_mismatch_map(const PosteriorField& post,
                              const DisplacementSet& disps, const Image& moving) {
    const ScalarEnsembleField ens = pushforward_scalar(post, disps, moving);
    const DisplacementField mode_field = mode_transformation(post, disps);
    ScalarField out(post.width, post.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < post.height; ++y) {
        for (int x = 0; x < post.width; ++x) {
            const double ensemble_mode = ensemble_mode_cell(
                std::span<const Realization<double>>(ens.cell(x, y)));
            const Displacement d = mode_field.at(x, y);
            const double mode_intensity = moving.at_clamped(x + d.dx, y + d.dy);
            out.at(x, y) = scalar_aggregation_key(ensemble_mode) !=
                                   scalar_aggregation_key(mode_intensity)
                               ? 1.0
                               : 0.0;
        }
    }
    return out;
}

ScalarField label_probability_map(const LabelEnsembleField& field, int label) {
    ScalarField out(field.width, field.height);
    for (std::size_t i = 0; i < field.cells.size(); ++i) {
        double p = 0.0;
        for (const auto& r : field.cells[i]) {
            if (r.value == label) p += r.weight;
        }
        out.values[i] = p;
    }
    return out;
}

ScalarField exceedance_map(const ScalarEnsembleField& field, double threshold) {
    if (!std::isfinite(threshold)) {
        throw invalid_argument_error("exceedance threshold must be finite");
    }
    ScalarField out(field.width, field.height);
    for (std::size_t i = 0; i < field.cells.size(); ++i) {
        double p = 0.0;
        for (const auto& r : field.cells[i]) {
            if (r.value >= threshold) p += r.weight;
        }
        out.values[i] = p;
    }
    return out;
}

} // namespace ensreg
