#include "dualband/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dualband/rng.hpp"

namespace dualband {

namespace {

FeatureCombo combo_of(const Dataset& ds) {
    if (ds.empty()) throw std::invalid_argument("combo_of: dataset is empty");
    FeatureCombo combo;
    for (int i = 0; i < kFeatureCount; ++i) {
        const Feature f = static_cast<Feature>(i);
        if (ds.examples.front().features.has(f)) combo.features.push_back(f);
    }
    return combo;
}

// Validation error at every gamma grid value for one repeat.
std::vector<double> error_curve(const Eigen::VectorXd& labels, const Eigen::VectorXd& softs,
                                const std::vector<double>& grid) {
    std::vector<double> curve(grid.size(), 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double wrong = 0.0;
        for (Eigen::Index i = 0; i < softs.size(); ++i)
            wrong += std::abs(static_cast<double>(harden(softs(i), grid[g])) - labels(i));
        curve[g] = wrong / static_cast<double>(softs.size());
    }
    return curve;
}

int total_nodes(const std::vector<int>& layout) {
    return std::accumulate(layout.begin(), layout.end(), 0);
}

}  // namespace

void SearchSpace::validate() const {
    if (layouts.empty() || alphas.empty()) throw std::invalid_argument("search space: empty grid");
    if (!(gamma_step > 0.0 && gamma_step <= 1.0))
        throw std::invalid_argument("search space: gamma_step must lie in (0, 1]");
    if (cv_repeats < 1) throw std::invalid_argument("search space: cv_repeats must be >= 1");
    for (const auto& layout : layouts) {
        ModelSpec probe;
        probe.kind = ModelKind::nn;
        probe.hidden_layout = layout;
        probe.validate();
    }
    for (double a : alphas)
        if (!(a >= 0.0)) throw std::invalid_argument("search space: alpha must be >= 0");
}

std::vector<double> gamma_grid(double step) {
    if (!(step > 0.0)) throw std::invalid_argument("gamma_grid: step must be > 0");
    std::vector<double> grid;
    for (int k = 0;; ++k) {
        const double g = k * step;
        if (g > 1.0 - 1e-12) break;
        grid.push_back(g);
    }
    grid.push_back(1.0);  // endpoint always present even when step does not divide 1
    return grid;
}

CvResult mc_cross_validate(const ModelSpec& spec, const TrainConfig& cfg, const Dataset& train_set,
                           const SplitSpec& split, int repeats, double gamma_step, std::uint64_t seed) {
    if (repeats < 1) throw std::invalid_argument("mc_cross_validate: repeats must be >= 1");
    const FeatureCombo combo = combo_of(train_set);
    CvResult cv;
    cv.gamma_grid = gamma_grid(gamma_step);
    cv.mean_val_error.assign(cv.gamma_grid.size(), 0.0);
    for (int r = 0; r < repeats; ++r) {
        const std::uint64_t rep_seed = derive_seed(seed, "cv", static_cast<std::uint64_t>(r));
        const auto [t_raw, v_raw] =
            split_two(train_set, 1.0 - split.validation_fraction_of_train, derive_seed(rep_seed, "resplit"));
        const Scaler scaler = fit_scaler(t_raw, combo);
        const Dataset t = apply_scaler(scaler, t_raw);
        const Dataset v = apply_scaler(scaler, v_raw);
        ModelSpec rep_spec = spec;
        rep_spec.seed = derive_seed(rep_seed, "weights");
        TrainConfig rep_cfg = cfg;
        rep_cfg.seed = derive_seed(rep_seed, "batches");
        TrainedModel model;
        try {
            model = train(rep_spec, rep_cfg, t, v);
        } catch (const std::runtime_error&) {
            ++cv.diverged_repeats;  // diverged repeat: recorded and excluded
            continue;
        }
        const DesignMatrix vm = to_design_matrix(v);
        const Eigen::VectorXd softs = predict_soft_matrix(model, vm.x);
        cv.mean_val_ce += cross_entropy(vm.y, softs);
        const std::vector<double> curve = error_curve(vm.y, softs, cv.gamma_grid);
        for (std::size_t g = 0; g < curve.size(); ++g) cv.mean_val_error[g] += curve[g];
        ++cv.used_repeats;
    }
    if (cv.used_repeats == 0)
        throw std::runtime_error("mc_cross_validate: every repeat diverged");
    cv.mean_val_ce /= cv.used_repeats;
    for (double& e : cv.mean_val_error) e /= cv.used_repeats;
    return cv;
}

SelectionResult grid_search(const SearchSpace& space, ModelKind kind, const TrainConfig& cfg,
                            const Dataset& train_set, const SplitSpec& split, std::uint64_t seed) {
    space.validate();
    const std::vector<std::vector<int>> layouts =
        kind == ModelKind::nn ? space.layouts : std::vector<std::vector<int>>{{}};
    SelectionResult result;
    bool have_best = false;
    CvResult best_cv;
    for (const auto& layout : layouts) {
        for (double alpha : space.alphas) {
            ModelSpec cand;
            cand.kind = kind;
            cand.hidden_layout = layout;
            cand.alpha = alpha;
            CvResult cv;
            try {
                cv = mc_cross_validate(cand, cfg, train_set, split, space.cv_repeats, space.gamma_step,
                                       seed);
            } catch (const std::runtime_error&) {
                continue;  // all repeats diverged: candidate dropped
            }
            result.table.push_back({cand, cv.mean_val_ce});
            const auto better = [&]() {
                if (!have_best) return true;
                if (cv.mean_val_ce != result.chosen_cv.mean_val_ce)
                    return cv.mean_val_ce < result.chosen_cv.mean_val_ce;
                const auto& cur = result.chosen_spec.hidden_layout;
                if (total_nodes(layout) != total_nodes(cur)) return total_nodes(layout) < total_nodes(cur);
                if (layout.size() != cur.size()) return layout.size() < cur.size();
                return alpha < result.chosen_spec.alpha;
            };
            if (better()) {
                have_best = true;
                result.chosen_spec = cand;
                result.chosen_cv = cv;
            }
        }
    }
    if (!have_best) throw std::runtime_error("grid_search: every candidate diverged");
    result.chosen_gamma_l = select_gamma_l(result.chosen_cv);
    return result;
}

double select_gamma_l(const CvResult& cv) {
    if (cv.gamma_grid.empty() || cv.gamma_grid.size() != cv.mean_val_error.size())
        throw std::invalid_argument("select_gamma_l: empty or inconsistent curve");
    std::size_t best = 0;
    for (std::size_t g = 1; g < cv.gamma_grid.size(); ++g) {
        const double e = cv.mean_val_error[g];
        const double be = cv.mean_val_error[best];
        if (e < be) {
            best = g;
        } else if (e == be) {
            const double dist_g = std::abs(cv.gamma_grid[g] - 0.5);
            const double dist_b = std::abs(cv.gamma_grid[best] - 0.5);
            if (dist_g < dist_b || (dist_g == dist_b && cv.gamma_grid[g] < cv.gamma_grid[best]))
                best = g;
        }
    }
    return cv.gamma_grid[best];
}

TrainedModel fit_full(const ModelSpec& spec, double gamma_l, const Dataset& full_train_set,
                      const TrainConfig& cfg, const SplitSpec& split, std::uint64_t seed) {
    if (!(gamma_l >= 0.0 && gamma_l <= 1.0))
        throw std::invalid_argument("fit_full: gamma_l must lie in [0, 1]");
    const FeatureCombo combo = combo_of(full_train_set);
    const Scaler scaler = fit_scaler(full_train_set, combo);
    const Dataset standardized = apply_scaler(scaler, full_train_set);
    ModelSpec final_spec = spec;
    final_spec.seed = derive_seed(seed, "final-weights");
    TrainConfig final_cfg = cfg;
    final_cfg.seed = derive_seed(seed, "final-batches");
    TrainedModel model;
    if (spec.kind == ModelKind::linear) {
        model = train(final_spec, final_cfg, standardized, standardized);
    } else {
        const auto [t, v] = split_two(standardized, 1.0 - split.validation_fraction_of_train,
                                      derive_seed(seed, "final-split"));
        model = train(final_spec, final_cfg, t, v);
    }
    model.scaler = scaler;
    model.gamma_l = gamma_l;
    return model;
}

}  // namespace dualband
