#pragma once

#include <cstdint>
#include <vector>

#include "dualband/dataset.hpp"
#include "dualband/learners.hpp"

namespace dualband {

// Candidate grids for structure/regularization search plus the hardening
// threshold grid and the number of Monte-Carlo CV repeats.
struct SearchSpace {
    std::vector<std::vector<int>> layouts = {{50}, {50, 50}, {40, 30, 30}, {25, 25, 25, 25}};
    std::vector<double> alphas = {0.05, 0.1, 0.15, 0.3, 0.5};
    double gamma_step = 0.05;  // grid over [0, 1]
    int cv_repeats = 5;

    void validate() const;
};

// Averaged Monte-Carlo CV outcome for one candidate: mean validation CE and
// the mean validation error at each hardening-threshold grid value.
struct CvResult {
    double mean_val_ce = 0.0;
    std::vector<double> gamma_grid;
    std::vector<double> mean_val_error;
    int diverged_repeats = 0;
    int used_repeats = 0;
};

struct CandidateScore {
    ModelSpec spec;
    double mean_val_ce = 0.0;
};

struct SelectionResult {
    ModelSpec chosen_spec;
    double chosen_gamma_l = 0.5;
    std::vector<CandidateScore> table;  // per-candidate mean validation CE
    CvResult chosen_cv;                 // averaged curves of the winner
};

// Hardening-threshold candidates: 0, step, 2*step, ... plus 1.0 itself.
std::vector<double> gamma_grid(double step);

// Repeats two-way re-splits of the training set (holdout fraction =
// split.validation_fraction_of_train), fitting the scaler on each repeat's
// training part, training, and averaging validation CE and the validation
// error-vs-gamma_l curve. Diverged repeats are excluded and counted; throws
// only if every repeat diverged.
CvResult mc_cross_validate(const ModelSpec& spec, const TrainConfig& cfg, const Dataset& train_set,
                           const SplitSpec& split, int repeats, double gamma_step, std::uint64_t seed);

// Evaluates every (layout, alpha) candidate with identical CV splits and
// picks the smallest mean validation CE; ties break toward fewer total
// nodes, then fewer layers, then smaller alpha. For non-nn kinds the layout
// grid collapses to a single entry and only alpha is searched.
SelectionResult grid_search(const SearchSpace& space, ModelKind kind, const TrainConfig& cfg,
                            const Dataset& train_set, const SplitSpec& split, std::uint64_t seed);

// Grid value minimizing the averaged validation error; ties resolve to the
// value closest to 0.5, then the smaller value.
double select_gamma_l(const CvResult& cv);

// Final refit on the whole training set: fits the scaler on all of it,
// carves a fresh internal early-stop holdout, trains, and attaches the
// selected gamma_l and the scaler. Linear models use the whole set directly
// (no early stopping).
TrainedModel fit_full(const ModelSpec& spec, double gamma_l, const Dataset& full_train_set,
                      const TrainConfig& cfg, const SplitSpec& split, std::uint64_t seed);

}  // namespace dualband
