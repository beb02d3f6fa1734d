#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dualband/channel.hpp"
#include "dualband/dataset.hpp"
#include "dualband/learners.hpp"
#include "dualband/selection.hpp"
#include "dualband/tbba.hpp"

namespace dualband {

// The seven benchmark feature combinations for the stochastic environment.
std::vector<FeatureCombo> stochastic_combos();
// The eight combinations used with imported (measurement-style) datasets.
std::vector<FeatureCombo> external_combos();

// How learners are selected and trained inside a study. In reduced mode a
// fixed spec is used and only gamma_l is cross-validated; in full-grid mode
// structure and alpha are searched per unit.
struct PipelineSettings {
    bool full_grid = false;
    ModelSpec fixed_spec;    // kind is overridden per evaluated pair
    SearchSpace space;
    TrainConfig train_cfg;
    int cv_repeats = 2;

    void validate() const;
};

struct ModelComboPair {
    ModelKind model;
    FeatureCombo combo;
};

struct StochasticBenchmarkSpec {
    int n_cells = 1000;
    CellConfig cell;
    std::vector<ModelKind> models = {ModelKind::nn, ModelKind::logistic, ModelKind::linear};
    std::vector<FeatureCombo> combos = stochastic_combos();
    std::vector<ModelComboPair> pairs;  // when non-empty, replaces models x combos
    bool include_tbba = true;
    SplitSpec split{0.65, 0.2, 0};
    double gamma_t = 0.5;
    PipelineSettings pipeline;
    std::uint64_t master_seed = 0;
    std::uint64_t learner_salt = 0;  // perturbs training streams only; cells and splits unaffected
    bool verbose = false;

    void validate() const;
};

struct GeneralizationSpec {
    int n_groups = 20;
    int train_cells = 30;
    int val_cells = 5;
    int test_cells = 15;
    CellConfig cell;
    std::vector<ModelKind> models = {ModelKind::nn, ModelKind::logistic, ModelKind::linear};
    std::vector<FeatureCombo> combos = stochastic_combos();
    std::vector<ModelComboPair> pairs;
    bool include_tbba = true;
    double gamma_t = 0.5;
    double gamma_step = 0.05;
    ModelSpec model_spec;                       // fixed hypothesis per pair
    TrainConfig train_cfg{100, 1.0, 64, 10, 0}; // pooled-training settings
    std::uint64_t master_seed = 0;
    bool verbose = false;

    void validate() const;  // cell counts must sum to the group size 50
};

struct ExternalStudySpec {
    std::vector<ModelKind> models = {ModelKind::nn, ModelKind::logistic, ModelKind::linear};
    std::vector<FeatureCombo> combos = external_combos();
    std::vector<ModelComboPair> pairs;
    SplitSpec split{0.3, 0.2, 0};
    PipelineSettings pipeline;
    std::uint64_t master_seed = 0;
    bool verbose = false;
};

struct ReportRow {
    std::string model;
    std::string combo;  // feature list, or "-" for combo-independent rows
    double mean = 0.0;
    double stddev = 0.0;
    int n = 0;
};

struct RawSeries {
    std::string model;
    std::string combo;
    std::vector<double> errors;
};

struct ExperimentReport {
    std::vector<ReportRow> rows;
    std::vector<std::pair<std::string, std::string>> metadata;

    const ReportRow* find(const std::string& model, const std::string& combo) const;
};

// Aggregates per-unit errors into (mean, sample std, n) rows, sorted by
// (model, combo) so the report is independent of input order.
ExperimentReport make_report_rows(const std::vector<RawSeries>& raw);

// Selection + final training for one (model kind, combo) on a raw training
// set: project features, choose structure/alpha (full grid) or just gamma_l
// (fixed spec), then refit on the whole training set.
TrainedModel fit_pair(ModelKind kind, const FeatureCombo& combo, const Dataset& train_raw,
                      const PipelineSettings& pipeline, const SplitSpec& split, std::uint64_t seed);

// Full selection/training/testing pipeline for one (model kind, combo) on a
// raw training set, evaluated on the raw test set. Exposed for reuse and
// testing; the studies below drive it per cell / group / dataset.
double evaluate_pair(ModelKind kind, const FeatureCombo& combo, const Dataset& train_raw,
                     const Dataset& test_raw, const PipelineSettings& pipeline, const SplitSpec& split,
                     std::uint64_t seed);

// Mean threshold-rule error over a raw test set (needs d and cm_power).
double evaluate_tbba(const Dataset& test_raw, const CellConfig& cell, double gamma_t);

// Per-cell study: every cell is generated, split once (fixed test part),
// learners are selected/trained per combo inside the training part, and all
// models are scored on the identical test split. Reports averages over cells.
ExperimentReport run_stochastic_benchmark(const StochasticBenchmarkSpec& spec);

// Across-cell study: per group, training cells are pooled into one training
// set, validation cells drive early stopping and gamma_l, test cells are
// pooled for scoring. Reports averages over groups.
ExperimentReport run_generalization(const GeneralizationSpec& spec);

// Single-dataset pipeline for imported data: one split (training fraction,
// CV holdout within it), selection and refit per combo, scored on the
// held-out test fraction.
ExperimentReport run_external(const Dataset& ds, const ExternalStudySpec& spec);

}  // namespace dualband
