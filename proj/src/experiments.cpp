#include "dualband/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <stdexcept>

#include "dualband/numerics.hpp"
#include "dualband/rng.hpp"

namespace dualband {

namespace {

FeatureCombo combo(std::initializer_list<Feature> fs) {
    FeatureCombo c;
    c.features = fs;
    return c;
}

std::string pair_tag(ModelKind kind, const FeatureCombo& c) {
    return std::string(model_kind_name(kind)) + "|" + c.to_string();
}

Dataset concat(const Dataset& a, const Dataset& b) {
    Dataset out = a;
    out.examples.insert(out.examples.end(), b.examples.begin(), b.examples.end());
    return out;
}

void append(Dataset& into, const Dataset& from) {
    into.examples.insert(into.examples.end(), from.examples.begin(), from.examples.end());
}

std::vector<ModelComboPair> resolve_pairs(const std::vector<ModelComboPair>& explicit_pairs,
                                          const std::vector<ModelKind>& models,
                                          const std::vector<FeatureCombo>& combos) {
    if (!explicit_pairs.empty()) return explicit_pairs;
    std::vector<ModelComboPair> pairs;
    for (ModelKind m : models)
        for (const FeatureCombo& c : combos) pairs.push_back({m, c});
    return pairs;
}

using SeriesMap = std::map<std::pair<std::string, std::string>, std::vector<double>>;

std::vector<RawSeries> to_raw(const SeriesMap& map) {
    std::vector<RawSeries> raw;
    raw.reserve(map.size());
    for (const auto& [key, errors] : map) raw.push_back({key.first, key.second, errors});
    return raw;
}

std::string cell_config_string(const CellConfig& c) {
    std::string s;
    const auto add = [&s](const char* k, double v) { s += std::string(k) + "=" + format_double(v) + ";"; };
    add("f_c", c.f_c);
    add("f_m", c.f_m);
    add("w_c", c.w_c);
    add("w_m", c.w_m);
    add("p_tx_c", c.p_tx_c);
    add("p_tx_m", c.p_tx_m);
    add("eps", c.eps);
    add("d_break", c.d_break);
    add("d_dcor_c", c.d_dcor_c);
    add("d_dcor_m", c.d_dcor_m);
    add("sigma_c", c.sigma_c);
    add("sigma_m", c.sigma_m);
    add("rho", c.rho);
    add("noise_psd", c.noise_psd);
    add("cell_side", c.cell_side);
    add("n_points", c.n_points);
    return s;
}

std::string layout_string(const std::vector<int>& layout) {
    std::string s;
    for (int w : layout) {
        if (!s.empty()) s += ",";
        s += std::to_string(w);
    }
    return s.empty() ? "none" : s;
}

std::string pipeline_string(const PipelineSettings& p, const SplitSpec& split) {
    std::string s;
    s += "full_grid=" + std::string(p.full_grid ? "1" : "0") + ";";
    s += "layout=" + layout_string(p.fixed_spec.hidden_layout) + ";";
    s += "alpha=" + format_double(p.fixed_spec.alpha) + ";";
    s += "cv_repeats=" + std::to_string(p.cv_repeats) + ";";
    s += "gamma_step=" + format_double(p.space.gamma_step) + ";";
    s += "max_epochs=" + std::to_string(p.train_cfg.max_epochs) + ";";
    s += "learning_rate=" + format_double(p.train_cfg.learning_rate) + ";";
    s += "batch_size=" + std::to_string(p.train_cfg.batch_size) + ";";
    s += "patience=" + std::to_string(p.train_cfg.patience) + ";";
    s += "train_fraction=" + format_double(split.train_fraction) + ";";
    s += "validation_fraction_of_train=" + format_double(split.validation_fraction_of_train) + ";";
    return s;
}

std::string hash_hex(const std::string& s) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(s)));
    return std::string(buf);
}

void add_pipeline_metadata(ExperimentReport& report, const PipelineSettings& p) {
    report.metadata.emplace_back("mode", p.full_grid ? "full-grid" : "fixed");
    report.metadata.emplace_back("layout", layout_string(p.fixed_spec.hidden_layout));
    report.metadata.emplace_back("alpha", format_double(p.fixed_spec.alpha));
    report.metadata.emplace_back("cv_repeats", std::to_string(p.cv_repeats));
    report.metadata.emplace_back("gamma_step", format_double(p.space.gamma_step));
    report.metadata.emplace_back("max_epochs", std::to_string(p.train_cfg.max_epochs));
    report.metadata.emplace_back("learning_rate", format_double(p.train_cfg.learning_rate));
    report.metadata.emplace_back("batch_size", std::to_string(p.train_cfg.batch_size));
    report.metadata.emplace_back("patience", std::to_string(p.train_cfg.patience));
}

}  // namespace

std::vector<FeatureCombo> stochastic_combos() {
    return {combo({Feature::d, Feature::theta}),
            combo({Feature::d, Feature::theta, Feature::cm_power}),
            combo({Feature::theta, Feature::cm_power}),
            combo({Feature::d, Feature::cm_power}),
            combo({Feature::d}),
            combo({Feature::cm_power}),
            combo({Feature::theta})};
}

std::vector<FeatureCombo> external_combos() {
    return {combo({Feature::d, Feature::theta}),
            combo({Feature::d, Feature::theta, Feature::cm_power}),
            combo({Feature::d, Feature::cm_power}),
            combo({Feature::cm_power, Feature::delay}),
            combo({Feature::cm_power}),
            combo({Feature::d}),
            combo({Feature::cm_power, Feature::delay, Feature::mpc_power}),
            combo({Feature::delay, Feature::mpc_power})};
}

void PipelineSettings::validate() const {
    space.validate();
    train_cfg.validate();
    if (cv_repeats < 1) throw std::invalid_argument("pipeline: cv_repeats must be >= 1");
    if (!full_grid) fixed_spec.validate();
}

void StochasticBenchmarkSpec::validate() const {
    if (n_cells < 1) throw std::invalid_argument("stochastic benchmark: n_cells must be >= 1");
    cell.validate();
    pipeline.validate();
    if (pairs.empty() && (models.empty() || combos.empty()) && !include_tbba)
        throw std::invalid_argument("stochastic benchmark: nothing to evaluate");
}

void GeneralizationSpec::validate() const {
    if (n_groups < 1) throw std::invalid_argument("generalization: n_groups must be >= 1");
    if (train_cells < 1 || val_cells < 1 || test_cells < 1)
        throw std::invalid_argument("generalization: cell counts must be positive");
    if (train_cells + val_cells + test_cells != 50)
        throw std::invalid_argument("generalization: cell counts must sum to the group size 50");
    cell.validate();
    model_spec.validate();
    train_cfg.validate();
}

const ReportRow* ExperimentReport::find(const std::string& model, const std::string& combo_name) const {
    for (const ReportRow& row : rows)
        if (row.model == model && row.combo == combo_name) return &row;
    return nullptr;
}

ExperimentReport make_report_rows(const std::vector<RawSeries>& raw) {
    if (raw.empty()) throw std::invalid_argument("make_report_rows: no series");
    SeriesMap merged;
    for (const RawSeries& s : raw) {
        if (s.errors.empty()) throw std::invalid_argument("make_report_rows: empty series " + s.model);
        auto& into = merged[{s.model, s.combo}];
        into.insert(into.end(), s.errors.begin(), s.errors.end());
    }
    ExperimentReport report;
    for (const auto& [key, errors] : merged) {
        ReportRow row;
        row.model = key.first;
        row.combo = key.second;
        row.n = static_cast<int>(errors.size());
        double mean = 0.0;
        for (double e : errors) mean += e;
        mean /= static_cast<double>(errors.size());
        double ss = 0.0;
        for (double e : errors) ss += (e - mean) * (e - mean);
        row.mean = mean;
        row.stddev = errors.size() > 1 ? std::sqrt(ss / static_cast<double>(errors.size() - 1)) : 0.0;
        report.rows.push_back(row);
    }
    return report;
}

TrainedModel fit_pair(ModelKind kind, const FeatureCombo& combo, const Dataset& train_raw,
                      const PipelineSettings& pipeline, const SplitSpec& split, std::uint64_t seed) {
    const Dataset train_proj = select_features(train_raw, combo);
    ModelSpec spec;
    double gamma_l = 0.5;
    if (pipeline.full_grid) {
        const SelectionResult sel = grid_search(pipeline.space, kind, pipeline.train_cfg, train_proj,
                                                split, derive_seed(seed, "grid"));
        spec = sel.chosen_spec;
        gamma_l = sel.chosen_gamma_l;
    } else {
        spec = pipeline.fixed_spec;
        spec.kind = kind;
        const CvResult cv = mc_cross_validate(spec, pipeline.train_cfg, train_proj, split,
                                              pipeline.cv_repeats, pipeline.space.gamma_step,
                                              derive_seed(seed, "cv"));
        gamma_l = select_gamma_l(cv);
    }
    return fit_full(spec, gamma_l, train_proj, pipeline.train_cfg, split, derive_seed(seed, "fit"));
}

double evaluate_pair(ModelKind kind, const FeatureCombo& combo, const Dataset& train_raw,
                     const Dataset& test_raw, const PipelineSettings& pipeline, const SplitSpec& split,
                     std::uint64_t seed) {
    const TrainedModel model = fit_pair(kind, combo, train_raw, pipeline, split, seed);
    const Dataset test_proj = select_features(test_raw, combo);
    const Dataset test_std = apply_scaler(model.scaler, test_proj);
    const DesignMatrix dm = to_design_matrix(test_std);
    const Eigen::VectorXd softs = predict_soft_matrix(model, dm.x);
    Eigen::VectorXd decisions(softs.size());
    for (Eigen::Index i = 0; i < softs.size(); ++i) decisions(i) = harden(softs(i), model.gamma_l);
    return error_metric(dm.y, decisions);
}

double evaluate_tbba(const Dataset& test_raw, const CellConfig& cell, double gamma_t) {
    if (test_raw.empty()) throw std::invalid_argument("evaluate_tbba: empty test set");
    double wrong = 0.0;
    for (const Example& ex : test_raw.examples)
        wrong += std::abs(tbba_decide(ex.features, cell, gamma_t) - ex.label);
    return wrong / static_cast<double>(test_raw.n());
}

ExperimentReport run_stochastic_benchmark(const StochasticBenchmarkSpec& spec) {
    spec.validate();
    const auto pairs = resolve_pairs(spec.pairs, spec.models, spec.combos);
    SeriesMap series;
    int excluded_cells = 0;
    int excluded_evaluations = 0;
    for (int i = 0; i < spec.n_cells; ++i) {
        const std::uint64_t cell_seed = derive_seed(spec.master_seed, "cell", static_cast<std::uint64_t>(i));
        Dataset ds;
        SplitResult parts;
        try {
            ds = generate_cell(spec.cell, cell_seed);
            parts = split_random(ds, {spec.split.train_fraction, spec.split.validation_fraction_of_train,
                                      derive_seed(cell_seed, "split")});
        } catch (const std::exception& e) {
            ++excluded_cells;
            std::cerr << "cell " << i << " excluded: " << e.what() << "\n";
            continue;
        }
        const Dataset train_raw = concat(parts.train, parts.validation);
        series[{"baseline", "-"}].push_back(majority_baseline_error(ds));
        const std::uint64_t learner_seed = derive_seed(cell_seed, "learner", spec.learner_salt);
        for (const ModelComboPair& pair : pairs) {
            try {
                const double err = evaluate_pair(pair.model, pair.combo, train_raw, parts.test,
                                                 spec.pipeline, spec.split,
                                                 derive_seed(learner_seed, pair_tag(pair.model, pair.combo)));
                series[{model_kind_name(pair.model), pair.combo.to_string()}].push_back(err);
            } catch (const std::exception& e) {
                ++excluded_evaluations;
                std::cerr << "cell " << i << " " << pair_tag(pair.model, pair.combo)
                          << " excluded: " << e.what() << "\n";
            }
        }
        if (spec.include_tbba)
            series[{"tbba", "-"}].push_back(evaluate_tbba(parts.test, spec.cell, spec.gamma_t));
        if (spec.verbose && (i + 1) % 10 == 0)
            std::cerr << "stochastic benchmark: " << (i + 1) << "/" << spec.n_cells << " cells\n";
    }
    ExperimentReport report = make_report_rows(to_raw(series));
    report.metadata.emplace_back("study", "stochastic");
    report.metadata.emplace_back("master_seed", std::to_string(spec.master_seed));
    report.metadata.emplace_back("n_cells", std::to_string(spec.n_cells));
    report.metadata.emplace_back(
        "config_hash", hash_hex(cell_config_string(spec.cell) + pipeline_string(spec.pipeline, spec.split) +
                                "gamma_t=" + format_double(spec.gamma_t)));
    add_pipeline_metadata(report, spec.pipeline);
    report.metadata.emplace_back("train_fraction", format_double(spec.split.train_fraction));
    report.metadata.emplace_back("validation_fraction_of_train",
                                 format_double(spec.split.validation_fraction_of_train));
    report.metadata.emplace_back("gamma_t", format_double(spec.gamma_t));
    report.metadata.emplace_back("learner_salt", std::to_string(spec.learner_salt));
    report.metadata.emplace_back("excluded_cells", std::to_string(excluded_cells));
    report.metadata.emplace_back("excluded_evaluations", std::to_string(excluded_evaluations));
    return report;
}

ExperimentReport run_generalization(const GeneralizationSpec& spec) {
    spec.validate();
    const auto pairs = resolve_pairs(spec.pairs, spec.models, spec.combos);
    const int group_size = spec.train_cells + spec.val_cells + spec.test_cells;
    const std::vector<double> grid = gamma_grid(spec.gamma_step);
    SeriesMap series;
    int excluded_evaluations = 0;
    for (int g = 0; g < spec.n_groups; ++g) {
        Dataset train_pool, val_pool, test_pool;
        for (int k = 0; k < group_size; ++k) {
            const std::uint64_t idx = static_cast<std::uint64_t>(g) * group_size + k;
            const Dataset cell_ds = generate_cell(spec.cell, derive_seed(spec.master_seed, "cell", idx));
            if (k < spec.train_cells)
                append(train_pool, cell_ds);
            else if (k < spec.train_cells + spec.val_cells)
                append(val_pool, cell_ds);
            else
                append(test_pool, cell_ds);
        }
        series[{"baseline", "-"}].push_back(majority_baseline_error(test_pool));
        const std::uint64_t group_seed = derive_seed(spec.master_seed, "group", static_cast<std::uint64_t>(g));
        for (const ModelComboPair& pair : pairs) {
            try {
                const std::string tag = pair_tag(pair.model, pair.combo);
                const Dataset train_proj = select_features(train_pool, pair.combo);
                const Dataset val_proj = select_features(val_pool, pair.combo);
                const Dataset test_proj = select_features(test_pool, pair.combo);
                const Scaler scaler = fit_scaler(train_proj, pair.combo);
                ModelSpec mspec = spec.model_spec;
                mspec.kind = pair.model;
                mspec.seed = derive_seed(group_seed, tag + "/weights");
                TrainConfig tcfg = spec.train_cfg;
                tcfg.seed = derive_seed(group_seed, tag + "/batches");
                TrainedModel model =
                    train(mspec, tcfg, apply_scaler(scaler, train_proj), apply_scaler(scaler, val_proj));
                model.scaler = scaler;
                const DesignMatrix vm = to_design_matrix(apply_scaler(scaler, val_proj));
                const Eigen::VectorXd val_softs = predict_soft_matrix(model, vm.x);
                CvResult curve;
                curve.gamma_grid = grid;
                curve.mean_val_error.resize(grid.size());
                for (std::size_t gi = 0; gi < grid.size(); ++gi) {
                    Eigen::VectorXd dec(val_softs.size());
                    for (Eigen::Index r = 0; r < val_softs.size(); ++r)
                        dec(r) = harden(val_softs(r), grid[gi]);
                    curve.mean_val_error[gi] = error_metric(vm.y, dec);
                }
                model.gamma_l = select_gamma_l(curve);
                const DesignMatrix tm = to_design_matrix(apply_scaler(scaler, test_proj));
                const Eigen::VectorXd softs = predict_soft_matrix(model, tm.x);
                Eigen::VectorXd decisions(softs.size());
                for (Eigen::Index r = 0; r < softs.size(); ++r)
                    decisions(r) = harden(softs(r), model.gamma_l);
                series[{model_kind_name(pair.model), pair.combo.to_string()}].push_back(
                    error_metric(tm.y, decisions));
            } catch (const std::exception& e) {
                ++excluded_evaluations;
                std::cerr << "group " << g << " " << pair_tag(pair.model, pair.combo)
                          << " excluded: " << e.what() << "\n";
            }
        }
        if (spec.include_tbba)
            series[{"tbba", "-"}].push_back(evaluate_tbba(test_pool, spec.cell, spec.gamma_t));
        if (spec.verbose) std::cerr << "generalization: group " << (g + 1) << "/" << spec.n_groups << "\n";
    }
    ExperimentReport report = make_report_rows(to_raw(series));
    report.metadata.emplace_back("study", "generalization");
    report.metadata.emplace_back("master_seed", std::to_string(spec.master_seed));
    report.metadata.emplace_back("n_groups", std::to_string(spec.n_groups));
    report.metadata.emplace_back("group_cells",
                                 std::to_string(spec.train_cells) + "/" + std::to_string(spec.val_cells) +
                                     "/" + std::to_string(spec.test_cells));
    report.metadata.emplace_back(
        "config_hash",
        hash_hex(cell_config_string(spec.cell) + "layout=" + layout_string(spec.model_spec.hidden_layout) +
                 ";alpha=" + format_double(spec.model_spec.alpha) +
                 ";max_epochs=" + std::to_string(spec.train_cfg.max_epochs) +
                 ";gamma_t=" + format_double(spec.gamma_t)));
    report.metadata.emplace_back("layout", layout_string(spec.model_spec.hidden_layout));
    report.metadata.emplace_back("alpha", format_double(spec.model_spec.alpha));
    report.metadata.emplace_back("max_epochs", std::to_string(spec.train_cfg.max_epochs));
    report.metadata.emplace_back("patience", std::to_string(spec.train_cfg.patience));
    report.metadata.emplace_back("gamma_t", format_double(spec.gamma_t));
    report.metadata.emplace_back("excluded_evaluations", std::to_string(excluded_evaluations));
    return report;
}

ExperimentReport run_external(const Dataset& ds, const ExternalStudySpec& spec) {
    spec.pipeline.validate();
    if (ds.empty()) throw std::invalid_argument("run_external: dataset is empty");
    const auto pairs = resolve_pairs(spec.pairs, spec.models, spec.combos);
    const SplitResult parts = split_random(
        ds, {spec.split.train_fraction, spec.split.validation_fraction_of_train,
             derive_seed(spec.master_seed, "split")});
    const Dataset train_raw = concat(parts.train, parts.validation);
    SeriesMap series;
    int excluded_evaluations = 0;
    series[{"baseline", "-"}].push_back(majority_baseline_error(parts.test));
    for (const ModelComboPair& pair : pairs) {
        try {
            const double err =
                evaluate_pair(pair.model, pair.combo, train_raw, parts.test, spec.pipeline, spec.split,
                              derive_seed(spec.master_seed, pair_tag(pair.model, pair.combo)));
            series[{model_kind_name(pair.model), pair.combo.to_string()}].push_back(err);
        } catch (const std::exception& e) {
            ++excluded_evaluations;
            std::cerr << pair_tag(pair.model, pair.combo) << " excluded: " << e.what() << "\n";
        }
        if (spec.verbose)
            std::cerr << "external study: " << pair_tag(pair.model, pair.combo) << " done\n";
    }
    ExperimentReport report = make_report_rows(to_raw(series));
    report.metadata.emplace_back("study", "external");
    report.metadata.emplace_back("master_seed", std::to_string(spec.master_seed));
    report.metadata.emplace_back("n_examples", std::to_string(ds.n()));
    report.metadata.emplace_back("config_hash", hash_hex(pipeline_string(spec.pipeline, spec.split)));
    add_pipeline_metadata(report, spec.pipeline);
    report.metadata.emplace_back("train_fraction", format_double(spec.split.train_fraction));
    report.metadata.emplace_back("validation_fraction_of_train",
                                 format_double(spec.split.validation_fraction_of_train));
    report.metadata.emplace_back("excluded_evaluations", std::to_string(excluded_evaluations));
    return report;
}

}  // namespace dualband
