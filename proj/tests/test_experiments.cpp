#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dualband/experiments.hpp"
#include "dualband/rng.hpp"
#include "dualband/tbba.hpp"

using namespace dualband;

namespace {

// Small everything: tiny cells and a cheap fixed pipeline keep these tests fast.
CellConfig tiny_cell(int n_points) {
    CellConfig c;
    c.n_points = n_points;
    return c;
}

PipelineSettings cheap_pipeline() {
    PipelineSettings p;
    p.full_grid = false;
    p.fixed_spec.kind = ModelKind::logistic;
    p.fixed_spec.hidden_layout = {8};
    p.fixed_spec.alpha = 0.1;
    p.space.gamma_step = 0.25;
    p.train_cfg = TrainConfig{40, 0.5, 16, 10, 0};
    p.cv_repeats = 2;
    return p;
}

}  // namespace

TEST_CASE("the stochastic benchmark uses the seven documented feature combinations") {
    const auto combos = stochastic_combos();
    REQUIRE(combos.size() == 7);
    CHECK(combos[0].to_string() == "d,theta");
    CHECK(combos[1].to_string() == "d,theta,cm_power");
    CHECK(combos[2].to_string() == "theta,cm_power");
    CHECK(combos[3].to_string() == "d,cm_power");
    CHECK(combos[4].to_string() == "d");
    CHECK(combos[5].to_string() == "cm_power");
    CHECK(combos[6].to_string() == "theta");
}

TEST_CASE("the external study uses the eight documented feature combinations") {
    const auto combos = external_combos();
    REQUIRE(combos.size() == 8);
    CHECK(combos[0].to_string() == "d,theta");
    CHECK(combos[1].to_string() == "d,theta,cm_power");
    CHECK(combos[2].to_string() == "d,cm_power");
    CHECK(combos[3].to_string() == "cm_power,delay");
    CHECK(combos[4].to_string() == "cm_power");
    CHECK(combos[5].to_string() == "d");
    CHECK(combos[6].to_string() == "cm_power,delay,mpc_power");
    CHECK(combos[7].to_string() == "delay,mpc_power");
}

TEST_CASE("make_report_rows aggregates with sample std and sorts by key") {
    std::vector<RawSeries> raw = {{"nn", "d", {0.1, 0.3}}, {"gr", "d", {0.2}}};
    const ExperimentReport rep = make_report_rows(raw);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[0].model == "gr");  // sorted
    CHECK(rep.rows[0].n == 1);
    CHECK(rep.rows[0].stddev == 0.0);
    CHECK(rep.rows[1].model == "nn");
    CHECK(rep.rows[1].mean == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(rep.rows[1].stddev == doctest::Approx(0.1414213562373095).epsilon(1e-12));
    CHECK(rep.rows[1].n == 2);

    std::vector<RawSeries> permuted = {{"gr", "d", {0.2}}, {"nn", "d", {0.3, 0.1}}};
    const ExperimentReport rep2 = make_report_rows(permuted);
    CHECK(rep2.rows[1].mean == rep.rows[1].mean);
    CHECK(rep2.rows[1].stddev == rep.rows[1].stddev);

    CHECK(rep.find("nn", "d") != nullptr);
    CHECK(rep.find("nn", "theta") == nullptr);
    CHECK_THROWS_AS(make_report_rows({}), std::invalid_argument);
    CHECK_THROWS_AS(make_report_rows({{"nn", "d", {}}}), std::invalid_argument);
}

TEST_CASE("evaluate_tbba equals the per-example decision average") {
    const CellConfig cell = tiny_cell(80);
    const Dataset ds = generate_cell(cell, 5);
    double wrong = 0.0;
    for (const Example& ex : ds.examples)
        wrong += std::abs(tbba_decide(ex.features, cell, 0.5) - ex.label);
    CHECK(evaluate_tbba(ds, cell, 0.5) == doctest::Approx(wrong / ds.n()).epsilon(1e-15));
    CHECK_THROWS_AS(evaluate_tbba(Dataset{}, cell, 0.5), std::invalid_argument);
}

TEST_CASE("evaluate_pair runs the full pipeline deterministically") {
    const CellConfig cell = tiny_cell(300);
    const Dataset ds = generate_cell(cell, 3);
    const SplitSpec split{0.65, 0.2, derive_seed(3, "split")};
    const SplitResult parts = split_random(ds, split);
    Dataset train_raw = parts.train;
    train_raw.examples.insert(train_raw.examples.end(), parts.validation.examples.begin(),
                              parts.validation.examples.end());
    const PipelineSettings pipeline = cheap_pipeline();
    const double e1 = evaluate_pair(ModelKind::logistic, make_combo({"cm_power"}), train_raw, parts.test,
                                    pipeline, split, 99);
    const double e2 = evaluate_pair(ModelKind::logistic, make_combo({"cm_power"}), train_raw, parts.test,
                                    pipeline, split, 99);
    CHECK(e1 == e2);
    CHECK(e1 >= 0.0);
    CHECK(e1 <= 0.5);  // cm_power alone beats chance on this data

    // fit_pair returns the model evaluate_pair scored
    const TrainedModel m =
        fit_pair(ModelKind::logistic, make_combo({"cm_power"}), train_raw, pipeline, split, 99);
    const Dataset test_std = apply_scaler(m.scaler, select_features(parts.test, make_combo({"cm_power"})));
    const DesignMatrix dm = to_design_matrix(test_std);
    const Eigen::VectorXd softs = predict_soft_matrix(m, dm.x);
    Eigen::VectorXd dec(softs.size());
    for (Eigen::Index i = 0; i < softs.size(); ++i) dec(i) = harden(softs(i), m.gamma_l);
    CHECK(error_metric(dm.y, dec) == e1);
}

TEST_CASE("stochastic benchmark: rows, metadata, determinism, and tbba salt-independence") {
    StochasticBenchmarkSpec spec;
    spec.n_cells = 2;
    spec.cell = tiny_cell(300);
    spec.pairs = {{ModelKind::logistic, make_combo({"cm_power"})}};
    spec.pipeline = cheap_pipeline();
    spec.master_seed = 11;

    const ExperimentReport a = run_stochastic_benchmark(spec);
    REQUIRE(a.rows.size() == 3);  // baseline, gr, tbba
    CHECK(a.find("baseline", "-") != nullptr);
    CHECK(a.find("gr", "cm_power") != nullptr);
    CHECK(a.find("tbba", "-") != nullptr);
    CHECK(a.find("gr", "cm_power")->n == 2);
    for (const char* key : {"study", "master_seed", "n_cells", "config_hash", "mode", "layout",
                            "alpha", "cv_repeats", "gamma_step", "gamma_t", "excluded_cells",
                            "excluded_evaluations"}) {
        const bool present = std::any_of(a.metadata.begin(), a.metadata.end(),
                                         [&](const auto& kv) { return kv.first == key; });
        CHECK_MESSAGE(present, "metadata key missing: ", key);
    }

    const ExperimentReport b = run_stochastic_benchmark(spec);
    REQUIRE(b.rows.size() == a.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].model == b.rows[i].model);
        CHECK(a.rows[i].mean == b.rows[i].mean);
        CHECK(a.rows[i].stddev == b.rows[i].stddev);
    }

    // Perturbing only the learner streams must leave TBBA and baseline rows
    // bit-identical (the threshold rule is training-free).
    StochasticBenchmarkSpec salted = spec;
    salted.learner_salt = 1;
    const ExperimentReport c = run_stochastic_benchmark(salted);
    CHECK(c.find("tbba", "-")->mean == a.find("tbba", "-")->mean);
    CHECK(c.find("baseline", "-")->mean == a.find("baseline", "-")->mean);
}

TEST_CASE("generalization study pools cells within groups") {
    GeneralizationSpec spec;
    spec.n_groups = 1;
    spec.cell = tiny_cell(40);
    spec.pairs = {{ModelKind::linear, make_combo({"cm_power"})}};
    spec.model_spec.kind = ModelKind::linear;
    spec.model_spec.alpha = 0.1;
    spec.train_cfg = TrainConfig{20, 0.5, 32, 5, 0};
    spec.gamma_step = 0.25;
    spec.master_seed = 4;
    const ExperimentReport rep = run_generalization(spec);
    REQUIRE(rep.rows.size() == 3);  // baseline, lr, tbba
    const ReportRow* lr = rep.find("lr", "cm_power");
    REQUIRE(lr != nullptr);
    CHECK(lr->n == 1);
    CHECK(lr->mean >= 0.0);
    CHECK(lr->mean <= 0.5);
    const ReportRow* tbba = rep.find("tbba", "-");
    REQUIRE(tbba != nullptr);
    CHECK(tbba->mean < 0.5);

    GeneralizationSpec bad = spec;
    bad.train_cells = 10;  // 10 + 5 + 15 != 50
    CHECK_THROWS_AS(run_generalization(bad), std::invalid_argument);
}

TEST_CASE("external study splits once and reports per-pair rows") {
    // Margin-separable synthetic data on cm_power.
    Dataset ds;
    Rng rng(6);
    for (int i = 0; i < 400; ++i) {
        Example e;
        const bool one = rng.uniform() < 0.5;
        e.features[Feature::cm_power] = one ? rng.uniform(5.0, 20.0) : rng.uniform(-20.0, -5.0);
        e.features[Feature::d] = rng.uniform(1.0, 500.0);
        e.label = one ? 1 : 0;
        ds.examples.push_back(e);
    }
    ExternalStudySpec spec;
    spec.pairs = {{ModelKind::logistic, make_combo({"cm_power"})}};
    spec.pipeline = cheap_pipeline();
    spec.master_seed = 8;
    const ExperimentReport rep = run_external(ds, spec);
    const ReportRow* row = rep.find("gr", "cm_power");
    REQUIRE(row != nullptr);
    CHECK(row->n == 1);
    CHECK(row->mean <= 0.05);  // separable rule is learned
    CHECK(rep.find("baseline", "-") != nullptr);

    const ExperimentReport rep2 = run_external(ds, spec);
    CHECK(rep2.find("gr", "cm_power")->mean == row->mean);

    CHECK_THROWS_AS(run_external(Dataset{}, spec), std::invalid_argument);
}

TEST_CASE("per-cell failures are excluded and counted, not fatal") {
    StochasticBenchmarkSpec spec;
    spec.n_cells = 2;
    spec.cell = tiny_cell(300);
    // delay is never generated by the stochastic channel: every evaluation
    // of this pair fails and must be recorded as excluded.
    spec.pairs = {{ModelKind::logistic, make_combo({"delay"})},
                  {ModelKind::logistic, make_combo({"cm_power"})}};
    spec.pipeline = cheap_pipeline();
    spec.master_seed = 2;
    const ExperimentReport rep = run_stochastic_benchmark(spec);
    CHECK(rep.find("gr", "delay") == nullptr);
    CHECK(rep.find("gr", "cm_power") != nullptr);
    bool found = false;
    for (const auto& [k, v] : rep.metadata)
        if (k == "excluded_evaluations") {
            CHECK(v == "2");  // the bad pair fails once per cell
            found = true;
        }
    CHECK(found);
}
