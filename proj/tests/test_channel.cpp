#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dualband/channel.hpp"
#include "dualband/rng.hpp"

using namespace dualband;

TEST_CASE("path loss matches the frozen reference values") {
    const CellConfig cfg;
    CHECK(path_loss(1.0, 2.5e9, cfg) == doctest::Approx(40.4065833953).epsilon(1e-10));
    CHECK(path_loss(1.0, 28e9, cfg) == doctest::Approx(61.3909438487).epsilon(1e-10));
    // Beyond the 50 m break point the slope steepens to eps = 4.
    CHECK(path_loss(500.0, 2.5e9, cfg) == doctest::Approx(114.3859834820).epsilon(1e-10));
}

TEST_CASE("path loss is continuous at the break point and rejects d < 1") {
    const CellConfig cfg;
    CHECK(path_loss(50.0 - 1e-9, 2.5e9, cfg) ==
          doctest::Approx(path_loss(50.0 + 1e-9, 2.5e9, cfg)).epsilon(1e-9));
    CHECK_THROWS_AS(path_loss(0.5, 2.5e9, cfg), std::out_of_range);
}

TEST_CASE("noise power and link budget match frozen values") {
    const CellConfig cfg;
    CHECK(noise_power(10e6, cfg) == doctest::Approx(-104.0).epsilon(1e-12));
    CHECK(noise_power(100e6, cfg) == doctest::Approx(-94.0).epsilon(1e-12));
    const LinkBudget lb = link_budget(1.0, cfg);
    CHECK(std::log10(lb.gamma_prime_c) == doctest::Approx(7.8593416605).epsilon(1e-10));
    CHECK(lb.gamma_dprime == 0.1);
    CHECK(snr_db(Band::cm, 1.0, 0.0, cfg) == doctest::Approx(78.5934166047).epsilon(1e-10));
    const LinkBudget lb200 = link_budget(200.0, cfg);
    CHECK(std::log10(lb200.gamma_prime_c) == doctest::Approx(2.0531616864837002).epsilon(1e-12));
    CHECK(std::log10(lb200.gamma_prime_m) == doctest::Approx(-0.34527435885666299).epsilon(1e-12));
}

TEST_CASE("rate is the Shannon form and rejects non-finite shadowing") {
    CellConfig cfg;
    LinkBudget lb;
    lb.gamma_prime_c = 10.0;
    lb.gamma_prime_m = 1.0;
    CHECK(rate(Band::cm, lb, 0.0, cfg) == doctest::Approx(cfg.w_c * std::log(11.0)).epsilon(1e-14));
    // +10 dB shadowing multiplies the linear SNR by 10
    CHECK(rate(Band::cm, lb, 10.0, cfg) == doctest::Approx(cfg.w_c * std::log(101.0)).epsilon(1e-14));
    CHECK_THROWS_AS(rate(Band::cm, lb, std::numeric_limits<double>::quiet_NaN(), cfg),
                    std::invalid_argument);
}

TEST_CASE("joint shadowing covariance has the exact block structure") {
    const CellConfig cfg;
    MsPlacement p = MsPlacement::from_points({0.0, 30.0}, {3.0, 7.0});
    const double r = std::hypot(30.0 - 0.0, 7.0 - 3.0);
    const Eigen::MatrixXd k = joint_shadowing_covariance(p, cfg);
    REQUIRE(k.rows() == 4);
    REQUIRE(k.cols() == 4);
    CHECK(k(0, 0) == doctest::Approx(25.0).epsilon(1e-15));
    CHECK(k(2, 2) == doctest::Approx(49.0).epsilon(1e-15));
    CHECK(k(0, 1) == doctest::Approx(25.0 * std::exp(-r / 25.0)).epsilon(1e-14));
    CHECK(k(2, 3) == doctest::Approx(49.0 * std::exp(-r / 24.0)).epsilon(1e-14));
    // co-located cross-band entry: rho * sigma_c * sigma_m
    CHECK(k(0, 2) == doctest::Approx(0.75 * 5.0 * 7.0).epsilon(1e-15));
    // distant cross-band entry decays over the geometric-mean distance
    CHECK(k(0, 3) == doctest::Approx(26.25 * std::exp(-r / std::sqrt(25.0 * 24.0))).epsilon(1e-14));
    CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("joint shadowing covariance is positive semidefinite on random placements") {
    const CellConfig cfg;
    MsPlacement p = uniform_placement([] {
        CellConfig c;
        c.n_points = 12;
        return c;
    }(), 99);
    const Eigen::MatrixXd k = joint_shadowing_covariance(p, cfg);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
    CHECK(es.eigenvalues().minCoeff() > -1e-8 * es.eigenvalues().maxCoeff());
}

TEST_CASE("sampled shadowing reproduces the marginal and cross statistics") {
    const CellConfig cfg;
    const MsPlacement p = MsPlacement::from_points({10.0}, {0.0});
    double sum_c = 0.0, sum_cc = 0.0, sum_mm = 0.0, sum_cm = 0.0;
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
        const JointShadowing s = sample_joint_shadowing(p, cfg, derive_seed(5, "shadow", i));
        sum_c += s.s_c[0];
        sum_cc += s.s_c[0] * s.s_c[0];
        sum_mm += s.s_m[0] * s.s_m[0];
        sum_cm += s.s_c[0] * s.s_m[0];
    }
    CHECK(sum_c / n == doctest::Approx(0.0).epsilon(1).scale(0.25));
    CHECK(sum_cc / n == doctest::Approx(25.0).epsilon(0.06));
    CHECK(sum_mm / n == doctest::Approx(49.0).epsilon(0.06));
    const double corr = (sum_cm / n) / std::sqrt((sum_cc / n) * (sum_mm / n));
    CHECK(corr == doctest::Approx(0.75).epsilon(0.05));
}

TEST_CASE("sampled shadowing is seed-deterministic") {
    CellConfig cfg;
    cfg.n_points = 20;
    const MsPlacement p = uniform_placement(cfg, 3);
    const JointShadowing a = sample_joint_shadowing(p, cfg, 17);
    const JointShadowing b = sample_joint_shadowing(p, cfg, 17);
    const JointShadowing c = sample_joint_shadowing(p, cfg, 18);
    CHECK(a.s_c == b.s_c);
    CHECK(a.s_m == b.s_m);
    CHECK(a.s_c != c.s_c);
}

TEST_CASE("uniform placement covers the square cell with clamped distances") {
    CellConfig cfg;
    cfg.n_points = 500;
    const MsPlacement p = uniform_placement(cfg, 21);
    REQUIRE(p.n() == 500);
    for (std::size_t i = 0; i < p.n(); ++i) {
        CHECK(p.x[i] >= -250.0);
        CHECK(p.x[i] < 250.0);
        CHECK(p.y[i] >= -250.0);
        CHECK(p.y[i] < 250.0);
        CHECK(p.d[i] >= 1.0);
        CHECK(p.theta[i] >= -std::numbers::pi);
        CHECK(p.theta[i] <= std::numbers::pi);
    }
}

TEST_CASE("from_points clamps the distance at the 1 m reference") {
    const MsPlacement p = MsPlacement::from_points({0.1, 3.0}, {0.0, 4.0});
    CHECK(p.d[0] == 1.0);
    CHECK(p.theta[0] == 0.0);
    CHECK(p.d[1] == 5.0);
}

TEST_CASE("generate_cell emits the three stochastic features and is deterministic") {
    CellConfig cfg;
    cfg.n_points = 60;
    const Dataset a = generate_cell(cfg, 7);
    const Dataset b = generate_cell(cfg, 7);
    const Dataset c = generate_cell(cfg, 8);
    REQUIRE(a.n() == 60);
    for (const Example& ex : a.examples) {
        CHECK(ex.features.has(Feature::d));
        CHECK(ex.features.has(Feature::theta));
        CHECK(ex.features.has(Feature::cm_power));
        CHECK(!ex.features.has(Feature::delay));
        CHECK(!ex.features.has(Feature::mpc_power));
        CHECK((ex.label == 0 || ex.label == 1));
    }
    bool identical = true, differs = false;
    for (std::size_t i = 0; i < a.n(); ++i) {
        identical &= *a.examples[i].features[Feature::cm_power] ==
                     *b.examples[i].features[Feature::cm_power];
        differs |= *a.examples[i].features[Feature::cm_power] !=
                   *c.examples[i].features[Feature::cm_power];
    }
    CHECK(identical);
    CHECK(differs);
}

TEST_CASE("generate_cell label balance is moderate for a full-size cell") {
    const CellConfig cfg;  // 2000 points
    const Dataset ds = generate_cell(cfg, 123);
    double ones = 0;
    for (const Example& ex : ds.examples) ones += ex.label;
    const double frac = ones / static_cast<double>(ds.n());
    CHECK(frac > 0.2);
    CHECK(frac < 0.8);
}
