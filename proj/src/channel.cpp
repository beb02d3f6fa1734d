#include "dualband/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <lapacke.h>

#include "dualband/rng.hpp"

extern "C" void openblas_set_num_threads(int);

namespace dualband {

namespace {

constexpr double kC0 = 299792458.0;  // m/s

double fspl_1m(double f) { return 20.0 * std::log10(4.0 * std::numbers::pi * f / kC0); }

void pin_blas_threads() {
    static const bool once = [] {
        openblas_set_num_threads(1);  // keeps factorization results run-to-run identical
        return true;
    }();
    (void)once;
}

// Lower-triangular Cholesky factor of the joint covariance, with the jitter
// escalation policy. Only the lower triangle of the result is meaningful.
Eigen::MatrixXd factor_covariance(const Eigen::MatrixXd& cov, const CellConfig& cfg) {
    pin_blas_threads();
    const lapack_int n = static_cast<lapack_int>(cov.rows());
    const double sigma2 = std::max(cfg.sigma_c * cfg.sigma_c, cfg.sigma_m * cfg.sigma_m);
    const double jitters[] = {0.0, 1e-10 * sigma2, 1e-8 * sigma2, 1e-6 * sigma2};
    Eigen::MatrixXd l;
    for (double jitter : jitters) {
        l = cov;
        if (jitter > 0.0) l.diagonal().array() += jitter;
        const lapack_int info = LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', n, l.data(), n);
        if (info == 0) return l;
        if (info < 0)
            throw std::runtime_error("joint shadowing factorization: bad argument " +
                                     std::to_string(-info));
    }
    throw std::runtime_error(
        "joint shadowing covariance is not positive definite even with diagonal jitter " +
        std::to_string(1e-6 * sigma2));
}

}  // namespace

void CellConfig::validate() const {
    if (!(f_c > 0.0 && f_m > 0.0)) throw std::invalid_argument("cell config: frequencies must be positive");
    if (!(w_c > 0.0 && w_m > 0.0)) throw std::invalid_argument("cell config: bandwidths must be positive");
    if (!(d_break > 0.0 && d_dcor_c > 0.0 && d_dcor_m > 0.0 && cell_side > 0.0))
        throw std::invalid_argument("cell config: distances must be positive");
    if (!(rho > -1.0 && rho < 1.0)) throw std::invalid_argument("cell config: rho must lie in (-1, 1)");
    if (!(sigma_c > 0.0 && sigma_m > 0.0))
        throw std::invalid_argument("cell config: shadowing deviations must be positive");
    if (!(eps >= 2.0)) throw std::invalid_argument("cell config: eps must be >= 2");
    if (n_points < 1) throw std::invalid_argument("cell config: n_points must be >= 1");
}

MsPlacement MsPlacement::from_points(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("placement: x/y length mismatch");
    MsPlacement p;
    p.x = xs;
    p.y = ys;
    p.d.reserve(xs.size());
    p.theta.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        p.d.push_back(std::max(1.0, std::hypot(xs[i], ys[i])));
        p.theta.push_back(std::atan2(ys[i], xs[i]));
    }
    return p;
}

double path_loss(double d, double f, const CellConfig& cfg) {
    if (!(d >= 1.0)) throw std::out_of_range("path_loss: d must be >= 1 m");
    if (d <= cfg.d_break) return fspl_1m(f) + 20.0 * std::log10(d);
    return fspl_1m(f) + 20.0 * std::log10(cfg.d_break) + 10.0 * cfg.eps * std::log10(d / cfg.d_break);
}

double noise_power(double w, const CellConfig& cfg) {
    if (!(w > 0.0)) throw std::invalid_argument("noise_power: bandwidth must be positive");
    return cfg.noise_psd + 10.0 * std::log10(w);
}

LinkBudget link_budget(double d, const CellConfig& cfg) {
    LinkBudget lb;
    lb.gamma_prime_c = std::pow(10.0, (cfg.p_tx_c - path_loss(d, cfg.f_c, cfg) - noise_power(cfg.w_c, cfg)) / 10.0);
    lb.gamma_prime_m = std::pow(10.0, (cfg.p_tx_m - path_loss(d, cfg.f_m, cfg) - noise_power(cfg.w_m, cfg)) / 10.0);
    return lb;
}

double snr_db(Band b, double d, double shadowing_db, const CellConfig& cfg) {
    return cfg.p_tx(b) - path_loss(d, cfg.f(b), cfg) - noise_power(cfg.w(b), cfg) + shadowing_db;
}

double rate(Band b, const LinkBudget& lb, double shadowing_db, const CellConfig& cfg) {
    if (!std::isfinite(shadowing_db)) throw std::invalid_argument("rate: shadowing must be finite");
    return cfg.w(b) * std::log1p(lb.gamma_prime(b) * std::pow(10.0, lb.gamma_dprime * shadowing_db));
}

Eigen::MatrixXd joint_shadowing_covariance(const MsPlacement& placement, const CellConfig& cfg) {
    cfg.validate();
    const std::size_t n = placement.n();
    if (n < 1) throw std::invalid_argument("joint shadowing: placement is empty");
    const double var_c = cfg.sigma_c * cfg.sigma_c;
    const double var_m = cfg.sigma_m * cfg.sigma_m;
    const double cross = cfg.rho * cfg.sigma_c * cfg.sigma_m;
    const double d_cross = std::sqrt(cfg.d_dcor_c * cfg.d_dcor_m);
    Eigen::MatrixXd cov(2 * n, 2 * n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = j; i < n; ++i) {
            const double dij = std::hypot(placement.x[i] - placement.x[j], placement.y[i] - placement.y[j]);
            const double cc = var_c * std::exp(-dij / cfg.d_dcor_c);
            const double mm = var_m * std::exp(-dij / cfg.d_dcor_m);
            const double cm = cross * std::exp(-dij / d_cross);
            cov(i, j) = cov(j, i) = cc;
            cov(n + i, n + j) = cov(n + j, n + i) = mm;
            cov(n + i, j) = cov(j, n + i) = cm;
            cov(n + j, i) = cov(i, n + j) = cm;
        }
    }
    return cov;
}

JointShadowing sample_joint_shadowing(const MsPlacement& placement, const CellConfig& cfg,
                                      std::uint64_t seed) {
    const std::size_t n = placement.n();
    const Eigen::MatrixXd l = factor_covariance(joint_shadowing_covariance(placement, cfg), cfg);
    Rng rng(seed);
    Eigen::VectorXd z(2 * n);
    for (std::size_t i = 0; i < 2 * n; ++i) z(static_cast<Eigen::Index>(i)) = rng.normal();
    const Eigen::VectorXd s = l.triangularView<Eigen::Lower>() * z;
    JointShadowing js;
    js.s_c.assign(s.data(), s.data() + n);
    js.s_m.assign(s.data() + n, s.data() + 2 * n);
    return js;
}

MsPlacement uniform_placement(const CellConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);
    std::vector<double> xs(cfg.n_points), ys(cfg.n_points);
    for (int i = 0; i < cfg.n_points; ++i) {
        xs[i] = (rng.uniform() - 0.5) * cfg.cell_side;
        ys[i] = (rng.uniform() - 0.5) * cfg.cell_side;
    }
    return MsPlacement::from_points(xs, ys);
}

Dataset generate_cell(const CellConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const MsPlacement placement = uniform_placement(cfg, derive_seed(seed, "placement"));
    const JointShadowing js = sample_joint_shadowing(placement, cfg, derive_seed(seed, "shadowing"));
    Dataset ds;
    ds.examples.reserve(placement.n());
    for (std::size_t i = 0; i < placement.n(); ++i) {
        const double d = placement.d[i];
        const LinkBudget lb = link_budget(d, cfg);
        Example ex;
        ex.features[Feature::d] = d;
        ex.features[Feature::theta] = placement.theta[i];
        ex.features[Feature::cm_power] = snr_db(Band::cm, d, js.s_c[i], cfg);
        ex.label = rate(Band::mm, lb, js.s_m[i], cfg) > rate(Band::cm, lb, js.s_c[i], cfg) ? 1 : 0;
        ds.examples.push_back(std::move(ex));
    }
    return ds;
}

}  // namespace dualband
