#include "dualband/tbba.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dualband/numerics.hpp"

namespace dualband {

void TbbaConfig::validate() const {
    if (!(gamma_t >= 0.0 && gamma_t <= 1.0))
        throw std::invalid_argument("tbba config: gamma_t must lie in [0, 1]");
    if (!(sigma_c > 0.0 && sigma_m > 0.0))
        throw std::invalid_argument("tbba config: sigmas must be positive");
    if (!(rho > -1.0 && rho < 1.0)) throw std::invalid_argument("tbba config: rho must lie in (-1, 1)");
    if (!(w_c > 0.0 && w_m > 0.0)) throw std::invalid_argument("tbba config: bandwidths must be positive");
    if (!(lb.gamma_prime_c > 0.0 && lb.gamma_prime_m > 0.0))
        throw std::invalid_argument("tbba config: link budget factors must be positive");
}

TbbaConfig make_tbba_config(const CellConfig& cell, double d, double gamma_t) {
    TbbaConfig cfg;
    cfg.gamma_t = gamma_t;
    cfg.sigma_c = cell.sigma_c;
    cfg.sigma_m = cell.sigma_m;
    cfg.rho = cell.rho;
    cfg.w_c = cell.w_c;
    cfg.w_m = cell.w_m;
    cfg.lb = link_budget(d, cell);
    return cfg;
}

VPair v_pair(double r_c, const TbbaConfig& cfg) {
    cfg.validate();
    if (!(r_c > 0.0)) throw std::domain_error("v_pair: rate must be positive");
    VPair v;
    v.v0 = (1.0 / cfg.lb.gamma_dprime) * std::log10(std::expm1(r_c / cfg.w_c) / cfg.lb.gamma_prime_c);
    v.v1 = (1.0 / cfg.lb.gamma_dprime) * std::log10(std::expm1(r_c / cfg.w_m) / cfg.lb.gamma_prime_m);
    return v;
}

ConditionalMoments conditional_moments(double v0, const TbbaConfig& cfg) {
    ConditionalMoments m;
    m.mu = cfg.rho * (cfg.sigma_m / cfg.sigma_c) * v0;
    m.sigma2 = (1.0 - cfg.rho * cfg.rho) * cfg.sigma_m * cfg.sigma_m;
    return m;
}

double mmwave_probability(double r_c, const TbbaConfig& cfg) {
    const VPair v = v_pair(r_c, cfg);
    const ConditionalMoments m = conditional_moments(v.v0, cfg);
    return q((v.v1 - m.mu) / std::sqrt(m.sigma2));
}

double shadowing_threshold(double r_c, const TbbaConfig& cfg) {
    cfg.validate();
    if (!(cfg.rho > 0.0))
        throw std::invalid_argument(
            "shadowing_threshold: closed form requires rho > 0; compare mmwave_probability "
            "against gamma_t instead");
    const VPair v = v_pair(r_c, cfg);
    const ConditionalMoments m = conditional_moments(v.v0, cfg);
    if (cfg.gamma_t == 0.0) return -std::numeric_limits<double>::infinity();
    if (cfg.gamma_t == 1.0) return std::numeric_limits<double>::infinity();
    return (cfg.sigma_c / (cfg.rho * cfg.sigma_m)) * (v.v1 - q_inv(cfg.gamma_t) * std::sqrt(m.sigma2));
}

int tbba_decide(const FeatureVector& fv, const CellConfig& cell, double gamma_t) {
    if (!fv.has(Feature::d) || !fv.has(Feature::cm_power))
        throw std::invalid_argument("tbba_decide: requires features d and cm_power");
    const double d = *fv[Feature::d];
    const double snr_c = *fv[Feature::cm_power];
    const TbbaConfig cfg = make_tbba_config(cell, d, gamma_t);
    const double mean_snr_c = cell.p_tx_c - path_loss(d, cell.f_c, cell) - noise_power(cell.w_c, cell);
    const double s_c = snr_c - mean_snr_c;
    const double r_c = cell.w_c * std::log1p(std::pow(10.0, 0.1 * snr_c));
    if (cfg.rho > 0.0) return s_c >= shadowing_threshold(r_c, cfg) ? 1 : 0;
    return mmwave_probability(r_c, cfg) >= gamma_t ? 1 : 0;
}

}  // namespace dualband
