#pragma once

#include "dualband/channel.hpp"
#include "dualband/dataset.hpp"

namespace dualband {

// Inputs of the closed-form threshold-based band assignment: the probability
// threshold gamma_t, the shadowing statistics of the two bands, and the
// per-station link budget (path loss at the true distance).
struct TbbaConfig {
    double gamma_t = 0.5;
    double sigma_c = 5.0;
    double sigma_m = 7.0;
    double rho = 0.75;
    double w_c = 10e6;
    double w_m = 100e6;
    LinkBudget lb;

    void validate() const;
};

// The observed cmWave rate mapped into each band's shadowing domain: v0 is
// the cmWave shadowing that produces rate r_c, v1 the mmWave shadowing that
// would produce the same rate.
struct VPair {
    double v0 = 0.0;
    double v1 = 0.0;
};

// Conditional distribution of the mmWave shadowing given S^c = v0.
struct ConditionalMoments {
    double mu = 0.0;      // dB
    double sigma2 = 0.0;  // dB^2
};

TbbaConfig make_tbba_config(const CellConfig& cell, double d, double gamma_t);

// v0 = (1/gamma'') log10((e^(r_c/w_c) - 1)/gamma'_c), v1 analogously with the
// mmWave bandwidth and budget. Throws for r_c <= 0.
VPair v_pair(double r_c, const TbbaConfig& cfg);

// mu = rho * (sigma_m / sigma_c) * v0, sigma2 = (1 - rho^2) * sigma_m^2.
ConditionalMoments conditional_moments(double v0, const TbbaConfig& cfg);

// P(S^m >= v1 | S^c = v0): probability that the mmWave rate exceeds the
// observed cmWave rate, via the conditional Gaussian.
double mmwave_probability(double r_c, const TbbaConfig& cfg);

// Closed-form decision threshold on the observed cmWave shadowing:
// T = (sigma_c / (rho * sigma_m)) * (v1 - q_inv(gamma_t) * sigma_{m|c});
// assign mmWave iff S^c >= T. Only valid for rho > 0 (the inequality flips
// otherwise); rho <= 0 raises an unsupported-configuration error and callers
// fall back to comparing mmwave_probability against gamma_t directly.
double shadowing_threshold(double r_c, const TbbaConfig& cfg);

// Decision for one observation: requires features d and cm_power. Recovers
// S^c and r_c from the cmWave SNR, then applies the threshold rule (ties
// assign mmWave). Returns 1 for mmWave, 0 for cmWave.
int tbba_decide(const FeatureVector& fv, const CellConfig& cell, double gamma_t);

}  // namespace dualband
