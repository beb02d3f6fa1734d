#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "dualband/dataset.hpp"

namespace dualband {

enum class Band { cm, mm };

// Stochastic-environment cell parameters. Defaults reproduce the benchmark
// configuration: 2.5 GHz / 28 GHz bands over a 500 m square cell with 2000
// uniformly placed mobile stations and correlated log-normal shadowing.
struct CellConfig {
    double f_c = 2.5e9;        // Hz
    double f_m = 28e9;         // Hz
    double w_c = 10e6;         // Hz
    double w_m = 100e6;        // Hz
    double p_tx_c = 15.0;      // dBm
    double p_tx_m = 22.0;      // dBm
    double eps = 4.0;          // path-loss exponent beyond the break point
    double d_break = 50.0;     // m
    double d_dcor_c = 25.0;    // m
    double d_dcor_m = 24.0;    // m
    double sigma_c = 5.0;      // dB
    double sigma_m = 7.0;      // dB
    double rho = 0.75;         // cross-band shadowing correlation
    double noise_psd = -174.0; // dBm/Hz
    double cell_side = 500.0;  // m
    int n_points = 2000;

    void validate() const;
    double f(Band b) const { return b == Band::cm ? f_c : f_m; }
    double w(Band b) const { return b == Band::cm ? w_c : w_m; }
    double p_tx(Band b) const { return b == Band::cm ? p_tx_c : p_tx_m; }
    double sigma(Band b) const { return b == Band::cm ? sigma_c : sigma_m; }
    double d_dcor(Band b) const { return b == Band::cm ? d_dcor_c : d_dcor_m; }
};

// Distance-dependent linear SNR scale factors: gamma_prime_b scales the
// shadowing term 10^(gamma_dprime * S^b) inside the Shannon rate.
struct LinkBudget {
    double gamma_prime_c = 0.0;
    double gamma_prime_m = 0.0;
    double gamma_dprime = 0.1;

    double gamma_prime(Band b) const { return b == Band::cm ? gamma_prime_c : gamma_prime_m; }
};

// Mobile-station positions relative to the base station at the origin.
// Distances are clamped to >= 1 m (the path-loss reference distance).
struct MsPlacement {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> d;
    std::vector<double> theta;

    std::size_t n() const { return x.size(); }
    static MsPlacement from_points(const std::vector<double>& xs, const std::vector<double>& ys);
};

// One jointly Gaussian shadowing draw: s_c[i], s_m[i] in dB per position.
struct JointShadowing {
    std::vector<double> s_c;
    std::vector<double> s_m;
};

// Two-slope break-point path loss in dB: free-space (exponent 2) from the
// 1 m reference out to d_break, exponent eps beyond. Throws for d < 1 m.
double path_loss(double d, double f, const CellConfig& cfg);

// Thermal noise power over bandwidth w in dBm: noise_psd + 10*log10(w).
double noise_power(double w, const CellConfig& cfg);

// Per-band gamma_prime = 10^((p_tx - path_loss - noise_power)/10) at distance d.
LinkBudget link_budget(double d, const CellConfig& cfg);

// SNR in dB: p_tx - path_loss - noise_power + shadowing.
double snr_db(Band b, double d, double shadowing_db, const CellConfig& cfg);

// Shannon rate in nats/s: w_b * ln(1 + gamma_prime_b * 10^(0.1 * shadowing)).
double rate(Band b, const LinkBudget& lb, double shadowing_db, const CellConfig& cfg);

// Joint covariance over the stacked vector [S^c_0..S^c_{N-1}, S^m_0..S^m_{N-1}]:
// exponential spatial decay per band, cross-band decay over the geometric mean
// of the two decorrelation distances, co-located cross-covariance rho*s_c*s_m.
Eigen::MatrixXd joint_shadowing_covariance(const MsPlacement& placement, const CellConfig& cfg);

// Zero-mean Gaussian draw with the covariance above, via Cholesky
// factorization (diagonal jitter escalates 0, 1e-10, 1e-8, 1e-6 of sigma^2
// before failing). Deterministic given the seed.
JointShadowing sample_joint_shadowing(const MsPlacement& placement, const CellConfig& cfg,
                                      std::uint64_t seed);

// Uniformly placed stations over the square cell, deterministic given seed.
MsPlacement uniform_placement(const CellConfig& cfg, std::uint64_t seed);

// Full cell realization: placement, one joint shadowing draw, features
// (d, theta, cmWave SNR) and the rate-comparison label per station.
Dataset generate_cell(const CellConfig& cfg, std::uint64_t seed);

}  // namespace dualband
