#include "dualband/numerics.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

namespace dualband {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

// Rational approximation of the standard normal quantile (Acklam), |error|
// below 1.2e-9 — then polished by Newton to machine precision.
double normal_quantile_estimate(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    if (p < p_low) {
        const double r = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
               ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
    }
    if (p <= 1.0 - p_low) {
        const double t = p - 0.5;
        const double r = t * t;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * t /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double r = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
           ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
}

}  // namespace

double q(double x) {
    if (!std::isfinite(x)) throw std::domain_error("q: argument must be finite");
    return 0.5 * std::erfc(x / kSqrt2);
}

double q_inv(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("q_inv: p must lie in (0, 1)");
    // Q(x) = p  <=>  x = -Phi^-1(p); evaluating the quantile at min(p, 1-p)
    // keeps the rational approximation in its well-conditioned branch.
    double x = p <= 0.5 ? -normal_quantile_estimate(p) : normal_quantile_estimate(1.0 - p);
    for (int i = 0; i < 3; ++i) {
        const double pdf = normal_pdf(x);
        if (pdf < 1e-305) break;  // guard the division; q underflows before pdf gets this small
        x += (q(x) - p) / pdf;
    }
    return x;
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

}  // namespace dualband
