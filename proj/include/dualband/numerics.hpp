#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace dualband {

// Gaussian upper-tail probability Q(x) = P(Z > x), |error| well below 1e-12.
double q(double x);

// Inverse of q on (0, 1); q(q_inv(p)) == p to ~1e-15. Throws std::domain_error
// outside (0, 1).
double q_inv(double p);

// Numerically stable logistic sigmoid.
double sigmoid(double x);

// FNV-1a 64-bit hash; used to fingerprint configurations in report metadata.
std::uint64_t fnv1a64(std::string_view s);

// Shortest round-trip decimal representation of a double (std::to_chars).
// All numeric file output goes through this so bytes are reproducible.
std::string format_double(double v);

}  // namespace dualband
