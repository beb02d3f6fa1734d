#pragma once

#include <string>

#include "dualband/learners.hpp"

namespace dualband {

// Versioned binary model file; all multi-byte fields little-endian.
// Layout (documented in README.md):
//   magic      8 bytes  "DBMODEL1"
//   kind       u32      0 = nn, 1 = logistic (gr), 2 = linear (lr)
//   n_hidden   u32      number of hidden layers (0 for gr/lr)
//   widths     u32[n_hidden]
//   alpha      f64
//   seed       u64
//   gamma_l    f64
//   n_features u32
//   per feature: id u32, use_log10 u32, offset f64, scale f64
//   n_layers   u32
//   per layer: rows u64, cols u64, weights f64[rows*cols] (row-major),
//              bias_len u64, bias f64[bias_len]
void save_model(const std::string& path, const TrainedModel& model);
TrainedModel load_model(const std::string& path);

// One-line-per-field textual summary (used by the model inspection command).
std::string describe_model(const TrainedModel& model);

}  // namespace dualband
