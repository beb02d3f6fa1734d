#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dualband/channel.hpp"
#include "dualband/dataset.hpp"
#include "dualband/learners.hpp"
#include "dualband/selection.hpp"

namespace dualband {

// Runtime configuration parsed from key=value files. Every key has a default
// matching the benchmark configuration; unknown keys are rejected.
struct RunConfig {
    CellConfig cell;
    SplitSpec split;                       // stochastic per-cell split
    TrainConfig train{800, 1.0, 64, 80, 0};
    TrainConfig train_gen{100, 1.0, 64, 10, 0};
    SearchSpace space;
    ModelSpec fixed_spec;                  // acceptance-mode structure/alpha
    double gamma_t = 0.5;
    int n_cells = 1000;
    int acceptance_cells = 200;
    int cv_repeats_acceptance = 2;
    int n_groups = 20;
    int group_train = 30;
    int group_val = 5;
    int group_test = 15;
    double external_train_fraction = 0.3;

    // Keys explicitly set by the parsed file, echoed into report metadata.
    std::vector<std::pair<std::string, std::string>> overrides;

    void validate() const;
};

// Parses a key=value file ('#' comments, blank lines allowed). Errors name
// the file and line: unknown key, malformed value, duplicate key.
RunConfig parse_run_config(const std::string& path);
RunConfig parse_run_config_text(const std::string& text, const std::string& name);

// Canonical full serialization (every key, fixed order) for hashing/echoing.
std::string serialize_run_config(const RunConfig& cfg);

}  // namespace dualband
