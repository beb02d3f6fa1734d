#pragma once

#include <string>

#include "dualband/dataset.hpp"
#include "dualband/experiments.hpp"

namespace dualband {

// Dataset CSV: fixed header "d_m,theta_rad,cm_power_db,delay_s,mpc_power_dbm,label".
// Empty cells mark absent features; label must be 0 or 1.
Dataset parse_dataset_csv(const std::string& path);
void write_dataset_csv(const std::string& path, const Dataset& ds);

// Report CSV: leading "#key=value" metadata lines, then "model,combo,mean,std,n" rows.
// Fields containing commas or quotes are double-quoted.
void write_report_csv(const std::string& path, const ExperimentReport& report);
ExperimentReport parse_report_csv(const std::string& path);

// Human-readable summary table: one row per model, one column per feature combination.
void write_report_markdown(const std::string& path, const ExperimentReport& report);

// Writes content to a temporary sibling file, then renames it over the target.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace dualband
