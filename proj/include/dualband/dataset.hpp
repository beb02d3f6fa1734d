#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dualband {

// The five observable features, in canonical column order.
enum class Feature : int { d = 0, theta = 1, cm_power = 2, delay = 3, mpc_power = 4 };
inline constexpr int kFeatureCount = 5;
inline constexpr std::array<const char*, kFeatureCount> kFeatureNames = {
    "d", "theta", "cm_power", "delay", "mpc_power"};

const char* feature_name(Feature f);
Feature feature_from_name(const std::string& name);

// Distance in meters, angle in radians, cmWave SNR in dB, main-multipath
// delay in seconds and power in dBm. Absent fields = feature not observed.
struct FeatureVector {
    std::array<std::optional<double>, kFeatureCount> values;

    std::optional<double>& operator[](Feature f) { return values[static_cast<int>(f)]; }
    const std::optional<double>& operator[](Feature f) const { return values[static_cast<int>(f)]; }
    bool has(Feature f) const { return values[static_cast<int>(f)].has_value(); }
    // Throws std::invalid_argument when a range invariant is violated
    // (d <= 0, theta outside [-pi, pi], delay <= 0, or all fields absent).
    void validate() const;
};

struct Example {
    FeatureVector features;
    int label = 0;  // 1 iff the mmWave rate exceeds the cmWave rate
};

struct Dataset {
    std::vector<Example> examples;

    std::size_t n() const { return examples.size(); }
    bool empty() const { return examples.empty(); }
};

// An ordered (canonical-order) non-empty subset of the five features.
struct FeatureCombo {
    std::vector<Feature> features;

    std::size_t size() const { return features.size(); }
    bool contains(Feature f) const;
    std::string to_string() const;  // comma-joined names
};

// Builds a combo from names like {"d", "theta"}; rejects unknown names,
// duplicates, and the empty set.
FeatureCombo make_combo(const std::vector<std::string>& names);

struct SplitSpec {
    double train_fraction = 0.65;
    double validation_fraction_of_train = 0.2;
    std::uint64_t seed = 0;
};

struct SplitResult {
    Dataset train;
    Dataset validation;
    Dataset test;
};

// Per-feature standardization fitted on training data: optional log10 on the
// raw value (distance only; dB/dBm features are already logarithmic),
// then (x - offset) / scale.
struct Scaler {
    std::vector<Feature> features;  // doubles as the combo, in order
    std::vector<bool> use_log10;
    std::vector<double> offset;
    std::vector<double> scale;

    // Transformed value of feature index i (position in `features`).
    double transform(std::size_t i, double raw) const;
};

// Projects every example onto exactly the combo's features (order and labels
// preserved). Throws when a requested feature is absent, naming the feature
// and example index.
Dataset select_features(const Dataset& ds, const FeatureCombo& combo);

// Fits standardization parameters (mean/sample std after the log transform)
// on ds. Zero-variance features raise a degenerate-scale error.
Scaler fit_scaler(const Dataset& ds, const FeatureCombo& combo);

// Applies a fitted scaler. Not idempotent (each call re-applies the affine
// map); callers standardize raw data exactly once.
Dataset apply_scaler(const Scaler& scaler, const Dataset& ds);

// Shuffles with the spec seed and cuts into train/validation/test. The train
// block is round(N * train_fraction) (round-half-up), validation is carved
// out of it as round(block * validation_fraction_of_train), the remainder is
// the test set. Throws when any part would be empty.
SplitResult split_random(const Dataset& ds, const SplitSpec& spec);

// Two-way split used for cross-validation re-splits and early-stop holdouts:
// round-half-up train part, remainder held out.
std::pair<Dataset, Dataset> split_two(const Dataset& ds, double train_fraction, std::uint64_t seed);

// Fraction of labels equal to 1 == error of always assigning the cmWave band.
double majority_baseline_error(const Dataset& ds);

}  // namespace dualband
