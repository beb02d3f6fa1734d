#include "dualband/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dualband/rng.hpp"

namespace dualband {

namespace {

std::size_t round_half_up(double x) {
    return static_cast<std::size_t>(std::floor(x + 0.5));
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    Rng rng(seed);
    rng.shuffle(idx);
    return idx;
}

Dataset take(const Dataset& ds, const std::vector<std::size_t>& idx, std::size_t begin, std::size_t end) {
    Dataset out;
    out.examples.reserve(end - begin);
    for (std::size_t k = begin; k < end; ++k) out.examples.push_back(ds.examples[idx[k]]);
    return out;
}

}  // namespace

const char* feature_name(Feature f) { return kFeatureNames[static_cast<int>(f)]; }

Feature feature_from_name(const std::string& name) {
    for (int i = 0; i < kFeatureCount; ++i)
        if (name == kFeatureNames[i]) return static_cast<Feature>(i);
    throw std::invalid_argument("unknown feature name: '" + name + "'");
}

void FeatureVector::validate() const {
    bool any = false;
    for (const auto& v : values) any = any || v.has_value();
    if (!any) throw std::invalid_argument("feature vector has no fields present");
    if (has(Feature::d) && !(*(*this)[Feature::d] > 0.0))
        throw std::invalid_argument("feature d must be positive");
    if (has(Feature::theta)) {
        const double t = *(*this)[Feature::theta];
        if (!(t >= -std::numbers::pi && t <= std::numbers::pi))
            throw std::invalid_argument("feature theta must lie in [-pi, pi]");
    }
    if (has(Feature::delay) && !(*(*this)[Feature::delay] > 0.0))
        throw std::invalid_argument("feature delay must be positive");
}

bool FeatureCombo::contains(Feature f) const {
    return std::find(features.begin(), features.end(), f) != features.end();
}

std::string FeatureCombo::to_string() const {
    std::string s;
    for (Feature f : features) {
        if (!s.empty()) s += ",";
        s += feature_name(f);
    }
    return s;
}

FeatureCombo make_combo(const std::vector<std::string>& names) {
    if (names.empty()) throw std::invalid_argument("feature combo must be non-empty");
    std::array<bool, kFeatureCount> seen{};
    for (const auto& name : names) {
        const int i = static_cast<int>(feature_from_name(name));
        if (seen[i]) throw std::invalid_argument("duplicate feature in combo: '" + name + "'");
        seen[i] = true;
    }
    FeatureCombo combo;
    for (int i = 0; i < kFeatureCount; ++i)
        if (seen[i]) combo.features.push_back(static_cast<Feature>(i));
    return combo;
}

double Scaler::transform(std::size_t i, double raw) const {
    const double t = use_log10[i] ? std::log10(raw) : raw;
    return (t - offset[i]) / scale[i];
}

Dataset select_features(const Dataset& ds, const FeatureCombo& combo) {
    if (combo.features.empty()) throw std::invalid_argument("feature combo must be non-empty");
    Dataset out;
    out.examples.reserve(ds.n());
    for (std::size_t i = 0; i < ds.n(); ++i) {
        const Example& ex = ds.examples[i];
        Example proj;
        proj.label = ex.label;
        for (Feature f : combo.features) {
            if (!ex.features.has(f))
                throw std::invalid_argument("example " + std::to_string(i) + " is missing feature '" +
                                            feature_name(f) + "'");
            proj.features[f] = ex.features[f];
        }
        out.examples.push_back(std::move(proj));
    }
    return out;
}

Scaler fit_scaler(const Dataset& ds, const FeatureCombo& combo) {
    if (ds.empty()) throw std::invalid_argument("fit_scaler: dataset is empty");
    if (ds.n() < 2) throw std::invalid_argument("fit_scaler: need at least two examples");
    Scaler s;
    for (Feature f : combo.features) {
        const bool log10f = (f == Feature::d);
        double mean = 0.0;
        for (std::size_t i = 0; i < ds.n(); ++i) {
            const Example& ex = ds.examples[i];
            if (!ex.features.has(f))
                throw std::invalid_argument("example " + std::to_string(i) + " is missing feature '" +
                                            feature_name(f) + "'");
            mean += log10f ? std::log10(*ex.features[f]) : *ex.features[f];
        }
        mean /= static_cast<double>(ds.n());
        double ss = 0.0;
        for (const Example& ex : ds.examples) {
            const double t = log10f ? std::log10(*ex.features[f]) : *ex.features[f];
            ss += (t - mean) * (t - mean);
        }
        const double var = ss / static_cast<double>(ds.n() - 1);
        if (!(var > 0.0))
            throw std::invalid_argument(std::string("degenerate scale: feature '") + feature_name(f) +
                                        "' has zero variance");
        s.features.push_back(f);
        s.use_log10.push_back(log10f);
        s.offset.push_back(mean);
        s.scale.push_back(std::sqrt(var));
    }
    return s;
}

Dataset apply_scaler(const Scaler& scaler, const Dataset& ds) {
    Dataset out;
    out.examples.reserve(ds.n());
    for (std::size_t i = 0; i < ds.n(); ++i) {
        const Example& ex = ds.examples[i];
        Example scaled = ex;
        for (std::size_t k = 0; k < scaler.features.size(); ++k) {
            const Feature f = scaler.features[k];
            if (!ex.features.has(f))
                throw std::invalid_argument("example " + std::to_string(i) + " is missing feature '" +
                                            feature_name(f) + "' required by the scaler");
            scaled.features[f] = scaler.transform(k, *ex.features[f]);
        }
        out.examples.push_back(std::move(scaled));
    }
    return out;
}

SplitResult split_random(const Dataset& ds, const SplitSpec& spec) {
    const auto in_open_01 = [](double x) { return x > 0.0 && x < 1.0; };
    if (!in_open_01(spec.train_fraction) || !in_open_01(spec.validation_fraction_of_train))
        throw std::invalid_argument("split_random: fractions must lie in (0, 1)");
    const std::size_t n = ds.n();
    const std::size_t block = round_half_up(static_cast<double>(n) * spec.train_fraction);
    const std::size_t n_val = round_half_up(static_cast<double>(block) * spec.validation_fraction_of_train);
    if (block >= n || n_val >= block || n_val == 0)
        throw std::invalid_argument("split_random: dataset too small, a part would be empty");
    const std::size_t n_train = block - n_val;
    const auto idx = shuffled_indices(n, spec.seed);
    SplitResult r;
    r.train = take(ds, idx, 0, n_train);
    r.validation = take(ds, idx, n_train, block);
    r.test = take(ds, idx, block, n);
    return r;
}

std::pair<Dataset, Dataset> split_two(const Dataset& ds, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("split_two: fraction must lie in (0, 1)");
    const std::size_t n = ds.n();
    const std::size_t n_train = round_half_up(static_cast<double>(n) * train_fraction);
    if (n_train == 0 || n_train >= n)
        throw std::invalid_argument("split_two: dataset too small, a part would be empty");
    const auto idx = shuffled_indices(n, seed);
    return {take(ds, idx, 0, n_train), take(ds, idx, n_train, n)};
}

double majority_baseline_error(const Dataset& ds) {
    if (ds.empty()) throw std::invalid_argument("majority_baseline_error: dataset is empty");
    std::size_t ones = 0;
    for (const Example& ex : ds.examples) ones += ex.label == 1 ? 1 : 0;
    return static_cast<double>(ones) / static_cast<double>(ds.n());
}

}  // namespace dualband
