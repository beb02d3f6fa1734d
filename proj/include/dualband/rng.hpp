#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace dualband {

// Deterministic random layer. The engine is std::mt19937_64 (its output
// sequence is pinned by the standard); all value transformations are our own
// so that streams are bit-identical across platforms and standard-library
// implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform();

    // Uniform on [lo, hi).
    double uniform(double lo, double hi);

    // Standard normal via the Marsaglia polar method (one value cached).
    double normal();

    // Uniform integer on [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t below(std::uint64_t n);

    // In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

// splitmix64 mix step; the basis of all seed derivation.
std::uint64_t splitmix64(std::uint64_t& state);

// Derives an independent stream seed from (master, tag, index). Used to give
// every cell / CV repeat / weight init its own stream while keeping the whole
// experiment a pure function of the master seed.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index = 0);

}  // namespace dualband
