#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace rlf {

// Deterministic random stream with keyed child derivation. A child stream is
// identified by (parent key, label), so the draws taken from one stream never
// depend on how many draws a sibling stream consumed. This is what makes
// parallel tree construction produce serially identical ensembles.
class RandomState {
public:
    explicit RandomState(std::uint64_t seed) : key_(seed), engine_(mix(seed)) {}

    // Derive an independent child stream. Labels are small enumerators
    // (tree index, node branch, ...) chosen by the caller.
    RandomState child(std::uint64_t label) const {
        return RandomState(mix(key_ ^ (0x9e3779b97f4a7c15ULL + label)));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

    double uniform_real() {
        return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
    }

    double normal(double mean = 0.0, double sd = 1.0) {
        return std::normal_distribution<double>(mean, sd)(engine_);
    }

    // Always consumes from the stream, including at p = 0 and p = 1, so that
    // trees built with different fixed probabilities stay draw-for-draw
    // comparable under one seed.
    bool bernoulli(double p) {
        if (p <= 0.0) { engine_(); return false; }
        if (p >= 1.0) { engine_(); return true; }
        return std::bernoulli_distribution(p)(engine_);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    std::uint64_t key() const { return key_; }

private:
    // splitmix64 finalizer; decorrelates sequential seeds and child labels.
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t key_;
    std::mt19937_64 engine_;
};

// Stable labels for the per-node stream tree used by the tree builders.
namespace stream {
inline constexpr std::uint64_t kFeatures = 1;   // feature bagging draw
inline constexpr std::uint64_t kBernoulli = 2;  // split-type coin
inline constexpr std::uint64_t kLocal = 3;      // local forest at a response split
inline constexpr std::uint64_t kLeft = 4;       // left / below-threshold child
inline constexpr std::uint64_t kRight = 5;      // right / above-threshold child
inline constexpr std::uint64_t kSample = 6;     // per-tree row sampling
inline constexpr std::uint64_t kTree = 7;       // per-tree node recursion
}  // namespace stream

// Deterministic seed derivation for contexts that pass plain integer seeds
// around (per-fold training, per-replicate generation).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label) {
    return RandomState(seed).child(label).key();
}

}  // namespace rlf
