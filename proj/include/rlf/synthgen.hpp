#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "rlf/dataset.hpp"

namespace rlf {

enum class SyntheticModel { Sparse, Sine, Mixture };

struct SyntheticSpec {
    SyntheticModel model = SyntheticModel::Sparse;
    std::size_t n = 1000;
    std::uint64_t seed = 0;
    // Noise sd. Defaults per model: Sparse 1.3, Sine 1.0; the mixture model
    // always uses unit noise.
    double sigma = -1.0;
    std::size_t d_total = 100;                       // Sparse only
    std::optional<std::size_t> d_noise_override;     // Sparse sweeps: d_total = 35 + value

    double resolved_sigma() const;
    std::size_t resolved_d_total() const;
};

// Sparse additive model on the unit cube: five strong multiplicative
// coordinates, thirty weak linear ones, the rest pure noise columns.
//   y = 10 * prod_{j<5} exp(-2 x_j^2) + sum_{j=5..34} x_j + eps
Dataset gen_sparse(const SyntheticSpec& spec);

// y = sin(16 x) + eps, x uniform on [0, 1].
Dataset gen_sine(const SyntheticSpec& spec);

// Two-component mixture: y = 5x + eps or 10 + 5x + eps with equal
// probability; x, eps standard normal. The latent component is not a feature.
Dataset gen_mixture(const SyntheticSpec& spec);

Dataset generate(const SyntheticSpec& spec);

// Noise-free regression surfaces, for tests and oracles.
double sparse_mean(std::span<const double> x);
double sine_mean(double x);

}  // namespace rlf
