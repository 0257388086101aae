#include "rlf/synthgen.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rlf {

namespace {

std::vector<ColumnInfo> numeric_schema(std::size_t d) {
    std::vector<ColumnInfo> schema(d);
    for (std::size_t j = 0; j < d; ++j) {
        schema[j].name = "x" + std::to_string(j + 1);
        schema[j].source = schema[j].name;
        schema[j].kind = ColumnKind::Numeric;
    }
    return schema;
}

void validate(const SyntheticSpec& spec) {
    if (spec.n == 0) throw std::invalid_argument("synth: n must be >= 1");
    if (spec.resolved_sigma() <= 0.0) throw std::invalid_argument("synth: sigma must be > 0");
}

}  // namespace

double SyntheticSpec::resolved_sigma() const {
    if (sigma > 0.0) return sigma;
    switch (model) {
        case SyntheticModel::Sparse: return 1.3;
        case SyntheticModel::Sine: return 1.0;
        case SyntheticModel::Mixture: return 1.0;
    }
    return 1.0;
}

std::size_t SyntheticSpec::resolved_d_total() const {
    return d_noise_override ? 35 + *d_noise_override : d_total;
}

double sparse_mean(std::span<const double> x) {
    double prod = 1.0;
    for (std::size_t j = 0; j < 5; ++j) prod *= std::exp(-2.0 * x[j] * x[j]);
    double lin = 0.0;
    for (std::size_t j = 5; j < 35; ++j) lin += x[j];
    return 10.0 * prod + lin;
}

double sine_mean(double x) { return std::sin(16.0 * x); }

Dataset gen_sparse(const SyntheticSpec& spec) {
    validate(spec);
    const std::size_t d = spec.resolved_d_total();
    if (d < 35) throw std::invalid_argument("sparse model needs d_total >= 35");
    const std::size_t n = spec.n;
    const double sigma = spec.resolved_sigma();

    RandomState rng(spec.seed);
    std::vector<double> cols(n * d);
    std::vector<double> target(n);
    std::vector<double> row(d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            row[j] = rng.uniform_real();
            cols[j * n + i] = row[j];
        }
        target[i] = sparse_mean(row) + rng.normal(0.0, sigma);
    }
    return Dataset(std::move(cols), std::move(target), numeric_schema(d), n, d);
}

Dataset gen_sine(const SyntheticSpec& spec) {
    validate(spec);
    const std::size_t n = spec.n;
    const double sigma = spec.resolved_sigma();

    RandomState rng(spec.seed);
    std::vector<double> cols(n);
    std::vector<double> target(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = rng.uniform_real();
        cols[i] = x;
        target[i] = sine_mean(x) + rng.normal(0.0, sigma);
    }
    return Dataset(std::move(cols), std::move(target), numeric_schema(1), n, 1);
}

Dataset gen_mixture(const SyntheticSpec& spec) {
    if (spec.n == 0) throw std::invalid_argument("synth: n must be >= 1");
    if (spec.sigma > 0.0 && spec.sigma != 1.0)
        throw std::invalid_argument("mixture model has fixed unit noise");
    const std::size_t n = spec.n;

    RandomState rng(spec.seed);
    std::vector<double> cols(n);
    std::vector<double> target(n);
    for (std::size_t i = 0; i < n; ++i) {
        bool second = rng.uniform_index(2) == 1;  // latent component, never emitted
        double x = rng.normal();
        double eps = rng.normal();
        cols[i] = x;
        target[i] = (second ? 10.0 : 0.0) + 5.0 * x + eps;
    }
    return Dataset(std::move(cols), std::move(target), numeric_schema(1), n, 1);
}

Dataset generate(const SyntheticSpec& spec) {
    switch (spec.model) {
        case SyntheticModel::Sparse: return gen_sparse(spec);
        case SyntheticModel::Sine: return gen_sine(spec);
        case SyntheticModel::Mixture: return gen_mixture(spec);
    }
    throw std::invalid_argument("unknown synthetic model");
}

}  // namespace rlf
