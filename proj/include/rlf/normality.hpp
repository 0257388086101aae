#pragma once

#include "rlf/forest.hpp"
#include "rlf/synthgen.hpp"

namespace rlf {

struct NormalityConfig {
    std::size_t n = 500;          // per-replicate sample size
    double alpha = 0.1;           // subagging ratio
    std::size_t m_trees = 200;    // trees per replicate forest
    std::size_t reps = 300;
    std::vector<double> query_point;
    SyntheticSpec generator;
    std::uint64_t seed = 0;
    TreeParams tree;              // data-driven split control by default
};

struct NormalityReport {
    std::vector<double> replicate_predictions;
    double ks_distance = 1.0;
    double mean = 0.0;
    double sd = 0.0;
    bool degenerate = false;  // all replicate predictions equal
};

// Standard normal CDF via erfc; absolute error well under 1e-12.
double normal_cdf(double x);

// Exact one-sample Kolmogorov-Smirnov sup-distance against the standard
// normal: max over order statistics of max(i/R - Phi(x_(i)), Phi(x_(i)) - (i-1)/R).
double ks_statistic(std::span<const double> sample);

// Centers and scales by the sample mean and sd (n-1 denominator).
std::vector<double> studentize(std::span<const double> sample);

// Draws `reps` fresh datasets, fits a forest on each, records its
// prediction at the query point, and measures how fas the studentized
// predictions sit from a standard normal.
NormalityReport run_normality(const NormalityConfig& cfg, std::size_t threads = 1);

nlohmann::json normality_report_to_json(const NormalityReport& report);

}  // namespace rlf
