#pragma once

#include <span>
#include <vector>

namespace cusp::stats {

/// Two-sample Kolmogorov-Smirnov distance sup_x |F_a(x) - F_b(x)|, in [0, 1].
/// Ties across samples are handled by stepping both ECDFs past the tied value.
[[nodiscard]] double ks_two_sample(std::span<const double> a, std::span<const double> b);

[[nodiscard]] double mean(std::span<const double> x);
/// Unbiased sample variance (0 for fewer than two values).
[[nodiscard]] double variance(std::span<const double> x);
[[nodiscard]] double median(std::span<const double> x);
/// Unbiased sample covariance.
[[nodiscard]] double covariance(std::span<const double> x, std::span<const double> y);
/// Pearson correlation.
[[nodiscard]] double correlation(std::span<const double> x, std::span<const double> y);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares y ~ intercept + slope x.
[[nodiscard]] LineFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace cusp::stats
