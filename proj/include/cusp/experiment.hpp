#pragma once

// Monte Carlo harness for the asymptotics of the pseudo-MLE under
// misspecification: consistency towards the pseudo-true value, the
// n^{-1/(3-2 kappa)} rate, the normalized-error limit law and its moments.
//
// Every work item (one simulated dataset plus its estimate) is keyed by
// (seed, n, replicate) so reports are bit-identical across runs and thread
// counts. Aggregates are computed over index-ordered or sorted data only.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cusp/estimator.hpp"
#include "cusp/kl.hpp"
#include "cusp/limit.hpp"
#include "cusp/model.hpp"

namespace cusp {

/// Estimates theta_n for `replications` independent datasets of size n.
/// Replicate r uses dataset seed derive(seed, {n, r}).
[[nodiscard]] std::vector<double> replicate_estimates(const ModelParams& p, std::size_t n,
                                                      std::size_t replications, std::uint64_t seed,
                                                      const EstimatorOptions& opts);

/// Seed of the dataset behind replicate r at sample size n.
[[nodiscard]] std::uint64_t replicate_seed(std::uint64_t seed, std::size_t n, std::size_t r);

struct RateReport {
    std::vector<std::size_t> n_values;
    std::vector<std::vector<double>> estimates;  // theta_n per replicate
    std::vector<std::vector<double>> errors;     // |theta_n - theta_hat|
    std::vector<double> rmse;
    std::vector<double> median_error;
    std::vector<double> phi_n;  // b n^{-1/(3-2 kappa)}
    double fitted_slope = 0.0;
    double expected_slope = 0.0;  // -1/(3-2 kappa)
    double theta_hat = 0.0;
    LimitConstants constants;
    std::size_t replications = 0;
    std::uint64_t seed = 0;
};

[[nodiscard]] RateReport run_rate_experiment(const ModelParams& p,
                                             std::span<const std::size_t> n_values,
                                             std::size_t replications, std::uint64_t seed,
                                             const EstimatorOptions& opts = {});

struct MomentComparison {
    double p = 0.0;
    Moment errors;  // of the normalized errors
    Moment limit;   // of the limit draws
    /// |errors.mean - limit.mean| / sqrt(se_e^2 + se_l^2).
    [[nodiscard]] double gap_in_std() const;
};

struct DistReport {
    std::size_t n = 0;
    std::size_t replications = 0;
    std::uint64_t seed = 0;
    double theta_hat = 0.0;
    LimitConstants constants;
    std::vector<double> normalized_errors;  // n^{1/(3-2k)} b^{-1} (theta_n - theta_hat)
    std::vector<double> limit_draws;
    double ks_statistic = 0.0;
    std::vector<MomentComparison> moment_table;  // p = 1, 2
};

/// Order-invariant summary of normalized errors against limit draws.
[[nodiscard]] DistReport compare_with_limit(std::vector<double> normalized_errors,
                                            std::span<const double> limit_draws);

/// Throws ValidationError if the limit sample's Hurst index differs from kappa + 1/2.
[[nodiscard]] DistReport run_limit_experiment(const ModelParams& p, std::size_t n,
                                              std::size_t replications,
                                              const LimitSample& limit_sample, std::uint64_t seed,
                                              const EstimatorOptions& opts = {});

struct ContrastSummary {
    std::size_t n = 0;
    std::size_t replications = 0;
    std::uint64_t seed = 0;
    double theta0 = 0.0;
    double theta_hat = 0.0;
    std::vector<double> estimates;
    /// Share of replicates with |theta_n - theta_hat| < |theta_n - theta0|.
    double fraction_closer_to_pseudo_true = 0.0;
};

/// Rejects h == 0 (the comparison is degenerate when theta_hat == theta0).
[[nodiscard]] ContrastSummary consistency_contrast(const ModelParams& p, std::size_t n,
                                                   std::size_t replications, std::uint64_t seed,
                                                   const EstimatorOptions& opts = {});

/// MSE exponent without misspecification, 2/(2 kappa + 1).
[[nodiscard]] double gamma_well_specified(double kappa);
/// MSE exponent under misspecification, 2/(3 - 2 kappa).
[[nodiscard]] double gamma_misspecified(double kappa);

struct ExponentRow {
    double kappa = 0.0;
    double gamma_well = 0.0;
    double gamma_mis = 0.0;
    double gamma_regular = 1.0;  // kappa > 1/2 plateau
};

/// kappa values must lie in the closed interval [0, 1/2] (endpoints as limits).
[[nodiscard]] std::vector<ExponentRow> rate_exponent_curves(std::span<const double> kappa_grid);

}  // namespace cusp
