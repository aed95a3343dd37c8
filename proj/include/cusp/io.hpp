#pragma once

// File formats and configuration.
//
//   model config      JSON object: S, h, lambda0, kappa, delta, tau, theta0,
//                     theta0_window [lo, hi], theta_window [lo, hi] (optional
//                     on input, must equal theta0_window widened by delta)
//   dataset file      {"format": "cusp-dataset/1", "params": {...}, "seed": u64,
//                      "replicates": [[t, ...], ...]}
//   dataset CSV       replicate_id,event_time
//   KL profile CSV    theta,j,j1,j2   (j2 = "inf" at theta0)
//   limit draws CSV   u_hat
//   rate errors CSV   n,replicate,theta_n,error
//
// Doubles are written in shortest round-trip form.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cusp/estimator.hpp"
#include "cusp/experiment.hpp"
#include "cusp/kl.hpp"
#include "cusp/limit.hpp"
#include "cusp/model.hpp"
#include "cusp/sim.hpp"

namespace cusp::io {

using Json = nlohmann::ordered_json;

[[nodiscard]] Json to_json(const ModelParams& p);
/// `path` prefixes field names in error messages, e.g. "model.kappa".
[[nodiscard]] ModelParams model_from_json(const Json& j, const std::string& path = "model");

[[nodiscard]] Json to_json(const Dataset& d);
[[nodiscard]] Dataset dataset_from_json(const Json& j);
void write_dataset_csv(std::ostream& os, const Dataset& d);

[[nodiscard]] Json to_json(const EstimationResult& r);
[[nodiscard]] Json to_json(const LimitConstants& c);
[[nodiscard]] Json to_json(const RateReport& r);
[[nodiscard]] Json to_json(const DistReport& r);
[[nodiscard]] Json to_json(const ContrastSummary& s);
[[nodiscard]] Json to_json(const std::vector<ExponentRow>& rows);

void write_profile_csv(std::ostream& os, const KlProfile& profile);
void write_rate_errors_csv(std::ostream& os, const RateReport& r);
void write_column_csv(std::ostream& os, std::string_view header, const std::vector<double>& values);
void write_exponents_csv(std::ostream& os, const std::vector<ExponentRow>& rows);

/// Limit-sample summary: grid, seed, moments for p in {1, 2, 4}, boundary mass.
[[nodiscard]] Json limit_summary(const LimitSample& s);

/// Shortest round-trip decimal form of a double.
[[nodiscard]] std::string format_double(double x);

struct LimitConfig {
    double u_max = 8.0;
    double step = 1.0 / 256.0;
    std::size_t draws = 10000;
    std::uint64_t seed = 1;
};

struct Thresholds {
    std::optional<double> slope_tolerance;     // |fitted - expected| <= tol
    std::optional<double> ks_max;              // KS statistic < ks_max
    std::optional<double> moment_gap_max_std;  // second-moment gap < k combined std
    std::optional<double> min_fraction;        // contrast fraction >= value
};

struct ExperimentConfig {
    std::vector<std::size_t> n_values;
    std::size_t n = 2000;
    std::size_t replications = 100;
    std::uint64_t seed = 1;
    EstimatorOptions estimator;
    std::vector<double> kappa_grid;
    Thresholds thresholds;
};

struct RunConfig {
    std::optional<ModelParams> model;
    std::optional<ExperimentConfig> experiment;
    std::optional<LimitConfig> limit;
    std::optional<std::string> output_dir;
};

/// Accepts either {"model": {...}, "experiment": {...}, "limit": {...},
/// "output_dir": "..."} or a bare model object.
[[nodiscard]] RunConfig run_config_from_json(const Json& j);
[[nodiscard]] Json to_json(const RunConfig& c);

[[nodiscard]] Json read_json_file(const std::filesystem::path& path);
/// Writes `content` and returns its SHA-256 hex digest.
std::string write_text_file(const std::filesystem::path& path, std::string_view content);
[[nodiscard]] std::string sha256_hex(std::string_view data);

}  // namespace cusp::io
