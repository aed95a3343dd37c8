#include "cusp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cusp/errors.hpp"
#include "cusp/parallel.hpp"
#include "cusp/rng.hpp"
#include "cusp/sim.hpp"
#include "cusp/stats.hpp"

namespace cusp {

namespace {

void require_nonzero_admissible(const ModelParams& p, const char* op) {
    const Admissibility adm = contamination_admissible(p);
    if (!adm.admissible) {
        std::ostringstream os;
        os << op << ": h = " << p.contamination() << " not admissible (threshold " << adm.threshold
           << ")";
        throw ValidationError(os.str());
    }
    if (p.contamination() == 0.0) {
        throw ValidationError(std::string(op) + ": h must be nonzero (theta_hat == theta0)");
    }
}

double rate_power(double kappa) { return 1.0 / (3.0 - 2.0 * kappa); }

}  // namespace

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t n, std::size_t r) {
    return rng::derive(seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r)});
}

std::vector<double> replicate_estimates(const ModelParams& p, std::size_t n,
                                        std::size_t replications, std::uint64_t seed,
                                        const EstimatorOptions& opts) {
    if (n == 0) throw ValidationError("n: must be >= 1");
    if (replications == 0) throw ValidationError("replications: must be >= 1");
    std::vector<double> out(replications);
    par::for_each_index(replications, [&](std::size_t r) {
        const Dataset data = simulate_serial(p, n, replicate_seed(seed, n, r));
        out[r] = pmle_serial(p, PooledEvents(data), opts).theta_n;
    });
    return out;
}

RateReport run_rate_experiment(const ModelParams& p, std::span<const std::size_t> n_values,
                               std::size_t replications, std::uint64_t seed,
                               const EstimatorOptions& opts) {
    require_nonzero_admissible(p, "run_rate_experiment");
    if (n_values.size() < 2) throw ValidationError("n_values: need at least 2 sample sizes");
    for (std::size_t i = 0; i < n_values.size(); ++i) {
        if (n_values[i] == 0 || (i > 0 && n_values[i] <= n_values[i - 1])) {
            throw ValidationError("n_values: must be positive and strictly increasing");
        }
    }
    if (replications == 0) throw ValidationError("replications: must be >= 1");

    RateReport rep;
    rep.n_values.assign(n_values.begin(), n_values.end());
    rep.replications = replications;
    rep.seed = seed;
    rep.theta_hat = find_pseudo_true(p);
    rep.constants = limit_constants(p, rep.theta_hat);
    rep.expected_slope = -rate_power(p.kappa());

    std::vector<double> log_n;
    std::vector<double> log_rmse;
    for (std::size_t n : rep.n_values) {
        std::vector<double> est = replicate_estimates(p, n, replications, seed, opts);
        std::vector<double> err(est.size());
        double sq = 0.0;
        for (std::size_t r = 0; r < est.size(); ++r) {
            err[r] = std::abs(est[r] - rep.theta_hat);
            sq += err[r] * err[r];
        }
        const double rmse = std::sqrt(sq / static_cast<double>(est.size()));
        if (!(rmse > 0.0)) {
            throw NumericalError("run_rate_experiment: zero RMSE; cannot fit a log-log slope");
        }
        rep.rmse.push_back(rmse);
        rep.median_error.push_back(stats::median(err));
        rep.phi_n.push_back(rep.constants.b *
                            std::pow(static_cast<double>(n), -rate_power(p.kappa())));
        rep.estimates.push_back(std::move(est));
        rep.errors.push_back(std::move(err));
        log_n.push_back(std::log(static_cast<double>(n)));
        log_rmse.push_back(std::log(rmse));
    }
    rep.fitted_slope = stats::least_squares(log_n, log_rmse).slope;
    return rep;
}

double MomentComparison::gap_in_std() const {
    const double se = std::hypot(errors.std_err, limit.std_err);
    const double gap = std::abs(errors.mean - limit.mean);
    if (se == 0.0) return gap == 0.0 ? 0.0 : INFINITY;
    return gap / se;
}

DistReport compare_with_limit(std::vector<double> normalized_errors,
                              std::span<const double> limit_draws) {
    if (normalized_errors.empty() || limit_draws.empty()) {
        throw ValidationError("compare_with_limit: empty sample");
    }
    DistReport rep;
    // Sorting makes every aggregate independent of replicate order.
    std::sort(normalized_errors.begin(), normalized_errors.end());
    std::vector<double> limit(limit_draws.begin(), limit_draws.end());
    std::sort(limit.begin(), limit.end());
    rep.ks_statistic = stats::ks_two_sample(normalized_errors, limit);
    constexpr double powers[] = {1.0, 2.0};
    const auto em = limit_moments(normalized_errors, powers);
    const auto lm = limit_moments(limit, powers);
    for (std::size_t i = 0; i < em.size(); ++i) rep.moment_table.push_back({powers[i], em[i], lm[i]});
    rep.normalized_errors = std::move(normalized_errors);
    rep.limit_draws = std::move(limit);
    return rep;
}

DistReport run_limit_experiment(const ModelParams& p, std::size_t n, std::size_t replications,
                                const LimitSample& limit_sample, std::uint64_t seed,
                                const EstimatorOptions& opts) {
    require_nonzero_admissible(p, "run_limit_experiment");
    if (std::abs(limit_sample.grid.hurst() - p.hurst()) > 1e-12) {
        std::ostringstream os;
        os << "limit sample Hurst index " << limit_sample.grid.hurst()
           << " does not match kappa + 1/2 = " << p.hurst();
        throw ValidationError(os.str());
    }
    const double theta_hat = find_pseudo_true(p);
    const LimitConstants lc = limit_constants(p, theta_hat);
    const std::vector<double> est = replicate_estimates(p, n, replications, seed, opts);
    const double scale = std::pow(static_cast<double>(n), rate_power(p.kappa())) / lc.b;
    std::vector<double> normalized(est.size());
    for (std::size_t r = 0; r < est.size(); ++r) normalized[r] = scale * (est[r] - theta_hat);

    DistReport rep = compare_with_limit(std::move(normalized), limit_sample.draws);
    rep.n = n;
    rep.replications = replications;
    rep.seed = seed;
    rep.theta_hat = theta_hat;
    rep.constants = lc;
    return rep;
}

ContrastSummary consistency_contrast(const ModelParams& p, std::size_t n, std::size_t replications,
                                     std::uint64_t seed, const EstimatorOptions& opts) {
    require_nonzero_admissible(p, "consistency_contrast");
    ContrastSummary out;
    out.n = n;
    out.replications = replications;
    out.seed = seed;
    out.theta0 = p.theta0();
    out.theta_hat = find_pseudo_true(p);
    out.estimates = replicate_estimates(p, n, replications, seed, opts);
    const auto closer = std::count_if(out.estimates.begin(), out.estimates.end(), [&](double t) {
        return std::abs(t - out.theta_hat) < std::abs(t - out.theta0);
    });
    out.fraction_closer_to_pseudo_true =
        static_cast<double>(closer) / static_cast<double>(out.estimates.size());
    return out;
}

double gamma_well_specified(double kappa) { return 2.0 / (2.0 * kappa + 1.0); }

double gamma_misspecified(double kappa) { return 2.0 / (3.0 - 2.0 * kappa); }

std::vector<ExponentRow> rate_exponent_curves(std::span<const double> kappa_grid) {
    std::vector<ExponentRow> out;
    out.reserve(kappa_grid.size());
    for (double k : kappa_grid) {
        if (!(k >= 0.0 && k <= 0.5)) {
            std::ostringstream os;
            os << "kappa grid value " << k << " outside [0, 1/2]";
            throw ValidationError(os.str());
        }
        out.push_back({k, gamma_well_specified(k), gamma_misspecified(k), 1.0});
    }
    return out;
}

}  // namespace cusp
