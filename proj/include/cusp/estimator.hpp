#pragma once

// Pseudo maximum likelihood for the arrival time under the theoretical model.
//
// Objective (default "paper" domain):
//   sum_j sum_{t_i > theta} ln lambda(theta, t_i) - n int_theta^tau [lambda(theta, t) - 1] dt.
// The "full" domain integrates over [0, tau] instead; the two differ by
// ln(lambda0) N[0, theta] - n (lambda0 - 1) theta, which vanishes when lambda0 = 1.

#include <cstddef>
#include <string_view>
#include <vector>

#include "cusp/model.hpp"
#include "cusp/sim.hpp"

namespace cusp {

enum class LikelihoodDomain { paper, full };

[[nodiscard]] LikelihoodDomain parse_likelihood_domain(std::string_view name);
[[nodiscard]] std::string_view to_string(LikelihoodDomain d);

/// All events of a dataset merged and sorted; the objective only depends on
/// this multiset and the replicate count.
class PooledEvents {
public:
    explicit PooledEvents(const Dataset& data);
    PooledEvents(std::vector<double> events, std::size_t replicates);

    [[nodiscard]] const std::vector<double>& events() const { return events_; }
    [[nodiscard]] std::size_t replicates() const { return replicates_; }

private:
    std::vector<double> events_;
    std::size_t replicates_;
};

struct LoglikTerms {
    double stochastic = 0.0;   // sum of ln lambda over events in the domain
    double compensator = 0.0;  // n int [lambda - 1] dt over the domain
    [[nodiscard]] double value() const { return stochastic - compensator; }
};

[[nodiscard]] LoglikTerms pseudo_loglik_terms(const ModelParams& p, const PooledEvents& events,
                                              double theta,
                                              LikelihoodDomain domain = LikelihoodDomain::paper);

[[nodiscard]] double pseudo_loglik(const ModelParams& p, const Dataset& data, double theta,
                                   LikelihoodDomain domain = LikelihoodDomain::paper);

struct EstimatorOptions {
    /// Coarse grid spacing; 0 selects delta / 50.
    double coarse_step = 0.0;
    int refinements = 4;
    LikelihoodDomain domain = LikelihoodDomain::paper;
};

struct EstimationResult {
    double theta_n = 0.0;
    double loglik = 0.0;
    double grid_step_final = 0.0;
    std::size_t evaluations = 0;
    /// No events in any replicate; theta_n maximizes the deterministic term only.
    bool degenerate = false;
    friend bool operator==(const EstimationResult&, const EstimationResult&) = default;
};

/// Exhaustive coarse grid over the closed window Theta followed by
/// `refinements` passes re-gridding +-1 step around the incumbent at a tenth
/// of the spacing. Grid points are evaluated in parallel, the argmax is an
/// index-ordered reduction with ties going to the smallest theta.
[[nodiscard]] EstimationResult pmle(const ModelParams& p, const Dataset& data,
                                    const EstimatorOptions& opts = {});
[[nodiscard]] EstimationResult pmle(const ModelParams& p, const PooledEvents& events,
                                    const EstimatorOptions& opts = {});

/// Single-threaded reference of pmle(); identical result.
[[nodiscard]] EstimationResult pmle_serial(const ModelParams& p, const PooledEvents& events,
                                           const EstimatorOptions& opts = {});

}  // namespace cusp
