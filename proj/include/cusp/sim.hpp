#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cusp/model.hpp"

namespace cusp {

/// One replicate: strictly increasing event times in [0, tau].
class ProcessSample {
public:
    ProcessSample() = default;
    /// Throws ValidationError unless events are strictly increasing in [0, tau].
    ProcessSample(std::vector<double> events, double tau);

    [[nodiscard]] const std::vector<double>& events() const { return events_; }
    [[nodiscard]] std::size_t size() const { return events_.size(); }

    friend bool operator==(const ProcessSample&, const ProcessSample&) = default;

private:
    std::vector<double> events_;
};

struct Dataset {
    std::vector<ProcessSample> replicates;
    ModelParams params;
    std::uint64_t seed = 0;

    [[nodiscard]] std::size_t total_events() const;
    friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Dominating constant rate used for thinning: max(lambda0, lambda_+, S + lambda0).
[[nodiscard]] double thinning_bound(const ModelParams& p);

/// One replicate from the real intensity by thinning, driven by stream
/// (seed, index).
[[nodiscard]] ProcessSample simulate_replicate(const ModelParams& p, std::uint64_t seed,
                                               std::size_t index);

/// n replicates, generated in parallel. Output does not depend on thread count.
[[nodiscard]] Dataset simulate(const ModelParams& p, std::size_t n, std::uint64_t seed);

/// Single-threaded reference for simulate(); bit-identical output.
[[nodiscard]] Dataset simulate_serial(const ModelParams& p, std::size_t n, std::uint64_t seed);

/// X(t): number of events <= t.
[[nodiscard]] std::size_t empirical_counting_function(const ProcessSample& sample, double t);

}  // namespace cusp
