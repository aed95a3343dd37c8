#include "cusp/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cusp/errors.hpp"
#include "cusp/parallel.hpp"
#include "cusp/rng.hpp"

namespace cusp {

ProcessSample::ProcessSample(std::vector<double> events, double tau) : events_(std::move(events)) {
    for (std::size_t i = 0; i < events_.size(); ++i) {
        const double t = events_[i];
        if (!(t >= 0.0 && t <= tau)) {
            std::ostringstream os;
            os << "event time " << t << " outside [0, " << tau << "]";
            throw ValidationError(os.str());
        }
        if (i > 0 && !(events_[i - 1] < t)) {
            throw ValidationError("event times must be strictly increasing");
        }
    }
}

std::size_t Dataset::total_events() const {
    std::size_t total = 0;
    for (const auto& r : replicates) total += r.size();
    return total;
}

double thinning_bound(const ModelParams& p) {
    return std::max({p.lambda0(), p.lambda_plus(), p.signal() + p.lambda0()});
}

ProcessSample simulate_replicate(const ModelParams& p, std::uint64_t seed, std::size_t index) {
    auto gen = rng::stream(seed, {index});
    const double bound = thinning_bound(p);
    const double tau = p.tau();
    std::vector<double> events;
    events.reserve(static_cast<std::size_t>(bound * tau * 1.5) + 8);
    double t = 0.0;
    for (;;) {
        t += rng::exponential1(gen) / bound;
        if (t > tau) break;
        if (rng::uniform01(gen) * bound < real_intensity(p, t)) {
            // Ties are possible only through rounding; keep times strictly increasing.
            if (events.empty() || events.back() < t) events.push_back(t);
        }
    }
    return ProcessSample(std::move(events), tau);
}

Dataset simulate(const ModelParams& p, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ValidationError("n: replicate count must be >= 1");
    Dataset out{std::vector<ProcessSample>(n), p, seed};
    par::for_each_index(n, [&](std::size_t i) { out.replicates[i] = simulate_replicate(p, seed, i); });
    return out;
}

Dataset simulate_serial(const ModelParams& p, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ValidationError("n: replicate count must be >= 1");
    Dataset out{{}, p, seed};
    out.replicates.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.replicates.push_back(simulate_replicate(p, seed, i));
    return out;
}

std::size_t empirical_counting_function(const ProcessSample& sample, double t) {
    const auto& ev = sample.events();
    return static_cast<std::size_t>(std::upper_bound(ev.begin(), ev.end(), t) - ev.begin());
}

}  // namespace cusp
