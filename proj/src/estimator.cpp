#include "cusp/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "cusp/errors.hpp"
#include "cusp/parallel.hpp"

namespace cusp {

LikelihoodDomain parse_likelihood_domain(std::string_view name) {
    if (name == "paper") return LikelihoodDomain::paper;
    if (name == "full") return LikelihoodDomain::full;
    throw ValidationError("likelihood_domain: expected 'paper' or 'full', got '" +
                          std::string(name) + "'");
}

std::string_view to_string(LikelihoodDomain d) {
    return d == LikelihoodDomain::paper ? "paper" : "full";
}

PooledEvents::PooledEvents(const Dataset& data) : replicates_(data.replicates.size()) {
    events_.reserve(data.total_events());
    for (const auto& r : data.replicates) {
        events_.insert(events_.end(), r.events().begin(), r.events().end());
    }
    std::sort(events_.begin(), events_.end());
}

PooledEvents::PooledEvents(std::vector<double> events, std::size_t replicates)
    : events_(std::move(events)), replicates_(replicates) {
    std::sort(events_.begin(), events_.end());
}

LoglikTerms pseudo_loglik_terms(const ModelParams& p, const PooledEvents& pooled, double theta,
                                LikelihoodDomain domain) {
    const auto& ev = pooled.events();
    const double s = p.signal();
    const double l0 = p.lambda0();
    const double k = p.kappa();
    const double d = p.delta();
    const double tau = p.tau();
    const auto n = static_cast<double>(pooled.replicates());

    // Events at t == theta are excluded: the front is zero there.
    const auto first = std::upper_bound(ev.begin(), ev.end(), theta);
    const auto plateau = std::lower_bound(first, ev.end(), theta + d);

    LoglikTerms out;
    double front = 0.0;
    for (auto it = first; it != plateau; ++it) {
        front += std::log(s * std::pow((*it - theta) / d, k) + l0);
    }
    out.stochastic = front + static_cast<double>(ev.end() - plateau) * std::log(s + l0);

    if (domain == LikelihoodDomain::paper) {
        out.compensator = n * (theoretical_integral(p, theta, theta, tau) - (tau - theta));
    } else {
        out.stochastic += static_cast<double>(first - ev.begin()) * std::log(l0);
        out.compensator = n * (theoretical_integral(p, theta, 0.0, tau) - tau);
    }
    return out;
}

double pseudo_loglik(const ModelParams& p, const Dataset& data, double theta,
                     LikelihoodDomain domain) {
    return pseudo_loglik_terms(p, PooledEvents(data), theta, domain).value();
}

namespace {

struct Candidate {
    double theta;
    double value;
};

// Index-ordered argmax; strict comparison keeps the smallest theta on ties
// because grids are generated in increasing order.
Candidate argmax(const std::vector<double>& thetas, const std::vector<double>& values) {
    Candidate best{thetas.front(), values.front()};
    for (std::size_t i = 1; i < thetas.size(); ++i) {
        if (values[i] > best.value) best = {thetas[i], values[i]};
    }
    return best;
}

template <bool Parallel>
EstimationResult search(const ModelParams& p, const PooledEvents& events,
                        const EstimatorOptions& opts) {
    const double step0 = opts.coarse_step > 0.0 ? opts.coarse_step : p.delta() / 50.0;
    if (!std::isfinite(step0)) throw ValidationError("coarse_step: must be finite and > 0");
    if (opts.coarse_step < 0.0) throw ValidationError("coarse_step: must be > 0");
    if (opts.refinements < 1) throw ValidationError("refinements: must be >= 1");

    const Window w = p.theta_window();
    EstimationResult out;
    out.degenerate = events.events().empty();

    auto evaluate = [&](const std::vector<double>& thetas) {
        std::vector<double> values(thetas.size());
        auto one = [&](std::size_t i) {
            values[i] = pseudo_loglik_terms(p, events, thetas[i], opts.domain).value();
        };
        if constexpr (Parallel) {
            par::for_each_index(thetas.size(), one);
        } else {
            for (std::size_t i = 0; i < thetas.size(); ++i) one(i);
        }
        out.evaluations += thetas.size();
        return values;
    };

    const auto cells = static_cast<std::size_t>(std::ceil(w.width() / step0 - 1e-9));
    std::vector<double> grid;
    grid.reserve(cells + 1);
    for (std::size_t i = 0; i < cells; ++i) grid.push_back(w.lo + static_cast<double>(i) * step0);
    grid.push_back(w.hi);

    Candidate best = argmax(grid, evaluate(grid));
    double step = step0;
    for (int pass = 0; pass < opts.refinements; ++pass) {
        const double fine = step / 10.0;
        grid.clear();
        for (int j = -10; j <= 10; ++j) {
            if (j == 0) continue;
            const double t = best.theta + j * fine;
            if (t >= w.lo && t <= w.hi) grid.push_back(t);
        }
        if (!grid.empty()) {
            const std::vector<double> values = evaluate(grid);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                if (values[i] > best.value || (values[i] == best.value && grid[i] < best.theta)) {
                    best = {grid[i], values[i]};
                }
            }
        }
        step = fine;
    }
    out.theta_n = best.theta;
    out.loglik = best.value;
    out.grid_step_final = step;
    return out;
}

}  // namespace

EstimationResult pmle(const ModelParams& p, const PooledEvents& events, const EstimatorOptions& opts) {
    return search<true>(p, events, opts);
}

EstimationResult pmle(const ModelParams& p, const Dataset& data, const EstimatorOptions& opts) {
    return search<true>(p, PooledEvents(data), opts);
}

EstimationResult pmle_serial(const ModelParams& p, const PooledEvents& events,
                             const EstimatorOptions& opts) {
    return search<false>(p, events, opts);
}

}  // namespace cusp
