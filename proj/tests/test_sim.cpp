#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cusp/errors.hpp"
#include "cusp/parallel.hpp"
#include "cusp/sim.hpp"
#include "cusp/stats.hpp"
#include "oracles.hpp"

using namespace cusp;

namespace {

struct CountStats {
    double mean;
    double var;
};

CountStats counts(const Dataset& d) {
    std::vector<double> c;
    for (const auto& r : d.replicates) c.push_back(static_cast<double>(r.size()));
    return {stats::mean(c), stats::variance(c)};
}

// Kolmogorov distance of a sample from Uniform(0, 1).
double ks_uniform(std::vector<double> u) {
    std::sort(u.begin(), u.end());
    const double n = static_cast<double>(u.size());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - u[i], u[i] - static_cast<double>(i) / n});
    }
    return d;
}

}  // namespace

TEST_CASE("cancelled signal gives a homogeneous process with mean lambda0 tau") {
    const ModelParams p = oracle::reference(-1.0);
    const Dataset d = simulate(p, 10000, 21);
    const CountStats c = counts(d);
    CHECK(std::abs(c.mean - 5.0) < 4.0 * std::sqrt(5.0 / 10000.0));
    CHECK(c.var == doctest::Approx(5.0).epsilon(0.05));
}

TEST_CASE("mean count equals the integrated real intensity") {
    for (double h : {-0.3, 0.5, 3.0}) {
        const ModelParams p = oracle::reference(h);
        const double expected = real_integral(p, 0.0, p.tau());
        const CountStats c = counts(simulate(p, 10000, 22));
        CHECK(std::abs(c.mean - expected) < 4.0 * std::sqrt(expected / 10000.0));
        CHECK(c.var == doctest::Approx(expected).epsilon(0.06));
    }
}

TEST_CASE("rescaled event times are uniform given the count") {
    // Conditionally on N(tau) = k, Lambda*(t_i) / Lambda*(tau) are iid uniform.
    const ModelParams p = oracle::reference(0.5);
    const Dataset d = simulate(p, 3000, 23);
    const double total = real_integral(p, 0.0, p.tau());
    std::vector<double> u;
    for (const auto& r : d.replicates) {
        for (double t : r.events()) u.push_back(real_integral(p, 0.0, t) / total);
    }
    // 1.63 / sqrt(N) is the 1% critical value.
    CHECK(ks_uniform(u) < 1.63 / std::sqrt(static_cast<double>(u.size())));
}

TEST_CASE("counts on disjoint intervals are uncorrelated") {
    const ModelParams p = oracle::reference(0.5);
    const Dataset d = simulate(p, 10000, 24);
    std::vector<double> a, b;
    for (const auto& r : d.replicates) {
        const auto mid = empirical_counting_function(r, 2.2);
        a.push_back(static_cast<double>(mid));
        b.push_back(static_cast<double>(r.size() - mid));
    }
    CHECK(std::abs(stats::correlation(a, b)) < 4.0 / std::sqrt(10000.0));
}

TEST_CASE("events are strictly increasing inside [0, tau]") {
    const Dataset d = simulate(oracle::reference(2.0), 500, 25);
    for (const auto& r : d.replicates) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            CHECK(r.events()[i] >= 0.0);
            CHECK(r.events()[i] <= 5.0);
            if (i > 0) CHECK(r.events()[i] > r.events()[i - 1]);
        }
    }
}

TEST_CASE("simulation is deterministic and matches the serial reference") {
    const ModelParams p = oracle::reference(0.5);
    const Dataset a = simulate(p, 300, 26);
    const Dataset b = simulate(p, 300, 26);
    CHECK(a == b);
    CHECK(a == simulate_serial(p, 300, 26));
    par::set_threads(3);
    const Dataset c = simulate(p, 300, 26);
    par::set_threads(1);
    CHECK(a == c);
    CHECK_FALSE(a == simulate(p, 300, 27));
    CHECK(a.seed == 26);
    CHECK(a.params == p);
}

TEST_CASE("replicate streams do not depend on the number of replicates") {
    const ModelParams p = oracle::reference(0.5);
    const Dataset small = simulate(p, 10, 28);
    const Dataset large = simulate(p, 40, 28);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(small.replicates[i] == large.replicates[i]);
        CHECK(small.replicates[i] == simulate_replicate(p, 28, i));
    }
}

TEST_CASE("thinning bound dominates the real intensity") {
    for (double h : {-0.5, 0.0, 2.0}) {
        const ModelParams p = oracle::reference(h);
        for (double t = 0.0; t <= 5.0; t += 0.01) CHECK(real_intensity(p, t) <= thinning_bound(p));
    }
}

TEST_CASE("empirical counting function") {
    const ProcessSample s({0.5, 1.0, 2.0}, 5.0);
    CHECK(empirical_counting_function(s, 0.0) == 0);
    CHECK(empirical_counting_function(s, 0.5) == 1);
    CHECK(empirical_counting_function(s, 1.5) == 2);
    CHECK(empirical_counting_function(s, 2.0) == 3);
    CHECK(empirical_counting_function(s, 5.0) == 3);
    CHECK(empirical_counting_function(ProcessSample({}, 5.0), 3.0) == 0);
}

TEST_CASE("process samples validate their events") {
    CHECK_THROWS_AS(ProcessSample({1.0, 0.5}, 5.0), ValidationError);
    CHECK_THROWS_AS(ProcessSample({1.0, 1.0}, 5.0), ValidationError);
    CHECK_THROWS_AS(ProcessSample({-0.1}, 5.0), ValidationError);
    CHECK_THROWS_AS(ProcessSample({5.1}, 5.0), ValidationError);
    CHECK_NOTHROW(ProcessSample({0.0, 5.0}, 5.0));
}
