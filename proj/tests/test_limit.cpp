#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cusp/errors.hpp"
#include "cusp/limit.hpp"
#include "cusp/parallel.hpp"
#include "cusp/rng.hpp"
#include "cusp/stats.hpp"
#include "oracles.hpp"

using namespace cusp;
using doctest::Approx;

namespace {

constexpr double kH = 0.75;
// E|u_hat|^2 for kappa = 0.25, u_max = 8, step = 1/256, 10^4 draws, seed 2024.
constexpr double kPinnedSecondMoment = 0.87084308776855468;

std::size_t index_of(const FbmGrid& g, double u) {
    return static_cast<std::size_t>(std::llround(u / g.step())) + g.half_nodes();
}

struct Paths {
    FbmGrid grid;
    std::vector<std::vector<double>> rows;

    std::vector<double> at(double u) const {
        std::vector<double> out;
        const std::size_t k = index_of(grid, u);
        for (const auto& r : rows) out.push_back(r[k]);
        return out;
    }
};

Paths draw_paths(const FbmGrid& g, std::size_t count, std::uint64_t seed) {
    const FbmSampler s(g);
    Paths p{g, {}};
    for (std::size_t i = 0; i < count; ++i) p.rows.push_back(s.path(seed, i));
    return p;
}

// Sample variance with the standard error of the fourth-moment estimator.
struct VarEstimate {
    double value;
    double se;
};

VarEstimate var_of(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    double m2 = 0.0, m4 = 0.0;
    for (double v : x) {
        m2 += v * v;
        m4 += v * v * v * v;
    }
    m2 /= n;
    m4 /= n;
    return {m2, std::sqrt((m4 - m2 * m2) / n)};
}

}  // namespace

TEST_CASE("fBm covariance formula") {
    CHECK(fbm_covariance(1.0, 1.0, kH) == 1.0);
    CHECK(fbm_covariance(0.0, 3.0, kH) == 0.0);
    CHECK(fbm_covariance(1.0, -1.0, kH) == Approx(0.5 * (2.0 - std::pow(2.0, 1.5))).epsilon(1e-15));
    CHECK(fbm_covariance(2.0, 3.0, kH) == fbm_covariance(3.0, 2.0, kH));
}

TEST_CASE("paths vanish at the origin and reproduce the covariance") {
    const Paths p = draw_paths(FbmGrid(4.0, 1.0 / 16.0, kH), 2000, 41);
    for (const auto& r : p.rows) CHECK(r[p.grid.half_nodes()] == 0.0);

    const VarEstimate v1 = var_of(p.at(1.0));
    CHECK(std::abs(v1.value - 1.0) < 3.0 * v1.se);

    std::vector<double> prod;
    const auto a = p.at(1.0), b = p.at(-1.0);
    for (std::size_t i = 0; i < a.size(); ++i) prod.push_back(a[i] * b[i]);
    const double cov = stats::mean(prod);
    const double se = std::sqrt(stats::variance(prod) / static_cast<double>(prod.size()));
    CHECK(std::abs(cov - fbm_covariance(1.0, -1.0, kH)) < 3.0 * se);
}

TEST_CASE("increments are stationary") {
    const Paths p = draw_paths(FbmGrid(4.0, 1.0 / 16.0, kH), 2000, 42);
    for (double u : {-3.0, 0.5, 2.0}) {
        const auto a = p.at(u), b = p.at(u + 1.0);
        std::vector<double> inc;
        for (std::size_t i = 0; i < a.size(); ++i) inc.push_back(b[i] - a[i]);
        const VarEstimate v = var_of(inc);
        CHECK(std::abs(v.value - 1.0) < 3.0 * v.se);
    }
}

TEST_CASE("variance scales like |u|^{2H}") {
    const Paths p = draw_paths(FbmGrid(4.0, 1.0 / 16.0, kH), 2000, 43);
    const VarEstimate v2 = var_of(p.at(2.0));
    const VarEstimate vm = var_of(p.at(-0.5));
    CHECK(std::abs(v2.value - std::pow(2.0, 2.0 * kH)) < 3.0 * v2.se);
    CHECK(std::abs(vm.value - std::pow(0.5, 2.0 * kH)) < 3.0 * vm.se);
}

TEST_CASE("covariance draws agree with the Wiener-integral representation") {
    const double k = kH - 0.5;
    const Paths p = draw_paths(FbmGrid(4.0, 1.0 / 16.0, kH), 2000, 44);
    const oracle::WienerRepresentation rep(k, {1.0, 2.0}, 2000.0, 400);
    const double gamma = std::sqrt(oracle::gamma_integral_closed_form(k));
    auto g = rng::stream(45, {});
    std::vector<double> w1, w2;
    for (int i = 0; i < 2000; ++i) {
        const auto d = rep.draw(g);
        w1.push_back(d[0] / gamma);
        w2.push_back(d[1] / gamma);
    }
    // 1.73 sqrt(2/m) is the 0.5% critical value of the two-sample KS statistic.
    const double crit = 1.73 * std::sqrt(2.0 / 2000.0);
    CHECK(stats::ks_two_sample(w1, p.at(1.0)) < crit);
    CHECK(stats::ks_two_sample(w2, p.at(2.0)) < crit);
    const double c_rep = stats::covariance(w1, w2);
    const double c_chol = stats::covariance(p.at(1.0), p.at(2.0));
    CHECK(c_rep == Approx(fbm_covariance(1.0, 2.0, kH)).epsilon(0.1));
    CHECK(c_chol == Approx(fbm_covariance(1.0, 2.0, kH)).epsilon(0.1));
}

TEST_CASE("blocked path kernel matches single paths") {
    const FbmSampler s(FbmGrid(2.0, 1.0 / 8.0, kH));
    const std::size_t n = s.grid().size();
    std::vector<double> block(7 * n);
    s.paths(46, 3, 7, block);
    for (std::size_t i = 0; i < 7; ++i) {
        const auto single = s.path(46, 3 + i);
        CHECK(std::equal(single.begin(), single.end(), block.begin() + static_cast<long>(i * n)));
    }
}

TEST_CASE("degenerate single-node grid gives zero draws") {
    const FbmGrid g(0.0, 1.0, kH);
    CHECK(g.size() == 1);
    const LimitSample s = sample_limit_argmax(g, 50, 1);
    CHECK(s.draws.size() == 50);
    for (double d : s.draws) CHECK(d == 0.0);
}

TEST_CASE("argmax draws are symmetric and rarely near the boundary") {
    const LimitSample s = sample_limit_argmax(FbmGrid(8.0, 1.0 / 32.0, kH), 10000, 47);
    const double m = stats::mean(s.draws);
    const double se = std::sqrt(stats::variance(s.draws) / 1e4);
    CHECK(std::abs(m) < 3.0 * se);
    CHECK(s.boundary_mass() < 1e-3);
    CHECK(s.near_boundary_mass() < 1e-3);
}

TEST_CASE("parallel argmax draws equal the serial reference") {
    const FbmSampler sampler(FbmGrid(4.0, 1.0 / 16.0, kH));
    const LimitSample serial = sample_limit_argmax_serial(sampler, 300, 48);
    par::set_threads(4);
    const LimitSample parallel = sample_limit_argmax(sampler, 300, 48);
    par::set_threads(1);
    CHECK(serial.draws == parallel.draws);
    CHECK(serial.draws == sample_limit_argmax(sampler, 300, 48).draws);
}

TEST_CASE("halving the step refines the argmax without changing its law") {
    // Common random numbers: the coarse grid is the even-indexed subset of a fine path.
    const FbmGrid fine(8.0, 1.0 / 64.0, kH);
    const FbmSampler s(fine);
    const auto u_fine = fine.nodes();
    std::vector<double> u_coarse;
    for (std::size_t k = 0; k < u_fine.size(); k += 2) u_coarse.push_back(u_fine[k]);
    const std::size_t m = 1000;
    std::vector<double> a(m), b(m);
    std::size_t near = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const auto w = s.path(49, i);
        std::vector<double> w_coarse;
        for (std::size_t k = 0; k < w.size(); k += 2) w_coarse.push_back(w[k]);
        const std::size_t kf = argmax_node(u_fine, w);
        const std::size_t kc = argmax_node(u_coarse, w_coarse);
        a[i] = u_fine[kf];
        b[i] = u_coarse[kc];
        // The coarse nodes are fine nodes, so the fine maximum dominates.
        CHECK(w[kf] - 0.5 * a[i] * a[i] >= w_coarse[kc] - 0.5 * b[i] * b[i]);
        if (std::abs(a[i] - b[i]) <= 1.0 / 32.0 + 1e-12) ++near;
    }
    // Rough paths occasionally switch between distant near-tied local maxima.
    CHECK(near >= 850);
    CHECK(stats::ks_two_sample(a, b) < 1.36 * std::sqrt(2.0 / static_cast<double>(m)));
}

TEST_CASE("argmax node tie-breaking") {
    const std::vector<double> u{-1.0, 0.0, 1.0};
    CHECK(argmax_node(u, std::vector<double>{0.5, 0.0, 0.5}) == 1);
    CHECK(argmax_node(u, std::vector<double>{1.0, 0.0, 1.0}) == 0);
    CHECK(argmax_node(u, std::vector<double>{0.0, 0.0, 2.0}) == 2);
}

TEST_CASE("narrow grids are rejected as truncated") {
    CHECK_THROWS_AS((void)sample_limit_argmax(FbmGrid(0.5, 1.0 / 16.0, kH), 2000, 50), TruncationError);
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(FbmGrid(1.0, 0.3, kH), ValidationError);
    CHECK_THROWS_AS(FbmGrid(1.0, 0.0, kH), ValidationError);
    CHECK_THROWS_AS(FbmGrid(-1.0, 0.25, kH), ValidationError);
    CHECK_THROWS_AS(FbmGrid(1.0, 0.25, 0.5), ValidationError);
    CHECK_THROWS_AS(FbmGrid(1.0, 0.25, 1.0), ValidationError);
    const FbmGrid g(1.0, 0.25, kH);
    CHECK(g.size() == 9);
    CHECK(g.node(0) == -1.0);
    CHECK(g.node(4) == 0.0);
    CHECK(g.node(8) == 1.0);
}

TEST_CASE("moments of argmax draws") {
    const LimitSample s = sample_limit_argmax(FbmGrid(8.0, 1.0 / 32.0, kH), 2000, 51);
    const std::vector<double> powers{0.0, 1.0, 2.0, 4.0};
    const auto m = limit_moments(s.draws, powers);
    CHECK(m[0].mean == 1.0);
    CHECK(m[0].std_err == 0.0);
    CHECK(m[1].mean * m[1].mean <= m[2].mean);
    CHECK(m[2].mean * m[2].mean <= m[3].mean);
    for (const auto& x : m) CHECK(x.std_err >= 0.0);
}

TEST_CASE("second moment on the default grid is a pinned regression constant") {
    const LimitSample s = sample_limit_argmax(FbmGrid(8.0, 1.0 / 256.0, kH), 10000, 2024);
    const std::vector<double> powers{2.0};
    const Moment m = limit_moments(s.draws, powers)[0];
    CHECK(m.mean == Approx(kPinnedSecondMoment).epsilon(1e-12));
}
