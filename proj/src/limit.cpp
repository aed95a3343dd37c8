#include "cusp/limit.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "cusp/errors.hpp"
#include "cusp/parallel.hpp"
#include "cusp/rng.hpp"

namespace cusp {

FbmGrid::FbmGrid(double u_max, double step, double hurst)
    : u_max_(u_max), step_(step), hurst_(hurst), half_(0) {
    if (!(std::isfinite(u_max) && u_max >= 0.0)) throw ValidationError("u_max: must be >= 0");
    if (!(std::isfinite(step) && step > 0.0)) throw ValidationError("step: must be > 0");
    if (!(hurst > 0.5 && hurst < 1.0)) throw ValidationError("hurst: must lie in (1/2, 1)");
    const double ratio = u_max / step;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        std::ostringstream os;
        os << "u_max / step must be an integer (got " << ratio << ")";
        throw ValidationError(os.str());
    }
    half_ = static_cast<std::size_t>(rounded);
}

double FbmGrid::node(std::size_t k) const {
    return (static_cast<double>(k) - static_cast<double>(half_)) * step_;
}

std::vector<double> FbmGrid::nodes() const {
    std::vector<double> out(size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = node(k);
    return out;
}

double fbm_covariance(double u1, double u2, double hurst) {
    const double e = 2.0 * hurst;
    return 0.5 * (std::pow(std::abs(u1), e) + std::pow(std::abs(u2), e) -
                  std::pow(std::abs(u1 - u2), e));
}

namespace {

// Grid index of the i-th nonzero node (the centre node is skipped).
std::size_t nonzero_to_grid(std::size_t i, std::size_t half) { return i < half ? i : i + 1; }

}  // namespace

FbmSampler::FbmSampler(const FbmGrid& grid) : grid_(grid), dim_(2 * grid.half_nodes()) {
    if (dim_ == 0) return;
    const std::size_t half = grid_.half_nodes();
    const auto n = static_cast<Eigen::Index>(dim_);
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double uj = grid_.node(nonzero_to_grid(static_cast<std::size_t>(j), half));
        for (Eigen::Index i = j; i < n; ++i) {
            const double ui = grid_.node(nonzero_to_grid(static_cast<std::size_t>(i), half));
            cov(i, j) = fbm_covariance(ui, uj, grid_.hurst());
        }
    }
    Eigen::MatrixXd work = cov;
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>, Eigen::Lower> llt(work);
    if (llt.info() != Eigen::Success) {
        work = cov;
        work.diagonal().array() += 1e-12;
        Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>, Eigen::Lower> retry(work);
        if (retry.info() != Eigen::Success) {
            throw NumericalError("fBm covariance factorization failed even with 1e-12 jitter");
        }
        jittered_ = true;
    }
    factor_.resize(dim_ * (dim_ + 1) / 2);
    std::size_t pos = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k <= i; ++k) factor_[pos++] = work(i, k);
    }
}

void FbmSampler::normals(std::uint64_t seed, std::size_t index, std::span<double> z) const {
    auto gen = rng::stream(seed, {index});
    rng::fill_normal(gen, z);
}

std::vector<double> FbmSampler::path(std::uint64_t seed, std::size_t index) const {
    std::vector<double> out(grid_.size(), 0.0);
    if (dim_ == 0) return out;
    std::vector<double> z(dim_);
    normals(seed, index, z);
    const std::size_t half = grid_.half_nodes();
    const double* row = factor_.data();
    for (std::size_t i = 0; i < dim_; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k <= i; ++k) acc += row[k] * z[k];
        row += i + 1;
        out[nonzero_to_grid(i, half)] = acc;
    }
    return out;
}

void FbmSampler::paths(std::uint64_t seed, std::size_t first, std::size_t count,
                       std::span<double> out) const {
    const std::size_t width = grid_.size();
    if (out.size() != count * width) throw ValidationError("paths: output span has wrong size");
    std::fill(out.begin(), out.end(), 0.0);
    if (dim_ == 0 || count == 0) return;

    // z is dim x count (draw-contiguous) so the inner loop runs over draws;
    // each output still accumulates over k in increasing order like path().
    std::vector<double> z(dim_ * count);
    std::vector<double> zi(dim_);
    for (std::size_t b = 0; b < count; ++b) {
        normals(seed, first + b, zi);
        for (std::size_t k = 0; k < dim_; ++k) z[k * count + b] = zi[k];
    }
    std::vector<double> acc(count);
    const std::size_t half = grid_.half_nodes();
    const double* row = factor_.data();
    for (std::size_t i = 0; i < dim_; ++i) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t k = 0; k <= i; ++k) {
            const double l = row[k];
            const double* zk = &z[k * count];
            for (std::size_t b = 0; b < count; ++b) acc[b] += l * zk[b];
        }
        row += i + 1;
        const std::size_t col = nonzero_to_grid(i, half);
        for (std::size_t b = 0; b < count; ++b) out[b * width + col] = acc[b];
    }
}

std::size_t argmax_node(std::span<const double> u, std::span<const double> w) {
    if (u.empty() || u.size() != w.size()) throw ValidationError("argmax_node: size mismatch");
    std::size_t best = 0;
    double best_val = w[0] - 0.5 * u[0] * u[0];
    for (std::size_t k = 1; k < u.size(); ++k) {
        const double v = w[k] - 0.5 * u[k] * u[k];
        const bool better =
            v > best_val ||
            (v == best_val && (std::abs(u[k]) < std::abs(u[best]) ||
                               (std::abs(u[k]) == std::abs(u[best]) && u[k] < u[best])));
        if (better) {
            best = k;
            best_val = v;
        }
    }
    return best;
}

double LimitSample::boundary_mass() const {
    if (draws.empty()) return 0.0;
    const auto hits = std::count_if(draws.begin(), draws.end(),
                                    [&](double d) { return std::abs(d) >= grid.u_max(); });
    return static_cast<double>(hits) / static_cast<double>(draws.size());
}

double LimitSample::near_boundary_mass() const {
    if (draws.empty()) return 0.0;
    const double edge = grid.u_max() - grid.step();
    const auto hits = std::count_if(draws.begin(), draws.end(),
                                    [&](double d) { return std::abs(d) >= edge; });
    return static_cast<double>(hits) / static_cast<double>(draws.size());
}

namespace {

constexpr std::size_t kBlock = 32;

void check_truncation(const LimitSample& s) {
    if (s.grid.half_nodes() == 0) return;
    const double mass = s.near_boundary_mass();
    if (mass >= kMaxBoundaryFraction) {
        std::ostringstream os;
        os << "limit argmax hit the truncation boundary in " << mass * 100.0
           << "% of draws (limit " << kMaxBoundaryFraction * 100.0
           << "%); increase u_max (currently " << s.grid.u_max() << ")";
        throw TruncationError(os.str());
    }
}

}  // namespace

LimitSample sample_limit_argmax(const FbmSampler& sampler, std::size_t n_draws, std::uint64_t seed) {
    if (n_draws == 0) throw ValidationError("draws: must be >= 1");
    const FbmGrid& grid = sampler.grid();
    const std::vector<double> u = grid.nodes();
    LimitSample out{std::vector<double>(n_draws), grid, seed};
    const std::size_t blocks = (n_draws + kBlock - 1) / kBlock;
    par::for_each_index(blocks, [&](std::size_t blk) {
        const std::size_t first = blk * kBlock;
        const std::size_t count = std::min(kBlock, n_draws - first);
        std::vector<double> w(count * grid.size());
        sampler.paths(seed, first, count, w);
        for (std::size_t b = 0; b < count; ++b) {
            const std::span<const double> row(w.data() + b * grid.size(), grid.size());
            out.draws[first + b] = u[argmax_node(u, row)];
        }
    });
    check_truncation(out);
    return out;
}

LimitSample sample_limit_argmax(const FbmGrid& grid, std::size_t n_draws, std::uint64_t seed) {
    return sample_limit_argmax(FbmSampler(grid), n_draws, seed);
}

LimitSample sample_limit_argmax_serial(const FbmSampler& sampler, std::size_t n_draws,
                                       std::uint64_t seed) {
    if (n_draws == 0) throw ValidationError("draws: must be >= 1");
    const std::vector<double> u = sampler.grid().nodes();
    LimitSample out{{}, sampler.grid(), seed};
    out.draws.reserve(n_draws);
    for (std::size_t d = 0; d < n_draws; ++d) {
        const std::vector<double> w = sampler.path(seed, d);
        out.draws.push_back(u[argmax_node(u, w)]);
    }
    check_truncation(out);
    return out;
}

std::vector<Moment> limit_moments(std::span<const double> draws, std::span<const double> powers) {
    if (draws.empty()) throw ValidationError("limit_moments: empty sample");
    std::vector<Moment> out;
    const auto n = static_cast<double>(draws.size());
    for (double p : powers) {
        if (!(p >= 0.0)) throw ValidationError("limit_moments: powers must be >= 0");
        double sum = 0.0;
        double sum_sq = 0.0;
        for (double x : draws) {
            const double v = std::pow(std::abs(x), p);
            sum += v;
            sum_sq += v * v;
        }
        const double mean = sum / n;
        const double var = draws.size() > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
        out.push_back({p, mean, std::sqrt(var / n)});
    }
    return out;
}

}  // namespace cusp
