#pragma once

// The limit variable u_hat = argmax_u [W^H(u) - u^2/2] for a two-sided fBm
// with Hurst index H = kappa + 1/2, simulated on a symmetric grid by exact
// Cholesky factorization of the fBm covariance.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cusp {

class FbmGrid {
public:
    /// u_max / step must be an integer; u_max == 0 gives the single-node grid {0}.
    FbmGrid(double u_max, double step, double hurst);

    [[nodiscard]] double u_max() const { return u_max_; }
    [[nodiscard]] double step() const { return step_; }
    [[nodiscard]] double hurst() const { return hurst_; }
    /// Nodes per side, u_max / step.
    [[nodiscard]] std::size_t half_nodes() const { return half_; }
    [[nodiscard]] std::size_t size() const { return 2 * half_ + 1; }
    /// Node k, k in [0, size()), is (k - half_nodes()) * step.
    [[nodiscard]] double node(std::size_t k) const;
    [[nodiscard]] std::vector<double> nodes() const;

    friend bool operator==(const FbmGrid&, const FbmGrid&) = default;

private:
    double u_max_;
    double step_;
    double hurst_;
    std::size_t half_;
};

/// Exact fBm covariance 0.5 (|u1|^2H + |u2|^2H - |u1 - u2|^2H).
[[nodiscard]] double fbm_covariance(double u1, double u2, double hurst);

/// Holds the Cholesky factor of the covariance over the nonzero grid nodes.
/// Built once, shared read-only by all draws.
class FbmSampler {
public:
    explicit FbmSampler(const FbmGrid& grid);

    [[nodiscard]] const FbmGrid& grid() const { return grid_; }
    /// True when the factorization needed the 1e-12 diagonal jitter.
    [[nodiscard]] bool jittered() const { return jittered_; }

    /// Path over all grid nodes (W at the centre node is 0), driven by the
    /// stream (seed, index).
    [[nodiscard]] std::vector<double> path(std::uint64_t seed, std::size_t index) const;

    /// Paths for indices [first, first + count) as rows of a count x size()
    /// row-major block; blocked over draws, identical to calling path().
    void paths(std::uint64_t seed, std::size_t first, std::size_t count, std::span<double> out) const;

private:
    FbmGrid grid_;
    std::size_t dim_;            // nonzero nodes
    std::vector<double> factor_; // packed lower-triangular rows
    bool jittered_ = false;

    void normals(std::uint64_t seed, std::size_t index, std::span<double> z) const;
};

/// Index of the node maximizing w_k - u_k^2/2; ties go to smaller |u|, then smaller u.
[[nodiscard]] std::size_t argmax_node(std::span<const double> u, std::span<const double> w);

struct LimitSample {
    std::vector<double> draws;
    FbmGrid grid;
    std::uint64_t seed = 0;

    /// Fraction of draws exactly at +-u_max.
    [[nodiscard]] double boundary_mass() const;
    /// Fraction of draws with |u| >= u_max - step.
    [[nodiscard]] double near_boundary_mass() const;
};

/// Maximum allowed near-boundary fraction before the grid is deemed too narrow.
inline constexpr double kMaxBoundaryFraction = 1e-3;

/// n_draws argmax draws in parallel. Throws TruncationError if the
/// near-boundary fraction reaches kMaxBoundaryFraction.
[[nodiscard]] LimitSample sample_limit_argmax(const FbmSampler& sampler, std::size_t n_draws,
                                              std::uint64_t seed);
[[nodiscard]] LimitSample sample_limit_argmax(const FbmGrid& grid, std::size_t n_draws,
                                              std::uint64_t seed);

/// Single-threaded reference; identical draws.
[[nodiscard]] LimitSample sample_limit_argmax_serial(const FbmSampler& sampler,
                                                     std::size_t n_draws, std::uint64_t seed);

struct Moment {
    double p = 0.0;
    double mean = 0.0;     // average of |x|^p
    double std_err = 0.0;  // Monte Carlo standard error
};

[[nodiscard]] std::vector<Moment> limit_moments(std::span<const double> draws,
                                                std::span<const double> powers);

}  // namespace cusp
