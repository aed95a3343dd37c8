#pragma once

// Independent reference computations used only by tests. None of these call
// the closed forms or search routines they are used to check.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "cusp/model.hpp"
#include "cusp/rng.hpp"
#include "cusp/sim.hpp"

namespace cusp::oracle {

inline ModelParams reference(double h) {
    return ModelParams(ModelSpec{1.0, h, 1.0, 0.25, 0.5, 5.0, 2.0, {1.0, 3.0}});
}

/// Composite midpoint rule with `cells` equal cells.
inline double midpoint(const std::function<double(double)>& f, double a, double b, std::size_t cells) {
    const double h = (b - a) / static_cast<double>(cells);
    double sum = 0.0;
    for (std::size_t i = 0; i < cells; ++i) sum += f(a + (static_cast<double>(i) + 0.5) * h);
    return sum * h;
}

/// KL divergence by brute-force midpoint sum over [min(theta, theta0), tau].
inline double kl_midpoint(const ModelParams& p, double theta, std::size_t cells) {
    auto f = [&](double t) {
        const double lam = theoretical_intensity(p, theta, t);
        const double lam_star = real_intensity(p, t);
        return lam - lam_star - lam_star * std::log(lam / lam_star);
    };
    return midpoint(f, std::min(theta, p.theta0()), p.tau(), cells);
}

/// Pseudo log-likelihood evaluated replicate by replicate with a midpoint
/// compensator.
inline double loglik_bruteforce(const ModelParams& p, const Dataset& d, double theta,
                                std::size_t cells) {
    double stochastic = 0.0;
    for (const auto& r : d.replicates) {
        for (double t : r.events()) {
            if (t > theta) stochastic += std::log(theoretical_intensity(p, theta, t));
        }
    }
    auto f = [&](double t) { return theoretical_intensity(p, theta, t) - 1.0; };
    return stochastic - static_cast<double>(d.replicates.size()) * midpoint(f, theta, p.tau(), cells);
}

struct GridMin {
    double x;
    double value;
};

inline GridMin grid_minimize(const std::function<double(double)>& f, double lo, double hi, double step) {
    GridMin best{lo, f(lo)};
    const auto cells = static_cast<std::size_t>(std::floor((hi - lo) / step));
    for (std::size_t i = 1; i <= cells; ++i) {
        const double x = lo + static_cast<double>(i) * step;
        const double v = f(x);
        if (v < best.value) best = {x, v};
    }
    return best;
}

/// Mandelbrot-van Ness constant: int_R [(v-1)_+^k - v_+^k]^2 dv
/// = Gamma(k+1)^2 / (Gamma(2k+2) sin(pi (k + 1/2))).
inline double gamma_integral_closed_form(double kappa) {
    const double g = std::tgamma(kappa + 1.0);
    return g * g / (std::tgamma(2.0 * kappa + 2.0) * std::sin(std::numbers::pi * (kappa + 0.5)));
}

/// One draw of int [(v-u)_+^k - v_+^k] dW(v) for several u >= 0, using a
/// graded partition of [0, v_max] with the kernel frozen at cell midpoints.
/// The kernel vanishes for v < 0 when u >= 0.
class WienerRepresentation {
public:
    WienerRepresentation(double kappa, std::vector<double> us, double v_max, std::size_t cells_per_unit)
        : kappa_(kappa), us_(std::move(us)) {
        // Fine uniform cells on [0, u_max + 1], geometric growth beyond.
        double u_top = 0.0;
        for (double u : us_) u_top = std::max(u_top, u);
        const double fine = 1.0 / static_cast<double>(cells_per_unit);
        double v = 0.0;
        while (v < u_top + 1.0) {
            edges_.push_back(v);
            v += fine;
        }
        double width = fine;
        while (v < v_max) {
            edges_.push_back(v);
            v += width;
            width *= 1.02;
        }
        edges_.push_back(v_max);
        for (double u : us_) {
            std::vector<double> k(edges_.size() - 1);
            for (std::size_t i = 0; i + 1 < edges_.size(); ++i) {
                const double m = 0.5 * (edges_[i] + edges_[i + 1]);
                k[i] = (m > u ? std::pow(m - u, kappa_) : 0.0) - std::pow(m, kappa_);
            }
            kernels_.push_back(std::move(k));
        }
    }

    std::vector<double> draw(rng::Engine& g) const {
        std::vector<double> z(edges_.size() - 1);
        rng::fill_normal(g, z);
        std::vector<double> out(us_.size(), 0.0);
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double dw = z[i] * std::sqrt(edges_[i + 1] - edges_[i]);
            for (std::size_t j = 0; j < us_.size(); ++j) out[j] += kernels_[j][i] * dw;
        }
        return out;
    }

private:
    double kappa_;
    std::vector<double> us_;
    std::vector<double> edges_;
    std::vector<std::vector<double>> kernels_;
};

}  // namespace cusp::oracle
