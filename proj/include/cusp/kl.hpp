#pragma once

// Kullback-Leibler analytics for the misspecified cusp model.
//
// J(theta) = int_{min(theta, theta0)}^{tau} [r - 1 - ln r] lambda*(t) dt,
// r = lambda(theta, t) / lambda*(t). Its first derivative has a four-branch
// closed form (two branches carry a one-dimensional integral), its second a
// three-branch form that diverges at theta0. The pseudo-true parameter is the
// unique zero of J'.

#include <cstddef>
#include <optional>
#include <vector>

#include "cusp/model.hpp"

namespace cusp {

/// Value of J''. Divergent at theta0; callers must branch on is_divergent().
class Curvature {
public:
    static Curvature finite(double value) { return Curvature(value, false); }
    static Curvature divergent() { return Curvature(0.0, true); }

    [[nodiscard]] bool is_divergent() const { return divergent_; }
    /// Throws NumericalError when divergent.
    [[nodiscard]] double value() const;
    /// value() for finite curvature, +inf otherwise (for display only).
    [[nodiscard]] double as_double() const;

    friend bool operator==(const Curvature&, const Curvature&) = default;

private:
    Curvature(double v, bool d) : value_(v), divergent_(d) {}
    double value_;
    bool divergent_;
};

/// Absolute quadrature tolerance for J and its derivative integrals.
inline constexpr double kKlQuadratureTol = 1e-10;
/// Absolute quadrature tolerance for the fBm normalization integral.
inline constexpr double kGammaQuadratureTol = 1e-8;

[[nodiscard]] double kl_divergence(const ModelParams& p, double theta);
[[nodiscard]] double kl_derivative(const ModelParams& p, double theta);

/// Pieces of J' on (-inf, theta0 - delta], [theta0 - delta, theta0],
/// [theta0, theta0 + delta], [theta0 + delta, inf).
enum class KlBranch { before_front, leading, trailing, after_front };

/// One closed-form piece of J' evaluated on its closed domain; lets the
/// pieces be compared at the break points.
[[nodiscard]] double kl_derivative_branch(const ModelParams& p, double theta, KlBranch branch);
/// J''(theta); Curvature::divergent() exactly at theta0.
[[nodiscard]] Curvature kl_second_derivative(const ModelParams& p, double theta);

/// The zero of J' inside (theta0 - delta, theta0 + delta) found by bisection.
/// Returns theta0 exactly when h == 0. Throws ValidationError for inadmissible h.
[[nodiscard]] double find_pseudo_true(const ModelParams& p);

/// A = 1 - (lambda0/S) ln(1 + S/lambda0); J'(theta0) = A h.
[[nodiscard]] double a_constant(double signal, double lambda0);

/// Integral over the real line of [(v-1)_+^kappa - v_+^kappa]^2.
[[nodiscard]] double gamma_kappa_integral(double kappa);
/// Normalizer making Gamma^{-1} int [(v-u)_+^kappa - v_+^kappa] dW(v) a
/// unit-variance fBm at u = 1: the square root of gamma_kappa_integral.
[[nodiscard]] double gamma_kappa(double kappa);

struct LimitConstants {
    double gamma_kappa = 0.0;
    double a = 0.0;
    double b = 0.0;      // scale of the normalized error
    double hurst = 0.0;  // kappa + 1/2
};

/// Requires h != 0 and h admissible; theta_hat must be the pseudo-true value.
[[nodiscard]] LimitConstants limit_constants(const ModelParams& p, double theta_hat);

/// (int_0^tau |lambda(theta1,t) - lambda(theta2,t)|^{2p} dt) / |theta1-theta2|^{2p kappa + 1}.
[[nodiscard]] double int2p_ratio(const ModelParams& p, double theta1, double theta2, double power);

struct KlProfile {
    std::vector<double> grid;
    std::vector<double> j;
    std::vector<double> j1;
    std::vector<Curvature> j2;
    /// Present only for admissible h.
    std::optional<double> theta_hat;
    std::optional<Curvature> curvature_hat;
};

/// Tabulates J, J', J'' on `points` equispaced nodes of the closed window
/// Theta plus theta0 and, for admissible h, theta_hat.
[[nodiscard]] KlProfile kl_profile(const ModelParams& p, std::size_t points);

}  // namespace cusp
