#pragma once

// Cusp-front intensity families for a Poissonian signal in Poissonian noise.
//
// Theoretical model:  lambda(theta, t)  = S       psi(t - theta)  + lambda0
// Real model:         lambda*(t)        = (S + h) psi(t - theta0) + lambda0
//
// with psi(x) = (x/delta)^kappa on (0, delta), 1 beyond delta, 0 below 0.

namespace cusp {

struct Window {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double width() const { return hi - lo; }
    [[nodiscard]] bool contains(double x) const { return lo < x && x < hi; }
    [[nodiscard]] bool contains_closed(double x) const { return lo <= x && x <= hi; }
    friend bool operator==(const Window&, const Window&) = default;
};

/// Plain field bundle used to build a ModelParams.
struct ModelSpec {
    double signal = 0.0;         // S
    double contamination = 0.0;  // h
    double lambda0 = 0.0;
    double kappa = 0.0;
    double delta = 0.0;
    double tau = 0.0;
    double theta0 = 0.0;
    Window theta0_window;        // (alpha, beta)
};

/// Validated, immutable model parameters.
class ModelParams {
public:
    /// Throws ValidationError when any invariant fails.
    explicit ModelParams(const ModelSpec& spec);

    [[nodiscard]] double signal() const { return spec_.signal; }
    [[nodiscard]] double contamination() const { return spec_.contamination; }
    [[nodiscard]] double lambda0() const { return spec_.lambda0; }
    [[nodiscard]] double kappa() const { return spec_.kappa; }
    [[nodiscard]] double delta() const { return spec_.delta; }
    [[nodiscard]] double tau() const { return spec_.tau; }
    [[nodiscard]] double theta0() const { return spec_.theta0; }
    [[nodiscard]] Window theta0_window() const { return spec_.theta0_window; }
    /// Theta = theta0_window widened by delta on both sides.
    [[nodiscard]] Window theta_window() const {
        return {spec_.theta0_window.lo - spec_.delta, spec_.theta0_window.hi + spec_.delta};
    }
    /// lambda_+ = S + h + lambda0, the plateau of the real intensity.
    [[nodiscard]] double lambda_plus() const {
        return spec_.signal + spec_.contamination + spec_.lambda0;
    }
    /// Hurst index of the limit fBm, kappa + 1/2.
    [[nodiscard]] double hurst() const { return spec_.kappa + 0.5; }

    [[nodiscard]] const ModelSpec& spec() const { return spec_; }

    /// Same model with a different contamination h (revalidated).
    [[nodiscard]] ModelParams with_contamination(double h) const;

    friend bool operator==(const ModelParams& a, const ModelParams& b) {
        return a.spec_.signal == b.spec_.signal && a.spec_.contamination == b.spec_.contamination &&
               a.spec_.lambda0 == b.spec_.lambda0 && a.spec_.kappa == b.spec_.kappa &&
               a.spec_.delta == b.spec_.delta && a.spec_.tau == b.spec_.tau &&
               a.spec_.theta0 == b.spec_.theta0 && a.spec_.theta0_window == b.spec_.theta0_window;
    }

private:
    ModelSpec spec_;
};

/// Cusp front: (x/delta)^kappa on (0, delta), 1 for x >= delta, 0 for x <= 0.
[[nodiscard]] double psi(double x, double kappa, double delta);

/// Antiderivative of psi vanishing for x <= 0.
[[nodiscard]] double psi_integral(double x, double kappa, double delta);

/// lambda(theta, t) = S psi(t - theta) + lambda0.
[[nodiscard]] double theoretical_intensity(const ModelParams& p, double theta, double t);

/// lambda*(t) = (S + h) psi(t - theta0) + lambda0.
[[nodiscard]] double real_intensity(const ModelParams& p, double t);

/// Integral of lambda(theta, .) over [a, b].
[[nodiscard]] double theoretical_integral(const ModelParams& p, double theta, double a, double b);

/// Integral of lambda* over [a, b].
[[nodiscard]] double real_integral(const ModelParams& p, double a, double b);

struct Admissibility {
    bool admissible = false;
    /// S / ln(1 + S/lambda0) - S - lambda0; always inside (-S, 0).
    double threshold = 0.0;
};

/// Whether h lies in the admissible contamination set, i.e. h > threshold.
[[nodiscard]] Admissibility contamination_admissible(double signal, double lambda0, double h);

/// Convenience overload using the model's own S, lambda0, h.
[[nodiscard]] Admissibility contamination_admissible(const ModelParams& p);

}  // namespace cusp
