#include "cusp/kl.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "cusp/errors.hpp"
#include "cusp/parallel.hpp"
#include "cusp/quadrature.hpp"

namespace cusp {

double Curvature::value() const {
    if (divergent_) throw NumericalError("J'' diverges at theta0 (curvature is +infinity)");
    return value_;
}

double Curvature::as_double() const {
    return divergent_ ? std::numeric_limits<double>::infinity() : value_;
}

namespace {

// Integrates f over [lo, hi] split at the given breakpoints so that every
// piece is smooth in its interior.
template <std::size_t N, class F>
double piecewise(F&& f, double lo, double hi, std::array<double, N> cuts, double tol,
                 std::string_view what) {
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    double left = lo;
    for (double c : cuts) {
        if (c <= left || c >= hi) continue;
        total += quad::finite(f, left, c, tol, what).value;
        left = c;
    }
    total += quad::finite(f, left, hi, tol, what).value;
    return total;
}

void require_in_window(const ModelParams& p, double theta, const char* op) {
    const Window w = p.theta_window();
    if (!std::isfinite(theta) || !w.contains_closed(theta)) {
        std::ostringstream os;
        os << op << ": theta = " << theta << " outside Theta = [" << w.lo << ", " << w.hi << "]";
        throw ValidationError(os.str());
    }
}

}  // namespace

double kl_divergence(const ModelParams& p, double theta) {
    require_in_window(p, theta, "kl_divergence");
    const double th0 = p.theta0();
    const double d = p.delta();
    auto integrand = [&](double t) {
        const double lam_star = real_intensity(p, t);
        const double x = (theoretical_intensity(p, theta, t) - lam_star) / lam_star;
        return lam_star * (x - std::log1p(x));
    };
    return piecewise(integrand, std::min(theta, th0), p.tau(),
                     std::array{theta, th0, theta + d, th0 + d}, kKlQuadratureTol,
                     "J_KL(theta)");
}

double kl_derivative_branch(const ModelParams& p, double theta, KlBranch branch) {
    require_in_window(p, theta, "kl_derivative_branch");
    const double s = p.signal();
    const double sh = p.signal() + p.contamination();
    const double l0 = p.lambda0();
    const double k = p.kappa();
    const double d = p.delta();
    const double th0 = p.theta0();

    switch (branch) {
        case KlBranch::before_front:
            return l0 * std::log1p(s / l0) - s;
        case KlBranch::after_front:
            return p.lambda_plus() * std::log1p(s / l0) - s;
        case KlBranch::leading: {
            if (theta < th0 - d || theta > th0) {
                throw ValidationError("kl_derivative_branch: leading branch needs theta in [theta0 - delta, theta0]");
            }
            // x = y^(1/kappa) turns kappa x^(kappa-1) dx into dy.
            const double a = (th0 - theta) / d;
            const double ak = std::pow(a, k);
            auto i1 = [&](double y) {
                const double gap = std::max(std::pow(y, 1.0 / k) - a, 0.0);
                return s * (sh * std::pow(gap, k) - s * y) / (s * y + l0);
            };
            const double integral =
                ak < 1.0 ? quad::finite(i1, ak, 1.0, kKlQuadratureTol, "I1(theta)").value : 0.0;
            return l0 * std::log1p(s * ak / l0) - s * ak + integral;
        }
        case KlBranch::trailing: {
            if (theta < th0 || theta > th0 + d) {
                throw ValidationError("kl_derivative_branch: trailing branch needs theta in [theta0, theta0 + delta]");
            }
            const double c = (theta - th0) / d;
            const double top = std::pow(1.0 - c, k);
            auto i2 = [&](double y) {
                return s * (sh * std::pow(std::pow(y, 1.0 / k) + c, k) - s * y) / (s * y + l0);
            };
            const double integral =
                top > 0.0 ? quad::finite(i2, 0.0, top, kKlQuadratureTol, "I2(theta)").value : 0.0;
            return p.lambda_plus() * std::log((s + l0) / (s * top + l0)) + s * top - s + integral;
        }
    }
    throw ValidationError("kl_derivative_branch: unknown branch");
}

double kl_derivative(const ModelParams& p, double theta) {
    const double d = p.delta();
    const double th0 = p.theta0();
    KlBranch b = KlBranch::trailing;
    if (theta <= th0 - d) {
        b = KlBranch::before_front;
    } else if (theta >= th0 + d) {
        b = KlBranch::after_front;
    } else if (theta <= th0) {
        b = KlBranch::leading;
    }
    return kl_derivative_branch(p, theta, b);
}

namespace {

// Integral of f over [0, top], split where the integrand changes scale.
// The tolerance is relative once the integral exceeds 1.
double split_at(const std::function<double(double)>& f, double top, double knee, std::string_view what) {
    const double m = std::min(knee, top);
    constexpr double inf = std::numeric_limits<double>::infinity();
    const quad::Estimate lo = quad::finite(f, 0.0, m, inf, what);
    const quad::Estimate hi = quad::finite(f, m, top, inf, what);
    const double v = lo.value + hi.value;
    const double tol = kKlQuadratureTol * std::max(1.0, std::abs(v));
    if (!(lo.error + hi.error <= tol)) {
        std::ostringstream os;
        os << "quadrature did not converge for " << what << ": achieved error " << lo.error + hi.error
           << " > tolerance " << tol;
        throw NumericalError(os.str());
    }
    return v;
}

}  // namespace

Curvature kl_second_derivative(const ModelParams& p, double theta) {
    require_in_window(p, theta, "kl_second_derivative");
    const double s = p.signal();
    const double sh = p.signal() + p.contamination();
    const double l0 = p.lambda0();
    const double k = p.kappa();
    const double d = p.delta();
    const double th0 = p.theta0();

    if (theta == th0) return Curvature::divergent();
    if (theta <= th0 - d || theta >= th0 + d) return Curvature::finite(0.0);

    const double scale = s * sh * k * k / d;
    if (theta < th0) {
        // x = a + z^(1/kappa) absorbs the (x - a)^(kappa-1) singularity.
        const double a = (th0 - theta) / d;
        auto f = [&](double z) {
            const double x = a + std::pow(z, 1.0 / k);
            return std::pow(x, k - 1.0) / (s * std::pow(x, k) + l0) / k;
        };
        const double top = std::pow(1.0 - a, k);
        return Curvature::finite(scale * split_at(f, top, std::pow(a, k), "J''(theta)"));
    }
    // x = z^(1/kappa) absorbs the x^(kappa-1) singularity.
    const double c = (theta - th0) / d;
    auto f = [&](double z) {
        return std::pow(std::pow(z, 1.0 / k) + c, k - 1.0) / (s * z + l0) / k;
    };
    const double top = std::pow(1.0 - c, k);
    return Curvature::finite(scale * split_at(f, top, std::pow(c, k), "J''(theta)"));
}

double find_pseudo_true(const ModelParams& p) {
    const Admissibility adm = contamination_admissible(p);
    if (!adm.admissible) {
        std::ostringstream os;
        os << "contamination h = " << p.contamination()
           << " is not admissible: need h > " << adm.threshold
           << " = S/ln(1+S/lambda0) - S - lambda0";
        throw ValidationError(os.str());
    }
    const double th0 = p.theta0();
    if (p.contamination() == 0.0) return th0;

    // J'(theta0) = A h, so the sign of h picks the half-bracket.
    double lo = p.contamination() > 0.0 ? th0 - p.delta() : th0;
    double hi = p.contamination() > 0.0 ? th0 : th0 + p.delta();
    const double width_tol = p.theta_window().width() * 1e-12;
    while (hi - lo > width_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (kl_derivative(p, mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double a_constant(double signal, double lambda0) {
    return 1.0 - lambda0 / signal * std::log1p(signal / lambda0);
}

double gamma_kappa_integral(double kappa) {
    if (!(kappa > 0.0 && kappa < 0.5)) throw ValidationError("kappa: must lie in (0, 1/2)");
    // v in [0,1]: only v^kappa survives.
    const double head = 1.0 / (2.0 * kappa + 1.0);
    // v >= 1: v^kappa - (v-1)^kappa = -v^kappa expm1(kappa log1p(-1/v)).
    auto diff_sq = [kappa](double v) {
        const double g = -std::pow(v, kappa) * std::expm1(kappa * std::log1p(-1.0 / v));
        return g * g;
    };
    const double mid = quad::finite(diff_sq, 1.0, 2.0, kGammaQuadratureTol, "Gamma_kappa [1,2]").value;
    // v >= 2 via x = 1/v: x^{-2 kappa} (g/x)^2 on (0, 1/2] with g = 1 - (1-x)^kappa.
    // The kappa^2 x^{-2 kappa} part is integrated exactly.
    auto tail_rest = [kappa](double x) {
        if (x <= 0.0) return 0.0;
        const double q = -std::expm1(kappa * std::log1p(-x)) / x;
        return std::pow(x, -2.0 * kappa) * (q - kappa) * (q + kappa);
    };
    const double singular = kappa * kappa * std::pow(0.5, 1.0 - 2.0 * kappa) / (1.0 - 2.0 * kappa);
    const double tail =
        singular + quad::finite(tail_rest, 0.0, 0.5, kGammaQuadratureTol, "Gamma_kappa tail").value;
    return head + mid + tail;
}

double gamma_kappa(double kappa) { return std::sqrt(gamma_kappa_integral(kappa)); }

LimitConstants limit_constants(const ModelParams& p, double theta_hat) {
    if (p.contamination() == 0.0) {
        throw ValidationError("h: limit constants need h != 0 (J'' is infinite at theta0)");
    }
    const Admissibility adm = contamination_admissible(p);
    if (!adm.admissible) {
        std::ostringstream os;
        os << "h: contamination " << p.contamination() << " not admissible (threshold "
           << adm.threshold << ")";
        throw ValidationError(os.str());
    }
    const Curvature curv = kl_second_derivative(p, theta_hat);
    if (curv.is_divergent() || !(curv.value() > 0.0)) {
        throw NumericalError("limit_constants: J''(theta_hat) must be finite and positive");
    }
    LimitConstants out;
    out.gamma_kappa = gamma_kappa(p.kappa());
    out.a = a_constant(p.signal(), p.lambda0());
    out.hurst = p.hurst();
    const double k = p.kappa();
    const double ratio = p.signal() * out.gamma_kappa * std::sqrt(real_intensity(p, theta_hat)) /
                         (p.lambda0() * std::pow(p.delta(), k) * curv.value());
    out.b = std::pow(ratio, 2.0 / (3.0 - 2.0 * k));
    return out;
}

double int2p_ratio(const ModelParams& p, double theta1, double theta2, double power) {
    require_in_window(p, theta1, "int2p_ratio");
    require_in_window(p, theta2, "int2p_ratio");
    if (theta1 == theta2) throw ValidationError("int2p_ratio: theta1 == theta2 gives 0/0");
    if (!(power >= 1.0)) throw ValidationError("int2p_ratio: p must be >= 1");
    const double hi_th = std::max(theta1, theta2);
    const double lo_th = std::min(theta1, theta2);
    const double gap = hi_th - lo_th;
    const double d = p.delta();
    auto integrand = [&](double t) {
        const double diff = theoretical_intensity(p, lo_th, t) - theoretical_intensity(p, hi_th, t);
        return std::pow(std::abs(diff), 2.0 * power);
    };
    const double scale = std::pow(gap, 2.0 * power * p.kappa() + 1.0);
    // The integrand vanishes outside (lo_th, hi_th + delta).
    const double integral = piecewise(integrand, lo_th, std::min(hi_th + d, p.tau()),
                                      std::array{hi_th, lo_th + d}, scale * 1e-8,
                                      "int2p integral");
    return integral / scale;
}

KlProfile kl_profile(const ModelParams& p, std::size_t points) {
    if (points < 2) throw ValidationError("kl_profile: need at least 2 grid points");
    KlProfile out;
    if (contamination_admissible(p).admissible) out.theta_hat = find_pseudo_true(p);
    const Window w = p.theta_window();
    out.grid.reserve(points + 2);
    for (std::size_t i = 0; i < points; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(points - 1);
        out.grid.push_back(i + 1 == points ? w.hi : w.lo + frac * w.width());
    }
    out.grid.push_back(p.theta0());
    if (out.theta_hat) out.grid.push_back(*out.theta_hat);
    std::sort(out.grid.begin(), out.grid.end());
    out.grid.erase(std::unique(out.grid.begin(), out.grid.end()), out.grid.end());

    const std::size_t m = out.grid.size();
    out.j.resize(m);
    out.j1.resize(m);
    out.j2.assign(m, Curvature::divergent());
    par::for_each_index(m, [&](std::size_t i) {
        out.j[i] = kl_divergence(p, out.grid[i]);
        out.j1[i] = kl_derivative(p, out.grid[i]);
        out.j2[i] = kl_second_derivative(p, out.grid[i]);
    });
    if (out.theta_hat) out.curvature_hat = kl_second_derivative(p, *out.theta_hat);
    return out;
}

}  // namespace cusp
