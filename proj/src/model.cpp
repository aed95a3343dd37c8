#include "cusp/model.hpp"

#include <cmath>
#include <sstream>

#include "cusp/errors.hpp"

namespace cusp {

namespace {

void require(bool ok, const char* field, const std::string& what) {
    if (!ok) {
        std::ostringstream os;
        os << field << ": " << what;
        throw ValidationError(os.str());
    }
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

ModelParams::ModelParams(const ModelSpec& spec) : spec_(spec) {
    const auto& s = spec_;
    require(finite(s.signal) && s.signal > 0.0, "S", "signal level must be > 0");
    require(finite(s.contamination), "h", "contamination must be finite");
    require(finite(s.lambda0) && s.lambda0 > 0.0, "lambda0", "noise intensity must be > 0");
    require(finite(s.kappa) && s.kappa > 0.0 && s.kappa < 0.5, "kappa",
            "cusp order must lie in the open interval (0, 1/2)");
    require(finite(s.delta) && s.delta > 0.0, "delta", "front width must be > 0");
    require(finite(s.tau) && s.tau > 0.0, "tau", "observation horizon must be > 0");
    require(s.signal + s.contamination + s.lambda0 > 0.0, "h",
            "S + h + lambda0 must be > 0 (real intensity would be negative)");
    const Window w0 = s.theta0_window;
    require(finite(w0.lo) && finite(w0.hi) && w0.lo < w0.hi, "theta0_window",
            "must be a nonempty interval [lo, hi] with lo < hi");
    require(w0.contains(s.theta0), "theta0", "must lie inside theta0_window");
    const Window w = theta_window();
    require(w.lo > 0.0 && w.hi < s.tau - s.delta, "theta0_window",
            "widened window (lo - delta, hi + delta) must lie inside (0, tau - delta)");
}

ModelParams ModelParams::with_contamination(double h) const {
    ModelSpec s = spec_;
    s.contamination = h;
    return ModelParams(s);
}

double psi(double x, double kappa, double delta) {
    if (x <= 0.0) return 0.0;
    if (x >= delta) return 1.0;
    return std::pow(x / delta, kappa);
}

double psi_integral(double x, double kappa, double delta) {
    if (x <= 0.0) return 0.0;
    const double ramp = delta / (kappa + 1.0);
    if (x >= delta) return ramp + (x - delta);
    return ramp * std::pow(x / delta, kappa + 1.0);
}

double theoretical_intensity(const ModelParams& p, double theta, double t) {
    return p.signal() * psi(t - theta, p.kappa(), p.delta()) + p.lambda0();
}

double real_intensity(const ModelParams& p, double t) {
    return (p.signal() + p.contamination()) * psi(t - p.theta0(), p.kappa(), p.delta()) +
           p.lambda0();
}

double theoretical_integral(const ModelParams& p, double theta, double a, double b) {
    const double k = p.kappa();
    const double d = p.delta();
    return p.lambda0() * (b - a) +
           p.signal() * (psi_integral(b - theta, k, d) - psi_integral(a - theta, k, d));
}

double real_integral(const ModelParams& p, double a, double b) {
    const double k = p.kappa();
    const double d = p.delta();
    const double th = p.theta0();
    return p.lambda0() * (b - a) + (p.signal() + p.contamination()) *
                                       (psi_integral(b - th, k, d) - psi_integral(a - th, k, d));
}

Admissibility contamination_admissible(double signal, double lambda0, double h) {
    const double threshold = signal / std::log1p(signal / lambda0) - signal - lambda0;
    return {h > threshold, threshold};
}

Admissibility contamination_admissible(const ModelParams& p) {
    return contamination_admissible(p.signal(), p.lambda0(), p.contamination());
}

}  // namespace cusp
