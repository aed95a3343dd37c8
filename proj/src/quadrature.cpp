#include "cusp/quadrature.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "cusp/errors.hpp"

namespace cusp::quad {

namespace {

// Termination is relative to the L1 norm; asking for near machine precision
// costs only a couple of extra levels since convergence is doubly exponential.
constexpr double kRelTol = 1e-14;

[[noreturn]] void fail(std::string_view what, double err, double tol, const char* extra = "") {
    std::ostringstream os;
    os << "quadrature did not converge for " << what << ": achieved error " << err
       << " > tolerance " << tol << extra;
    throw NumericalError(os.str());
}

void check(std::string_view what, double value, double err, double tol) {
    if (!std::isfinite(value)) fail(what, std::numeric_limits<double>::infinity(), tol, " (non-finite)");
    if (!(err <= tol)) fail(what, err, tol);
}

}  // namespace

Estimate finite(const std::function<double(double)>& f, double a, double b, double abs_tol,
                std::string_view what) {
    if (a == b) return {0.0, 0.0};
    static thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
    double err = 0.0;
    double l1 = 0.0;
    double v = 0.0;
    try {
        // The two-argument form avoids boost 1.74's endpoint rounding assertion
        // in the one-argument path for intervals away from the origin.
        auto g = [&f](double x, double) { return f(x); };
        v = integrator.integrate(g, a, b, kRelTol, &err, &l1);
    } catch (const std::exception& e) {
        fail(what, std::numeric_limits<double>::infinity(), abs_tol, e.what());
    }
    check(what, v, err, abs_tol);
    return {v, err};
}

}  // namespace cusp::quad
