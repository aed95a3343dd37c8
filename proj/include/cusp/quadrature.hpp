#pragma once

#include <functional>
#include <string_view>

namespace cusp::quad {

struct Estimate {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
};

/// Double-exponential quadrature over a finite [a, b]. Tolerates algebraic
/// endpoint singularities such as x^(kappa - 1). Throws NumericalError naming
/// `what` and the achieved error when the estimate exceeds abs_tol.
Estimate finite(const std::function<double(double)>& f, double a, double b, double abs_tol,
                std::string_view what);

}  // namespace cusp::quad
