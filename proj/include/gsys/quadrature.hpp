#pragma once

#include <functional>
#include <vector>

namespace gsys {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int intervals = 0;
};

/// Adaptive Gauss-Kronrod (G7,K15) on [a,b]. Splits the worst interval until
/// the summed error estimate meets max(abs_tol, rel_tol*|value|).
/// `breakpoints` seeds initial subdivisions at known kinks of the integrand.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                                    double abs_tol, const std::vector<double>& breakpoints = {},
                                    int max_intervals = 4000);

}  // namespace gsys
