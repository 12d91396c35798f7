#pragma once

#include <cmath>

#include "gsys/errors.hpp"

namespace gsys {

inline constexpr double kExpGuard = 700.0;  // exp(709.78) overflows double

/// exp with the module-wide overflow policy: exponents beyond +-700 raise
/// OverflowError instead of returning inf/0-denormal garbage.
inline double guarded_exp(double e) {
    if (!(e <= kExpGuard)) throw OverflowError("exponent " + std::to_string(e) + " exceeds representable range");
    return std::exp(e);
}

inline double norm_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

/// Upper tail 1 - Phi(x), accurate for large x.
inline double norm_sf(double x) { return 0.5 * std::erfc(x * 0.7071067811865475244); }

/// Inverse standard normal CDF (Wichura's PPND16, AS 241). Relative error
/// below 1e-15 over (0,1); deterministic across platforms that round libm
/// consistently, which is all this project needs (within-platform determinism).
double norm_ppf(double p);

/// Phi((b-mean)/sd) - Phi((a-mean)/sd), with the sd==0 Dirac convention.
inline double norm_interval_prob(double mean, double sd, double a, double b) {
    if (sd == 0.0) return (a <= mean && mean <= b) ? 1.0 : 0.0;
    return norm_cdf((b - mean) / sd) - norm_cdf((a - mean) / sd);
}

}  // namespace gsys
