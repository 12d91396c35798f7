#include "hit_mass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gsys/quadrature.hpp"
#include "gsys/special.hpp"

namespace gsys::detail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Phi((s2-mu)/sd) - Phi((s1-mu)/sd), tail-aware.
double ip(double mu, double sd, double s1, double s2) {
    if (s2 <= s1) return 0.0;
    const double a = (s1 - mu) / sd;
    const double b = (s2 - mu) / sd;
    if (a > 0.0) return norm_sf(a) - norm_sf(b);
    return norm_cdf(b) - norm_cdf(a);
}

// E[N 1(s1 <= N <= s2)] for N ~ N(mu, sd^2).
double tm(double mu, double sd, double s1, double s2) {
    if (s2 <= s1) return 0.0;
    const double a = (s1 - mu) / sd;
    const double b = (s2 - mu) / sd;
    const double pa = std::isinf(a) ? 0.0 : norm_pdf(a);
    const double pb = std::isinf(b) ? 0.0 : norm_pdf(b);
    return mu * ip(mu, sd, s1, s2) + sd * (pa - pb);
}

// E[e^{l N} 1(s1 <= N <= s2)] = e^{l mu + l^2 sd^2/2} * Phi-window shifted by l sd^2.
double pe(double lambda, double mu, double sd, double s1, double s2) {
    if (s2 <= s1) return 0.0;
    const double shift = lambda * sd * sd;
    return guarded_exp(lambda * mu + 0.5 * lambda * shift) * ip(mu + shift, sd, s1, s2);
}

double exp_term_interval_mass(const ExpTerm& t, double a, double b) {
    if (b <= a) return 0.0;
    if (t.rate == 0.0) return t.weight * (b - a);
    const double m = std::max(-t.rate * a, -t.rate * b);
    if (m > kExpGuard) throw OverflowError("hit_mass: exponent exceeds representable range");
    return -(t.weight / t.rate) * std::exp(-t.rate * a) * std::expm1(-t.rate * (b - a));
}

}  // namespace

double hit_mass_exp(const ExpTerm& t, double x0, double x1, double mu, double sd, double bl, double bu) {
    if (!(x0 <= x1) || !(bl <= bu)) return 0.0;
    if (x0 == x1 || bl == bu) return 0.0;
    if (sd == 0.0) {
        // deterministic displacement: starters in [bl-mu, bu-mu]
        const double lo = std::max(x0, bl - mu);
        const double hi = std::min(x1, bu - mu);
        return exp_term_interval_mass(t, lo, hi);
    }
    const double l = t.rate;
    if (l == 0.0) {
        // w * E[ min(bu-N, x1) - max(bl-N, x0) ]^+
        double s = tm(mu, sd, bl - x1, bl - x0) - tm(mu, sd, bu - x1, bu - x0);
        s += bu * ip(mu, sd, bu - x1, bu - x0) - bl * ip(mu, sd, bl - x1, bl - x0);
        if (!std::isinf(x1)) s += x1 * ip(mu, sd, bl - x1, bu - x1);
        if (!std::isinf(x0)) s -= x0 * ip(mu, sd, bl - x0, bu - x0);
        return t.weight * std::max(0.0, s);
    }
    // (w/l) [ e^{-l bl} PE(bl-x1, bl-x0) + e^{-l x0} IP(bl-x0, bu-x0)
    //        - e^{-l bu} PE(bu-x1, bu-x0) - e^{-l x1} IP(bl-x1, bu-x1) ]
    double s = 0.0;
    if (std::fabs(l * bl) > kExpGuard || std::fabs(l * bu) > kExpGuard)
        throw OverflowError("hit_mass: exponent exceeds representable range");
    s += std::exp(-l * bl) * pe(l, mu, sd, bl - x1, bl - x0);
    s -= std::exp(-l * bu) * pe(l, mu, sd, bu - x1, bu - x0);
    if (!std::isinf(x0)) {
        if (std::fabs(l * x0) > kExpGuard) throw OverflowError("hit_mass: exponent exceeds representable range");
        s += std::exp(-l * x0) * ip(mu, sd, bl - x0, bu - x0);
    }
    if (!std::isinf(x1)) {
        if (std::fabs(l * x1) > kExpGuard) throw OverflowError("hit_mass: exponent exceeds representable range");
        s -= std::exp(-l * x1) * ip(mu, sd, bl - x1, bu - x1);
    }
    return std::max(0.0, (t.weight / l) * s);
}

double hit_mass_gauss(const GaussianMeasure1D& g, double x0, double x1, double mu, double sd, double bl, double bu) {
    if (!(x0 <= x1) || !(bl <= bu)) return 0.0;
    if (x0 == x1 || bl == bu) return 0.0;
    if (g.variance == 0.0) {
        if (g.mean < x0 || g.mean > x1) return 0.0;
        return g.total_mass * norm_interval_prob(mu, sd, bl - g.mean, bu - g.mean);
    }
    const double gsd = std::sqrt(g.variance);
    if (sd == 0.0) return g.total_mass * ip(g.mean, gsd, std::max(x0, bl - mu), std::min(x1, bu - mu));
    // integrate the start-position window against the law of S = X + N
    const double s_mean = g.mean + mu;
    const double s_var = g.variance + sd * sd;
    const double s_sd = std::sqrt(s_var);
    const double slope = g.variance / s_var;
    const double cond_sd = std::sqrt(g.variance * sd * sd / s_var);
    const double lo = std::max(bl, s_mean - 12.0 * s_sd);
    const double hi = std::min(bu, s_mean + 12.0 * s_sd);
    if (lo >= hi) return 0.0;
    auto f = [&](double s) {
        const double cm = g.mean + slope * (s - s_mean);
        return norm_pdf((s - s_mean) / s_sd) / s_sd * ip(cm, cond_sd, x0, x1);
    };
    return g.total_mass * integrate_adaptive(f, lo, hi, 1e-10, 1e-16).value;
}

double hit_mass(const MeasureSpec& m, double x0, double x1, double mu, double sd, double bl, double bu) {
    double s = 0.0;
    for (const auto& t : m.exp_terms()) s += hit_mass_exp(t, x0, x1, mu, sd, bl, bu);
    for (const auto& g : m.gauss_terms()) s += hit_mass_gauss(g, x0, x1, mu, sd, bl, bu);
    return s;
}

}  // namespace gsys::detail
