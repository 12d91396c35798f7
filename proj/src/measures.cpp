#include "gsys/measures.hpp"

#include <algorithm>
#include <cmath>

#include "gsys/special.hpp"

namespace gsys {

MeasureSpec::MeasureSpec(std::vector<ExpTerm> exp_terms, std::vector<GaussianMeasure1D> gauss_terms)
    : exp_terms_(std::move(exp_terms)), gauss_terms_(std::move(gauss_terms)) {
    if (exp_terms_.empty() && gauss_terms_.empty())
        throw std::invalid_argument("MeasureSpec: empty spec denotes the zero measure and is rejected");
    for (const auto& t : exp_terms_) {
        if (!(t.weight > 0.0) || !std::isfinite(t.weight) || !std::isfinite(t.rate))
            throw std::invalid_argument("MeasureSpec: exp term weights must be finite and > 0");
    }
    for (const auto& g : gauss_terms_) {
        if (!(g.total_mass > 0.0) || !std::isfinite(g.total_mass) || !std::isfinite(g.mean) ||
            !(g.variance >= 0.0) || !std::isfinite(g.variance))
            throw std::invalid_argument("MeasureSpec: Gaussian term needs variance >= 0, mass > 0");
    }
    std::sort(exp_terms_.begin(), exp_terms_.end(), [](const ExpTerm& a, const ExpTerm& b) { return a.rate < b.rate; });
    std::vector<ExpTerm> merged;
    for (const auto& t : exp_terms_) {
        if (!merged.empty() && merged.back().rate == t.rate)
            merged.back().weight += t.weight;
        else
            merged.push_back(t);
    }
    exp_terms_ = std::move(merged);
    std::sort(gauss_terms_.begin(), gauss_terms_.end(), [](const GaussianMeasure1D& a, const GaussianMeasure1D& b) {
        return a.mean != b.mean ? a.mean < b.mean : a.variance < b.variance;
    });
    std::vector<GaussianMeasure1D> gmerged;
    for (const auto& g : gauss_terms_) {
        if (!gmerged.empty() && gmerged.back().mean == g.mean && gmerged.back().variance == g.variance)
            gmerged.back().total_mass += g.total_mass;
        else
            gmerged.push_back(g);
    }
    gauss_terms_ = std::move(gmerged);
}

double MeasureSpec::finite_total_mass() const {
    if (!is_finite()) throw std::logic_error("finite_total_mass on a measure with exp terms");
    double s = 0.0;
    for (const auto& g : gauss_terms_) s += g.total_mass;
    return s;
}

bool check_integrability(const MeasureSpec& m) {
    // int e^{-eps x^2} w e^{-l x} dx = w sqrt(pi/eps) e^{l^2/(4 eps)}  (log scale)
    // int e^{-eps x^2} dN(mu, s^2)  = mass (1+2 eps s^2)^{-1/2} e^{-eps mu^2/(1+2 eps s^2)}
    for (double eps : {1.0, 1e-2}) {
        for (const auto& t : m.exp_terms()) {
            const double log_val = std::log(t.weight) + 0.5 * std::log(3.14159265358979323846 / eps) +
                                   t.rate * t.rate / (4.0 * eps);
            if (!std::isfinite(log_val)) return false;
        }
        for (const auto& g : m.gauss_terms()) {
            const double denom = 1.0 + 2.0 * eps * g.variance;
            const double log_val = std::log(g.total_mass) - 0.5 * std::log(denom) - eps * g.mean * g.mean / denom;
            if (!std::isfinite(log_val)) return false;
        }
    }
    return true;
}

double laplace_gaussian(const GaussianMeasure1D& n, double y) {
    return n.total_mass * guarded_exp(n.mean * y + 0.5 * n.variance * y * y);
}

MeasureSpec convolve_with_gaussian(const MeasureSpec& m, const GaussianMeasure1D& n) {
    std::vector<ExpTerm> exps;
    exps.reserve(m.exp_terms().size());
    for (const auto& t : m.exp_terms()) {
        // (e_l * N(mu0, s0^2))(dx) = e^{l mu0 + l^2 s0^2 / 2} e^{-l x} dx
        const double factor = guarded_exp(t.rate * n.mean + 0.5 * t.rate * t.rate * n.variance);
        exps.push_back({t.weight * factor * n.total_mass, t.rate});
    }
    std::vector<GaussianMeasure1D> gs;
    gs.reserve(m.gauss_terms().size());
    for (const auto& g : m.gauss_terms())
        gs.push_back({g.mean + n.mean, g.variance + n.variance, g.total_mass * n.total_mass});
    return MeasureSpec(std::move(exps), std::move(gs));
}

namespace {

double gaussian_interval_mass(const GaussianMeasure1D& g, double a, double b) {
    if (g.variance == 0.0) return (a <= g.mean && g.mean <= b) ? g.total_mass : 0.0;
    const double sd = std::sqrt(g.variance);
    const double as = (a - g.mean) / sd;
    const double bs = (b - g.mean) / sd;
    // upper-tail windows go through the survival function for precision
    if (as > 0.0) return g.total_mass * (norm_sf(as) - norm_sf(bs));
    return g.total_mass * (norm_cdf(bs) - norm_cdf(as));
}

double exp_interval_mass(const ExpTerm& t, double a, double b) {
    if (t.rate == 0.0) return t.weight * (b - a);
    // (w/l)(e^{-l a} - e^{-l b}) = -(w/l) e^{-l a} expm1(-l (b-a)), stable for all signs
    const double lead = -t.rate * a;
    const double other = -t.rate * b;
    if (std::max(lead, other) > kExpGuard)
        throw OverflowError("mass_on_interval: exponent exceeds representable range");
    return -(t.weight / t.rate) * std::exp(lead) * std::expm1(-t.rate * (b - a));
}

}  // namespace

double mass_on_interval(const MeasureSpec& m, double a, double b) {
    if (!(a <= b)) throw std::invalid_argument("mass_on_interval requires a <= b");
    double s = 0.0;
    for (const auto& t : m.exp_terms()) s += exp_interval_mass(t, a, b);
    for (const auto& g : m.gauss_terms()) s += gaussian_interval_mass(g, a, b);
    return s;
}

double inverse_cdf_on_window(const MeasureSpec& m, double a, double b, double u) {
    if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("inverse_cdf_on_window: u outside [0,1]");
    if (!(a <= b)) throw std::invalid_argument("inverse_cdf_on_window requires a <= b");
    const double total = mass_on_interval(m, a, b);
    if (!(total > 0.0)) throw std::invalid_argument("inverse_cdf_on_window: window carries no mass");
    if (u == 0.0) return a;
    if (u == 1.0) return b;
    if (m.is_single_exp()) {
        const double rate = m.exp_terms()[0].rate;
        if (rate == 0.0) return a + u * (b - a);
        // solve e^{-l x} = (1-u) e^{-l a} + u e^{-l b}, factored at a for stability
        return a - std::log1p(u * std::expm1(-rate * (b - a))) / rate;
    }
    double lo = a, hi = b;
    const double target = u * total;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (mass_on_interval(m, a, mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double density_at(const MeasureSpec& m, double x) {
    double s = 0.0;
    for (const auto& t : m.exp_terms()) {
        const double e = -t.rate * x;
        if (e > kExpGuard) throw OverflowError("density_at: exponent exceeds representable range");
        s += t.weight * std::exp(e);
    }
    for (const auto& g : m.gauss_terms()) {
        if (g.variance == 0.0) throw std::domain_error("density_at: measure has a Dirac component");
        const double sd = std::sqrt(g.variance);
        s += g.total_mass * norm_pdf((x - g.mean) / sd) / sd;
    }
    return s;
}

namespace {

bool close_rel(double x, double y, double rel_tol) {
    return std::fabs(x - y) <= rel_tol * std::max({1.0, std::fabs(x), std::fabs(y)});
}

}  // namespace

bool measures_approx_equal(const MeasureSpec& a, const MeasureSpec& b, double rel_tol) {
    if (a.exp_terms().size() != b.exp_terms().size() || a.gauss_terms().size() != b.gauss_terms().size()) return false;
    for (size_t i = 0; i < a.exp_terms().size(); ++i) {
        if (!close_rel(a.exp_terms()[i].rate, b.exp_terms()[i].rate, rel_tol)) return false;
        if (!close_rel(a.exp_terms()[i].weight, b.exp_terms()[i].weight, rel_tol)) return false;
    }
    for (size_t i = 0; i < a.gauss_terms().size(); ++i) {
        if (!close_rel(a.gauss_terms()[i].mean, b.gauss_terms()[i].mean, rel_tol)) return false;
        if (!close_rel(a.gauss_terms()[i].variance, b.gauss_terms()[i].variance, rel_tol)) return false;
        if (!close_rel(a.gauss_terms()[i].total_mass, b.gauss_terms()[i].total_mass, rel_tol)) return false;
    }
    return true;
}

}  // namespace gsys
