#include "gsys/analytic.hpp"

#include <cmath>

#include "gsys/quadrature.hpp"
#include "gsys/special.hpp"

namespace gsys {

PairSpec::PairSpec(MeasureSpec measure, ProcessSpec process, double initial_shift)
    : measure_(std::move(measure)), process_(std::move(process)), initial_shift_(initial_shift) {
    if (!std::isfinite(initial_shift_)) throw std::invalid_argument("PairSpec: initial_shift must be finite");
    if (!check_integrability(measure_)) throw std::invalid_argument("PairSpec: measure fails integrability");
    grid_law(process_, default_lattice(process_.dim()));  // validates PSD on the default grid
}

double PairSpec::mean_at(const TimePoint& t) const { return gsys::mean_at(process_, t) + initial_shift_; }

GridLaw PairSpec::shifted_grid_law(const std::vector<TimePoint>& times) const {
    GridLaw law = grid_law(process_, times);
    law.mean.array() += initial_shift_;
    return law;
}

double onedim_density(const PairSpec& pair, const TimePoint& t, double x) {
    const GaussianMeasure1D nt{pair.mean_at(t), var_at(pair.process(), t), 1.0};
    return density_at(convolve_with_gaussian(pair.measure(), nt), x);
}

double onedim_intensity(const PairSpec& pair, const TimePoint& t, double a, double b) {
    const GaussianMeasure1D nt{pair.mean_at(t), var_at(pair.process(), t), 1.0};
    return mass_on_interval(convolve_with_gaussian(pair.measure(), nt), a, b);
}

namespace {

struct TwoTimeMoments {
    double mu1, mu2, s1, s2, gamma;  // s1, s2 are variances
};

TwoTimeMoments extract_two(const GridLaw& law2) {
    if (law2.times.size() != 2) throw std::invalid_argument("psi_kappa: grid law must hold exactly two times");
    TwoTimeMoments m;
    m.mu1 = law2.mean(0);
    m.mu2 = law2.mean(1);
    m.s1 = law2.cov(0, 0);
    m.s2 = law2.cov(1, 1);
    m.gamma = m.s1 + m.s2 - 2.0 * law2.cov(0, 1);
    return m;
}

}  // namespace

double log_psi_kappa(const GridLaw& law2, double kappa, double u) {
    const auto m = extract_two(law2);
    return (kappa - u) * (m.mu1 + 0.5 * kappa * m.s1) + u * (m.mu2 + 0.5 * kappa * m.s2) +
           0.5 * u * (u - kappa) * m.gamma;
}

double psi_kappa(const GridLaw& law2, double kappa, double u) { return guarded_exp(log_psi_kappa(law2, kappa, u)); }

DiagonalGaussianLayer decompose_layer(const GridLaw& law2, double kappa) {
    const auto m = extract_two(law2);
    const double a1 = m.mu1 + 0.5 * kappa * m.s1;
    const double a2 = m.mu2 + 0.5 * kappa * m.s2;
    DiagonalGaussianLayer layer;
    layer.kappa = kappa;
    layer.total_mass = guarded_exp(kappa * a1);
    layer.profile_mean = a2 - a1 - 0.5 * kappa * m.gamma;
    layer.profile_variance = m.gamma;
    // self-check: the layer transform must reproduce psi^(kappa) (log scale)
    for (double u : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
        const double lhs = std::log(layer.total_mass) + layer.profile_mean * u + 0.5 * layer.profile_variance * u * u;
        const double rhs = log_psi_kappa(law2, kappa, u);
        if (std::fabs(lhs - rhs) > 1e-10 * std::max(1.0, std::fabs(rhs)))
            throw std::logic_error("decompose_layer: Laplace transform mismatch");
    }
    return layer;
}

double bivariate_intensity(const PairSpec& pair, const TimePoint& t1, const TimePoint& t2, const Rect& rect) {
    if (pair.measure().has_gauss_terms())
        throw std::invalid_argument("bivariate_intensity: closed form requires an exp-mixture measure");
    if (!(rect.x1l <= rect.x1u && rect.x2l <= rect.x2u))
        throw std::invalid_argument("bivariate_intensity: malformed rectangle");
    const GridLaw law2 = pair.shifted_grid_law({t1, t2});
    double total = 0.0;
    for (const auto& term : pair.measure().exp_terms()) {
        const DiagonalGaussianLayer layer = decompose_layer(law2, term.rate);
        const double mass = term.weight * layer.total_mass;
        if (layer.profile_variance <= 0.0) {
            // degenerate profile: indicator instead of a CDF difference
            const double lo = std::max(rect.x1l, rect.x2l - layer.profile_mean);
            const double hi = std::min(rect.x1u, rect.x2u - layer.profile_mean);
            if (lo < hi) total += mass * mass_on_interval(MeasureSpec::exponential(term.rate), lo, hi);
            continue;
        }
        const double sd = std::sqrt(layer.profile_variance);
        const double rate = term.rate;
        const double pm = layer.profile_mean;
        auto integrand = [&](double z) {
            return std::exp(-rate * z) *
                   (norm_cdf((rect.x2u - z - pm) / sd) - norm_cdf((rect.x2l - z - pm) / sd));
        };
        // kinks induced by the rectangle corners once the profile tightens
        const std::vector<double> breaks{rect.x2l - pm, rect.x2u - pm};
        const auto q = integrate_adaptive(integrand, rect.x1l, rect.x1u, 1e-9, 1e-14, breaks);
        total += mass * q.value;
    }
    return total;
}

}  // namespace gsys
