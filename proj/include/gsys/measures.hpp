#pragma once

#include <vector>

#include "gsys/errors.hpp"

namespace gsys {

/// One mixture component weight * e^{-rate x} dx; rate 0 is Lebesgue measure.
struct ExpTerm {
    double weight = 1.0;
    double rate = 0.0;
};

/// Finite Gaussian component; variance 0 denotes a Dirac mass at `mean`
/// scaled by total_mass.
struct GaussianMeasure1D {
    double mean = 0.0;
    double variance = 0.0;
    double total_mass = 1.0;
};

/// Intensity measure on R: exponential mixture plus finite Gaussian
/// components, kept symbolic so convolution identities stay exact.
/// Canonical form: exp terms sorted by strictly increasing rate (equal rates
/// merged), Gaussian terms sorted by (mean, variance). Immutable.
class MeasureSpec {
public:
    MeasureSpec(std::vector<ExpTerm> exp_terms, std::vector<GaussianMeasure1D> gauss_terms);

    static MeasureSpec exponential(double rate, double weight = 1.0) { return MeasureSpec({{weight, rate}}, {}); }
    static MeasureSpec lebesgue(double weight = 1.0) { return MeasureSpec({{weight, 0.0}}, {}); }
    static MeasureSpec gaussian(double mean, double variance, double mass = 1.0) {
        return MeasureSpec({}, {{mean, variance, mass}});
    }

    const std::vector<ExpTerm>& exp_terms() const { return exp_terms_; }
    const std::vector<GaussianMeasure1D>& gauss_terms() const { return gauss_terms_; }

    bool has_gauss_terms() const { return !gauss_terms_.empty(); }
    bool is_single_exp() const { return gauss_terms_.empty() && exp_terms_.size() == 1; }
    bool is_pure_lebesgue() const { return is_single_exp() && exp_terms_[0].rate == 0.0; }
    /// True when the measure has no exp terms, hence finite total mass.
    bool is_finite() const { return exp_terms_.empty(); }
    double finite_total_mass() const;

private:
    std::vector<ExpTerm> exp_terms_;
    std::vector<GaussianMeasure1D> gauss_terms_;
};

/// Integrability guard: int e^{-eps x^2} m(dx) < infinity for every eps > 0.
/// Evaluated symbolically per term (in log scale); true for every
/// representable spec -- the operation documents the contract.
bool check_integrability(const MeasureSpec& m);

/// total_mass * exp(mean*y + variance*y^2/2); overflow guarded.
double laplace_gaussian(const GaussianMeasure1D& n, double y);

/// Convolution m * N(mean, variance): exp term (w, l) picks up the factor
/// exp(l*mean + l^2*variance/2); Gaussian terms add means and variances.
/// A non-unit n.total_mass scales the result.
MeasureSpec convolve_with_gaussian(const MeasureSpec& m, const GaussianMeasure1D& n);

/// Exact m([a,b]) from closed-form antiderivatives. Requires a <= b; a == b
/// returns the atom mass at a.
double mass_on_interval(const MeasureSpec& m, double a, double b);

/// x in [a,b] with m([a,x]) = u * m([a,b]). Closed form for a single exp
/// term, otherwise bisection on the monotone CDF to absolute tolerance 1e-12.
double inverse_cdf_on_window(const MeasureSpec& m, double a, double b, double u);

/// Density of m at x (exp terms and nondegenerate Gaussian terms). Throws if
/// the measure carries a Dirac component.
double density_at(const MeasureSpec& m, double x);

/// Equality on canonical forms, relative tolerance on weights/parameters.
bool measures_approx_equal(const MeasureSpec& a, const MeasureSpec& b, double rel_tol = 1e-12);

}  // namespace gsys
