#pragma once

#include "gsys/measures.hpp"
#include "gsys/processes.hpp"

namespace gsys {

/// The driving pair (m, xi). xi(t) = xi0(t) + initial_shift, where xi0 follows
/// the ProcessSpec law; the shift lets xi(0) be nonzero while ProcessSpec
/// families keep W(0) = 0.
class PairSpec {
public:
    PairSpec(MeasureSpec measure, ProcessSpec process, double initial_shift = 0.0);

    const MeasureSpec& measure() const { return measure_; }
    const ProcessSpec& process() const { return process_; }
    double initial_shift() const { return initial_shift_; }

    /// E xi(t) including the initial shift.
    double mean_at(const TimePoint& t) const;
    /// Grid law of xi including the shift in the mean vector.
    GridLaw shifted_grid_law(const std::vector<TimePoint>& times) const;

private:
    MeasureSpec measure_;
    ProcessSpec process_;
    double initial_shift_;
};

/// The measure l^(kappa) concentrated on the line x1 = 0:
/// total_mass * (Dirac at x1=0) x N(profile_mean, profile_variance).
struct DiagonalGaussianLayer {
    double kappa = 0.0;
    double total_mass = 1.0;
    double profile_mean = 0.0;
    double profile_variance = 0.0;
};

/// Axis-aligned rectangle [x1l,x1u] x [x2l,x2u].
struct Rect {
    double x1l, x1u, x2l, x2u;
};

/// Density of the one-dimensional intensity m_t = m * n_t at x.
double onedim_density(const PairSpec& pair, const TimePoint& t, double x);

/// Mass of m_t on [a,b]; closed form for every DSL measure.
double onedim_intensity(const PairSpec& pair, const TimePoint& t, double a, double b);

/// Laplace transform psi^(kappa)(u) of the diagonal layer of a two-time grid
/// law: exp{(k-u)(mu1 + k s1^2/2) + u(mu2 + k s2^2/2) + u(u-k) gamma / 2}.
double psi_kappa(const GridLaw& law2, double kappa, double u);
/// log of the same quantity (never overflows).
double log_psi_kappa(const GridLaw& law2, double kappa, double u);

/// The unique layer whose Laplace transform matches psi_kappa; self-checked
/// at u in {-1, 0, 0.5, 1, 2} to 1e-10 in log scale.
DiagonalGaussianLayer decompose_layer(const GridLaw& law2, double kappa);

/// Intensity of P_{t1,t2} on the rectangle, via the layer decomposition and
/// adaptive quadrature of the exponentially weighted diagonal shift integral.
/// Requires an exp-mixture measure (no Gaussian terms).
double bivariate_intensity(const PairSpec& pair, const TimePoint& t1, const TimePoint& t2, const Rect& rect);

}  // namespace gsys
