#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gsys/errors.hpp"

namespace gsys {

/// A time point in R^d.
using TimePoint = std::vector<double>;

double time_norm(const TimePoint& t);
TimePoint time_add(const TimePoint& a, const TimePoint& b);
TimePoint time_sub(const TimePoint& a, const TimePoint& b);

/// Deterministic drift added to the zero-mean part of the process.
struct DriftSpec {
    enum class Kind { None, Linear, SelfSimilar };
    Kind kind = Kind::None;
    std::vector<double> coeffs;  // Linear: f(t) = <coeffs, t>
    double offset = 0.0;
    double lambda = 0.0;  // SelfSimilar: -lambda * sigma^2(t) / 2 + offset

    static DriftSpec none() { return {}; }
    static DriftSpec linear(std::vector<double> coeffs, double offset = 0.0) {
        DriftSpec d;
        d.kind = Kind::Linear;
        d.coeffs = std::move(coeffs);
        d.offset = offset;
        return d;
    }
    static DriftSpec self_similar(double lambda, double offset = 0.0) {
        DriftSpec d;
        d.kind = Kind::SelfSimilar;
        d.lambda = lambda;
        d.offset = offset;
        return d;
    }
};

/// Registry kernel k(h) = scale * base(|h|/length) + constant, base one of
/// "exp" (e^-h) or "gauss" (e^-h^2). The additive constant is a random
/// intercept component and keeps the kernel positive semidefinite.
struct KernelSpec {
    std::string name = "exp";
    double scale = 1.0;
    double length = 1.0;
    double constant = 0.0;

    double at_lag(double h) const;
};

/// Registry incremental variance as a function of |t1 - t2|:
///   "bm"               : scale * h
///   "fbm"              : scale * h^kappa
///   "kernel_increment" : 2 (k(0) - k(h)), the increment law of a stationary
///                        kernel process (kept for canonical forms)
struct GammaSpec {
    std::string name = "bm";
    double scale = 1.0;
    double kappa = 1.0;
    KernelSpec kernel;

    double at_dist(double h) const;
};

struct StationaryKernelFamily {
    KernelSpec kernel;
    double mean_const = 0.0;
};

/// Zero-mean stationary-increment process W with W(0) = 0 given by gamma,
/// plus deterministic drift.
struct StatIncrementFamily {
    GammaSpec gamma;
    DriftSpec drift;
};

/// Fractional Brownian motion, Cov = |t1|^k + |t2|^k - |t1-t2|^k, kappa in (0,2].
struct FbmFamily {
    double kappa = 1.0;
    DriftSpec drift;
};

class ProcessSpec {
public:
    using Family = std::variant<StationaryKernelFamily, StatIncrementFamily, FbmFamily>;

    ProcessSpec(int dim, Family family);

    int dim() const { return dim_; }
    const Family& family() const { return family_; }

    bool is_stationary_kernel() const { return std::holds_alternative<StationaryKernelFamily>(family_); }
    bool is_fbm() const { return std::holds_alternative<FbmFamily>(family_); }
    bool is_stat_increment() const { return !is_stationary_kernel(); }

    /// Drift of the stat-increment families; nullptr for stationary kernels.
    const DriftSpec* drift() const;

private:
    int dim_ = 1;
    Family family_;
};

/// Law of (xi(t_1), ..., xi(t_n)) on a finite grid.
struct GridLaw {
    std::vector<TimePoint> times;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

double mean_at(const ProcessSpec& p, const TimePoint& t);
double cov_at(const ProcessSpec& p, const TimePoint& t1, const TimePoint& t2);
double var_at(const ProcessSpec& p, const TimePoint& t);
/// Var[xi(t1) - xi(t2)] = sigma^2(t1) + sigma^2(t2) - 2 r(t1,t2).
double gamma_at(const ProcessSpec& p, const TimePoint& t1, const TimePoint& t2);

/// Assembles the grid law and validates positive semidefiniteness
/// (smallest eigenvalue >= -1e-9 * trace). Throws NotPsdError otherwise.
GridLaw grid_law(const ProcessSpec& p, const std::vector<TimePoint>& times);

void validate_psd(const Eigen::MatrixXd& cov, double rel_tol = 1e-9);

using GammaFn = std::function<double(const TimePoint&, const TimePoint&)>;
using ScalarFn = std::function<double(const TimePoint&)>;

/// |gamma(t1,t2) - gamma(t1+h,t2+h)| <= tol on every triple.
bool stationary_increments_check(const GammaFn& gamma, const std::vector<std::array<TimePoint, 3>>& grid, double tol);

/// |f(t1+t2) - f(t1) - f(t2)| <= tol on every pair.
bool additive_check(const ScalarFn& f, const std::vector<std::pair<TimePoint, TimePoint>>& grid, double tol);

/// Default validation lattice: step 0.5 over [-2,2]^d (step 1 for d >= 3).
std::vector<TimePoint> default_lattice(int dim);
std::vector<std::array<TimePoint, 3>> default_shift_triples(int dim);
std::vector<std::pair<TimePoint, TimePoint>> default_pairs(int dim);

}  // namespace gsys
