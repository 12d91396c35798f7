#include "gsys/processes.hpp"

#include <cmath>

namespace gsys {

double time_norm(const TimePoint& t) {
    double s = 0.0;
    for (double x : t) s += x * x;
    return std::sqrt(s);
}

TimePoint time_add(const TimePoint& a, const TimePoint& b) {
    if (a.size() != b.size()) throw std::invalid_argument("time point dimension mismatch");
    TimePoint r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

TimePoint time_sub(const TimePoint& a, const TimePoint& b) {
    if (a.size() != b.size()) throw std::invalid_argument("time point dimension mismatch");
    TimePoint r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

double KernelSpec::at_lag(double h) const {
    const double u = h / length;
    if (name == "exp") return scale * std::exp(-u) + constant;
    if (name == "gauss") return scale * std::exp(-u * u) + constant;
    throw std::invalid_argument("unknown kernel '" + name + "'");
}

double GammaSpec::at_dist(double h) const {
    if (name == "bm") return scale * h;
    if (name == "fbm") return scale * std::pow(h, kappa);
    if (name == "kernel_increment") return 2.0 * (kernel.at_lag(0.0) - kernel.at_lag(h));
    throw std::invalid_argument("unknown gamma '" + name + "'");
}

namespace {

void validate_drift(const DriftSpec& d, int dim) {
    switch (d.kind) {
        case DriftSpec::Kind::None:
            break;
        case DriftSpec::Kind::Linear:
            if (static_cast<int>(d.coeffs.size()) != dim)
                throw std::invalid_argument("linear drift coefficient count must match dim");
            break;
        case DriftSpec::Kind::SelfSimilar:
            if (d.lambda == 0.0) throw std::invalid_argument("self-similar drift requires lambda != 0");
            break;
    }
    if (!std::isfinite(d.offset)) throw std::invalid_argument("drift offset must be finite");
}

}  // namespace

ProcessSpec::ProcessSpec(int dim, Family family) : dim_(dim), family_(std::move(family)) {
    if (dim_ < 1) throw std::invalid_argument("ProcessSpec: dim must be >= 1");
    if (const auto* k = std::get_if<StationaryKernelFamily>(&family_)) {
        if (!(k->kernel.scale >= 0.0) || !(k->kernel.length > 0.0) || !(k->kernel.constant >= 0.0))
            throw std::invalid_argument("stationary kernel requires scale >= 0, length > 0, constant >= 0");
        k->kernel.at_lag(0.0);  // validates the registry name
    } else if (const auto* s = std::get_if<StatIncrementFamily>(&family_)) {
        s->gamma.at_dist(0.0);
        validate_drift(s->drift, dim_);
    } else {
        const auto& f = std::get<FbmFamily>(family_);
        if (!(f.kappa > 0.0 && f.kappa <= 2.0)) throw std::invalid_argument("fbm requires kappa in (0,2]");
        validate_drift(f.drift, dim_);
    }
}

const DriftSpec* ProcessSpec::drift() const {
    if (const auto* s = std::get_if<StatIncrementFamily>(&family_)) return &s->drift;
    if (const auto* f = std::get_if<FbmFamily>(&family_)) return &f->drift;
    return nullptr;
}

namespace {

double zero_mean_variance(const ProcessSpec& p, const TimePoint& t) {
    if (const auto* k = std::get_if<StationaryKernelFamily>(&p.family())) return k->kernel.at_lag(0.0);
    if (const auto* s = std::get_if<StatIncrementFamily>(&p.family())) return s->gamma.at_dist(time_norm(t));
    const auto& f = std::get<FbmFamily>(p.family());
    return 2.0 * std::pow(time_norm(t), f.kappa);
}

double drift_value(const ProcessSpec& p, const DriftSpec& d, const TimePoint& t) {
    switch (d.kind) {
        case DriftSpec::Kind::None:
            return 0.0;
        case DriftSpec::Kind::Linear: {
            double s = d.offset;
            for (size_t i = 0; i < t.size(); ++i) s += d.coeffs[i] * t[i];
            return s;
        }
        case DriftSpec::Kind::SelfSimilar:
            return -0.5 * d.lambda * zero_mean_variance(p, t) + d.offset;
    }
    return 0.0;
}

}  // namespace

double mean_at(const ProcessSpec& p, const TimePoint& t) {
    if (static_cast<int>(t.size()) != p.dim()) throw std::invalid_argument("mean_at: dimension mismatch");
    if (const auto* k = std::get_if<StationaryKernelFamily>(&p.family())) return k->mean_const;
    return drift_value(p, *p.drift(), t);
}

double cov_at(const ProcessSpec& p, const TimePoint& t1, const TimePoint& t2) {
    if (static_cast<int>(t1.size()) != p.dim() || static_cast<int>(t2.size()) != p.dim())
        throw std::invalid_argument("cov_at: dimension mismatch");
    if (const auto* k = std::get_if<StationaryKernelFamily>(&p.family()))
        return k->kernel.at_lag(time_norm(time_sub(t1, t2)));
    if (const auto* s = std::get_if<StatIncrementFamily>(&p.family())) {
        // r = (sigma^2(t1) + sigma^2(t2) - gamma(t1,t2)) / 2 with sigma^2(t) = gamma(0,t)
        const double g1 = s->gamma.at_dist(time_norm(t1));
        const double g2 = s->gamma.at_dist(time_norm(t2));
        const double g12 = s->gamma.at_dist(time_norm(time_sub(t1, t2)));
        return 0.5 * (g1 + g2 - g12);
    }
    const auto& f = std::get<FbmFamily>(p.family());
    return std::pow(time_norm(t1), f.kappa) + std::pow(time_norm(t2), f.kappa) -
           std::pow(time_norm(time_sub(t1, t2)), f.kappa);
}

double var_at(const ProcessSpec& p, const TimePoint& t) { return cov_at(p, t, t); }

double gamma_at(const ProcessSpec& p, const TimePoint& t1, const TimePoint& t2) {
    return var_at(p, t1) + var_at(p, t2) - 2.0 * cov_at(p, t1, t2);
}

void validate_psd(const Eigen::MatrixXd& cov, double rel_tol) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NotPsdError("eigenvalue computation failed");
    const double min_eig = es.eigenvalues().minCoeff();
    const double trace = cov.trace();
    if (trace < 0.0 || min_eig < -rel_tol * std::max(trace, 0.0))
        throw NotPsdError("covariance matrix not positive semidefinite (min eigenvalue " +
                          std::to_string(min_eig) + ", trace " + std::to_string(trace) + ")");
}

GridLaw grid_law(const ProcessSpec& p, const std::vector<TimePoint>& times) {
    if (times.empty()) throw std::invalid_argument("grid_law: empty time grid");
    const int n = static_cast<int>(times.size());
    GridLaw law;
    law.times = times;
    law.mean.resize(n);
    law.cov.resize(n, n);
    for (int i = 0; i < n; ++i) {
        law.mean(i) = mean_at(p, times[i]);
        for (int j = i; j < n; ++j) {
            const double c = cov_at(p, times[i], times[j]);
            law.cov(i, j) = c;
            law.cov(j, i) = c;
        }
    }
    validate_psd(law.cov);
    return law;
}

bool stationary_increments_check(const GammaFn& gamma, const std::vector<std::array<TimePoint, 3>>& grid,
                                 double tol) {
    for (const auto& [t1, t2, h] : grid) {
        const double base = gamma(t1, t2);
        const double shifted = gamma(time_add(t1, h), time_add(t2, h));
        if (std::fabs(base - shifted) > tol) return false;
    }
    return true;
}

bool additive_check(const ScalarFn& f, const std::vector<std::pair<TimePoint, TimePoint>>& grid, double tol) {
    for (const auto& [t1, t2] : grid) {
        if (std::fabs(f(time_add(t1, t2)) - f(t1) - f(t2)) > tol) return false;
    }
    return true;
}

std::vector<TimePoint> default_lattice(int dim) {
    const double step = dim >= 3 ? 1.0 : 0.5;
    std::vector<double> axis;
    for (double x = -2.0; x <= 2.0 + 1e-12; x += step) axis.push_back(x);
    std::vector<TimePoint> points{{}};
    for (int d = 0; d < dim; ++d) {
        std::vector<TimePoint> next;
        next.reserve(points.size() * axis.size());
        for (const auto& p : points)
            for (double x : axis) {
                TimePoint q = p;
                q.push_back(x);
                next.push_back(std::move(q));
            }
        points = std::move(next);
    }
    return points;
}

std::vector<std::array<TimePoint, 3>> default_shift_triples(int dim) {
    const auto lattice = default_lattice(dim);
    std::vector<std::array<TimePoint, 3>> triples;
    triples.reserve(lattice.size() * lattice.size() * lattice.size());
    for (const auto& t1 : lattice)
        for (const auto& t2 : lattice)
            for (const auto& h : lattice) triples.push_back({t1, t2, h});
    return triples;
}

std::vector<std::pair<TimePoint, TimePoint>> default_pairs(int dim) {
    const auto lattice = default_lattice(dim);
    std::vector<std::pair<TimePoint, TimePoint>> pairs;
    pairs.reserve(lattice.size() * lattice.size());
    for (const auto& t1 : lattice)
        for (const auto& t2 : lattice) pairs.emplace_back(t1, t2);
    return pairs;
}

}  // namespace gsys
