#include "gsys/classify.hpp"

#include <cmath>

namespace gsys {

std::string to_string(FamilyLabel::Tag tag) {
    switch (tag) {
        case FamilyLabel::Tag::S1: return "S1";
        case FamilyLabel::Tag::S1Star: return "S1*";
        case FamilyLabel::Tag::S2: return "S2";
        case FamilyLabel::Tag::S3: return "S3";
        case FamilyLabel::Tag::NotStationary: return "not_stationary";
    }
    return "not_stationary";
}

namespace {

constexpr double kDefaultTol = 1e-9;

struct LinearFit {
    std::vector<double> coeffs;
    double intercept = 0.0;
    double max_residual = 0.0;
};

LinearFit fit_linear_mean(const PairSpec& pair, const std::vector<TimePoint>& grid) {
    const int d = pair.process().dim();
    const int n = static_cast<int>(grid.size());
    Eigen::MatrixXd x(n, d + 1);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < d; ++k) x(i, k) = grid[static_cast<size_t>(i)][static_cast<size_t>(k)];
        x(i, d) = 1.0;
        y(i) = pair.mean_at(grid[static_cast<size_t>(i)]);
    }
    const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(y);
    LinearFit fit;
    fit.coeffs.assign(beta.data(), beta.data() + d);
    fit.intercept = beta(d);
    fit.max_residual = (x * beta - y).cwiseAbs().maxCoeff();
    return fit;
}

struct ConstantFit {
    double value = 0.0;
    double max_residual = 0.0;
};

/// Fits c in mu(t) = -lambda sigma^2(t)/2 + c and reports the residual gate.
ConstantFit fit_s3_offset(const PairSpec& pair, double lambda, const std::vector<TimePoint>& grid) {
    ConstantFit fit;
    double sum = 0.0;
    for (const auto& t : grid) sum += pair.mean_at(t) + 0.5 * lambda * var_at(pair.process(), t);
    fit.value = sum / static_cast<double>(grid.size());
    for (const auto& t : grid)
        fit.max_residual = std::max(
            fit.max_residual, std::fabs(pair.mean_at(t) + 0.5 * lambda * var_at(pair.process(), t) - fit.value));
    return fit;
}

double gamma_invariance_residual(const ProcessSpec& p) {
    double worst = 0.0;
    for (const auto& [t1, t2, h] : default_shift_triples(p.dim())) {
        const double base = gamma_at(p, t1, t2);
        const double shifted = gamma_at(p, time_add(t1, h), time_add(t2, h));
        worst = std::max(worst, std::fabs(base - shifted));
    }
    return worst;
}

/// Canonical W part of a stat-increment or stationary-kernel process.
ProcessSpec::Family canonical_w_family(const ProcessSpec& p, const DriftSpec& drift) {
    if (const auto* k = std::get_if<StationaryKernelFamily>(&p.family())) {
        GammaSpec g;
        g.name = "kernel_increment";
        g.kernel = k->kernel;
        return StatIncrementFamily{g, drift};
    }
    if (const auto* s = std::get_if<StatIncrementFamily>(&p.family())) return StatIncrementFamily{s->gamma, drift};
    const auto& f = std::get<FbmFamily>(p.family());
    return FbmFamily{f.kappa, drift};
}

PairSpec build_canonical(const PairSpec& pair, const FamilyLabel& label) {
    if (label.tag == FamilyLabel::Tag::S2) {
        bool zero = true;
        for (double c : label.linear_coeffs) zero = zero && c == 0.0;
        const DriftSpec drift = zero ? DriftSpec::none() : DriftSpec::linear(label.linear_coeffs, 0.0);
        return PairSpec(pair.measure(), ProcessSpec(pair.process().dim(), canonical_w_family(pair.process(), drift)),
                        0.0);
    }
    // S3: xi_tilde(t) = W(t) - lambda sigma_W^2(t)/2, m_tilde = m * delta_c
    const DriftSpec drift = DriftSpec::self_similar(label.lambda, 0.0);
    const MeasureSpec shifted = convolve_with_gaussian(pair.measure(), {label.offset_c, 0.0, 1.0});
    return PairSpec(shifted, ProcessSpec(pair.process().dim(), canonical_w_family(pair.process(), drift)), 0.0);
}

}  // namespace

ClassificationReport classify_pair(const PairSpec& pair, const std::vector<TimePoint>& grid, double tol) {
    if (grid.empty()) throw std::invalid_argument("classify_pair: empty validation grid");
    ClassificationReport rep;
    const MeasureSpec& m = pair.measure();
    const bool single_exp = m.is_single_exp();
    const bool pure_leb = m.is_pure_lebesgue();
    const double rate = single_exp ? m.exp_terms()[0].rate : 0.0;
    const double weight = single_exp ? m.exp_terms()[0].weight : 0.0;

    if (pair.process().is_stationary_kernel()) {
        const auto& fam = std::get<StationaryKernelFamily>(pair.process().family());
        const double sigma2 = fam.kernel.at_lag(0.0);
        const double mu = fam.mean_const + pair.initial_shift();
        rep.evidence.push_back({"gamma_translation_invariance", gamma_invariance_residual(pair.process())});
        if (single_exp && rate != 0.0) {
            rep.label.tag = FamilyLabel::Tag::S3;
            rep.label.alpha = weight;
            rep.label.lambda = rate;
            rep.label.offset_c = mu + 0.5 * rate * sigma2;
            rep.evidence.push_back({"s1_s3_overlap", 0.0});
        } else if (pure_leb) {
            rep.label.tag = FamilyLabel::Tag::S2;
            rep.label.alpha = weight;
            rep.label.linear_coeffs.assign(static_cast<size_t>(pair.process().dim()), 0.0);
            rep.label.offset_c = mu;
            rep.evidence.push_back({"s1_s2_overlap", 0.0});
        } else {
            rep.label.tag = FamilyLabel::Tag::S1Star;
            rep.label.kernel_id = fam.kernel.name;
            rep.label.offset_c = mu;
        }
    } else {
        const double gamma_res = gamma_invariance_residual(pair.process());
        rep.evidence.push_back({"gamma_translation_invariance", gamma_res});
        if (gamma_res > tol) {
            rep.label.tag = FamilyLabel::Tag::NotStationary;
            return rep;
        }
        if (pure_leb) {
            const LinearFit fit = fit_linear_mean(pair, grid);
            rep.evidence.push_back({"mean_additive", fit.max_residual});
            if (fit.max_residual <= tol) {
                rep.label.tag = FamilyLabel::Tag::S2;
                rep.label.alpha = weight;
                rep.label.linear_coeffs = fit.coeffs;
                rep.label.offset_c = fit.intercept;
            } else {
                rep.label.tag = FamilyLabel::Tag::NotStationary;
                return rep;
            }
        } else if (single_exp && rate != 0.0) {
            const ConstantFit fit = fit_s3_offset(pair, rate, grid);
            rep.evidence.push_back({"s3_mean_relation", fit.max_residual});
            if (fit.max_residual <= tol) {
                rep.label.tag = FamilyLabel::Tag::S3;
                rep.label.alpha = weight;
                rep.label.lambda = rate;
                rep.label.offset_c = fit.value;
            } else {
                rep.label.tag = FamilyLabel::Tag::NotStationary;
                return rep;
            }
        } else {
            // mixtures and Gaussian-component measures are stationary with a
            // stat-increment driver only if the driver is degenerate
            double max_var = 0.0, max_mean_dev = 0.0;
            const double mu0 = pair.mean_at(grid.front());
            for (const auto& t : grid) {
                max_var = std::max(max_var, var_at(pair.process(), t));
                max_mean_dev = std::max(max_mean_dev, std::fabs(pair.mean_at(t) - mu0));
            }
            rep.evidence.push_back({"variance_constant", max_var});
            rep.evidence.push_back({"mean_constant", max_mean_dev});
            if (max_var <= tol && max_mean_dev <= tol) {
                rep.label.tag = FamilyLabel::Tag::S1Star;
                rep.label.kernel_id = "degenerate_zero";
                rep.label.offset_c = mu0;
            } else {
                rep.label.tag = FamilyLabel::Tag::NotStationary;
                rep.evidence.push_back({"measure_form_unsupported", 0.0});
                return rep;
            }
        }
    }
    if (rep.label.tag == FamilyLabel::Tag::S2 || rep.label.tag == FamilyLabel::Tag::S3)
        rep.canonical = build_canonical(pair, rep.label);
    return rep;
}

ClassificationReport classify_pair(const PairSpec& pair) {
    return classify_pair(pair, default_lattice(pair.process().dim()), kDefaultTol);
}

PairSpec canonicalize(const PairSpec& pair) {
    const ClassificationReport rep = classify_pair(pair);
    if (!rep.canonical)
        throw std::invalid_argument("canonicalize: pair is labeled " + to_string(rep.label.tag) +
                                    "; only S2/S3 pairs have canonical forms");
    return *rep.canonical;
}

namespace {

double grid_law_distance(const PairSpec& a, const PairSpec& b, const std::vector<TimePoint>& grid) {
    const GridLaw la = a.shifted_grid_law(grid);
    const GridLaw lb = b.shifted_grid_law(grid);
    const double dm = (la.mean - lb.mean).cwiseAbs().maxCoeff();
    const double dc = (la.cov - lb.cov).cwiseAbs().maxCoeff();
    return std::max(dm, dc);
}

}  // namespace

EqualInLawCertificate equal_in_law_analytic(const PairSpec& a, const PairSpec& b,
                                            const std::vector<TimePoint>& grid, double tol) {
    const ClassificationReport ra = classify_pair(a, grid, tol);
    const ClassificationReport rb = classify_pair(b, grid, tol);
    if (ra.label.tag == FamilyLabel::Tag::NotStationary || rb.label.tag == FamilyLabel::Tag::NotStationary)
        throw std::invalid_argument("equal_in_law_analytic requires stationary pairs");
    EqualInLawCertificate cert;
    if (ra.label.tag != rb.label.tag) {
        cert.equal = false;
        cert.reason = "pairs belong to different stationary families (" + to_string(ra.label.tag) + " vs " +
                      to_string(rb.label.tag) + ")";
        return cert;
    }
    if (ra.label.tag == FamilyLabel::Tag::S2 || ra.label.tag == FamilyLabel::Tag::S3) {
        const PairSpec& ca = *ra.canonical;
        const PairSpec& cb = *rb.canonical;
        if (!measures_approx_equal(ca.measure(), cb.measure(), tol)) {
            cert.equal = false;
            cert.reason = "canonical measures differ";
            return cert;
        }
        const double dist = grid_law_distance(ca, cb, grid);
        if (dist > tol) {
            cert.equal = false;
            cert.reason = "canonical process laws differ on the validation grid";
            return cert;
        }
        cert.equal = true;
        cert.n0 = GaussianMeasure1D{0.0, 0.0, 1.0};
        cert.reason = "canonical pairs coincide";
        return cert;
    }
    // S1Star: orient so sigma_1^2 <= sigma_2^2 and test the N0-shift criterion
    const TimePoint& t0 = grid.front();
    const double mu_a = a.mean_at(t0), mu_b = b.mean_at(t0);
    const double s2_a = var_at(a.process(), t0), s2_b = var_at(b.process(), t0);
    const bool swapped = s2_b < s2_a;
    const PairSpec& p1 = swapped ? b : a;
    const PairSpec& p2 = swapped ? a : b;
    const double mu1 = swapped ? mu_b : mu_a, mu2 = swapped ? mu_a : mu_b;
    const double v1 = swapped ? s2_b : s2_a, v2 = swapped ? s2_a : s2_b;
    const GaussianMeasure1D n0{mu2 - mu1, v2 - v1, 1.0};
    cert.n0 = n0;
    cert.direction = swapped ? -1 : +1;
    if (!measures_approx_equal(p1.measure(), convolve_with_gaussian(p2.measure(), n0), tol)) {
        cert.equal = false;
        cert.reason = "measure condition m1 = m2 * n0 fails";
        return cert;
    }
    double worst = 0.0;
    for (const auto& t1 : grid)
        for (const auto& t2 : grid) {
            const double r1 = cov_at(p1.process(), t1, t2);
            const double r2 = cov_at(p2.process(), t1, t2);
            worst = std::max(worst, std::fabs(r2 - (r1 + n0.variance)));
        }
    if (worst > tol) {
        cert.equal = false;
        cert.reason = "incremental laws differ: r2 != r1 + Var(N0) on the grid";
        return cert;
    }
    cert.equal = true;
    cert.reason = "N0-shift criterion holds";
    return cert;
}

EqualInLawCertificate equal_in_law_analytic(const PairSpec& a, const PairSpec& b) {
    const int dim = a.process().dim();
    if (dim != b.process().dim()) throw std::invalid_argument("equal_in_law_analytic: time dimensions differ");
    return equal_in_law_analytic(a, b, default_lattice(dim), kDefaultTol);
}

}  // namespace gsys
