#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gsys/processes.hpp"
#include "gsys/rng.hpp"

using namespace gsys;

namespace {

ProcessSpec fbm(double kappa, DriftSpec drift = DriftSpec::none(), int dim = 1) {
    return ProcessSpec(dim, FbmFamily{kappa, std::move(drift)});
}

ProcessSpec bm(DriftSpec drift = DriftSpec::none()) {
    return ProcessSpec(1, StatIncrementFamily{GammaSpec{"bm", 1.0, 1.0, {}}, std::move(drift)});
}

ProcessSpec ou_kernel(double scale = 1.0, double constant = 0.0, double mean = 0.0) {
    return ProcessSpec(1, StationaryKernelFamily{KernelSpec{"exp", scale, 1.0, constant}, mean});
}

}  // namespace

TEST_CASE("mean_at per family") {
    // sigma^2(t) = 2|t| for fbm kappa=1, so the self-similar drift gives -2 at t=2
    CHECK(mean_at(fbm(1.0, DriftSpec::self_similar(1.0, 0.0)), {2.0}) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(mean_at(ou_kernel(1.0, 0.0, 3.5), {17.0}) == doctest::Approx(3.5));
    CHECK(mean_at(bm(DriftSpec::linear({3.0}, 1.0)), {2.0}) == doctest::Approx(7.0));
    CHECK_THROWS_AS(mean_at(fbm(1.0), {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("cov_at per family") {
    CHECK(cov_at(fbm(1.0), {1.0}, {2.0}) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(cov_at(bm(), {1.0}, {3.0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cov_at(ou_kernel(), {0.0}, {1.0}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

    RngStream rng(5);
    for (int i = 0; i < 30; ++i) {
        const double t = -3.0 + 6.0 * rng.next_uniform();
        CHECK(var_at(fbm(1.4), {t}) >= 0.0);
        CHECK(var_at(bm(), {t}) >= 0.0);
        CHECK(var_at(ou_kernel(0.7, 0.1), {t}) >= 0.0);
    }
}

TEST_CASE("cov_at of Brownian-like increments matches a brute-force construction") {
    // simulate W(t) = sum of independent N(0, dt) increments on a fine grid
    RngStream rng(42);
    const double dt = 0.05;
    const int steps = 60;  // covers [0, 3]
    const int reps = 200000;
    double acc = 0.0;
    for (int r = 0; r < reps; ++r) {
        double w = 0.0, w1 = 0.0, w3 = 0.0;
        for (int s = 1; s <= steps; ++s) {
            w += std::sqrt(dt) * rng.next_gaussian();
            if (s == 20) w1 = w;
            if (s == 60) w3 = w;
        }
        acc += w1 * w3;
    }
    const double cov = acc / reps;
    CHECK(cov_at(bm(), {1.0}, {3.0}) == doctest::Approx(cov).epsilon(1e-2));
}

TEST_CASE("grid_law assembles means and covariances") {
    const GridLaw law = grid_law(fbm(1.0), {{0.0}, {1.0}});
    CHECK(law.mean(0) == 0.0);
    CHECK(law.mean(1) == 0.0);
    CHECK(law.cov(0, 0) == doctest::Approx(0.0));
    CHECK(law.cov(0, 1) == doctest::Approx(0.0));
    CHECK(law.cov(1, 1) == doctest::Approx(2.0));

    const GridLaw klaw = grid_law(ou_kernel(), {{0.0}, {1.0}});
    CHECK(klaw.cov(0, 0) == doctest::Approx(1.0));
    CHECK(klaw.cov(0, 1) == doctest::Approx(std::exp(-1.0)));
    CHECK(klaw.cov(1, 0) == klaw.cov(0, 1));

    // gamma = -|t1-t2| is not a valid incremental variance
    const ProcessSpec bad(1, StatIncrementFamily{GammaSpec{"bm", -1.0, 1.0, {}}, DriftSpec::none()});
    CHECK_THROWS_AS(grid_law(bad, {{0.0}, {1.0}}), NotPsdError);
}

TEST_CASE("grid_law covariance is exactly symmetric") {
    const GridLaw law = grid_law(fbm(1.3), {{0.2}, {0.9}, {-1.4}, {2.0}});
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(law.cov(i, j) == law.cov(j, i));
}

TEST_CASE("r = (sigma^2(t1) + sigma^2(t2) - gamma)/2 on every family") {
    RngStream rng(9);
    const std::vector<ProcessSpec> procs{fbm(0.7), fbm(2.0), bm(DriftSpec::linear({1.5}, 0.2)),
                                         ou_kernel(0.5, 0.5, 1.0)};
    for (const auto& p : procs) {
        for (int i = 0; i < 40; ++i) {
            const TimePoint t1{-2.0 + 4.0 * rng.next_uniform()};
            const TimePoint t2{-2.0 + 4.0 * rng.next_uniform()};
            const double lhs = gamma_at(p, t1, t2);
            const double rhs = var_at(p, t1) + var_at(p, t2) - 2.0 * cov_at(p, t1, t2);
            CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, std::fabs(lhs)));
        }
    }
}

TEST_CASE("stationary_increments_check") {
    auto gamma_fbm = [](const TimePoint& a, const TimePoint& b) {
        return std::pow(std::fabs(a[0] - b[0]), 1.3);
    };
    CHECK(stationary_increments_check(gamma_fbm, default_shift_triples(1), 1e-12));

    auto gamma_bad = [](const TimePoint& a, const TimePoint& b) {
        return std::fabs(a[0] * a[0] - b[0] * b[0]);
    };
    // grid containing (0, 1, 1): gamma(0,1)=1 but gamma(1,2)=3
    std::vector<std::array<TimePoint, 3>> grid{{TimePoint{0.0}, TimePoint{1.0}, TimePoint{1.0}}};
    CHECK_FALSE(stationary_increments_check(gamma_bad, grid, 1e-9));
    CHECK(stationary_increments_check(gamma_bad, {}, 1e-9));  // vacuous
}

TEST_CASE("additive_check") {
    CHECK(additive_check([](const TimePoint& t) { return 3.0 * t[0]; }, default_pairs(1), 1e-12));
    std::vector<std::pair<TimePoint, TimePoint>> grid{{TimePoint{1.0}, TimePoint{1.0}}};
    CHECK_FALSE(additive_check([](const TimePoint& t) { return t[0] * t[0]; }, grid, 1e-9));
    CHECK(additive_check([](const TimePoint& t) { return t[0] - 2.0 * t[1]; }, default_pairs(2), 1e-12));
}

TEST_CASE("stationary increments imply shift-invariant increment covariances") {
    // covariance of (W(t+h) - W(h)) from grid_law must not depend on h
    const std::vector<double> base{0.5, 1.0, 1.5};
    const std::vector<double> shifts{0.0, 0.7, -1.3};
    for (const auto& p : {fbm(0.8), bm()}) {
        std::vector<Eigen::MatrixXd> increment_covs;
        for (double h : shifts) {
            std::vector<TimePoint> times{{h}};
            for (double t : base) times.push_back({t + h});
            const GridLaw law = grid_law(p, times);
            Eigen::MatrixXd inc(base.size(), base.size());
            for (size_t i = 0; i < base.size(); ++i)
                for (size_t j = 0; j < base.size(); ++j)
                    inc(i, j) = law.cov(i + 1, j + 1) + law.cov(0, 0) - law.cov(i + 1, 0) - law.cov(0, j + 1);
            increment_covs.push_back(inc);
        }
        for (size_t k = 1; k < increment_covs.size(); ++k)
            CHECK((increment_covs[k] - increment_covs[0]).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("fbm kappa=2 degenerates to a rank-one line process") {
    const GridLaw law = grid_law(fbm(2.0), {{1.0}, {2.0}});
    const double corr = law.cov(0, 1) / std::sqrt(law.cov(0, 0) * law.cov(1, 1));
    CHECK(corr == doctest::Approx(1.0).epsilon(1e-9));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(law.cov);
    CHECK(es.eigenvalues()(0) <= 1e-9 * law.cov.trace());  // rank one within tolerance
}

TEST_CASE("process spec validation") {
    CHECK_THROWS_AS(fbm(2.5), std::invalid_argument);
    CHECK_THROWS_AS(fbm(0.0), std::invalid_argument);
    CHECK_THROWS_AS(ProcessSpec(1, StationaryKernelFamily{KernelSpec{"nope", 1.0, 1.0, 0.0}, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(fbm(1.0, DriftSpec::self_similar(0.0, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(fbm(1.0, DriftSpec::linear({1.0, 2.0}, 0.0)), std::invalid_argument);  // dim mismatch
    CHECK_THROWS_AS(ProcessSpec(0, FbmFamily{1.0, DriftSpec::none()}), std::invalid_argument);
}

TEST_CASE("multidimensional time uses the Euclidean norm") {
    const ProcessSpec p = fbm(1.0, DriftSpec::none(), 2);
    CHECK(var_at(p, {3.0, 4.0}) == doctest::Approx(10.0));  // 2 |t|
    CHECK(cov_at(p, {1.0, 0.0}, {0.0, 1.0}) ==
          doctest::Approx(1.0 + 1.0 - std::sqrt(2.0)).epsilon(1e-12));
}
