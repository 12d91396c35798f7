#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gsys/analytic.hpp"
#include "gsys/rng.hpp"
#include "oracles.hpp"

using namespace gsys;

namespace {

PairSpec brown_resnick() {
    return PairSpec(MeasureSpec::exponential(1.0),
                    ProcessSpec(1, FbmFamily{1.0, DriftSpec::self_similar(1.0, 0.0)}));
}

PairSpec bm_nodrift_exp() {
    return PairSpec(MeasureSpec::exponential(1.0),
                    ProcessSpec(1, StatIncrementFamily{GammaSpec{"bm", 1.0, 1.0, {}}, DriftSpec::none()}));
}

GridLaw two_time_law(double mu1, double mu2, double s1, double s2, double gamma) {
    GridLaw law;
    law.times = {{0.0}, {1.0}};
    law.mean.resize(2);
    law.mean << mu1, mu2;
    law.cov.resize(2, 2);
    const double r = 0.5 * (s1 + s2 - gamma);
    law.cov << s1, r, r, s2;
    return law;
}

}  // namespace

TEST_CASE("pair validation") {
    CHECK_NOTHROW(brown_resnick());
    // invalid incremental variance surfaces at pair construction
    CHECK_THROWS_AS(PairSpec(MeasureSpec::lebesgue(),
                             ProcessSpec(1, StatIncrementFamily{GammaSpec{"bm", -1.0, 1.0, {}}, DriftSpec::none()})),
                    NotPsdError);
}

TEST_CASE("onedim_density: Brown-Resnick cancellation gives e^{-x} at every t") {
    const PairSpec pair = brown_resnick();
    for (double t : {0.0, 0.5, 1.0, 2.0})
        for (double x : {-1.0, 0.0, 0.3, 2.0})
            CHECK(onedim_density(pair, {t}, x) == doctest::Approx(std::exp(-x)).epsilon(1e-12));
}

TEST_CASE("onedim_density: Lebesgue measure is invariant under any driver") {
    const PairSpec pair(MeasureSpec::lebesgue(),
                        ProcessSpec(1, FbmFamily{1.4, DriftSpec::linear({2.0}, 1.0)}), 0.5);
    for (double t : {0.0, 1.0, -2.0})
        for (double x : {-3.0, 0.0, 5.0}) CHECK(onedim_density(pair, {t}, x) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("onedim_density: BM driver against a quadrature oracle") {
    const PairSpec pair = bm_nodrift_exp();
    // sigma^2(1) = 1: density at x=0 is e^{1/2}; cross-check by numeric convolution
    const double direct = onedim_density(pair, {1.0}, 0.0);
    CHECK(direct == doctest::Approx(std::exp(0.5)).epsilon(1e-12));
    const double oracle = oracles::simpson(
        [](double y) { return std::exp(-(0.0 - y)) * oracles::std_normal_pdf(y); }, -16.0, 16.0, 1e-13);
    CHECK(direct == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("psi_kappa endpoints and the Brown-Resnick value") {
    const GridLaw law = two_time_law(0.3, -0.7, 0.9, 1.7, 1.1);
    const auto m1 = 0.3 + 0.5 * 1.4 * 0.9, m2 = -0.7 + 0.5 * 1.4 * 1.7;
    CHECK(psi_kappa(law, 1.4, 1.4) == doctest::Approx(std::exp(1.4 * m2)).epsilon(1e-12));
    CHECK(psi_kappa(law, 1.4, 0.0) == doctest::Approx(std::exp(1.4 * m1)).epsilon(1e-12));

    // Brown-Resnick times (0,1): mu=(0,-1), s=(0,2), gamma=2, kappa=1, u=0.5
    const GridLaw br = two_time_law(0.0, -1.0, 0.0, 2.0, 2.0);
    CHECK(psi_kappa(br, 1.0, 0.5) == doctest::Approx(std::exp(-0.25)).epsilon(1e-12));
    const double oracle = oracles::bvn_expect(
        [](double x1, double x2) { return std::exp(1.0 * x1 + 0.5 * (x2 - x1)); }, 0.0, -1.0, 0.0, 2.0, 2.0);
    CHECK(psi_kappa(br, 1.0, 0.5) == doctest::Approx(oracle).epsilon(1e-8));

    CHECK_THROWS_AS(psi_kappa(two_time_law(0.0, 0.0, 600.0, 600.0, 2.0), 2.0, 1.0), OverflowError);
}

TEST_CASE("psi_kappa equals bivariate quadrature over random parameters") {
    RngStream rng(314);
    int checked = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const double mu1 = -2.0 + 4.0 * rng.next_uniform();
        const double mu2 = -2.0 + 4.0 * rng.next_uniform();
        const double s1 = 3.0 * rng.next_uniform();
        const double s2 = 3.0 * rng.next_uniform();
        const double rho = -1.0 + 2.0 * rng.next_uniform();
        const double gamma = s1 + s2 - 2.0 * rho * std::sqrt(s1 * s2);
        const double kappa = -2.0 + 4.0 * rng.next_uniform();
        const double u = -2.0 + 4.0 * rng.next_uniform();
        const GridLaw law = two_time_law(mu1, mu2, s1, s2, gamma);
        const double direct = psi_kappa(law, kappa, u);
        const double oracle = oracles::bvn_expect(
            [&](double x1, double x2) { return std::exp(kappa * x1 + u * (x2 - x1)); }, mu1, mu2, s1, s2, gamma, 64,
            12.0);
        CHECK(std::fabs(direct - oracle) <= 1e-6 * std::fabs(oracle));
        ++checked;
    }
    CHECK(checked == 50);
}

TEST_CASE("decompose_layer closed form") {
    const GridLaw br = two_time_law(0.0, -1.0, 0.0, 2.0, 2.0);
    const DiagonalGaussianLayer layer = decompose_layer(br, 1.0);
    CHECK(layer.total_mass == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(layer.profile_mean == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(layer.profile_variance == doctest::Approx(2.0).epsilon(1e-12));

    // kappa = 0 collapses the weight
    const GridLaw law = two_time_law(0.4, 1.3, 0.8, 1.9, 0.7);
    const DiagonalGaussianLayer l0 = decompose_layer(law, 0.0);
    CHECK(l0.total_mass == doctest::Approx(1.0));
    CHECK(l0.profile_mean == doctest::Approx(1.3 - 0.4));
    CHECK(l0.profile_variance == doctest::Approx(0.7));

    // degenerate gamma = 0 keeps a Dirac profile
    const DiagonalGaussianLayer ld = decompose_layer(two_time_law(0.5, 0.5, 1.0, 1.0, 0.0), 1.7);
    CHECK(ld.profile_variance == doctest::Approx(0.0));
}

TEST_CASE("layer reconstruction reproduces the exponentially weighted shift integral") {
    // int e^{-k z} layer(B - z) dz must match direct quadrature of int e^{-k z} n(B-z) dz
    RngStream rng(99);
    for (int trial = 0; trial < 6; ++trial) {
        const double mu1 = -1.0 + 2.0 * rng.next_uniform();
        const double mu2 = -1.0 + 2.0 * rng.next_uniform();
        const double s1 = 0.3 + 2.0 * rng.next_uniform();
        const double s2 = 0.3 + 2.0 * rng.next_uniform();
        const double rho = -0.9 + 1.8 * rng.next_uniform();
        const double gamma = s1 + s2 - 2.0 * rho * std::sqrt(s1 * s2);
        const double kappa = (trial % 2 == 0) ? 1.0 : -0.6;
        const Rect rect{-0.8, 0.9, -1.1, 0.7};
        const GridLaw law = two_time_law(mu1, mu2, s1, s2, gamma);
        const DiagonalGaussianLayer layer = decompose_layer(law, kappa);

        const double sd = std::sqrt(layer.profile_variance);
        auto lhs_f = [&](double z) {
            return std::exp(-kappa * z) * layer.total_mass *
                   (oracles::std_normal_cdf((rect.x2u - z - layer.profile_mean) / sd) -
                    oracles::std_normal_cdf((rect.x2l - z - layer.profile_mean) / sd));
        };
        const double lhs = oracles::simpson(lhs_f, rect.x1l, rect.x1u, 1e-12);

        auto rhs_f = [&](double z) {
            return std::exp(-kappa * z) * oracles::bvn_rect(mu1, mu2, s1, s2, gamma, rect.x1l - z, rect.x1u - z,
                                                            rect.x2l - z, rect.x2u - z);
        };
        const double span = 10.0 * std::sqrt(std::max(s1, s2)) + 5.0;
        const double rhs = oracles::simpson(rhs_f, std::min(rect.x1l, rect.x2l) - span,
                                            std::max(rect.x1u, rect.x2u) + span, 1e-12);
        CHECK(std::fabs(lhs - rhs) <= 1e-6 * std::max(1e-12, std::fabs(rhs)));
    }
}

TEST_CASE("bivariate_intensity: diagonal degeneracy at equal times") {
    const PairSpec pair = brown_resnick();
    CHECK(bivariate_intensity(pair, {0.0}, {0.0}, {0.0, 1.0, 0.0, 1.0}) ==
          doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("bivariate_intensity: Lebesgue pairs are invariant under diagonal rectangle shifts") {
    const PairSpec pair(MeasureSpec::lebesgue(2.0),
                        ProcessSpec(1, FbmFamily{1.2, DriftSpec::linear({1.0}, 0.0)}));
    const double base = bivariate_intensity(pair, {0.0}, {1.0}, {0.0, 1.0, -1.0, 1.0});
    for (double s : {-2.0, 0.7, 3.1}) {
        const double shifted = bivariate_intensity(pair, {0.0}, {1.0}, {0.0 + s, 1.0 + s, -1.0 + s, 1.0 + s});
        CHECK(shifted == doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("bivariate_intensity agrees with direct two-dimensional quadrature") {
    const PairSpec pair = brown_resnick();
    const Rect rect{0.0, 1.0, -1.0, 1.0};
    const double direct = bivariate_intensity(pair, {0.0}, {1.0}, rect);
    // oracle: int e^{-x} P((x + xi(0), x + xi(1)) in rect) dx; xi(0) is a Dirac
    // at 0, so the integrand is supported exactly on x in [x1l, x1u]
    auto f = [&](double x) {
        return std::exp(-x) * oracles::bvn_rect(0.0, -1.0, 0.0, 2.0, 2.0, rect.x1l - x, rect.x1u - x, rect.x2l - x,
                                                rect.x2u - x);
    };
    const double oracle = oracles::simpson(f, rect.x1l, rect.x1u, 1e-12);
    CHECK(direct == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("S3 closed forms are stationary at n <= 2") {
    const PairSpec pair = brown_resnick();
    const Rect rect{0.0, 1.0, -1.0, 1.0};
    const double base = bivariate_intensity(pair, {0.0}, {1.0}, rect);
    for (double h : {0.5, 1.0}) {
        const double shifted = bivariate_intensity(pair, {0.0 + h}, {1.0 + h}, rect);
        CHECK(std::fabs(shifted - base) <= 1e-7 * std::fabs(base));
    }
}

TEST_CASE("bivariate_intensity marginalizes to the one-dimensional intensity") {
    const PairSpec pair = brown_resnick();
    const double wide = 60.0;
    const double marginal = bivariate_intensity(pair, {0.5}, {0.5}, {0.0, 1.0, -wide, wide});
    CHECK(marginal == doctest::Approx(onedim_intensity(pair, {0.5}, 0.0, 1.0)).epsilon(1e-7));

    const double marginal2 = bivariate_intensity(pair, {0.5}, {1.5}, {0.0, 1.0, -wide, wide});
    CHECK(marginal2 == doctest::Approx(onedim_intensity(pair, {0.5}, 0.0, 1.0)).epsilon(1e-7));
}

TEST_CASE("bivariate_intensity rejects Gaussian measure components") {
    const PairSpec pair(MeasureSpec::gaussian(0.0, 1.0), ProcessSpec(1, FbmFamily{1.0, DriftSpec::none()}));
    CHECK_THROWS_AS(bivariate_intensity(pair, {0.0}, {1.0}, {0.0, 1.0, 0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("initial_shift enters the mean uniformly") {
    const PairSpec shifted(MeasureSpec::exponential(1.0),
                           ProcessSpec(1, FbmFamily{1.0, DriftSpec::self_similar(1.0, 0.0)}), 3.0);
    // density picks up the factor e^{lambda * shift} ... here exp(mu l + s l^2/2) with mu shifted by 3
    for (double x : {0.0, 1.0})
        CHECK(onedim_density(shifted, {1.0}, x) == doctest::Approx(std::exp(3.0) * std::exp(-x)).epsilon(1e-12));
}
