#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gsys/measures.hpp"
#include "gsys/rng.hpp"
#include "oracles.hpp"

using namespace gsys;

namespace {

double oracle_density(const MeasureSpec& m, double x) { return density_at(m, x); }

// numeric convolution density (m * N(mu0, s0^2))(x) by quadrature
double conv_density_oracle(const MeasureSpec& m, double mu0, double var0, double x) {
    const double sd = std::sqrt(var0);
    auto f = [&](double y) {
        return oracle_density(m, x - y) * oracles::std_normal_pdf((y - mu0) / sd) / sd;
    };
    return oracles::simpson(f, mu0 - 14.0 * sd, mu0 + 14.0 * sd, 1e-13);
}

}  // namespace

TEST_CASE("construction canonicalizes and validates") {
    MeasureSpec m({{1.0, 2.0}, {2.0, 0.0}, {3.0, 2.0}}, {});
    REQUIRE(m.exp_terms().size() == 2);
    CHECK(m.exp_terms()[0].rate == 0.0);
    CHECK(m.exp_terms()[1].rate == 2.0);
    CHECK(m.exp_terms()[1].weight == doctest::Approx(4.0));  // merged equal rates

    CHECK_THROWS_AS(MeasureSpec({}, {}), std::invalid_argument);            // zero measure
    CHECK_THROWS_AS(MeasureSpec({{-1.0, 0.0}}, {}), std::invalid_argument);  // weight > 0
    CHECK_THROWS_AS(MeasureSpec({}, {{0.0, -1.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(MeasureSpec({}, {{0.0, 1.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("check_integrability holds across the DSL") {
    CHECK(check_integrability(MeasureSpec::exponential(1.0)));
    CHECK(check_integrability(MeasureSpec::lebesgue()));
    CHECK(check_integrability(MeasureSpec::gaussian(0.0, 1.0, 2.0)));
    CHECK(check_integrability(MeasureSpec({{2.0, -3.0}, {1.0, 5.0}}, {{1.0, 0.0, 0.5}})));
}

TEST_CASE("laplace_gaussian closed form") {
    CHECK(laplace_gaussian({0.0, 1.0, 1.0}, 1.0) == doctest::Approx(std::exp(0.5)).epsilon(1e-12));
    CHECK(laplace_gaussian({2.0, 0.0, 1.0}, 3.0) == doctest::Approx(std::exp(6.0)).epsilon(1e-12));

    // quadrature oracle for (mu=1, var=2, mass 1) at y=-1: expected 1
    const double sd = std::sqrt(2.0);
    const double oracle = oracles::simpson(
        [&](double x) { return std::exp(-x) * oracles::std_normal_pdf((x - 1.0) / sd) / sd; }, 1.0 - 16.0 * sd,
        1.0 + 16.0 * sd, 1e-13);
    CHECK(oracle == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(laplace_gaussian({1.0, 2.0, 1.0}, -1.0) == doctest::Approx(oracle).epsilon(1e-10));

    CHECK_THROWS_AS(laplace_gaussian({0.0, 1e6, 1.0}, 100.0), OverflowError);
}

TEST_CASE("convolve_with_gaussian: exp-term weight transform") {
    const MeasureSpec out = convolve_with_gaussian(MeasureSpec::exponential(1.0), {0.0, 2.0, 1.0});
    REQUIRE(out.is_single_exp());
    CHECK(out.exp_terms()[0].rate == 1.0);
    CHECK(out.exp_terms()[0].weight == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
    // grid oracle: numeric convolution of densities
    for (double x : {-1.0, 0.0, 0.7, 2.5}) {
        CHECK(density_at(out, x) == doctest::Approx(conv_density_oracle(MeasureSpec::exponential(1.0), 0.0, 2.0, x))
                                        .epsilon(1e-8));
    }
}

TEST_CASE("convolution with a point mass at zero is the identity") {
    const MeasureSpec m({{2.0, 1.0}, {0.5, 0.0}}, {{1.0, 2.0, 0.25}});
    CHECK(measures_approx_equal(convolve_with_gaussian(m, {0.0, 0.0, 1.0}), m));
}

TEST_CASE("deconvolution recovery of an exp mixture") {
    // if m * N(mu0, s0^2) = a e_l + b e_0, then m = a e^{-l^2 s0^2/2} e^{-l mu0} e_l + b e_0
    const double a = 2.0, b = 0.5, l = 1.5, mu0 = 0.3, s0 = 0.8;
    const MeasureSpec m({{a * std::exp(-l * l * s0 / 2.0) * std::exp(-l * mu0), l}, {b, 0.0}}, {});
    const MeasureSpec conv = convolve_with_gaussian(m, {mu0, s0, 1.0});
    REQUIRE(conv.exp_terms().size() == 2);
    CHECK(conv.exp_terms()[0].weight == doctest::Approx(b).epsilon(1e-12));
    CHECK(conv.exp_terms()[1].weight == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("convolution semigroup is exact in the DSL") {
    const MeasureSpec m({{2.0, 1.0}, {1.0, -0.5}}, {{0.3, 0.7, 2.0}});
    const MeasureSpec lhs = convolve_with_gaussian(convolve_with_gaussian(m, {0.4, 1.1, 1.0}), {-0.2, 0.6, 1.0});
    const MeasureSpec rhs = convolve_with_gaussian(m, {0.2, 1.7, 1.0});
    CHECK(measures_approx_equal(lhs, rhs, 1e-12));
}

TEST_CASE("two-Gaussian convolution identity (exponential mixtures)") {
    // lambda = -2(mu2-mu1)/(s2^2-s1^2) makes m * N(mu1,s1^2) = m * N(mu2,s2^2)
    RngStream rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const double mu1 = 4.0 * rng.next_uniform() - 2.0;
        const double mu2 = 4.0 * rng.next_uniform() - 2.0;
        const double s1 = 0.2 + 1.2 * rng.next_uniform();
        const double s2 = s1 + 0.3 + 1.5 * rng.next_uniform();
        const double lambda = -2.0 * (mu2 - mu1) / (s2 - s1);
        if (lambda == 0.0) continue;
        const MeasureSpec m({{1.3, lambda}, {0.7, 0.0}}, {});
        const MeasureSpec c1 = convolve_with_gaussian(m, {mu1, s1, 1.0});
        const MeasureSpec c2 = convolve_with_gaussian(m, {mu2, s2, 1.0});
        for (int i = 0; i <= 100; ++i) {
            const double x = -5.0 + 0.1 * i;
            CHECK(density_at(c1, x) == doctest::Approx(density_at(c2, x)).epsilon(1e-10));
        }
    }
}

TEST_CASE("Gaussian deconvolution is injective on the DSL (perturbation)") {
    const MeasureSpec m1({{1.0, 1.0}, {0.5, 0.0}}, {});
    const MeasureSpec m2({{1.0 * (1.0 + 1e-3), 1.0}, {0.5, 0.0}}, {});
    const GaussianMeasure1D n0{0.2, 1.0, 1.0};
    const MeasureSpec c1 = convolve_with_gaussian(m1, n0);
    const MeasureSpec c2 = convolve_with_gaussian(m2, n0);
    double max_diff = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double x = -4.0 + 0.08 * i;
        max_diff = std::max(max_diff, std::fabs(density_at(c1, x) - density_at(c2, x)));
    }
    CHECK(max_diff > 1e-6);
}

TEST_CASE("mass_on_interval closed forms") {
    CHECK(mass_on_interval(MeasureSpec::exponential(1.0), 0.0, std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mass_on_interval(MeasureSpec::lebesgue(), -3.0, 4.0) == doctest::Approx(7.0).epsilon(1e-12));

    const double oracle = oracles::simpson([](double x) { return std::exp(-x); }, 0.0, 10.0, 1e-14);
    CHECK(mass_on_interval(MeasureSpec::exponential(1.0), 0.0, 10.0) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(mass_on_interval(MeasureSpec::exponential(1.0), 0.0, 10.0) ==
          doctest::Approx(1.0 - std::exp(-10.0)).epsilon(1e-12));

    // atoms: a == b only picks up Dirac components
    CHECK(mass_on_interval(MeasureSpec::gaussian(2.0, 0.0, 3.0), 2.0, 2.0) == doctest::Approx(3.0));
    CHECK(mass_on_interval(MeasureSpec::exponential(1.0), 1.0, 1.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(mass_on_interval(MeasureSpec::lebesgue(), 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("mass_on_interval is additive over disjoint intervals") {
    const MeasureSpec m({{1.0, 1.0}, {0.4, -0.3}, {0.2, 0.0}}, {{0.5, 1.5, 2.0}});
    RngStream rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const double a = -6.0 + 8.0 * rng.next_uniform();
        const double c = a + 6.0 * rng.next_uniform();
        const double b = a + (c - a) * rng.next_uniform();
        const double whole = mass_on_interval(m, a, c);
        const double split = mass_on_interval(m, a, b) + mass_on_interval(m, b, c);
        CHECK(std::fabs(whole - split) <= 1e-12 * std::max(1.0, whole));
    }
}

TEST_CASE("inverse_cdf_on_window") {
    CHECK(inverse_cdf_on_window(MeasureSpec::lebesgue(), 0.0, 1.0, 0.25) == doctest::Approx(0.25).epsilon(1e-12));

    // e_1 on [0, 50], u = 1/2: solve 1 - e^{-x} = 0.5 (1 - e^{-50}) analytically
    const double expected = -std::log1p(-0.5 * (1.0 - std::exp(-50.0)));
    CHECK(inverse_cdf_on_window(MeasureSpec::exponential(1.0), 0.0, 50.0, 0.5) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(std::log(2.0)).epsilon(1e-10));

    const MeasureSpec mix({{1.0, 0.0}, {1.0, 1.0}}, {});
    CHECK(inverse_cdf_on_window(mix, 0.0, 1.0, 0.0) == doctest::Approx(0.0));
    CHECK(inverse_cdf_on_window(mix, 0.0, 1.0, 1.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(inverse_cdf_on_window(mix, 0.0, 1.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(inverse_cdf_on_window(MeasureSpec::gaussian(0.0, 1.0), 50.0, 51.0, 0.5), std::invalid_argument);
}

TEST_CASE("inverse_cdf composed with the cdf is the identity") {
    const MeasureSpec m({{1.0, 1.0}, {0.5, 0.0}}, {{-0.5, 0.8, 1.5}});
    const double a = -3.0, b = 4.0;
    const double total = mass_on_interval(m, a, b);
    RngStream rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        const double x = a + (b - a) * (0.05 + 0.9 * rng.next_uniform());
        const double u = mass_on_interval(m, a, x) / total;
        CHECK(inverse_cdf_on_window(m, a, b, u) == doctest::Approx(x).epsilon(1e-9));
    }
}

TEST_CASE("overflow policy raises instead of returning infinities") {
    CHECK_THROWS_AS(mass_on_interval(MeasureSpec::exponential(1.0), -800.0, 0.0), OverflowError);
    CHECK_THROWS_AS(density_at(MeasureSpec::exponential(1.0), -800.0), OverflowError);
}

TEST_CASE("density_at rejects Dirac components") {
    CHECK_THROWS_AS(density_at(MeasureSpec::gaussian(0.0, 0.0, 1.0), 0.0), std::domain_error);
}
