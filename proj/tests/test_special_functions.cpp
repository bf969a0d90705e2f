// Tests for the special-function layer: complex gamma accuracy on the strip
// the predictors use, normal-distribution helpers, truncated-minimum moments,
// and the regularized incomplete gamma.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "trielab/rng.hpp"
#include "trielab/special_functions.hpp"

using namespace trielab;
using cd = std::complex<double>;

TEST_CASE("gamma reproduces exact values on the real axis") {
    REQUIRE(complex_gamma(cd(1.0, 0.0)).real() == Catch::Approx(1.0).epsilon(1e-13));
    REQUIRE(complex_gamma(cd(0.5, 0.0)).real() ==
            Catch::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
    REQUIRE(complex_gamma(cd(5.0, 0.0)).real() == Catch::Approx(24.0).epsilon(1e-13));
    REQUIRE(std::fabs(complex_gamma(cd(1.0, 0.0)).imag()) < 1e-14);
}

TEST_CASE("gamma satisfies |Gamma(1+iy)|^2 = pi y / sinh(pi y)") {
    for (double y : {0.5, 1.0, 2.0 * std::numbers::pi / std::numbers::ln2, 20.0}) {
        const double lhs = std::norm(complex_gamma(cd(1.0, y)));
        const double rhs = std::numbers::pi * y / std::sinh(std::numbers::pi * y);
        REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-10));
    }
    REQUIRE(std::abs(complex_gamma(cd(1.0, 1.0))) == Catch::Approx(0.5215670).margin(5e-7));
}

TEST_CASE("gamma satisfies the functional and reflection equations off axis") {
    for (cd z : {cd(0.3, 4.0), cd(1.5, -20.0), cd(0.9, 9.06)}) {
        const cd lhs = complex_gamma(z + 1.0);
        const cd rhs = z * complex_gamma(z);
        REQUIRE(std::abs(lhs - rhs) <= 1e-11 * std::abs(lhs));
    }
    // Re z < 1/2 goes through reflection; check against pi / sin(pi z)
    const cd z(0.3, 0.7);
    const cd prod = complex_gamma(z) * complex_gamma(1.0 - z);
    const cd expect = std::numbers::pi / std::sin(std::numbers::pi * z);
    REQUIRE(std::abs(prod - expect) <= 1e-11 * std::abs(expect));
}

TEST_CASE("gamma derivative at 1 is minus the Euler constant") {
    const double h = 1e-5;
    const double deriv =
        (complex_gamma(cd(1.0 + h, 0.0)).real() - complex_gamma(cd(1.0 - h, 0.0)).real()) /
        (2.0 * h);
    REQUIRE(deriv == Catch::Approx(-euler_gamma).margin(1e-8));
}

TEST_CASE("normal cdf and pdf agree with tabulated values") {
    REQUIRE(norm_cdf(0.0) == Catch::Approx(0.5).epsilon(1e-15));
    REQUIRE(norm_cdf(1.959963985) == Catch::Approx(0.975).margin(1e-9));
    REQUIRE(norm_cdf(-1.0) + norm_cdf(1.0) == Catch::Approx(1.0).epsilon(1e-14));
    REQUIRE(norm_pdf(0.0) == Catch::Approx(0.3989422804014327).epsilon(1e-15));
    REQUIRE(norm_pdf(2.0) == Catch::Approx(std::exp(-2.0) * 0.3989422804014327).epsilon(1e-14));
}

TEST_CASE("linear loss obeys its reflection identity and limits") {
    REQUIRE(normal_linear_loss(0.0) == Catch::Approx(0.3989422804014327).epsilon(1e-14));
    for (double t : {0.5, 1.0, 3.0}) {
        REQUIRE(normal_linear_loss(t) - normal_linear_loss(-t) ==
                Catch::Approx(t).epsilon(1e-13));
    }
    // Psi(x) = E max(Z, x) >= max(x, 0) and -> x as x -> +inf
    REQUIRE(normal_linear_loss(4.0) >= 4.0);
    REQUIRE(normal_linear_loss(4.0) == Catch::Approx(4.0).margin(1e-4));
    REQUIRE(normal_linear_loss(-8.0) >= 0.0);
    REQUIRE(normal_linear_loss(-8.0) < 1e-14);
}

TEST_CASE("truncated-minimum moments match closed-form anchors") {
    // c = 0: E min(Z,0) = -phi(0), E min^2 = 1/2
    const auto at0 = truncated_min_moments(0.0);
    REQUIRE(at0.mean == Catch::Approx(-0.3989422804014327).epsilon(1e-13));
    REQUIRE(at0.variance ==
            Catch::Approx(0.5 - 0.3989422804014327 * 0.3989422804014327).epsilon(1e-12));
    // c -> +inf: plain standard normal
    const auto far = truncated_min_moments(8.0);
    REQUIRE(far.mean == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(far.variance == Catch::Approx(1.0).margin(1e-10));
    // c -> -inf: degenerate at c
    const auto low = truncated_min_moments(-6.0);
    REQUIRE(low.mean == Catch::Approx(-6.0).margin(1e-7));
    REQUIRE(low.variance == Catch::Approx(0.0).margin(1e-6));
}

TEST_CASE("truncated-minimum moments match Monte Carlo at a generic cutoff") {
    const double c = 0.5;
    counter_rng rng(2024, 0);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u1 = 1.0 - rng.uniform01();
        const double u2 = rng.uniform01();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        const double x = std::min(z, c);
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    const auto exact = truncated_min_moments(c);
    REQUIRE(std::fabs(mean - exact.mean) < 5.0 * std::sqrt(exact.variance / n));
    REQUIRE(var == Catch::Approx(exact.variance).margin(0.01));
}

TEST_CASE("regularized incomplete gamma halves sum to one") {
    const double pairs[][2] = {{0.5, 0.3}, {2.0, 1.0}, {5.0, 10.0}, {10.0, 3.0}};
    for (const auto& ax : pairs) {
        REQUIRE(gamma_p(ax[0], ax[1]) + gamma_q(ax[0], ax[1]) ==
                Catch::Approx(1.0).epsilon(1e-12));
    }
    REQUIRE(gamma_p(1.0, 2.5) == Catch::Approx(-std::expm1(-2.5)).epsilon(1e-13));
    REQUIRE(gamma_p(3.0, 0.0) == 0.0);
    REQUIRE(gamma_q(3.0, 0.0) == 1.0);
    REQUIRE_THROWS_AS(gamma_p(0.0, 1.0), std::domain_error);
    REQUIRE_THROWS_AS(gamma_q(2.0, -1.0), std::domain_error);
}

TEST_CASE("chi-square tails computed from gamma match tabulated critical points") {
    // P(chi2_1 > 6.634897) = 0.01, P(chi2_4 > 13.2767) = 0.01
    REQUIRE(gamma_q(0.5, 6.6348966 / 2.0) == Catch::Approx(0.01).margin(2e-7));
    REQUIRE(gamma_q(2.0, 13.276704 / 2.0) == Catch::Approx(0.01).margin(2e-7));
}

TEST_CASE("poisson tail matches the direct sum") {
    const double lambda = 2.0;
    REQUIRE(poisson_tail_at_least(0, lambda) == 1.0);
    REQUIRE(poisson_tail_at_least(1, lambda) ==
            Catch::Approx(-std::expm1(-lambda)).epsilon(1e-12));
    REQUIRE(poisson_tail_at_least(2, lambda) ==
            Catch::Approx(1.0 - std::exp(-lambda) * (1.0 + lambda)).epsilon(1e-12));
    REQUIRE(poisson_tail_at_least(3, lambda) ==
            Catch::Approx(1.0 - std::exp(-lambda) * (1.0 + lambda + lambda * lambda / 2.0))
                .epsilon(1e-11));
}
