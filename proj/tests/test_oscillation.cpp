// Tests for the periodic-fluctuation machinery: Fourier series evaluation,
// the direct lattice-sum evaluator, and the Gumbel fractional-part
// expectation, including dual-route agreement between independent
// derivations of the same quantity.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "trielab/oscillation.hpp"
#include "trielab/rng.hpp"
#include "trielab/source.hpp"
#include "trielab/theory.hpp"

using namespace trielab;

TEST_CASE("an empty oscillation evaluates to zero") {
    const fourier_oscillation none;
    REQUIRE(none.empty());
    REQUIRE(none(0.0) == 0.0);
    REQUIRE(none(1.7) == 0.0);
    REQUIRE(none.amplitude_bound() == 0.0);
}

TEST_CASE("oscillation series are periodic and bounded by their coefficient sum") {
    for (const auto& src :
         {source_params::from_lattice(1, 1), source_params::from_lattice(1, 2)}) {
        const fourier_oscillation psi = theory::depth_mean_oscillation(src);
        REQUIRE_FALSE(psi.empty());
        REQUIRE(psi.period() == src.span());
        // machine-precision series need only a handful of harmonics
        REQUIRE(psi.coefficients().size() <= 8);
        const double d = psi.period();
        double max_abs = 0.0;
        for (int i = 0; i < 64; ++i) {
            const double t = d * static_cast<double>(i) / 64.0;
            REQUIRE(psi(t) == Catch::Approx(psi(t + d)).margin(1e-12));
            REQUIRE(psi(t) == Catch::Approx(psi(t - 3.0 * d)).margin(1e-12));
            max_abs = std::max(max_abs, std::fabs(psi(t)));
        }
        REQUIRE(max_abs <= psi.amplitude_bound());
    }
}

TEST_CASE("build_oscillation trims negligible harmonics") {
    // coefficients 1e-3, 1e-12, 1e-21, ... : the third falls under the cutoff
    const auto series = build_oscillation(
        1.0, [](int m) { return std::complex<double>(std::pow(1e-9, m) * 1e6, 0.0); });
    REQUIRE(series.coefficients().size() == 2);
    REQUIRE(series.amplitude_bound() == Catch::Approx(2e-3 + 2e-12).epsilon(1e-12));
}

TEST_CASE("the lattice sum reproduces the geometric-series closed form") {
    // g(x) = e^x on x <= 0: d * sum_k g(kd - t) = d e^{-d frac(t/d)}/(1-e^{-d})
    const auto g = [](double x) { return x <= 0.0 ? std::exp(x) : 0.0; };
    for (double d : {std::numbers::ln2, 0.4812118250596035}) {
        const double scale = d / (1.0 - std::exp(-d));
        REQUIRE(key_renewal_sum(g, d, 0.0) == Catch::Approx(scale).epsilon(1e-10));
        for (double t : {0.1, 0.25, 0.49, 1.7, 6.283}) {
            const double frac = t / d - std::floor(t / d);
            REQUIRE(key_renewal_sum(g, d, t) ==
                    Catch::Approx(scale * std::exp(-d * frac)).epsilon(1e-9));
            // periodicity of the sum itself
            REQUIRE(key_renewal_sum(g, d, t + d) ==
                    Catch::Approx(key_renewal_sum(g, d, t)).margin(1e-10));
        }
    }
    // d = ln 2 at t = 0 is the worked constant 2 ln 2
    REQUIRE(key_renewal_sum(g, std::numbers::ln2, 0.0) ==
            Catch::Approx(2.0 * std::numbers::ln2).epsilon(1e-10));
}

TEST_CASE("trie-size fluctuation: lattice-sum route equals the Fourier route") {
    for (const auto& src :
         {source_params::from_lattice(1, 1), source_params::from_lattice(1, 2)}) {
        for (double lambda : {10.0, 100.0, 12345.0, 1e6}) {
            const double direct =
                theory::trie_size_per_string_by_lattice_sum(src, std::log(lambda));
            const double fourier = theory::trie_size_per_string(src, lambda).value;
            REQUIRE(direct == Catch::Approx(fourier).margin(1e-8));
        }
    }
    REQUIRE_THROWS_AS(theory::trie_size_per_string_by_lattice_sum(source_params(0.3), 1.0),
                      std::invalid_argument);
}

TEST_CASE("gumbel fractional-part expectation averages to one half over a period") {
    for (double d : {std::numbers::ln2, 0.4812118250596035}) {
        const int m = 257;  // prime > the largest retained harmonic
        double acc = 0.0;
        for (int j = 0; j < m; ++j)
            acc += frac_expectation_gumbel(d, d * static_cast<double>(j) / m);
        REQUIRE(acc / m == Catch::Approx(0.5).margin(1e-10));
        // and the function is d-periodic
        REQUIRE(frac_expectation_gumbel(d, 0.3) ==
                Catch::Approx(frac_expectation_gumbel(d, 0.3 + d)).margin(1e-12));
    }
}

TEST_CASE("gumbel fractional-part expectation matches direct sampling") {
    // -X0 standard Gumbel <=> X0 = -(-ln E), E ~ Exp(1); then
    // frac((u - X0)/d) = frac((u + G)/d) with G = -ln E.
    counter_rng rng(424242, 0);
    const int n = 200000;
    struct probe {
        double d, u;
    };
    for (const probe& pr : {probe{std::numbers::ln2, 0.3}, probe{0.4812118250596035, 0.1}}) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double gumbel = -std::log(rng.exponential());
            const double x = (pr.u + gumbel) / pr.d;
            acc += x - std::floor(x);
        }
        const double mc = acc / n;
        const double exact = frac_expectation_gumbel(pr.d, pr.u);
        // frac lives in [0,1): Var <= 1/12
        REQUIRE(std::fabs(mc - exact) < 5.0 * std::sqrt(1.0 / 12.0 / n));
    }
}

TEST_CASE("depth fluctuation: overshoot route equals the Fourier route") {
    for (const auto& src :
         {source_params::from_lattice(1, 1), source_params::from_lattice(1, 2)}) {
        const fourier_oscillation fourier = theory::depth_mean_oscillation(src);
        for (double t : {0.0, 0.2, 1.0, 4.5, 10.0}) {
            REQUIRE(theory::depth_mean_oscillation_by_overshoot(src, t) ==
                    Catch::Approx(fourier(t)).margin(1e-9));
        }
    }
    REQUIRE(theory::depth_mean_oscillation_by_overshoot(source_params(0.3), 1.0) == 0.0);
}
