#pragma once

// ============================================================================
// Periodic fluctuation terms.
//
// For a memoryless source whose two step sizes are commensurable
// (|ln p| = a*d, |ln q| = b*d with gcd(a,b) = 1), the first-order asymptotics
// of the structures studied here pick up a bounded oscillation that is
// periodic in t with period d.  Each such term is a Fourier series
//
//     psi(t) = sum_{m != 0} c_m e^{2 pi i m t / d},   c_{-m} = conj(c_m),
//
// whose coefficients are Mellin-type transforms of a structure-specific
// kernel evaluated at the lattice points s_m = -2 pi m / d.  This header
// provides:
//
//   * fourier_oscillation: stores d and c_1..c_K, evaluates the real series.
//   * key_renewal_sum: the direct lattice sum  d * sum_k g(k d - t)  used as
//     an independent cross-check of the Fourier route in tests.
//   * frac_expectation_gumbel: E frac((t - X0)/d) when -X0 is Gumbel,
//     needed for the exact distributional representation of trie depth.
// ============================================================================

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "special_functions.hpp"

namespace trielab {

class fourier_oscillation {
public:
    fourier_oscillation() = default;
    fourier_oscillation(double period, std::vector<std::complex<double>> coeffs)
        : period_(period), coeffs_(std::move(coeffs)) {}

    [[nodiscard]] double period() const noexcept { return period_; }
    [[nodiscard]] const std::vector<std::complex<double>>& coefficients() const noexcept {
        return coeffs_;
    }
    [[nodiscard]] bool empty() const noexcept { return coeffs_.empty(); }

    // psi(t) = 2 * sum_{m>=1} Re(c_m e^{2 pi i m t / d}); coefficients for
    // negative m follow by conjugate symmetry because psi is real-valued.
    [[nodiscard]] double operator()(double t) const noexcept {
        if (coeffs_.empty() || period_ <= 0.0) return 0.0;
        const double omega = 2.0 * std::numbers::pi * t / period_;
        double acc = 0.0;
        for (std::size_t m = 0; m < coeffs_.size(); ++m) {
            const double phase = omega * static_cast<double>(m + 1);
            acc += 2.0 * (coeffs_[m].real() * std::cos(phase) -
                          coeffs_[m].imag() * std::sin(phase));
        }
        return acc;
    }

    // Upper bound sum |psi| <= 2 * sum |c_m|.
    [[nodiscard]] double amplitude_bound() const noexcept {
        double acc = 0.0;
        for (const auto& c : coeffs_) acc += 2.0 * std::abs(c);
        return acc;
    }

private:
    double period_ = 0.0;
    std::vector<std::complex<double>> coeffs_;
};

// Builds the series from a coefficient generator m -> c_m (m >= 1), stopping
// once |c_m| falls below `cutoff` (and always by `max_terms`).  The gamma
// factor in every coefficient used here decays like e^{-pi^2 m / d}, so a
// handful of terms reaches full double precision.
[[nodiscard]] inline fourier_oscillation build_oscillation(
    double period, const std::function<std::complex<double>(int)>& coefficient,
    double cutoff = 1e-18, int max_terms = 64) {
    std::vector<std::complex<double>> coeffs;
    for (int m = 1; m <= max_terms; ++m) {
        const std::complex<double> c = coefficient(m);
        coeffs.push_back(c);
        if (std::abs(c) < cutoff) break;
    }
    // trim trailing negligible entries
    while (!coeffs.empty() && std::abs(coeffs.back()) < cutoff) coeffs.pop_back();
    return fourier_oscillation(period, std::move(coeffs));
}

// Direct lattice sum  d * sum_{k : k d > t - window} g(k d - t)  with g
// supported (up to a negligible tail) on a finite window.  `g` must decay
// fast in both directions; summation stops when 64 consecutive terms
// contribute below 1e-15 relative.  Used in tests to validate the Fourier
// coefficients row by row: for kernels g with integral 0 over the mean
// correction, psi(t) = d * sum_k g(kd - t) - integral(g).
[[nodiscard]] inline double key_renewal_sum(const std::function<double(double)>& g,
                                            double d, double t) {
    double acc = 0.0;
    // walk upward from the smallest k with kd - t > -60 (kernel tails vanish)
    const long long k_lo = static_cast<long long>(std::floor((t - 60.0) / d));
    int quiet = 0;
    for (long long k = k_lo; quiet < 64; ++k) {
        const double term = g(static_cast<double>(k) * d - t);
        acc += term;
        if (std::fabs(term) < 1e-15 * (std::fabs(acc) + 1e-300) &&
            static_cast<double>(k) * d - t > 0.0) {
            ++quiet;
        } else {
            quiet = 0;
        }
        if (static_cast<double>(k) * d - t > 800.0) break;  // hard stop
    }
    return d * acc;
}

// E frac((t - X0)/d) where -X0 has the standard Gumbel distribution
// (P(-X0 <= x) = exp(-e^{-x})):
//     1/2 + (1/d) * sum_{k != 0} Gamma(-2 pi i k / d) e^{2 pi i k t / d}.
// Arises as the mean fractional part of the delayed renewal overshoot when
// the delay is the maximum of n-1 exponentials minus ln n.
[[nodiscard]] inline double frac_expectation_gumbel(double d, double t) {
    double acc = 0.5;
    for (int k = 1; k <= 64; ++k) {
        const double w = 2.0 * std::numbers::pi * static_cast<double>(k) / d;
        const std::complex<double> g = complex_gamma(std::complex<double>(0.0, -w));
        const std::complex<double> phase(std::cos(w * t), std::sin(w * t));
        const double term = 2.0 * (g * phase).real() / d;
        acc += term;
        if (std::abs(g) / d < 1e-18) break;
    }
    return acc;
}

}  // namespace trielab
