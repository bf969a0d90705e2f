#pragma once

// ============================================================================
// Memoryless binary source.
//
// Letters are i.i.d. Bernoulli: P(1) = p, P(0) = q = 1-p.  The per-letter
// log-weight X = -ln P(letter) drives everything downstream, so the source
// carries its moments: H = E X (entropy, nats), H2 = E X^2, Var X = H2 - H^2.
//
// A source is *arithmetic* when ln p / ln q = a/b for coprime integers a,b;
// then X lives on the lattice d*Z with span d = |ln p|/a = |ln q|/b and all
// asymptotics pick up d-periodic oscillations.  Floating point cannot decide
// rationality, so the classification is strictly opt-in: construct with an
// (a,b) hint (verified against p) or from the exact lattice equation.  A
// separate advisory probe can flag "p looks arithmetic" for diagnostics; it
// never reclassifies.
// ============================================================================

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "trielab/rng.hpp"

namespace trielab {

// ---------------------------------------------------------------------------
// arithmetic classification
// ---------------------------------------------------------------------------

struct lattice_info {
    std::uint32_t a = 0;  // |ln p| = a*d
    std::uint32_t b = 0;  // |ln q| = b*d
    double span = 0.0;    // d
};

// Root of p^b = (1-p)^a on (0,1); unique since b*ln p - a*ln(1-p) is strictly
// increasing.  (1,1) -> exactly 1/2; a < b forces p > 1/2.
[[nodiscard]] inline double solve_lattice_probability(std::uint32_t a, std::uint32_t b) {
    if (a == 0 || b == 0) throw std::invalid_argument("lattice ratio terms must be positive");
    if (std::gcd(a, b) != 1) throw std::invalid_argument("lattice ratio must be coprime");
    if (a == b) return 0.5;
    const double da = a, db = b;
    auto g = [&](double p) { return db * std::log(p) - da * std::log1p(-p); };
    double lo = 1e-12, hi = 1.0 - 1e-12;
    double p = 0.5;
    for (int it = 0; it < 200; ++it) {
        const double gp = g(p);
        if (gp > 0.0) hi = p;
        else lo = p;
        const double step = gp / (db / p + da / (1.0 - p));  // Newton
        double next = p - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection fallback
        if (next == p) break;
        p = next;
    }
    const double residual = std::pow(p, db) - std::pow(1.0 - p, da);
    if (std::fabs(residual) > 1e-14) throw std::runtime_error("lattice probability solve failed");
    return p;
}

class source_params {
public:
    // Non-arithmetic (default) classification.
    explicit source_params(double p) : source_params(p, std::nullopt) {}

    // Opt-in arithmetic classification; (a,b) must match ln p/ln q = a/b
    // within 1e-9 and be coprime.
    source_params(double p, std::uint32_t a, std::uint32_t b)
        : source_params(p, std::make_optional(std::pair{a, b})) {}

    // Arithmetic source built directly from the lattice equation.
    [[nodiscard]] static source_params from_lattice(std::uint32_t a, std::uint32_t b) {
        return {solve_lattice_probability(a, b), a, b};
    }

    [[nodiscard]] double p() const noexcept { return p_; }
    [[nodiscard]] double q() const noexcept { return q_; }
    [[nodiscard]] double log_p() const noexcept { return log_p_; }
    [[nodiscard]] double log_q() const noexcept { return log_q_; }
    // E X, E X^2 and Var X for the letter weight X = -ln P(letter), in nats.
    [[nodiscard]] double entropy() const noexcept { return h_; }
    [[nodiscard]] double second_log_moment() const noexcept { return h2_; }
    [[nodiscard]] double step_variance() const noexcept { return var_; }

    [[nodiscard]] bool arithmetic() const noexcept { return lattice_.has_value(); }
    [[nodiscard]] const lattice_info& lattice() const {
        if (!lattice_) throw std::logic_error("source is not arithmetic-classified");
        return *lattice_;
    }
    [[nodiscard]] double span() const { return lattice().span; }

    // Signed integer lattice index of a prefix with `ones` ones and `zeros`
    // zeros: -ln P = (ones*a + zeros*b) * d.  Arithmetic sources only.
    [[nodiscard]] std::int64_t lattice_index(std::uint64_t ones, std::uint64_t zeros) const {
        const auto& l = lattice();
        return static_cast<std::int64_t>(ones) * l.a + static_cast<std::int64_t>(zeros) * l.b;
    }

    [[nodiscard]] double prefix_log_probability(const std::vector<std::uint8_t>& bits) const noexcept {
        double s = 0.0;
        for (std::uint8_t bit : bits) s += bit ? log_p_ : log_q_;
        return s;
    }
    [[nodiscard]] double prefix_probability(const std::vector<std::uint8_t>& bits) const noexcept {
        return std::exp(prefix_log_probability(bits));
    }

private:
    source_params(double p, std::optional<std::pair<std::uint32_t, std::uint32_t>> hint) {
        if (!(p > 0.0 && p < 1.0)) throw std::domain_error("p must lie in (0,1)");
        p_ = p;
        q_ = 1.0 - p;
        log_p_ = std::log(p_);
        log_q_ = std::log(q_);
        h_ = -(p_ * log_p_ + q_ * log_q_);
        h2_ = p_ * log_p_ * log_p_ + q_ * log_q_ * log_q_;
        var_ = h2_ - h_ * h_;
        if (hint) {
            const auto [a, b] = *hint;
            if (a == 0 || b == 0) throw std::invalid_argument("lattice ratio terms must be positive");
            if (std::gcd(a, b) != 1) throw std::invalid_argument("lattice ratio must be coprime");
            const double ratio = log_p_ / log_q_;
            const double target = static_cast<double>(a) / static_cast<double>(b);
            if (std::fabs(ratio - target) > 1e-9)
                throw std::invalid_argument("lattice hint does not match p (|ln p/ln q - a/b| > 1e-9)");
            lattice_ = lattice_info{a, b, -log_p_ / static_cast<double>(a)};
        }
    }

    double p_, q_, log_p_, log_q_, h_, h2_, var_;
    std::optional<lattice_info> lattice_;
};

// Advisory probe: does ln p/ln q sit within `tol` of a fraction a/b with
// denominator at most `max_den`?  Walks continued-fraction convergents of
// the ratio.  Diagnostic only -- callers may warn, never reclassify.
[[nodiscard]] inline std::optional<std::pair<std::uint32_t, std::uint32_t>>
probe_lattice_ratio(double p, std::uint32_t max_den = 64, double tol = 1e-9) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("p must lie in (0,1)");
    const double x = std::log(p) / std::log1p(-p);  // a/b candidate, > 0
    std::uint64_t h0 = 1, h1 = static_cast<std::uint64_t>(std::floor(x));
    std::uint64_t k0 = 0, k1 = 1;
    double frac = x - std::floor(x);
    for (int it = 0; it < 64; ++it) {
        if (h1 >= 1 && k1 <= max_den &&
            std::fabs(x - static_cast<double>(h1) / static_cast<double>(k1)) <= tol) {
            return std::pair{static_cast<std::uint32_t>(h1), static_cast<std::uint32_t>(k1)};
        }
        if (frac < 1e-15) break;
        const double inv = 1.0 / frac;
        const auto digit = static_cast<std::uint64_t>(std::floor(inv));
        frac = inv - std::floor(inv);
        const std::uint64_t h2 = digit * h1 + h0;
        const std::uint64_t k2 = digit * k1 + k0;
        h0 = h1; h1 = h2;
        k0 = k1; k1 = k2;
        if (k1 > max_den) break;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// string handles
// ---------------------------------------------------------------------------

// Lazily materialized infinite random bit string.  Bit k (1-indexed) is the
// pure function  indicator( u53(rng_word(seed, id, k-1)) < p ), cached in a
// packed buffer so sequential scans touch each word once.  Materialization
// mutates the cache, so access is exclusive-per-handle; distinct handles are
// freely usable from distinct threads.
class string_handle {
public:
    string_handle(std::uint64_t seed, std::uint64_t id, double p) noexcept
        : seed_(seed), id_(id), p_(p) {}

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t id() const noexcept { return id_; }

    // k is 1-indexed; k = 0 is an error.
    [[nodiscard]] bool bit_at(std::uint64_t k) const {
        if (k == 0) throw std::out_of_range("bit index is 1-based");
        const std::uint64_t word = (k - 1) >> 6;
        while (words_.size() <= word) {
            const std::uint64_t base = static_cast<std::uint64_t>(words_.size()) << 6;
            std::uint64_t packed = 0;
            for (int i = 0; i < 64; ++i) {
                const double u = static_cast<double>(rng_word(seed_, id_, base + i) >> 11) * 0x1.0p-53;
                if (u < p_) packed |= (1ULL << i);
            }
            words_.push_back(packed);
        }
        return (words_[word] >> ((k - 1) & 63)) & 1ULL;
    }

    [[nodiscard]] std::uint64_t materialized_bits() const noexcept { return words_.size() * 64; }

    [[nodiscard]] std::vector<std::uint8_t> prefix(std::uint64_t n) const {
        std::vector<std::uint8_t> out(n);
        for (std::uint64_t k = 1; k <= n; ++k) out[k - 1] = bit_at(k) ? 1 : 0;
        return out;
    }

private:
    std::uint64_t seed_, id_;
    double p_;
    mutable std::vector<std::uint64_t> words_;
};

[[nodiscard]] inline string_handle sample_string(const source_params& src, std::uint64_t seed,
                                                 std::uint64_t id) noexcept {
    return {seed, id, src.p()};
}

}  // namespace trielab
