#pragma once

// ============================================================================
// Statistics utilities for the Monte Carlo harness:
//
//   * stat_summary: mean / unbiased variance / standard error, plus an exact
//     integer histogram for lattice-valued statistics.
//   * two-sample Kolmogorov-Smirnov test (1% level).
//   * Anderson-Darling normality test with estimated mean and variance
//     (Stephens' "case 4": modified statistic A^2 (1 + 0.75/n + 2.25/n^2),
//     1% critical value 1.092).  Integer-valued data should be dithered with
//     U[0,1) noise before testing; the harness does that.
//   * chi-square goodness of fit against fully specified cell probabilities,
//     merging low-expectation tail cells (E >= 5 rule), p-value from the
//     regularized incomplete gamma.
// ============================================================================

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "special_functions.hpp"

namespace trielab {

struct stat_summary {
    uint64_t replicates = 0;
    double mean = 0.0;
    double variance = 0.0;   // unbiased sample variance
    double std_error = 0.0;  // sqrt(variance / replicates)
    std::map<int64_t, uint64_t> histogram;  // exact counts; empty for non-integer data

    [[nodiscard]] static stat_summary from_samples(const std::vector<double>& xs,
                                                   bool integer_histogram = false) {
        if (xs.empty()) throw std::invalid_argument("no samples");
        stat_summary s;
        s.replicates = xs.size();
        // Welford, in sample order: deterministic regardless of how the
        // samples were produced.
        double mean = 0.0, m2 = 0.0;
        uint64_t k = 0;
        for (double x : xs) {
            ++k;
            const double delta = x - mean;
            mean += delta / static_cast<double>(k);
            m2 += delta * (x - mean);
        }
        s.mean = mean;
        s.variance = xs.size() > 1 ? m2 / static_cast<double>(xs.size() - 1) : 0.0;
        s.std_error = std::sqrt(s.variance / static_cast<double>(xs.size()));
        if (integer_histogram) {
            for (double x : xs) s.histogram[static_cast<int64_t>(std::llround(x))] += 1;
        }
        return s;
    }

    // Normalized masses (sum to 1) for serialization.
    [[nodiscard]] std::vector<std::pair<int64_t, double>> histogram_masses() const {
        std::vector<std::pair<int64_t, double>> out;
        out.reserve(histogram.size());
        for (const auto& [v, c] : histogram)
            out.emplace_back(v, static_cast<double>(c) / static_cast<double>(replicates));
        return out;
    }
};

// ---------------------------------------------------------------------------
// two-sample Kolmogorov-Smirnov
// ---------------------------------------------------------------------------

struct ks_result {
    double statistic = 0.0;  // sup |F1 - F2|
    double critical = 0.0;   // 1% threshold: 1.6276 sqrt((n+m)/(n m))
    bool pass = false;       // statistic below the threshold
};

[[nodiscard]] inline ks_result two_sample_ks(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("empty KS sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    ks_result r;
    r.statistic = d;
    r.critical = 1.6276 * std::sqrt((na + nb) / (na * nb));
    r.pass = r.statistic < r.critical;
    return r;
}

// ---------------------------------------------------------------------------
// Anderson-Darling normality (estimated parameters)
// ---------------------------------------------------------------------------

struct ad_result {
    double a2 = 0.0;           // raw statistic
    double a2_modified = 0.0;  // small-sample modification
    double critical = 1.092;   // 1% level for the modified statistic
    bool pass = false;
};

[[nodiscard]] inline ad_result anderson_darling_normality(std::vector<double> xs) {
    const size_t n = xs.size();
    if (n < 8) throw std::invalid_argument("need at least 8 samples");
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) throw std::invalid_argument("degenerate sample");
    std::sort(xs.begin(), xs.end());
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double lo = norm_cdf((xs[i] - mean) / sd);
        const double hi = norm_cdf((xs[n - 1 - i] - mean) / sd);
        const double u = std::clamp(lo, 1e-300, 1.0 - 1e-16);
        const double v = std::clamp(1.0 - hi, 1e-300, 1.0 - 1e-16);
        acc += (2.0 * static_cast<double>(i) + 1.0) * (std::log(u) + std::log(v));
    }
    ad_result r;
    r.a2 = -static_cast<double>(n) - acc / static_cast<double>(n);
    const double dn = static_cast<double>(n);
    r.a2_modified = r.a2 * (1.0 + 0.75 / dn + 2.25 / (dn * dn));
    r.pass = r.a2_modified < r.critical;
    return r;
}

// ---------------------------------------------------------------------------
// chi-square goodness of fit (fully specified cell probabilities)
// ---------------------------------------------------------------------------

struct chi_square_result {
    double statistic = 0.0;
    uint64_t dof = 0;
    double p_value = 1.0;
    bool pass = false;  // p-value above the 1% level
};

// `observed[i]` pairs with cell probability `expected_probs[i]`; cells are
// merged from the high end until every expected count is >= 5 (the final
// cell absorbs everything beyond, so probabilities may sum to < 1; the
// remainder is folded into the last cell).
[[nodiscard]] inline chi_square_result chi_square_goodness(
    const std::vector<uint64_t>& observed, std::vector<double> expected_probs) {
    if (observed.size() != expected_probs.size() || observed.empty())
        throw std::invalid_argument("observed/expected size mismatch");
    uint64_t total = 0;
    for (uint64_t o : observed) total += o;
    if (total == 0) throw std::invalid_argument("no observations");
    double tail = 1.0;
    for (double p : expected_probs) tail -= p;
    if (tail < -1e-9) throw std::invalid_argument("cell probabilities exceed 1");
    expected_probs.back() += std::max(0.0, tail);

    std::vector<double> exp_counts;
    std::vector<double> obs_counts;
    for (size_t i = 0; i < observed.size(); ++i) {
        exp_counts.push_back(expected_probs[i] * static_cast<double>(total));
        obs_counts.push_back(static_cast<double>(observed[i]));
    }
    // merge from the tail until all expectations reach 5
    while (exp_counts.size() > 1 && exp_counts.back() < 5.0) {
        exp_counts[exp_counts.size() - 2] += exp_counts.back();
        obs_counts[obs_counts.size() - 2] += obs_counts.back();
        exp_counts.pop_back();
        obs_counts.pop_back();
    }
    if (exp_counts.size() < 2) throw std::invalid_argument("too few usable cells");
    double x2 = 0.0;
    for (size_t i = 0; i < exp_counts.size(); ++i) {
        const double diff = obs_counts[i] - exp_counts[i];
        x2 += diff * diff / exp_counts[i];
    }
    chi_square_result r;
    r.statistic = x2;
    r.dof = exp_counts.size() - 1;
    r.p_value = gamma_q(static_cast<double>(r.dof) / 2.0, x2 / 2.0);
    r.pass = r.p_value > 0.01;
    return r;
}

}  // namespace trielab
