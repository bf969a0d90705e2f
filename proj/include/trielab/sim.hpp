#pragma once

// ============================================================================
// Seeded Monte Carlo harness.
//
// An experiment_spec names a statistic (one replicate = one sample), the
// source, size parameters, replicate count and base seed.  run() executes the
// replicates (optionally across threads), reduces them in replicate order and
// returns a stat_summary; the result is bit-identical for any thread count
// because replicate r depends only on (base seed, r).
//
// Seed discipline: replicate r uses string ids (r << 32) | i for its i-th
// string (i < 2^31) and auxiliary randomness (Poisson sizes, renewal-route
// draws, dither) from streams (r << 32) | 2^31 | tag, so no generator state
// is ever shared or reused across replicates.
// ============================================================================

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "codes.hpp"
#include "rng.hpp"
#include "source.hpp"
#include "stats.hpp"
#include "theory.hpp"
#include "trie.hpp"

namespace trielab {

enum class experiment_kind : uint8_t {
    depth,             // leaf depth of string 0 in a 1-per-leaf trie of n strings
    patricia_depth,    // same string's depth after path compression
    imbalance,         // ones - zeros along string 0's root path
    trie_size,         // internal nodes per string (optionally Poisson-sized)
    btrie_occupancy,   // Z_j / n for a bucket trie of capacity b
    insert,            // internal nodes created when string n joins n strings
    khodak_len,        // first-passage phrase length at threshold R
    tunstall_len,      // phrase length under an M-phrase dictionary
    parse_count,       // phrases needed to cover the first N letters
    stopped_walk,      // exit index of the two-boundary walk
    depth_via_renewal, // depth sampled from its exact delayed-renewal law
};

[[nodiscard]] inline const char* kind_name(experiment_kind k) {
    switch (k) {
        case experiment_kind::depth: return "depth";
        case experiment_kind::patricia_depth: return "patricia-depth";
        case experiment_kind::imbalance: return "imbalance";
        case experiment_kind::trie_size: return "trie-size";
        case experiment_kind::btrie_occupancy: return "btrie-occupancy";
        case experiment_kind::insert: return "insert";
        case experiment_kind::khodak_len: return "khodak-len";
        case experiment_kind::tunstall_len: return "tunstall-len";
        case experiment_kind::parse_count: return "parse-count";
        case experiment_kind::stopped_walk: return "stopped-walk";
        case experiment_kind::depth_via_renewal: return "depth-via-renewal";
    }
    return "unknown";
}

[[nodiscard]] inline bool parse_kind(const std::string& name, experiment_kind& out) {
    for (int k = 0; k <= static_cast<int>(experiment_kind::depth_via_renewal); ++k) {
        const auto kk = static_cast<experiment_kind>(k);
        if (name == kind_name(kk)) {
            out = kk;
            return true;
        }
    }
    return false;
}

struct experiment_spec {
    experiment_kind kind = experiment_kind::depth;
    source_params src = source_params(0.5);
    uint64_t n = 0;           // string count (trie kinds) / letters to cover (parse)
    double lambda = 0.0;      // Poisson intensity (poissonized size kinds)
    double R = 0.0;           // Khodak threshold
    uint64_t M = 0;           // Tunstall dictionary size
    uint64_t K = 0;           // walk step cap
    double V = 0.0;           // walk wall position (in units of ln 2)
    uint32_t bucket = 1;      // bucket capacity b
    uint32_t occupancy_j = 1; // which Z_j the occupancy kind reports
    uint64_t replicates = 1;
    uint64_t seed = 0;
    bool poissonized = false;
    uint32_t threads = 0;     // 0 = all available cores
};

namespace sim_detail {

inline constexpr uint64_t aux_stream_bit = uint64_t{1} << 31;

[[nodiscard]] inline counter_rng aux_rng(const experiment_spec& spec, uint64_t replicate,
                                         uint64_t tag) {
    return counter_rng(spec.seed, (replicate << 32) | aux_stream_bit | tag);
}

[[nodiscard]] inline std::vector<string_handle> make_strings(const experiment_spec& spec,
                                                             uint64_t replicate,
                                                             uint64_t count) {
    std::vector<string_handle> out;
    out.reserve(count);
    for (uint64_t i = 0; i < count; ++i)
        out.push_back(sample_string(spec.src, spec.seed, (replicate << 32) | i));
    return out;
}

// First-passage walk used by khodak_len: mirrors the dictionary's boundary
// rule exactly (integer-lattice comparison for arithmetic sources, 1e-12 log
// slack otherwise), so parsing with a materialized dictionary would give the
// identical length on the same bits.
[[nodiscard]] inline uint64_t khodak_first_passage(const source_params& src,
                                                   const string_handle& s, double R) {
    const double log_R = std::log(R);
    if (src.arithmetic()) {
        const int64_t threshold = static_cast<int64_t>(std::floor(log_R / src.span() + 1e-9));
        int64_t ones = 0, zeros = 0;
        uint64_t k = 0;
        while (src.lattice_index(ones, zeros) <= threshold) {
            ++k;
            (s.bit_at(k) ? ones : zeros) += 1;
        }
        return k;
    }
    double neg_log = 0.0;
    uint64_t k = 0;
    while (neg_log <= log_R + 1e-12) {
        ++k;
        neg_log -= s.bit_at(k) ? src.log_p() : src.log_q();
    }
    return k;
}

[[nodiscard]] inline uint64_t stopped_walk_exit(const source_params& src,
                                                const string_handle& s, uint64_t K,
                                                double V) {
    if (src.p() == 0.5) {
        // every step is exactly ln 2; computing the exit index directly avoids
        // spurious one-step jitter from accumulated rounding
        const double exact = std::min(static_cast<double>(K), std::floor(V)) + 1.0;
        return static_cast<uint64_t>(exact);
    }
    const double wall = V * std::numbers::ln2;
    double sum = 0.0;
    uint64_t n = 0;
    for (;;) {
        ++n;
        if (n > K) return n;
        sum -= s.bit_at(n) ? src.log_p() : src.log_q();
        if (sum > wall) return n;
    }
}

[[nodiscard]] inline uint64_t depth_by_renewal(const experiment_spec& spec,
                                               uint64_t replicate) {
    counter_rng rng = aux_rng(spec, replicate, 1);
    const double gumbel_floor = rng.max_of_exponentials(spec.n - 1);
    double sum = 0.0;
    uint64_t k = 0;
    while (sum <= gumbel_floor) {
        ++k;
        sum -= rng.bernoulli(spec.src.p()) ? spec.src.log_p() : spec.src.log_q();
    }
    return k;
}

inline void validate(const experiment_spec& spec) {
    if (spec.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
    const bool size_kind = spec.kind == experiment_kind::trie_size ||
                           spec.kind == experiment_kind::btrie_occupancy;
    if (spec.poissonized && !size_kind)
        throw std::invalid_argument("poissonized mode applies to size/occupancy kinds only");
    switch (spec.kind) {
        case experiment_kind::depth:
        case experiment_kind::imbalance:
            if (spec.n < 1) throw std::invalid_argument("need n >= 1");
            break;
        case experiment_kind::patricia_depth:
            if (spec.n < 2) throw std::invalid_argument("patricia needs n >= 2");
            break;
        case experiment_kind::depth_via_renewal:
            if (spec.n < 2) throw std::invalid_argument("renewal depth needs n >= 2");
            break;
        case experiment_kind::trie_size:
            if (spec.poissonized ? !(spec.lambda > 0.0) : spec.n < 1)
                throw std::invalid_argument("need lambda > 0 or n >= 1");
            break;
        case experiment_kind::btrie_occupancy:
            if (spec.bucket < 1 || spec.occupancy_j < 1 || spec.occupancy_j > spec.bucket)
                throw std::invalid_argument("need 1 <= j <= b");
            if (spec.poissonized ? !(spec.lambda > 0.0) : spec.n < spec.bucket + 1)
                throw std::invalid_argument("need lambda > 0 or n >= b + 1");
            break;
        case experiment_kind::insert:
            if (spec.n < 1) throw std::invalid_argument("need n >= 1");
            break;
        case experiment_kind::khodak_len:
            if (!(spec.R > 1.0)) throw std::invalid_argument("need R > 1");
            break;
        case experiment_kind::tunstall_len:
            if (spec.M < 2) throw std::invalid_argument("need M >= 2");
            break;
        case experiment_kind::parse_count:
            if (spec.M < 2 || spec.n < 1)
                throw std::invalid_argument("need M >= 2 and n >= 1");
            break;
        case experiment_kind::stopped_walk:
            if (!(spec.V > 0.0)) throw std::invalid_argument("need V > 0");
            break;
    }
}

// `shared` carries state built once per run and read-only across replicates.
struct shared_state {
    const dictionary* dict = nullptr;
};

[[nodiscard]] inline double run_one(const experiment_spec& spec, const shared_state& shared,
                                    uint64_t r) {
    switch (spec.kind) {
        case experiment_kind::depth: {
            const auto strings = make_strings(spec, r, spec.n);
            const binary_trie t(strings, 1);
            return static_cast<double>(t.depth_of(0));
        }
        case experiment_kind::patricia_depth: {
            const auto strings = make_strings(spec, r, spec.n);
            const binary_trie t(strings, 1);
            const patricia_trie pt = patricia_trie::from_trie(t);
            return static_cast<double>(pt.depth_of(0, strings));
        }
        case experiment_kind::imbalance: {
            const auto strings = make_strings(spec, r, spec.n);
            const binary_trie t(strings, 1);
            return static_cast<double>(t.imbalance_of(0));
        }
        case experiment_kind::trie_size: {
            const uint64_t count = spec.poissonized
                                       ? aux_rng(spec, r, 0).poisson(spec.lambda)
                                       : spec.n;
            const double denom =
                spec.poissonized ? spec.lambda : static_cast<double>(spec.n);
            if (count == 0) return 0.0;
            const auto strings = make_strings(spec, r, count);
            const binary_trie t(strings, 1);
            return static_cast<double>(t.internal_count()) / denom;
        }
        case experiment_kind::btrie_occupancy: {
            const uint64_t count = spec.poissonized
                                       ? aux_rng(spec, r, 0).poisson(spec.lambda)
                                       : spec.n;
            const double denom =
                spec.poissonized ? spec.lambda : static_cast<double>(spec.n);
            if (count == 0) return 0.0;
            const auto strings = make_strings(spec, r, count);
            const binary_trie t(strings, spec.bucket);
            const auto z = t.occupancy_profile();
            uint64_t mass = 0;
            for (uint32_t j = 1; j <= spec.bucket; ++j)
                mass += static_cast<uint64_t>(j) * z[j - 1];
            if (mass != count)
                throw std::logic_error("occupancy conservation violated");
            return static_cast<double>(z[spec.occupancy_j - 1]) / denom;
        }
        case experiment_kind::insert: {
            const auto strings = make_strings(spec, r, spec.n + 1);
            binary_trie t(strings, 1, spec.n);
            const auto res = t.insert(static_cast<uint32_t>(spec.n));
            return static_cast<double>(res.new_internals);
        }
        case experiment_kind::khodak_len: {
            const string_handle s = sample_string(spec.src, spec.seed, (r << 32));
            return static_cast<double>(khodak_first_passage(spec.src, s, spec.R));
        }
        case experiment_kind::tunstall_len: {
            const string_handle s = sample_string(spec.src, spec.seed, (r << 32));
            return static_cast<double>(shared.dict->phrase_length_at(s, 1));
        }
        case experiment_kind::parse_count: {
            const string_handle s = sample_string(spec.src, spec.seed, (r << 32));
            return static_cast<double>(shared.dict->cover_count(s, spec.n));
        }
        case experiment_kind::stopped_walk: {
            const string_handle s = sample_string(spec.src, spec.seed, (r << 32));
            return static_cast<double>(stopped_walk_exit(spec.src, s, spec.K, spec.V));
        }
        case experiment_kind::depth_via_renewal:
            return static_cast<double>(depth_by_renewal(spec, r));
    }
    throw std::logic_error("unreachable");
}

}  // namespace sim_detail

[[nodiscard]] inline bool integer_valued(experiment_kind k) {
    return k != experiment_kind::trie_size && k != experiment_kind::btrie_occupancy;
}

// Raw per-replicate samples, indexed by replicate.  Identical for any thread
// count: replicate r is a pure function of (spec, r).
[[nodiscard]] inline std::vector<double> run_samples(const experiment_spec& spec) {
    sim_detail::validate(spec);

    sim_detail::shared_state shared;
    std::optional<dictionary> dict;
    if (spec.kind == experiment_kind::tunstall_len ||
        spec.kind == experiment_kind::parse_count) {
        dict.emplace(dictionary::tunstall(spec.src, spec.M));
        shared.dict = &*dict;
    }

    std::vector<double> results(spec.replicates);
    uint32_t threads = spec.threads ? spec.threads : std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
    threads = static_cast<uint32_t>(
        std::min<uint64_t>(threads, spec.replicates));

    if (threads <= 1) {
        for (uint64_t r = 0; r < spec.replicates; ++r)
            results[r] = sim_detail::run_one(spec, shared, r);
    } else {
        std::atomic<uint64_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(threads);
        std::exception_ptr failure;
        std::mutex failure_mutex;
        for (uint32_t w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                try {
                    for (;;) {
                        const uint64_t r = next.fetch_add(1, std::memory_order_relaxed);
                        if (r >= spec.replicates) break;
                        results[r] = sim_detail::run_one(spec, shared, r);
                    }
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }
    return results;
}

[[nodiscard]] inline stat_summary run(const experiment_spec& spec) {
    return stat_summary::from_samples(run_samples(spec), integer_valued(spec.kind));
}

// The asymptotic prediction matching a spec (what run() should approach).
[[nodiscard]] inline theory::prediction predict_for(const experiment_spec& spec) {
    using theory::prediction;
    const double n = static_cast<double>(spec.n);
    switch (spec.kind) {
        case experiment_kind::depth:
        case experiment_kind::depth_via_renewal:
            if (spec.n == 1) return prediction{0.0, 0.0, 0.0, "degenerate"};
            return theory::depth_mean(spec.src, n);
        case experiment_kind::patricia_depth:
            return theory::patricia_depth_mean(spec.src, n);
        case experiment_kind::imbalance:
            if (spec.n == 1) return prediction{0.0, 0.0, 0.0, "degenerate"};
            return theory::imbalance_mean(spec.src, n);
        case experiment_kind::trie_size:
            return theory::trie_size_per_string(
                spec.src, spec.poissonized ? spec.lambda : n);
        case experiment_kind::btrie_occupancy:
            return theory::bucket_occupancy_fraction(
                spec.src, spec.bucket, spec.occupancy_j,
                spec.poissonized ? spec.lambda : n);
        case experiment_kind::insert:
            return theory::insertion_mean_new_nodes(spec.src, n);
        case experiment_kind::khodak_len:
            return theory::khodak_length_mean(spec.src, spec.R);
        case experiment_kind::tunstall_len:
            return theory::tunstall_length_mean(spec.src, static_cast<double>(spec.M));
        case experiment_kind::parse_count: {
            // Exact expectation by renewal convolution over the dictionary's
            // length distribution: E K_N = sum_{t=0}^{N-1} u(t) with
            // u(t) = sum_len mass(len) u(t - len), u(0) = 1.
            const dictionary dict = dictionary::tunstall(spec.src, spec.M);
            std::vector<double> mass;  // mass[len]
            for (const auto& w : dict.phrases()) {
                if (w.size() >= mass.size()) mass.resize(w.size() + 1, 0.0);
                mass[w.size()] += dict.source().prefix_probability(w);
            }
            std::vector<double> u(spec.n, 0.0);
            double expect = 0.0;
            for (uint64_t t = 0; t < spec.n; ++t) {
                double ut = (t == 0) ? 1.0 : 0.0;
                if (t > 0) {
                    const uint64_t lmax = std::min<uint64_t>(t, mass.size() - 1);
                    for (uint64_t len = 1; len <= lmax; ++len)
                        if (mass[len] > 0.0) ut += mass[len] * u[t - len];
                }
                u[t] = ut;
                expect += ut;
            }
            return prediction{expect, expect, 0.0, "exact-convolution"};
        }
        case experiment_kind::stopped_walk: {
            const auto w = theory::stopped_walk(spec.src, spec.K, spec.V);
            return prediction{w.mean, w.mean, 0.0, w.regime};
        }
    }
    throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// comparison gate and serialization
// ---------------------------------------------------------------------------

struct comparison {
    stat_summary empirical;
    theory::prediction predicted;
    double z = 0.0;
    double abs_tol = 0.0;
    double z_crit = 0.0;
    bool pass = false;
};

// Two gates, both required: |z| <= z_crit and |mean - value| <= abs_tol.
[[nodiscard]] inline comparison compare(const stat_summary& summary,
                                        const theory::prediction& predicted,
                                        double abs_tol, double z_crit) {
    comparison c;
    c.empirical = summary;
    c.predicted = predicted;
    const double diff = summary.mean - predicted.value;
    if (summary.std_error > 0.0) {
        c.z = diff / summary.std_error;
    } else {
        c.z = diff == 0.0 ? 0.0
                          : std::numeric_limits<double>::infinity() * (diff > 0 ? 1 : -1);
    }
    c.abs_tol = abs_tol;
    c.z_crit = z_crit;
    c.pass = std::fabs(c.z) <= z_crit && std::fabs(diff) <= abs_tol;
    return c;
}

namespace sim_detail {

[[nodiscard]] inline std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

[[nodiscard]] inline double size_param(const experiment_spec& spec) {
    switch (spec.kind) {
        case experiment_kind::trie_size:
        case experiment_kind::btrie_occupancy:
            return spec.poissonized ? spec.lambda : static_cast<double>(spec.n);
        case experiment_kind::khodak_len: return spec.R;
        case experiment_kind::tunstall_len: return static_cast<double>(spec.M);
        case experiment_kind::stopped_walk: return spec.V;
        default: return static_cast<double>(spec.n);
    }
}

}  // namespace sim_detail

[[nodiscard]] inline std::string csv_header() {
    return "kind,p,arith,size_param,replicates,mean,stderr,variance,predicted,osc,z,pass";
}

[[nodiscard]] inline std::string csv_row(const experiment_spec& spec, const comparison& c) {
    using sim_detail::fmt;
    std::string arith = "none";
    if (spec.src.arithmetic()) {
        arith = std::to_string(spec.src.lattice().a) + ":" +
                std::to_string(spec.src.lattice().b);
    }
    std::string row;
    row += kind_name(spec.kind);
    row += "," + fmt(spec.src.p());
    row += "," + arith;
    row += "," + fmt(sim_detail::size_param(spec));
    row += "," + std::to_string(spec.replicates);
    row += "," + fmt(c.empirical.mean);
    row += "," + fmt(c.empirical.std_error);
    row += "," + fmt(c.empirical.variance);
    row += "," + fmt(c.predicted.value);
    row += "," + fmt(c.predicted.oscillation);
    row += "," + fmt(c.z);
    row += std::string(",") + (c.pass ? "1" : "0");
    return row;
}

// JSON object with the same fields plus the regime, gates and histogram.
[[nodiscard]] inline std::string json_report(const experiment_spec& spec,
                                             const comparison& c) {
    using sim_detail::fmt;
    std::string arith = "null";
    if (spec.src.arithmetic()) {
        arith = "\"" + std::to_string(spec.src.lattice().a) + ":" +
                std::to_string(spec.src.lattice().b) + "\"";
    }
    std::string out = "{";
    out += "\"kind\":\"" + std::string(kind_name(spec.kind)) + "\"";
    out += ",\"p\":" + fmt(spec.src.p());
    out += ",\"arith\":" + arith;
    out += ",\"size_param\":" + fmt(sim_detail::size_param(spec));
    out += ",\"replicates\":" + std::to_string(spec.replicates);
    out += ",\"mean\":" + fmt(c.empirical.mean);
    out += ",\"stderr\":" + fmt(c.empirical.std_error);
    out += ",\"variance\":" + fmt(c.empirical.variance);
    out += ",\"predicted\":" + fmt(c.predicted.value);
    out += ",\"osc\":" + fmt(c.predicted.oscillation);
    out += ",\"z\":" + fmt(c.z);
    out += std::string(",\"pass\":") + (c.pass ? "true" : "false");
    out += ",\"regime\":\"" + c.predicted.regime + "\"";
    out += ",\"abs_tol\":" + fmt(c.abs_tol);
    out += ",\"z_crit\":" + fmt(c.z_crit);
    out += ",\"histogram\":[";
    bool first = true;
    for (const auto& [value, mass] : c.empirical.histogram_masses()) {
        if (!first) out += ",";
        first = false;
        out += "[" + std::to_string(value) + "," + fmt(mass) + "]";
    }
    out += "]}";
    return out;
}

}  // namespace trielab
