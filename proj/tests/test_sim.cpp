// Tests for the Monte Carlo harness: determinism across thread counts,
// exact small-case laws, agreement between independent sampling routes,
// the comparison gate, tolerances and serialization.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "trielab/sim.hpp"
#include "trielab/tolerances.hpp"

using namespace trielab;
using Catch::Approx;

namespace {

experiment_spec base_spec(experiment_kind kind, double p, uint64_t seed,
                          uint64_t replicates) {
    experiment_spec spec;
    spec.kind = kind;
    spec.src = source_params(p);
    spec.seed = seed;
    spec.replicates = replicates;
    spec.threads = 1;
    return spec;
}

}  // namespace

TEST_CASE("replicates are a pure function of (spec, index)") {
    auto spec = base_spec(experiment_kind::depth, 0.3, 42, 200);
    spec.n = 64;
    const auto first = run_samples(spec);
    const auto second = run_samples(spec);
    REQUIRE(first == second);

    spec.threads = 4;
    REQUIRE(run_samples(spec) == first);

    spec.threads = 1;
    const auto summary = run(spec);
    REQUIRE(summary.replicates == 200);
    REQUIRE(summary.mean == stat_summary::from_samples(first).mean);
    REQUIRE_FALSE(summary.histogram.empty());  // depth is integer-valued
}

TEST_CASE("shared-dictionary kinds are thread-count invariant too") {
    auto spec = base_spec(experiment_kind::tunstall_len, 0.6, 7, 64);
    spec.M = 64;
    const auto serial = run_samples(spec);
    spec.threads = 4;
    REQUIRE(run_samples(spec) == serial);
}

TEST_CASE("a single-string trie has zero depth and passes its gate") {
    auto spec = base_spec(experiment_kind::depth, 0.3, 5, 50);
    spec.n = 1;
    for (double x : run_samples(spec)) REQUIRE(x == 0.0);
    const auto c = evaluate(spec);
    REQUIRE(c.predicted.regime == "degenerate");
    REQUIRE(c.z == 0.0);
    REQUIRE(c.pass);
}

TEST_CASE("two-string depth follows the first-disagreement law") {
    // p = 1/2: E = 2, Var = 2; p = 0.3: geometric with success 2pq
    struct tc {
        double p, mean, var;
    };
    for (const tc t : {tc{0.5, 2.0, 2.0}, tc{0.3, 1.0 / 0.42, 0.58 / (0.42 * 0.42)}}) {
        auto spec = base_spec(experiment_kind::depth, t.p, 2024, 20000);
        spec.n = 2;
        spec.threads = 0;  // exercise the default thread pool
        const auto s = run(spec);
        REQUIRE(s.mean == Approx(t.mean).margin(5.0 * std::sqrt(t.var / 20000.0)));
    }
}

TEST_CASE("imbalance minus bias-scaled depth averages to zero") {
    // Optional stopping makes E(imbalance - (p-q) depth) exactly 0 at any n;
    // both kinds see the same strings at equal (seed, replicate).
    auto dspec = base_spec(experiment_kind::depth, 0.7, 99, 4000);
    dspec.n = 256;
    auto ispec = dspec;
    ispec.kind = experiment_kind::imbalance;
    const double dmean = run(dspec).mean;
    const double imean = run(ispec).mean;
    REQUIRE(imean - 0.4 * dmean == Approx(0.0).margin(0.29));
}

TEST_CASE("trie depth and its delayed-renewal representation share one law") {
    auto trie_spec = base_spec(experiment_kind::depth, 0.5, 1111, 2000);
    trie_spec.n = 256;
    auto renewal_spec = base_spec(experiment_kind::depth_via_renewal, 0.5, 2222, 2000);
    renewal_spec.n = 256;
    const auto ks = two_sample_ks(run_samples(trie_spec), run_samples(renewal_spec));
    REQUIRE(ks.pass);
}

TEST_CASE("threshold phrase-length samples equal a hand-driven walk") {
    auto spec = base_spec(experiment_kind::khodak_len, 0.3, 99, 500);
    spec.R = 20.0;
    const auto samples = run_samples(spec);
    for (uint64_t r = 0; r < 500; ++r) {
        const string_handle s = sample_string(spec.src, spec.seed, r << 32);
        REQUIRE(samples[r] ==
                static_cast<double>(sim_detail::khodak_first_passage(spec.src, s, 20.0)));
    }
    // with commensurable steps the samples equal a materialized dictionary's
    // greedy parse, boundary ties included
    auto gspec = spec;
    gspec.src = source_params::from_lattice(1, 2);
    gspec.R = 10.0;
    gspec.replicates = 100;
    const auto gsamples = run_samples(gspec);
    const dictionary gdict = dictionary::khodak(gspec.src, 10.0);
    for (uint64_t r = 0; r < 100; ++r) {
        const string_handle s = sample_string(gspec.src, gspec.seed, r << 32);
        REQUIRE(gsamples[r] == static_cast<double>(gdict.phrase_length_at(s, 1)));
    }
}

TEST_CASE("parse-count prediction is the exact renewal convolution") {
    // Dictionary at p = 0.6 with five phrases {00, 01, 10, 110, 111}: parsing
    // the first 6 letters needs bits 1..8 at most, so an exhaustive weighted
    // enumeration of 2^8 bit patterns is a complete oracle for E K_6.
    auto spec = base_spec(experiment_kind::parse_count, 0.6, 0, 1);
    spec.M = 5;
    spec.n = 6;
    double expect = 0.0;
    for (uint32_t pattern = 0; pattern < 256; ++pattern) {
        uint8_t bits[8];
        double weight = 1.0;
        for (int i = 0; i < 8; ++i) {
            bits[i] = (pattern >> i) & 1u;
            weight *= bits[i] ? 0.6 : 0.4;
        }
        uint32_t covered = 0, phrases = 0;
        while (covered < 6) {
            // greedy parse: 0? and 10 have length 2, 11? has length 3
            covered += (bits[covered] == 1 && bits[covered + 1] == 1) ? 3 : 2;
            ++phrases;
        }
        expect += weight * static_cast<double>(phrases);
    }
    const auto pred = predict_for(spec);
    REQUIRE(pred.value == Approx(expect).margin(1e-12));
    REQUIRE(pred.regime == "exact-convolution");
    REQUIRE(pred.oscillation == 0.0);
}

TEST_CASE("parse-count runs pass their gate and obey the renewal LLN") {
    auto spec = base_spec(experiment_kind::parse_count, 0.6, 31415, 2000);
    spec.M = 5;
    spec.n = 400;
    spec.threads = 0;
    const auto c = evaluate(spec);
    REQUIRE(c.pass);
    // phrases per letter approach 1 / (mean phrase length) = 1/2.36
    REQUIRE(c.empirical.mean / 400.0 == Approx(1.0 / 2.36).margin(0.002));
}

TEST_CASE("deterministic stopped walks hit their predictions exactly") {
    auto spec = base_spec(experiment_kind::stopped_walk, 0.5, 8, 100);
    spec.K = 5;
    spec.V = 3.5;
    const auto s = run(spec);
    REQUIRE(s.mean == 4.0);
    REQUIRE(s.variance == 0.0);
    REQUIRE(s.histogram.size() == 1);
    REQUIRE(s.histogram.at(4) == 100);
    const auto c = evaluate(spec);
    REQUIRE(c.z == 0.0);
    REQUIRE(c.pass);

    // cap far below the wall: every replicate exits at K + 1
    auto capped = base_spec(experiment_kind::stopped_walk, 0.7, 8, 100);
    capped.K = 10;
    capped.V = 300.0;
    for (double x : run_samples(capped)) REQUIRE(x == 11.0);
    const auto cc = evaluate(capped);
    REQUIRE(cc.predicted.regime == "capped");
    REQUIRE(cc.pass);
}

TEST_CASE("single-slot buckets are always exactly full") {
    auto spec = base_spec(experiment_kind::btrie_occupancy, 0.3, 4, 50);
    spec.n = 50;
    spec.bucket = 1;
    spec.occupancy_j = 1;
    for (double x : run_samples(spec)) REQUIRE(x == 1.0);
    // A zero-variance sample makes the z gate infinitely strict, and the
    // prediction here is 1 only up to series truncation, so check the values
    // directly rather than the gate verdict.
    REQUIRE(predict_for(spec).value == Approx(1.0).margin(1e-12));
}

TEST_CASE("poissonized sizes tolerate empty draws") {
    auto spec = base_spec(experiment_kind::trie_size, 0.3, 12, 50);
    spec.poissonized = true;
    spec.lambda = 0.01;  // most replicates sample zero strings
    const auto samples = run_samples(spec);
    for (double x : samples) {
        REQUIRE(std::isfinite(x));
        REQUIRE(x >= 0.0);
    }
    REQUIRE(run(spec).histogram.empty());  // ratio statistic: no histogram
}

TEST_CASE("the comparison gate needs both a z pass and an absolute pass") {
    stat_summary s;
    s.replicates = 100;
    s.mean = 1.0;
    s.std_error = 0.0;
    theory::prediction hit{1.0, 1.0, 0.0, "x"};
    theory::prediction miss{1.5, 1.5, 0.0, "x"};

    SECTION("zero spread, exact hit: z defined as 0") {
        const auto c = compare(s, hit, 0.1, 3.0);
        REQUIRE(c.z == 0.0);
        REQUIRE(c.pass);
    }
    SECTION("zero spread, any miss: infinite z, fail") {
        const auto c = compare(s, miss, 10.0, 3.0);
        REQUIRE(std::isinf(c.z));
        REQUIRE(c.z < 0.0);
        REQUIRE_FALSE(c.pass);
    }
    SECTION("significant bias fails even inside the absolute band") {
        s.std_error = 0.01;
        const auto c = compare(s, theory::prediction{1.04, 1.04, 0.0, "x"}, 0.1, 3.0);
        REQUIRE(c.z == Approx(-4.0).epsilon(1e-12));
        REQUIRE_FALSE(c.pass);
    }
    SECTION("small z and small difference pass together") {
        s.mean = 1.02;
        s.std_error = 0.01;
        const auto c = compare(s, hit, 0.05, 3.0);
        REQUIRE(c.z == Approx(2.0).epsilon(1e-12));
        REQUIRE(c.pass);
    }
}

TEST_CASE("csv serialization is stable field for field") {
    REQUIRE(csv_header() ==
            "kind,p,arith,size_param,replicates,mean,stderr,variance,predicted,osc,z,pass");
    auto spec = base_spec(experiment_kind::depth, 0.5, 1, 3);
    spec.n = 2;
    const auto summary = stat_summary::from_samples({2.0, 2.0, 2.0}, true);
    const theory::prediction pred{2.5, 2.5, 0.0, "non-arithmetic"};
    const auto c = compare(summary, pred, 0.1, 3.0);
    REQUIRE(csv_row(spec, c) == "depth,0.5,none,2,3,2,0,0,2.5,0,-inf,0");
}

TEST_CASE("json reports carry the gate verdict, regime and histogram") {
    auto spec = base_spec(experiment_kind::depth, 0.5, 1, 3);
    spec.n = 2;
    spec.src = source_params::from_lattice(1, 2);
    const auto summary = stat_summary::from_samples({2.0, 2.0, 2.0}, true);
    const theory::prediction pred{2.5, 2.5, 0.0, "arithmetic"};
    const auto report = json_report(spec, compare(summary, pred, 0.1, 3.0));
    REQUIRE(report.find("\"pass\":false") != std::string::npos);
    REQUIRE(report.find("\"histogram\":[[2,1]]") != std::string::npos);
    REQUIRE(report.find("\"regime\":\"arithmetic\"") != std::string::npos);
    REQUIRE(report.find("\"arith\":\"1:2\"") != std::string::npos);
    REQUIRE(report.find("\"z_crit\":3") != std::string::npos);

    spec.src = source_params(0.5);
    const auto plain = json_report(spec, compare(summary, pred, 0.1, 3.0));
    REQUIRE(plain.find("\"arith\":null") != std::string::npos);
}

TEST_CASE("specs are validated before any work happens") {
    auto spec = base_spec(experiment_kind::depth, 0.3, 1, 10);
    spec.n = 4;
    spec.poissonized = true;  // only size kinds may poissonize
    REQUIRE_THROWS_AS(run_samples(spec), std::invalid_argument);

    auto patricia = base_spec(experiment_kind::patricia_depth, 0.3, 1, 10);
    patricia.n = 1;
    REQUIRE_THROWS_AS(run_samples(patricia), std::invalid_argument);

    auto occ = base_spec(experiment_kind::btrie_occupancy, 0.3, 1, 10);
    occ.bucket = 2;
    occ.occupancy_j = 3;
    occ.n = 50;
    REQUIRE_THROWS_AS(run_samples(occ), std::invalid_argument);
    occ.occupancy_j = 2;
    occ.n = 2;  // need n >= b + 1
    REQUIRE_THROWS_AS(run_samples(occ), std::invalid_argument);

    auto kh = base_spec(experiment_kind::khodak_len, 0.3, 1, 10);
    kh.R = 1.0;
    REQUIRE_THROWS_AS(run_samples(kh), std::invalid_argument);

    auto tu = base_spec(experiment_kind::tunstall_len, 0.3, 1, 10);
    tu.M = 1;
    REQUIRE_THROWS_AS(run_samples(tu), std::invalid_argument);

    auto pc = base_spec(experiment_kind::parse_count, 0.3, 1, 10);
    pc.M = 5;
    pc.n = 0;
    REQUIRE_THROWS_AS(run_samples(pc), std::invalid_argument);

    auto walk = base_spec(experiment_kind::stopped_walk, 0.3, 1, 10);
    walk.K = 5;
    walk.V = 0.0;
    REQUIRE_THROWS_AS(run_samples(walk), std::invalid_argument);

    auto none = base_spec(experiment_kind::depth, 0.3, 1, 0);
    none.n = 4;
    REQUIRE_THROWS_AS(run_samples(none), std::invalid_argument);
}

TEST_CASE("kind names roundtrip through the parser") {
    for (int k = 0; k <= static_cast<int>(experiment_kind::depth_via_renewal); ++k) {
        const auto kind = static_cast<experiment_kind>(k);
        experiment_kind parsed{};
        REQUIRE(parse_kind(kind_name(kind), parsed));
        REQUIRE(parsed == kind);
    }
    experiment_kind parsed{};
    REQUIRE_FALSE(parse_kind("no-such-kind", parsed));
}

TEST_CASE("frozen tolerance profile tol/v1") {
    REQUIRE(std::string(tolerance_version) == "tol/v1");
    REQUIRE(default_gate(experiment_kind::depth).abs_const == 0.10);
    REQUIRE(default_gate(experiment_kind::trie_size).abs_const == 0.02);
    REQUIRE(default_gate(experiment_kind::insert).abs_const == 0.05);
    REQUIRE(default_gate(experiment_kind::parse_count).abs_rel == 0.01);
    for (int k = 0; k <= static_cast<int>(experiment_kind::depth_via_renewal); ++k)
        REQUIRE(default_gate(static_cast<experiment_kind>(k)).z_crit == 3.0);

    // the walk tolerance widens with the wall distance
    auto walk = base_spec(experiment_kind::stopped_walk, 0.3, 1, 10);
    walk.K = 655;
    walk.V = 400.0 / std::numbers::ln2;
    const auto g = default_gate(walk.kind);
    REQUIRE(resolve_abs_tol(g, walk, 123.0) == Approx(0.05 + 0.05 * 20.0).epsilon(1e-12));

    auto depth = base_spec(experiment_kind::depth, 0.3, 1, 10);
    depth.n = 100;
    REQUIRE(resolve_abs_tol(default_gate(depth.kind), depth, 123.0) == 0.10);

    auto parse = base_spec(experiment_kind::parse_count, 0.3, 1, 10);
    parse.M = 5;
    parse.n = 100;
    REQUIRE(resolve_abs_tol(default_gate(parse.kind), parse, 200.0) ==
            Approx(0.5 + 2.0).epsilon(1e-12));
}
