#pragma once

// ============================================================================
// Comparison gates, version "tol/v1".
//
// Every simulate run is judged by two gates, both required:
//   |z| <= z_crit          where z = (mean - predicted) / stderr,
//   |mean - predicted| <= abs_tol.
// The z gate catches statistically significant bias; the absolute gate keeps
// a huge replicate count from failing on a physically irrelevant difference
// (and vice versa: a tiny replicate count from passing on pure noise).
//
// abs_tol is resolved per experiment kind as
//   abs_const + abs_rel * |predicted| + abs_sqrt * sqrt(scale)
// where `scale` is the walk wall position in nats (V ln 2) for the stopped
// walk and 0 elsewhere.  Values are frozen; changing any of them is a version
// bump.
// ============================================================================

#include <cmath>
#include <numbers>

#include "sim.hpp"

namespace trielab {

inline constexpr char tolerance_version[] = "tol/v1";

struct gate_params {
    double z_crit;
    double abs_const;
    double abs_rel;   // fraction of |predicted value|
    double abs_sqrt;  // multiplies sqrt(V ln 2), stopped walk only
};

[[nodiscard]] inline gate_params default_gate(experiment_kind kind) {
    switch (kind) {
        case experiment_kind::depth:
        case experiment_kind::depth_via_renewal:
        case experiment_kind::patricia_depth:
        case experiment_kind::imbalance:
            return {3.0, 0.10, 0.0, 0.0};
        case experiment_kind::trie_size:
        case experiment_kind::btrie_occupancy:
            return {3.0, 0.02, 0.0, 0.0};
        case experiment_kind::insert:
        case experiment_kind::khodak_len:
        case experiment_kind::tunstall_len:
            return {3.0, 0.05, 0.0, 0.0};
        case experiment_kind::parse_count:
            return {3.0, 0.50, 0.01, 0.0};
        case experiment_kind::stopped_walk:
            return {3.0, 0.05, 0.0, 0.05};
    }
    return {3.0, 0.10, 0.0, 0.0};
}

[[nodiscard]] inline double resolve_abs_tol(const gate_params& g, const experiment_spec& spec,
                                            double predicted) {
    double tol = g.abs_const + g.abs_rel * std::fabs(predicted);
    if (spec.kind == experiment_kind::stopped_walk)
        tol += g.abs_sqrt * std::sqrt(spec.V * std::numbers::ln2);
    return tol;
}

// One-stop evaluation used by the CLI: run, predict, gate.
[[nodiscard]] inline comparison evaluate(const experiment_spec& spec) {
    const stat_summary summary = run(spec);
    const theory::prediction predicted = predict_for(spec);
    const gate_params g = default_gate(spec.kind);
    return compare(summary, predicted, resolve_abs_tol(g, spec, predicted.value), g.z_crit);
}

}  // namespace trielab
