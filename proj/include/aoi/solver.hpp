#pragma once

#include "aoi/mdp.hpp"
#include "aoi/types.hpp"

#include <iosfwd>
#include <vector>

namespace aoi {

/// Optimal stationary deterministic policy plus solver diagnostics.
struct PolicySolution {
    std::vector<Action> policy;      // action per state
    Vector values;                   // relative values, values(s0) == 0
    double gain = 0.0;               // long-run average AoI of the policy
    double gain_lower = 0.0;         // final Bellman-difference bracket
    double gain_upper = 0.0;
    long iterations = 0;
    std::vector<double> span_trace;  // span of successive differences
};

/// Long-run behavior of one stationary policy, computed from the chain it
/// induces (no sampling).
struct EvaluationResult {
    double gain = 0.0;
    Vector stationary_distribution;
    double avg_energy_per_slot = 0.0;
    std::vector<double> source_usage;  // frequency per action id 0..n
    long iterations = 0;
    double residual = 0.0;
};

struct SolveOptions {
    double epsilon = 1e-6;
    long max_iterations = 1000000;
};

/// Relative value iteration with the span stopping rule: iterate
/// v(s) = min_a r(s,a) + sum P(s'|s,a) V(s'), normalize against state 0,
/// stop when span(v - V_prev) < epsilon. Ties break toward idle, then the
/// cheapest source. The reported gain comes from exact evaluation of the
/// extracted policy; the final difference bracket is kept alongside.
PolicySolution relative_value_iteration(const TransitionModel& model,
                                        const SolveOptions& options = {});

/// Stationary distribution reachable from the canonical start (b=0, aoi=cap)
/// by fixed-point iteration (tolerance 1e-12, damping 0.5 once the residual
/// stops contracting), then gain, energy spend and action frequencies under it.
EvaluationResult evaluate_policy_exact(const std::vector<Action>& policy,
                                       const TransitionModel& model);

/// Per battery level, the largest age delta_u such that every age <= delta_u
/// idles, plus whether idling is exactly an age prefix in that column.
struct ThresholdSummary {
    std::vector<int> idle_threshold;        // delta_u(b), 0 if none
    std::vector<bool> threshold_structured; // column is idle-prefix shaped
};

ThresholdSummary extract_thresholds(const std::vector<Action>& policy,
                                    int battery_capacity, int aoi_cap);

/// Policy map export, one row per state: battery,aoi,action (0 = idle).
void write_policy_map_csv(const std::vector<Action>& policy, int battery_capacity,
                          int aoi_cap, std::ostream& out);

}  // namespace aoi
