#pragma once

#include "aoi/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace aoi {

/// Rank-cost and cost-reliability curve families used throughout.
enum class Shape { superlinear, linear, sublinear };

Shape shape_from_string(const std::string& name);
std::string to_string(Shape shape);

/// One information source: what a query costs and how stale its updates are.
struct SourceSpec {
    int index = 1;            // 1-based position in the ordered source list
    int cost = 1;             // energy units per query
    double reliability = 1.0; // geometric parameter p of the age distribution
    Vector age_pmf;           // probabilities over update ages 1..age_max
};

/// Outcome of fitting the cost->reliability constant k to a target mean p.
struct CalibrationResult {
    Shape shape = Shape::linear;
    double k = 0.0;
    double achieved_mean_p = 0.0;
    std::vector<int> clamped_indices; // sources whose p was clamped to 1
    bool all_clamped = false;
    bool calibrated = false; // false when reliabilities were supplied verbatim
};

/// Whether queries the battery cannot afford are dropped from the action set
/// or kept as a unit-probability transition to (0, aoi_cap).
enum class InfeasibleQueryMode { mask, penalty };

/// Full system description. Scalar knobs come from the config file (or the
/// defaults below); the source list is materialized by resolve_scenario().
struct ScenarioConfig {
    int battery_capacity = 20;  // B
    int harvest_amount = 3;     // energy units per successful harvest
    double harvest_prob = 0.2;  // lambda
    int age_min = 1;            // alpha (fixed at 1)
    int age_max = 20;           // beta
    int aoi_cap = 30;           // delta_max
    int num_sources = 8;
    int cost_min = 1;
    int cost_max = 19;
    Shape cost_shape = Shape::linear;
    Shape age_shape = Shape::linear;
    double target_mean_p = 0.5;
    double vi_epsilon = 1e-6;
    long sim_horizon = 5000;    // T
    int sim_replications = 1000; // M
    std::uint64_t rng_seed = 1;
    InfeasibleQueryMode infeasible_query = InfeasibleQueryMode::mask;

    // Optional verbatim overrides; when set they replace the generated cost
    // vector / calibrated reliabilities.
    std::vector<int> explicit_costs;
    std::vector<double> explicit_reliabilities;

    // Filled in by resolve_scenario().
    std::vector<SourceSpec> sources;
    CalibrationResult calibration;
    std::string fingerprint;

    bool resolved() const { return !fingerprint.empty(); }
    std::vector<int> costs() const;
};

/// Strictly increasing integer costs on [c_min, c_max] following one of the
/// three rank curves. Rounding is half-up; collisions are repaired upward
/// (downward from the top on overflow). Endpoints are exact for n >= 2.
std::vector<int> generate_cost_vector(Shape shape, int n, int c_min, int c_max);

/// Duplicate-bumping repair used after any rounding step: values become
/// strictly increasing inside [lo, hi] or a ConfigError is thrown.
std::vector<int> strictly_increasing_repair(std::vector<int> values, int lo, int hi);

/// Finds k > 0 by bisection so that the mean of clamp(f_shape(k, c_i), 0, 1)
/// over sources equals target_mean_p. f is k*c^2 (sublinear), k*c (linear)
/// or k*log2(1+c) (superlinear); all are monotone in k, so the clamped mean
/// is too. Reaches the target within 1e-9 unless every source clamps.
CalibrationResult calibrate_reliability(Shape shape, const std::vector<int>& costs,
                                        double target_mean_p);

/// Reliability for a lone source of the given cost, anchored so that
/// cost anchor_cost maps to anchor_p under the same curve family.
double anchored_reliability(Shape shape, int cost, double anchor_p = 0.1,
                            int anchor_cost = 1);

/// Geometric pmf over ages 1..age_max-1 with the truncation tail mass on
/// age_max; entries renormalized to sum exactly to 1. Requires age_min == 1.
Vector truncated_geometric_pmf(double p, int age_min, int age_max);

/// Validates invariants and materializes costs, reliabilities, per-source
/// pmfs and the fingerprint. Throws ConfigError naming the offending field.
ScenarioConfig resolve_scenario(ScenarioConfig config);

/// Table-style defaults (B=20, [1,20] ages, e=3, n=8, costs in [1,19],
/// aoi cap 30), linear shapes, resolved and ready to use.
ScenarioConfig default_scenario();

/// Parses the flat key=value config format; missing keys keep defaults,
/// an empty file yields default_scenario(). Returns a resolved scenario.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(std::istream& in, const std::string& origin);

}  // namespace aoi
