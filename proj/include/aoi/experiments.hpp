#pragma once

#include "aoi/simulator.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace aoi {

/// One sweep cell outcome. `param`/`value` name the swept quantity; `lambda`
/// is always the harvesting rate of the cell so tables are joinable without
/// parsing notes. Exact rows carry stderr 0 and horizon/replications 0.
struct SweepRow {
    std::string fingerprint;
    std::string param;
    double value = 0.0;
    double lambda = 0.0;
    std::string policy;
    std::string method;  // "exact" or "mc"
    double avg_aoi = 0.0;
    double stderr_aoi = 0.0;
    double avg_energy = 0.0;
    std::uint64_t seed = 0;
    long horizon = 0;
    int replications = 0;
    std::string note;
};

void write_rows_csv(const std::vector<SweepRow>& rows, std::ostream& out);
void write_rows_json(const std::vector<SweepRow>& rows, std::ostream& out);

/// Optimal-to-aggressive average-AoI ratio per swept value.
struct EfficiencyRow {
    std::string fingerprint;
    double lambda = 0.0;
    double exact_ratio = 0.0;
    std::optional<double> mc_ratio;
};

std::vector<EfficiencyRow> efficiency_table(const std::vector<SweepRow>& rows);
void write_efficiency_csv(const std::vector<EfficiencyRow>& rows, std::ostream& out);

/// Re-resolve a scenario at a different harvesting rate.
ScenarioConfig with_lambda(ScenarioConfig config, double lambda);

/// One solved cell of the cost-shape x age-shape grid.
struct ShapeGridCell {
    Shape cost_shape = Shape::linear;
    Shape age_shape = Shape::linear;
    double lambda = 0.0;
    ScenarioConfig scenario;
    PolicySolution solution;
};

/// Solves all nine shape combinations per harvesting rate. Explicit cost or
/// reliability overrides in the base are ignored here: the grid is about the
/// generated families.
std::vector<ShapeGridCell> run_shape_grid(const ScenarioConfig& base,
                                          const std::vector<double>& lambdas = {0.2, 0.6});

/// Solve + exact-evaluate optimal and aggressive per harvesting rate; when
/// with_simulation is set, Monte Carlo rows (config horizon/replications,
/// common random numbers) ride along for cross-checking.
std::vector<SweepRow> sweep_lambda(const ScenarioConfig& base,
                                   const std::vector<double>& lambdas,
                                   bool with_simulation = true);

/// Costs scaled by the factor (round half-up, floor 1, strict-monotonicity
/// repair). Throws when the scaled maximum exceeds the battery.
std::vector<int> scale_costs(const std::vector<int>& costs, double factor,
                             int battery_capacity);

/// Paired lambda sweeps for the base cost vector and the scaled one; sources
/// keep their age distributions, only prices change. Rows carry scale notes.
std::vector<SweepRow> sweep_cost_scale(const ScenarioConfig& base, double factor,
                                       const std::vector<double>& lambdas,
                                       bool with_simulation = false);

/// A lone source of the given cost; its reliability comes from the base age
/// shape anchored at p = 0.1 for cost 1.
ScenarioConfig single_source_scenario(const ScenarioConfig& base, int cost);

std::vector<SweepRow> sweep_single_source(const ScenarioConfig& base,
                                          const std::vector<int>& costs,
                                          const std::vector<double>& lambdas);

/// 1-based positions retained when shrinking a base_size source set. Sizes
/// reached by halving keep every other source and always retain the last
/// (so the subsets nest down to {first, last}); size 12 removes four interior
/// sources drawn from the seed.
std::vector<int> network_subset_positions(int base_size, int size, std::uint64_t seed);

/// Network-size sweep over subsets of the 16-source linear system; sources
/// keep their calibrated reliabilities when the set shrinks. The size-1 cell
/// uses the better of the two endpoint sources (per lambda and policy).
std::vector<SweepRow> sweep_network_size(const ScenarioConfig& base,
                                         const std::vector<int>& sizes,
                                         const std::vector<double>& lambdas,
                                         const std::vector<std::string>& policies);

}  // namespace aoi
