#include "aoi/experiments.hpp"

#include "aoi/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace aoi {

namespace {

constexpr Shape kShapeOrder[3] = {Shape::superlinear, Shape::linear, Shape::sublinear};

std::string join_ints(const std::vector<int>& v, char sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += std::to_string(v[i]);
    }
    return out;
}

SweepRow exact_row(const ScenarioConfig& cfg, const std::string& param, double value,
                   const std::string& policy, const EvaluationResult& eval,
                   std::string note = {}) {
    SweepRow row;
    row.fingerprint = cfg.fingerprint;
    row.param = param;
    row.value = value;
    row.lambda = cfg.harvest_prob;
    row.policy = policy;
    row.method = "exact";
    row.avg_aoi = eval.gain;
    row.avg_energy = eval.avg_energy_per_slot;
    row.seed = cfg.rng_seed;
    row.note = std::move(note);
    return row;
}

SweepRow mc_row(const ScenarioConfig& cfg, const std::string& param, double value,
                const SimulationMetrics& metrics, std::string note = {}) {
    SweepRow row;
    row.fingerprint = cfg.fingerprint;
    row.param = param;
    row.value = value;
    row.lambda = cfg.harvest_prob;
    row.policy = metrics.policy_name;
    row.method = "mc";
    row.avg_aoi = metrics.avg_aoi;
    row.stderr_aoi = metrics.stderr_aoi;
    row.avg_energy = metrics.avg_energy_per_slot;
    row.seed = metrics.seed;
    row.horizon = metrics.horizon;
    row.replications = metrics.replications;
    row.note = std::move(note);
    return row;
}

// Solve + evaluate the two reference policies for one cell; appends two
// exact rows, and two common-random-number MC rows when asked.
void append_cell(std::vector<SweepRow>& rows, const ScenarioConfig& cfg,
                 const std::string& param, double value, bool with_simulation,
                 const std::string& note = {}) {
    const TransitionModel model = build_transition_model(cfg);
    const PolicySolution solution = relative_value_iteration(model, {cfg.vi_epsilon});
    const DecisionRule aggressive = aggressive_rule(cfg);

    const EvaluationResult opt = evaluate_policy_exact(solution.policy, model);
    const EvaluationResult agg =
        evaluate_policy_exact(materialize(aggressive, cfg), model);
    rows.push_back(exact_row(cfg, param, value, "optimal", opt, note));
    rows.push_back(exact_row(cfg, param, value, "aggressive", agg, note));

    if (with_simulation) {
        const DecisionRule optimal = optimal_rule(solution, cfg);
        rows.push_back(mc_row(cfg, param, value,
                              simulate(optimal, cfg, cfg.sim_horizon,
                                       cfg.sim_replications, cfg.rng_seed),
                              note));
        rows.push_back(mc_row(cfg, param, value,
                              simulate(aggressive, cfg, cfg.sim_horizon,
                                       cfg.sim_replications, cfg.rng_seed),
                              note));
    }
}

}  // namespace

ScenarioConfig with_lambda(ScenarioConfig config, double lambda) {
    config.harvest_prob = lambda;
    return resolve_scenario(std::move(config));
}

void write_rows_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "fingerprint,param,value,lambda,policy,method,avg_aoi,stderr_aoi,"
           "avg_energy,seed,horizon,replications,note\n";
    for (const auto& r : rows) {
        out << r.fingerprint << ',' << r.param << ',' << format_double(r.value) << ','
            << format_double(r.lambda) << ',' << r.policy << ',' << r.method << ','
            << format_double(r.avg_aoi) << ',' << format_double(r.stderr_aoi) << ','
            << format_double(r.avg_energy) << ',' << r.seed << ',' << r.horizon << ','
            << r.replications << ',' << r.note << '\n';
    }
}

void write_rows_json(const std::vector<SweepRow>& rows, std::ostream& out) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json item;
        item["fingerprint"] = r.fingerprint;
        item["param"] = r.param;
        item["value"] = r.value;
        item["lambda"] = r.lambda;
        item["policy"] = r.policy;
        item["method"] = r.method;
        item["avg_aoi"] = r.avg_aoi;
        item["stderr_aoi"] = r.stderr_aoi;
        item["avg_energy"] = r.avg_energy;
        item["seed"] = r.seed;
        item["horizon"] = r.horizon;
        item["replications"] = r.replications;
        item["note"] = r.note;
        doc.push_back(std::move(item));
    }
    out << doc.dump(2) << '\n';
}

std::vector<EfficiencyRow> efficiency_table(const std::vector<SweepRow>& rows) {
    struct Cell {
        std::string fingerprint;
        double opt_exact = 0, agg_exact = 0, opt_mc = 0, agg_mc = 0;
        bool has_mc_opt = false, has_mc_agg = false;
    };
    std::map<double, Cell> cells;
    for (const auto& r : rows) {
        Cell& cell = cells[r.lambda];
        cell.fingerprint = r.fingerprint;
        if (r.method == "exact" && r.policy == "optimal") cell.opt_exact = r.avg_aoi;
        if (r.method == "exact" && r.policy == "aggressive") cell.agg_exact = r.avg_aoi;
        if (r.method == "mc" && r.policy == "optimal") {
            cell.opt_mc = r.avg_aoi;
            cell.has_mc_opt = true;
        }
        if (r.method == "mc" && r.policy == "aggressive") {
            cell.agg_mc = r.avg_aoi;
            cell.has_mc_agg = true;
        }
    }
    std::vector<EfficiencyRow> out;
    for (const auto& [lambda, cell] : cells) {
        EfficiencyRow row;
        row.fingerprint = cell.fingerprint;
        row.lambda = lambda;
        row.exact_ratio = cell.agg_exact > 0 ? cell.opt_exact / cell.agg_exact : 0.0;
        if (cell.has_mc_opt && cell.has_mc_agg && cell.agg_mc > 0)
            row.mc_ratio = cell.opt_mc / cell.agg_mc;
        out.push_back(row);
    }
    return out;
}

void write_efficiency_csv(const std::vector<EfficiencyRow>& rows, std::ostream& out) {
    out << "fingerprint,lambda,efficiency_exact,efficiency_mc\n";
    for (const auto& r : rows) {
        out << r.fingerprint << ',' << format_double(r.lambda) << ','
            << format_double(r.exact_ratio) << ',';
        if (r.mc_ratio) out << format_double(*r.mc_ratio);
        out << '\n';
    }
}

std::vector<ShapeGridCell> run_shape_grid(const ScenarioConfig& base,
                                          const std::vector<double>& lambdas) {
    if (lambdas.empty()) throw ConfigError("shape grid: empty lambda list");
    std::vector<ShapeGridCell> cells;
    for (double lambda : lambdas) {
        for (Shape cost_shape : kShapeOrder) {
            for (Shape age_shape : kShapeOrder) {
                ScenarioConfig cfg = base;
                cfg.explicit_costs.clear();
                cfg.explicit_reliabilities.clear();
                cfg.cost_shape = cost_shape;
                cfg.age_shape = age_shape;
                cfg.harvest_prob = lambda;
                cfg = resolve_scenario(std::move(cfg));

                ShapeGridCell cell;
                cell.cost_shape = cost_shape;
                cell.age_shape = age_shape;
                cell.lambda = lambda;
                cell.solution = relative_value_iteration(build_transition_model(cfg),
                                                         {cfg.vi_epsilon});
                cell.scenario = std::move(cfg);
                cells.push_back(std::move(cell));
            }
        }
    }
    return cells;
}

std::vector<SweepRow> sweep_lambda(const ScenarioConfig& base,
                                   const std::vector<double>& lambdas,
                                   bool with_simulation) {
    if (lambdas.empty()) throw ConfigError("sweep: empty lambda grid");
    std::vector<SweepRow> rows;
    for (double lambda : lambdas) {
        const ScenarioConfig cfg = with_lambda(base, lambda);
        append_cell(rows, cfg, "lambda", lambda, with_simulation);
    }
    return rows;
}

std::vector<int> scale_costs(const std::vector<int>& costs, double factor,
                             int battery_capacity) {
    if (!(factor > 0.0) || !std::isfinite(factor))
        throw ConfigError("cost scale factor must be positive and finite");
    std::vector<int> scaled;
    scaled.reserve(costs.size());
    for (int c : costs)
        scaled.push_back(std::max(1, static_cast<int>(std::floor(c * factor + 0.5))));
    if (scaled.back() > battery_capacity)
        throw ConfigError("costs: scaled maximum " + std::to_string(scaled.back()) +
                          " exceeds battery_capacity " +
                          std::to_string(battery_capacity));
    return strictly_increasing_repair(std::move(scaled), 1, battery_capacity);
}

std::vector<SweepRow> sweep_cost_scale(const ScenarioConfig& base, double factor,
                                       const std::vector<double>& lambdas,
                                       bool with_simulation) {
    const ScenarioConfig resolved = base.resolved() ? base : resolve_scenario(base);

    ScenarioConfig scaled = resolved;
    scaled.explicit_costs = scale_costs(resolved.costs(), factor,
                                        resolved.battery_capacity);
    // Same sources at new prices: reliabilities carry over verbatim.
    scaled.explicit_reliabilities.clear();
    for (const auto& s : resolved.sources)
        scaled.explicit_reliabilities.push_back(s.reliability);

    std::vector<SweepRow> rows;
    for (double lambda : lambdas) {
        const ScenarioConfig cfg = with_lambda(resolved, lambda);
        append_cell(rows, cfg, "lambda", lambda, with_simulation, "scale=1");
    }
    const std::string note = "scale=" + format_double(factor);
    for (double lambda : lambdas) {
        const ScenarioConfig cfg = with_lambda(scaled, lambda);
        append_cell(rows, cfg, "lambda", lambda, with_simulation, note);
    }
    return rows;
}

ScenarioConfig single_source_scenario(const ScenarioConfig& base, int cost) {
    ScenarioConfig cfg = base;
    cfg.num_sources = 1;
    cfg.cost_min = cost;
    cfg.cost_max = cost;
    cfg.explicit_costs = {cost};
    cfg.explicit_reliabilities = {anchored_reliability(base.age_shape, cost)};
    return resolve_scenario(std::move(cfg));
}

std::vector<SweepRow> sweep_single_source(const ScenarioConfig& base,
                                          const std::vector<int>& costs,
                                          const std::vector<double>& lambdas) {
    if (costs.empty() || lambdas.empty())
        throw ConfigError("sweep: empty cost or lambda grid");
    std::vector<SweepRow> rows;
    for (int cost : costs) {
        for (double lambda : lambdas) {
            ScenarioConfig cfg = single_source_scenario(base, cost);
            cfg = with_lambda(std::move(cfg), lambda);
            const TransitionModel model = build_transition_model(cfg);
            const PolicySolution solution =
                relative_value_iteration(model, {cfg.vi_epsilon});
            const EvaluationResult opt = evaluate_policy_exact(solution.policy, model);
            rows.push_back(exact_row(cfg, "cost", cost, "optimal", opt,
                                     "p=" + format_double(cfg.sources[0].reliability)));
        }
    }
    return rows;
}

std::vector<int> network_subset_positions(int base_size, int size, std::uint64_t seed) {
    if (base_size < 2) throw ConfigError("network sweep: base size must be >= 2");
    if (size == 12 && base_size == 16) {
        // Four interior sources removed at random; endpoints always survive.
        std::mt19937_64 rng(derive_stream_seed(seed, 0, 0x5e1ec7));
        std::vector<int> interior(base_size - 2);
        std::iota(interior.begin(), interior.end(), 2);
        for (int i = 0; i < 4; ++i) {
            const auto j = i + static_cast<int>(rng() % (interior.size() - i));
            std::swap(interior[i], interior[j]);
        }
        std::vector<int> removed(interior.begin(), interior.begin() + 4);
        std::vector<int> kept;
        for (int pos = 1; pos <= base_size; ++pos)
            if (std::find(removed.begin(), removed.end(), pos) == removed.end())
                kept.push_back(pos);
        return kept;
    }
    std::vector<int> kept(base_size);
    std::iota(kept.begin(), kept.end(), 1);
    while (static_cast<int>(kept.size()) > size) {
        if (static_cast<int>(kept.size()) / 2 < size)
            throw ConfigError("network sweep: size " + std::to_string(size) +
                              " is not reachable by halving from " +
                              std::to_string(base_size));
        std::vector<int> half;
        for (std::size_t i = 0; i < kept.size(); i += 2) half.push_back(kept[i]);
        half.back() = kept.back();  // the most expensive source always survives
        kept = std::move(half);
    }
    return kept;
}

std::vector<SweepRow> sweep_network_size(const ScenarioConfig& base,
                                         const std::vector<int>& sizes,
                                         const std::vector<double>& lambdas,
                                         const std::vector<std::string>& policies) {
    if (sizes.empty() || lambdas.empty() || policies.empty())
        throw ConfigError("network sweep: empty grid");
    for (const auto& p : policies)
        if (p != "optimal" && p != "aggressive")
            throw ConfigError("network sweep: unknown policy '" + p + "'");

    // The 16-source reference system; subsets keep its calibrated sources.
    ScenarioConfig wide = base;
    wide.num_sources = 16;
    wide.explicit_costs.clear();
    wide.explicit_reliabilities.clear();
    wide = resolve_scenario(std::move(wide));

    const auto subset_config = [&](const std::vector<int>& positions) {
        ScenarioConfig cfg = wide;
        cfg.num_sources = static_cast<int>(positions.size());
        cfg.explicit_costs.clear();
        cfg.explicit_reliabilities.clear();
        for (int pos : positions) {
            cfg.explicit_costs.push_back(wide.sources[pos - 1].cost);
            cfg.explicit_reliabilities.push_back(wide.sources[pos - 1].reliability);
        }
        return cfg;
    };

    const auto evaluate_cell = [&](const ScenarioConfig& cfg, const std::string& policy) {
        const TransitionModel model = build_transition_model(cfg);
        if (policy == "optimal") {
            const PolicySolution solution =
                relative_value_iteration(model, {cfg.vi_epsilon});
            return evaluate_policy_exact(solution.policy, model);
        }
        return evaluate_policy_exact(materialize(aggressive_rule(cfg), cfg), model);
    };

    std::vector<SweepRow> rows;
    for (int size : sizes) {
        if (size == 1) {
            // Halving ends at {cheapest, dearest}; the size-1 system keeps
            // whichever of the two serves that policy better.
            for (double lambda : lambdas) {
                for (const auto& policy : policies) {
                    SweepRow best;
                    bool have = false;
                    for (int pos : {1, wide.num_sources}) {
                        const ScenarioConfig cfg =
                            with_lambda(subset_config({pos}), lambda);
                        const EvaluationResult eval = evaluate_cell(cfg, policy);
                        SweepRow row = exact_row(cfg, "num_sources", 1, policy, eval,
                                                 "sources=" + std::to_string(pos));
                        if (!have || row.avg_aoi < best.avg_aoi) {
                            best = std::move(row);
                            have = true;
                        }
                    }
                    rows.push_back(std::move(best));
                }
            }
            continue;
        }
        const auto positions =
            network_subset_positions(wide.num_sources, size, wide.rng_seed);
        const std::string note = "sources=" + join_ints(positions, ';');
        for (double lambda : lambdas) {
            const ScenarioConfig cfg = with_lambda(subset_config(positions), lambda);
            for (const auto& policy : policies) {
                const EvaluationResult eval = evaluate_cell(cfg, policy);
                rows.push_back(exact_row(cfg, "num_sources", size, policy, eval, note));
            }
        }
    }
    return rows;
}

}  // namespace aoi
