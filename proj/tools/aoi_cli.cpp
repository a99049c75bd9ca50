// Command-line front end: solving, evaluating and simulating scenarios, and
// the sweep experiments behind the study figures. Outputs are deterministic
// for a fixed config + seed; see README for file schemas.

#include "aoi/experiments.hpp"
#include "aoi/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct CommonOpts {
    std::string config_path = "default";
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path,
                    "Scenario config file ('default' for built-in defaults)");
    cmd->add_option("--out", opts.out_dir, "Output directory");
    cmd->add_option("--seed", opts.seed, "Override the scenario rng_seed");
    cmd->add_option("--format", opts.format, "Table format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

aoi::ScenarioConfig load_scenario(const CommonOpts& opts) {
    aoi::ScenarioConfig cfg = (opts.config_path.empty() || opts.config_path == "default")
                                  ? aoi::default_scenario()
                                  : aoi::load_config(opts.config_path);
    if (opts.seed) {
        cfg.rng_seed = *opts.seed;
        cfg = aoi::resolve_scenario(std::move(cfg));
    }
    return cfg;
}

std::vector<double> parse_real_list(const std::string& text, const char* what) {
    std::vector<double> values;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw aoi::ConfigError(std::string(what) + ": cannot parse '" + item + "'");
        }
    }
    if (values.empty()) throw aoi::ConfigError(std::string(what) + ": empty list");
    return values;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
    std::vector<int> values;
    for (double v : parse_real_list(text, what)) values.push_back(static_cast<int>(v));
    return values;
}

void write_text(const fs::path& path, const std::string& content) {
    aoi::atomic_write_file(path, content);
}

std::string policy_map_csv(const aoi::PolicySolution& solution,
                           const aoi::ScenarioConfig& cfg) {
    std::ostringstream out;
    aoi::write_policy_map_csv(solution.policy, cfg.battery_capacity, cfg.aoi_cap, out);
    return out.str();
}

std::string policy_map_json(const aoi::PolicySolution& solution,
                            const aoi::ScenarioConfig& cfg) {
    ordered_json rows = ordered_json::array();
    for (int b = 0; b <= cfg.battery_capacity; ++b)
        for (int a = 1; a <= cfg.aoi_cap; ++a)
            rows.push_back({{"battery", b},
                            {"aoi", a},
                            {"action",
                             solution.policy[aoi::state_index({b, a}, cfg.aoi_cap)].id()}});
    return rows.dump(2) + "\n";
}

ordered_json metrics_json(const aoi::SimulationMetrics& m, const std::string& fingerprint) {
    ordered_json doc;
    doc["scenario_fingerprint"] = fingerprint;
    doc["policy"] = m.policy_name;
    doc["avg_aoi"] = m.avg_aoi;
    doc["stderr_aoi"] = m.stderr_aoi;
    doc["avg_energy_per_slot"] = m.avg_energy_per_slot;
    doc["source_usage"] = m.source_usage;
    doc["seed"] = m.seed;
    doc["horizon"] = m.horizon;
    doc["replications"] = m.replications;
    return doc;
}

std::string metrics_csv(const aoi::SimulationMetrics& m, const std::string& fingerprint) {
    std::ostringstream out;
    out << "fingerprint,policy,avg_aoi,stderr_aoi,avg_energy_per_slot,"
           "source_usage,seed,horizon,replications\n";
    out << fingerprint << ',' << m.policy_name << ',' << aoi::format_double(m.avg_aoi)
        << ',' << aoi::format_double(m.stderr_aoi) << ','
        << aoi::format_double(m.avg_energy_per_slot) << ',';
    for (std::size_t i = 0; i < m.source_usage.size(); ++i) {
        if (i) out << ';';
        out << m.source_usage[i];
    }
    out << ',' << m.seed << ',' << m.horizon << ',' << m.replications << '\n';
    return out.str();
}

ordered_json evaluation_json(const aoi::EvaluationResult& e, const std::string& policy,
                             const std::string& fingerprint) {
    ordered_json doc;
    doc["scenario_fingerprint"] = fingerprint;
    doc["policy"] = policy;
    doc["gain"] = e.gain;
    doc["avg_energy_per_slot"] = e.avg_energy_per_slot;
    doc["source_usage"] = e.source_usage;
    doc["iterations"] = e.iterations;
    doc["residual"] = e.residual;
    return doc;
}

// Builds the requested rule; solves the scenario first when it is tabular.
aoi::DecisionRule make_rule(const std::string& name, const aoi::ScenarioConfig& cfg) {
    if (name == "optimal") {
        const auto model = aoi::build_transition_model(cfg);
        return aoi::optimal_rule(aoi::relative_value_iteration(model, {cfg.vi_epsilon}),
                                 cfg);
    }
    if (name == "aggressive") return aoi::aggressive_rule(cfg);
    if (name == "idle") return aoi::always_idle_rule();
    if (name.rfind("source:", 0) == 0)
        return aoi::fixed_source_rule(cfg, std::stoi(name.substr(7)));
    throw aoi::ConfigError("unknown policy '" + name +
                           "' (optimal, aggressive, idle or source:N)");
}

void write_sweep_outputs(const std::vector<aoi::SweepRow>& rows, const fs::path& out_dir,
                         const std::string& stem, const std::string& format,
                         bool with_efficiency = false) {
    std::ostringstream table;
    if (format == "json")
        aoi::write_rows_json(rows, table);
    else
        aoi::write_rows_csv(rows, table);
    write_text(out_dir / (stem + "." + format), table.str());
    if (with_efficiency) {
        std::ostringstream eff;
        aoi::write_efficiency_csv(aoi::efficiency_table(rows), eff);
        write_text(out_dir / (stem + "_efficiency.csv"), eff.str());
    }
}

int run(int argc, char** argv) {
    CLI::App app{"Average-AoI scheduling for an energy-harvesting monitor with "
                 "heterogeneous information sources"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string policy_name = "optimal";
    std::string lambdas_text, costs_text, sizes_text;
    std::optional<long> horizon_override;
    std::optional<int> reps_override;
    double scale_factor = 1.5;
    bool independent_streams = false;
    bool no_simulate = false;

    auto* solve = app.add_subcommand("solve", "Solve and export the optimal policy map");
    add_common(solve, opts);

    auto* evaluate = app.add_subcommand("evaluate", "Exact long-run metrics of a policy");
    add_common(evaluate, opts);
    evaluate->add_option("--policy", policy_name, "optimal|aggressive|idle|source:N");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo metrics of a policy");
    add_common(simulate, opts);
    simulate->add_option("--policy", policy_name, "optimal|aggressive|idle|source:N");
    simulate->add_option("--horizon", horizon_override, "Slots per episode");
    simulate->add_option("--reps", reps_override, "Replications");

    auto* compare = app.add_subcommand("compare", "Optimal vs aggressive on one scenario");
    add_common(compare, opts);
    compare->add_option("--horizon", horizon_override, "Slots per episode");
    compare->add_option("--reps", reps_override, "Replications");
    compare->add_flag("--independent-streams", independent_streams,
                      "Draw per-policy streams instead of common random numbers");

    auto* grid = app.add_subcommand("shape-grid", "Policy maps for all nine shape pairs");
    add_common(grid, opts);
    grid->add_option("--lambdas", lambdas_text, "Comma-separated harvesting rates");

    auto* slambda = app.add_subcommand("sweep-lambda", "Both policies across a lambda grid");
    add_common(slambda, opts);
    slambda->add_option("--lambdas", lambdas_text, "Comma-separated harvesting rates");
    slambda->add_flag("--no-simulate", no_simulate, "Exact evaluation only");

    auto* scost = app.add_subcommand("sweep-cost", "Lambda sweeps for costs C and factor*C");
    add_common(scost, opts);
    scost->add_option("--factor", scale_factor, "Cost scale factor");
    scost->add_option("--lambdas", lambdas_text, "Comma-separated harvesting rates");

    auto* ssingle = app.add_subcommand("sweep-single", "Optimal gain of lone sources");
    add_common(ssingle, opts);
    ssingle->add_option("--costs", costs_text, "Comma-separated source costs");
    ssingle->add_option("--lambdas", lambdas_text, "Comma-separated harvesting rates");

    auto* ssize = app.add_subcommand("sweep-size", "Average AoI across source-set sizes");
    add_common(ssize, opts);
    ssize->add_option("--sizes", sizes_text, "Comma-separated source counts");
    ssize->add_option("--lambdas", lambdas_text, "Comma-separated harvesting rates");
    ssize->add_option("--policy", policy_name, "optimal|aggressive|both");

    auto* dump = app.add_subcommand("dump-model", "Audit CSV of the transition kernel");
    add_common(dump, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help text or the usage error
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") return 0;
        return code == 0 ? 0 : 1;
    }

    const aoi::ScenarioConfig cfg = load_scenario(opts);
    const fs::path out_dir(opts.out_dir);

    if (solve->parsed()) {
        const auto model = aoi::build_transition_model(cfg);
        const auto solution = aoi::relative_value_iteration(model, {cfg.vi_epsilon});
        const fs::path path = out_dir / ("policy_map." + opts.format);
        write_text(path, opts.format == "json" ? policy_map_json(solution, cfg)
                                               : policy_map_csv(solution, cfg));
        std::cout << "solve: gain=" << aoi::format_double(solution.gain)
                  << " iterations=" << solution.iterations << " states="
                  << model.state_count << " -> " << path.string() << "\n";
        return 0;
    }

    if (evaluate->parsed()) {
        const auto model = aoi::build_transition_model(cfg);
        const auto rule = make_rule(policy_name, cfg);
        const auto result =
            aoi::evaluate_policy_exact(aoi::materialize(rule, cfg), model);
        const fs::path path = out_dir / ("evaluate_" + rule.name + ".json");
        write_text(path, evaluation_json(result, rule.name, cfg.fingerprint).dump(2) + "\n");
        std::cout << "evaluate: policy=" << rule.name
                  << " gain=" << aoi::format_double(result.gain)
                  << " energy=" << aoi::format_double(result.avg_energy_per_slot)
                  << " -> " << path.string() << "\n";
        return 0;
    }

    if (simulate->parsed()) {
        const auto rule = make_rule(policy_name, cfg);
        const long horizon = horizon_override.value_or(cfg.sim_horizon);
        const int reps = reps_override.value_or(cfg.sim_replications);
        const auto metrics = aoi::simulate(rule, cfg, horizon, reps, cfg.rng_seed);
        const bool json = opts.format != "csv";
        const fs::path path =
            out_dir / ("simulate_" + rule.name + (json ? ".json" : ".csv"));
        write_text(path, json ? metrics_json(metrics, cfg.fingerprint).dump(2) + "\n"
                              : metrics_csv(metrics, cfg.fingerprint));
        std::cout << "simulate: policy=" << rule.name
                  << " avg_aoi=" << aoi::format_double(metrics.avg_aoi)
                  << " stderr=" << aoi::format_double(metrics.stderr_aoi) << " -> "
                  << path.string() << "\n";
        return 0;
    }

    if (compare->parsed()) {
        const long horizon = horizon_override.value_or(cfg.sim_horizon);
        const int reps = reps_override.value_or(cfg.sim_replications);
        const auto cmp =
            aoi::compare_policies(cfg, horizon, reps, cfg.rng_seed, !independent_streams);
        ordered_json doc;
        doc["scenario_fingerprint"] = cfg.fingerprint;
        doc["seed"] = cfg.rng_seed;
        doc["horizon"] = horizon;
        doc["replications"] = reps;
        doc["efficiency_exact"] = cmp.efficiency_exact;
        doc["efficiency_mc"] = cmp.efficiency_mc;
        doc["optimal"] = metrics_json(cmp.optimal_sim, cfg.fingerprint);
        doc["optimal"]["exact_gain"] = cmp.optimal_exact.gain;
        doc["optimal"]["exact_energy"] = cmp.optimal_exact.avg_energy_per_slot;
        doc["aggressive"] = metrics_json(cmp.aggressive_sim, cfg.fingerprint);
        doc["aggressive"]["exact_gain"] = cmp.aggressive_exact.gain;
        doc["aggressive"]["exact_energy"] = cmp.aggressive_exact.avg_energy_per_slot;
        const fs::path path = out_dir / "compare.json";
        write_text(path, doc.dump(2) + "\n");
        std::cout << "compare: efficiency_exact="
                  << aoi::format_double(cmp.efficiency_exact)
                  << " efficiency_mc=" << aoi::format_double(cmp.efficiency_mc) << " -> "
                  << path.string() << "\n";
        return 0;
    }

    if (grid->parsed()) {
        const auto lambdas = lambdas_text.empty()
                                 ? std::vector<double>{0.2, 0.6}
                                 : parse_real_list(lambdas_text, "--lambdas");
        const auto cells = aoi::run_shape_grid(cfg, lambdas);
        std::ostringstream summary;
        summary << "fingerprint,lambda,cost_shape,age_shape,gain,iterations,actions_used\n";
        for (const auto& cell : cells) {
            const std::string name = "policy_map_" + aoi::to_string(cell.cost_shape) +
                                     "_" + aoi::to_string(cell.age_shape) + "_lambda" +
                                     aoi::format_double(cell.lambda) + "." + opts.format;
            write_text(out_dir / name, opts.format == "json"
                                           ? policy_map_json(cell.solution, cell.scenario)
                                           : policy_map_csv(cell.solution, cell.scenario));
            std::vector<bool> used(cell.scenario.sources.size() + 1, false);
            for (const auto& a : cell.solution.policy) used[a.id()] = true;
            summary << cell.scenario.fingerprint << ','
                    << aoi::format_double(cell.lambda) << ','
                    << aoi::to_string(cell.cost_shape) << ','
                    << aoi::to_string(cell.age_shape) << ','
                    << aoi::format_double(cell.solution.gain) << ','
                    << cell.solution.iterations << ',';
            bool first = true;
            for (std::size_t a = 0; a < used.size(); ++a)
                if (used[a]) {
                    if (!first) summary << ';';
                    summary << a;
                    first = false;
                }
            summary << '\n';
        }
        write_text(out_dir / "grid_summary.csv", summary.str());
        std::cout << "shape-grid: " << cells.size() << " policy maps -> "
                  << out_dir.string() << "\n";
        return 0;
    }

    if (slambda->parsed()) {
        const auto lambdas =
            lambdas_text.empty()
                ? std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}
                : parse_real_list(lambdas_text, "--lambdas");
        const auto rows = aoi::sweep_lambda(cfg, lambdas, !no_simulate);
        write_sweep_outputs(rows, out_dir, "sweep_lambda", opts.format, true);
        std::cout << "sweep-lambda: " << rows.size() << " rows -> "
                  << (out_dir / ("sweep_lambda." + opts.format)).string() << "\n";
        return 0;
    }

    if (scost->parsed()) {
        const auto lambdas =
            lambdas_text.empty()
                ? std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}
                : parse_real_list(lambdas_text, "--lambdas");
        const auto rows = aoi::sweep_cost_scale(cfg, scale_factor, lambdas);
        write_sweep_outputs(rows, out_dir, "sweep_cost", opts.format);
        std::cout << "sweep-cost: factor=" << aoi::format_double(scale_factor) << " "
                  << rows.size() << " rows -> "
                  << (out_dir / ("sweep_cost." + opts.format)).string() << "\n";
        return 0;
    }

    if (ssingle->parsed()) {
        const auto costs = costs_text.empty()
                               ? std::vector<int>{1, 2, 4, 8, 12, 16, 19}
                               : parse_int_list(costs_text, "--costs");
        const auto lambdas = lambdas_text.empty()
                                 ? std::vector<double>{0.2, 0.4, 0.6, 0.8}
                                 : parse_real_list(lambdas_text, "--lambdas");
        const auto rows = aoi::sweep_single_source(cfg, costs, lambdas);
        write_sweep_outputs(rows, out_dir, "sweep_single", opts.format);
        std::cout << "sweep-single: " << rows.size() << " rows -> "
                  << (out_dir / ("sweep_single." + opts.format)).string() << "\n";
        return 0;
    }

    if (ssize->parsed()) {
        const auto sizes = sizes_text.empty() ? std::vector<int>{1, 2, 4, 8, 12, 16}
                                              : parse_int_list(sizes_text, "--sizes");
        const auto lambdas = lambdas_text.empty()
                                 ? std::vector<double>{0.2, 0.4, 0.6}
                                 : parse_real_list(lambdas_text, "--lambdas");
        std::vector<std::string> policies;
        if (policy_name == "both" || policy_name == "optimal")
            policies.push_back("optimal");
        if (policy_name == "both" || policy_name == "aggressive")
            policies.push_back("aggressive");
        if (policies.empty())
            throw aoi::ConfigError("sweep-size --policy: optimal, aggressive or both");
        const auto rows = aoi::sweep_network_size(cfg, sizes, lambdas, policies);
        write_sweep_outputs(rows, out_dir, "sweep_size", opts.format);
        std::cout << "sweep-size: " << rows.size() << " rows -> "
                  << (out_dir / ("sweep_size." + opts.format)).string() << "\n";
        return 0;
    }

    if (dump->parsed()) {
        const auto model = aoi::build_transition_model(cfg);
        std::ostringstream out;
        aoi::dump_model_csv(model, out);
        const fs::path path = out_dir / "model.csv";
        write_text(path, out.str());
        std::cout << "dump-model: " << model.state_count << " states -> "
                  << path.string() << "\n";
        return 0;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const aoi::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const aoi::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
