#include "aoi/scenario.hpp"

#include "aoi/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

namespace aoi {

namespace {

constexpr double kCalibrationTol = 1e-9;

// Round half-up, the integer convention used for every generated quantity.
int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

// Cost-dependent factor of the reliability map; k scales it.
double shape_unit(Shape shape, double cost) {
    switch (shape) {
        case Shape::sublinear: return cost * cost;
        case Shape::linear: return cost;
        case Shape::superlinear: return std::log2(1.0 + cost);
    }
    return cost;
}

// Canonical serialization of a resolved scenario; the fingerprint hashes it,
// so every field that changes behavior must appear here.
std::string canonical_text(const ScenarioConfig& c) {
    std::ostringstream out;
    out << "battery_capacity=" << c.battery_capacity
        << ";harvest_amount=" << c.harvest_amount
        << ";harvest_prob=" << format_double(c.harvest_prob)
        << ";age_min=" << c.age_min << ";age_max=" << c.age_max
        << ";aoi_cap=" << c.aoi_cap << ";num_sources=" << c.num_sources
        << ";cost_shape=" << to_string(c.cost_shape)
        << ";age_shape=" << to_string(c.age_shape)
        << ";target_mean_p=" << format_double(c.target_mean_p)
        << ";vi_epsilon=" << format_double(c.vi_epsilon)
        << ";sim_horizon=" << c.sim_horizon
        << ";sim_replications=" << c.sim_replications
        << ";rng_seed=" << c.rng_seed
        << ";infeasible_query="
        << (c.infeasible_query == InfeasibleQueryMode::mask ? "mask" : "penalty");
    out << ";costs=";
    for (const auto& s : c.sources) out << s.cost << ",";
    out << ";reliabilities=";
    for (const auto& s : c.sources) out << format_double(s.reliability) << ",";
    return out.str();
}

}  // namespace

Shape shape_from_string(const std::string& name) {
    if (name == "superlinear") return Shape::superlinear;
    if (name == "linear") return Shape::linear;
    if (name == "sublinear") return Shape::sublinear;
    throw ConfigError("unknown shape '" + name +
                      "' (expected superlinear, linear or sublinear)");
}

std::string to_string(Shape shape) {
    switch (shape) {
        case Shape::superlinear: return "superlinear";
        case Shape::linear: return "linear";
        case Shape::sublinear: return "sublinear";
    }
    return "linear";
}

std::vector<int> ScenarioConfig::costs() const {
    std::vector<int> out;
    out.reserve(sources.size());
    for (const auto& s : sources) out.push_back(s.cost);
    return out;
}

// Collisions bump upward; if the top overflows, predecessors are pushed down.
std::vector<int> strictly_increasing_repair(std::vector<int> values, int lo, int hi) {
    const int n = static_cast<int>(values.size());
    if (n > hi - lo + 1)
        throw ConfigError("costs: " + std::to_string(n) +
                          " strictly increasing integer costs do not fit in [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
    for (int i = 1; i < n; ++i)
        if (values[i] <= values[i - 1]) values[i] = values[i - 1] + 1;
    if (values.back() > hi) {
        values.back() = hi;
        for (int i = n - 2; i >= 0; --i)
            if (values[i] >= values[i + 1]) values[i] = values[i + 1] - 1;
    }
    if (values.front() < lo)
        throw ConfigError("costs: monotonic repair fell below " + std::to_string(lo));
    return values;
}

std::vector<int> generate_cost_vector(Shape shape, int n, int c_min, int c_max) {
    if (n < 1) throw ConfigError("num_sources: must be at least 1");
    if (c_min < 1 || c_min > c_max)
        throw ConfigError("cost_min/cost_max: need 1 <= cost_min <= cost_max");
    if (n > c_max - c_min + 1)
        throw ConfigError("num_sources: " + std::to_string(n) +
                          " strictly increasing integer costs do not fit in [" +
                          std::to_string(c_min) + ", " + std::to_string(c_max) + "]");
    std::vector<int> costs(n);
    if (n == 1) {
        costs[0] = c_min;
        return costs;
    }
    const double span = c_max - c_min;
    for (int i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) / (n - 1);
        double curve = u;
        if (shape == Shape::superlinear) curve = u * u;        // convex in rank
        if (shape == Shape::sublinear) curve = std::sqrt(u);   // concave in rank
        costs[i] = round_half_up(c_min + span * curve);
    }
    costs.front() = c_min;
    costs.back() = c_max;
    return strictly_increasing_repair(std::move(costs), c_min, c_max);
}

CalibrationResult calibrate_reliability(Shape shape, const std::vector<int>& costs,
                                        double target_mean_p) {
    if (costs.empty()) throw ConfigError("costs: empty");
    if (!std::isfinite(target_mean_p) || target_mean_p <= 0.0 || target_mean_p > 1.0)
        throw ConfigError("target_mean_p: must lie in (0, 1]");
    const int n = static_cast<int>(costs.size());

    const auto mean_p = [&](double k) {
        double sum = 0.0;
        for (int c : costs) sum += std::min(1.0, k * shape_unit(shape, c));
        return sum / n;
    };

    const int c_low = *std::min_element(costs.begin(), costs.end());
    double lo = 0.0;
    double hi = 1.0 / shape_unit(shape, c_low);  // every p clamps to 1 here
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mean_p(mid) < target_mean_p)
            lo = mid;
        else
            hi = mid;
    }

    CalibrationResult result;
    result.shape = shape;
    result.k = hi;
    result.calibrated = true;
    for (int i = 0; i < n; ++i)
        if (result.k * shape_unit(shape, costs[i]) >= 1.0)
            result.clamped_indices.push_back(i + 1);
    result.all_clamped = static_cast<int>(result.clamped_indices.size()) == n;
    result.achieved_mean_p = mean_p(result.k);
    if (!result.all_clamped &&
        std::abs(result.achieved_mean_p - target_mean_p) > kCalibrationTol)
        throw NumericError("calibrate_reliability: bisection missed target mean",
                           std::abs(result.achieved_mean_p - target_mean_p));
    return result;
}

double anchored_reliability(Shape shape, int cost, double anchor_p, int anchor_cost) {
    if (cost < 1) throw ConfigError("costs: cost must be a positive integer");
    if (anchor_p <= 0.0 || anchor_p > 1.0)
        throw ConfigError("anchor_p: must lie in (0, 1]");
    const double k = anchor_p / shape_unit(shape, anchor_cost);
    return std::min(1.0, k * shape_unit(shape, cost));
}

Vector truncated_geometric_pmf(double p, int age_min, int age_max) {
    if (!(p > 0.0) || p > 1.0 || !std::isfinite(p))
        throw ConfigError("reliability: geometric parameter must lie in (0, 1]");
    if (age_min != 1)
        throw ConfigError("age_min: only age_min = 1 is supported");
    if (age_max < 2) throw ConfigError("age_max: must be at least 2");

    Vector pmf(age_max);
    double head = 0.0;
    for (int j = 1; j < age_max; ++j) {
        pmf[j - 1] = std::pow(1.0 - p, j - 1) * p;
        head += pmf[j - 1];
    }
    pmf[age_max - 1] = std::max(0.0, 1.0 - head);  // truncation tail mass
    pmf /= pmf.sum();
    return pmf;
}

ScenarioConfig resolve_scenario(ScenarioConfig c) {
    if (c.battery_capacity < 0)
        throw ConfigError("battery_capacity: must be non-negative");
    if (c.harvest_amount < 1)
        throw ConfigError("harvest_amount: must be a positive integer");
    if (!std::isfinite(c.harvest_prob) || c.harvest_prob < 0.0 || c.harvest_prob > 1.0)
        throw ConfigError("harvest_prob: must lie in [0, 1]");
    if (c.age_min != 1)
        throw ConfigError("age_min: only age_min = 1 is supported");
    if (c.age_max <= c.age_min)
        throw ConfigError("age_max: need age_min < age_max");
    if (c.age_max > c.aoi_cap)
        throw ConfigError("aoi_cap: need age_max <= aoi_cap");
    if (c.num_sources < 1)
        throw ConfigError("num_sources: must be at least 1");
    if (!std::isfinite(c.target_mean_p) || c.target_mean_p <= 0.0 || c.target_mean_p > 1.0)
        throw ConfigError("target_mean_p: must lie in (0, 1]");
    if (!std::isfinite(c.vi_epsilon) || c.vi_epsilon <= 0.0)
        throw ConfigError("vi_epsilon: must be positive");
    if (c.sim_horizon < 1)
        throw ConfigError("sim_horizon: must be at least 1");
    if (c.sim_replications < 1)
        throw ConfigError("sim_replications: must be at least 1");

    std::vector<int> costs;
    if (!c.explicit_costs.empty()) {
        if (static_cast<int>(c.explicit_costs.size()) != c.num_sources)
            throw ConfigError("costs: expected " + std::to_string(c.num_sources) +
                              " entries, got " + std::to_string(c.explicit_costs.size()));
        costs = c.explicit_costs;
        for (int i = 0; i < c.num_sources; ++i) {
            if (costs[i] < 1)
                throw ConfigError("costs: entries must be positive integers");
            if (i > 0 && costs[i] <= costs[i - 1])
                throw ConfigError("costs: must be strictly increasing");
        }
    } else {
        costs = generate_cost_vector(c.cost_shape, c.num_sources, c.cost_min, c.cost_max);
    }
    if (costs.back() > c.battery_capacity)
        throw ConfigError("costs: most expensive source (" +
                          std::to_string(costs.back()) +
                          ") exceeds battery_capacity; it could never be queried");

    std::vector<double> ps;
    if (!c.explicit_reliabilities.empty()) {
        if (c.explicit_reliabilities.size() != costs.size())
            throw ConfigError("reliabilities: expected " + std::to_string(costs.size()) +
                              " entries, got " +
                              std::to_string(c.explicit_reliabilities.size()));
        ps = c.explicit_reliabilities;
        double sum = 0.0;
        for (double p : ps) {
            if (!std::isfinite(p) || p <= 0.0 || p > 1.0)
                throw ConfigError("reliabilities: entries must lie in (0, 1]");
            sum += p;
        }
        c.calibration = CalibrationResult{};
        c.calibration.shape = c.age_shape;
        c.calibration.achieved_mean_p = sum / static_cast<double>(ps.size());
    } else {
        c.calibration = calibrate_reliability(c.age_shape, costs, c.target_mean_p);
        ps.reserve(costs.size());
        for (int cost : costs)
            ps.push_back(std::min(1.0, c.calibration.k * shape_unit(c.age_shape, cost)));
    }

    c.sources.clear();
    c.sources.reserve(costs.size());
    for (int i = 0; i < static_cast<int>(costs.size()); ++i) {
        SourceSpec s;
        s.index = i + 1;
        s.cost = costs[i];
        s.reliability = ps[i];
        s.age_pmf = truncated_geometric_pmf(ps[i], c.age_min, c.age_max);
        c.sources.push_back(std::move(s));
    }

    c.fingerprint = hex64(fnv1a64(canonical_text(c)));
    return c;
}

ScenarioConfig default_scenario() { return resolve_scenario(ScenarioConfig{}); }

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": cannot parse integer from '" + value + "'");
    }
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": cannot parse number from '" + value + "'");
    }
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

}  // namespace

ScenarioConfig parse_config(std::istream& in, const std::string& origin) {
    ScenarioConfig c;
    bool saw_num_sources = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "battery_capacity") c.battery_capacity = static_cast<int>(parse_int(key, value));
        else if (key == "harvest_amount") c.harvest_amount = static_cast<int>(parse_int(key, value));
        else if (key == "harvest_prob") c.harvest_prob = parse_real(key, value);
        else if (key == "age_min") c.age_min = static_cast<int>(parse_int(key, value));
        else if (key == "age_max") c.age_max = static_cast<int>(parse_int(key, value));
        else if (key == "aoi_cap") c.aoi_cap = static_cast<int>(parse_int(key, value));
        else if (key == "num_sources") { c.num_sources = static_cast<int>(parse_int(key, value)); saw_num_sources = true; }
        else if (key == "cost_min") c.cost_min = static_cast<int>(parse_int(key, value));
        else if (key == "cost_max") c.cost_max = static_cast<int>(parse_int(key, value));
        else if (key == "cost_shape") c.cost_shape = shape_from_string(value);
        else if (key == "age_shape") c.age_shape = shape_from_string(value);
        else if (key == "target_mean_p") c.target_mean_p = parse_real(key, value);
        else if (key == "vi_epsilon") c.vi_epsilon = parse_real(key, value);
        else if (key == "sim_horizon") c.sim_horizon = parse_int(key, value);
        else if (key == "sim_replications") c.sim_replications = static_cast<int>(parse_int(key, value));
        else if (key == "rng_seed") c.rng_seed = static_cast<std::uint64_t>(parse_int(key, value));
        else if (key == "infeasible_query") {
            if (value == "mask") c.infeasible_query = InfeasibleQueryMode::mask;
            else if (value == "penalty") c.infeasible_query = InfeasibleQueryMode::penalty;
            else throw ConfigError("infeasible_query: expected 'mask' or 'penalty'");
        } else if (key == "costs") {
            c.explicit_costs.clear();
            for (const auto& item : split_list(value))
                c.explicit_costs.push_back(static_cast<int>(parse_int(key, item)));
            if (c.explicit_costs.empty()) throw ConfigError("costs: empty list");
        } else if (key == "reliabilities") {
            c.explicit_reliabilities.clear();
            for (const auto& item : split_list(value))
                c.explicit_reliabilities.push_back(parse_real(key, item));
            if (c.explicit_reliabilities.empty())
                throw ConfigError("reliabilities: empty list");
        } else {
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": unknown key '" + key + "'");
        }
    }
    if (!c.explicit_costs.empty() && !saw_num_sources)
        c.num_sources = static_cast<int>(c.explicit_costs.size());
    return resolve_scenario(std::move(c));
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

}  // namespace aoi
