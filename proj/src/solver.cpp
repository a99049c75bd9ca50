#include "aoi/solver.hpp"

#include <Eigen/SparseCore>

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace aoi {

PolicySolution relative_value_iteration(const TransitionModel& model,
                                        const SolveOptions& options) {
    if (options.epsilon <= 0.0)
        throw std::invalid_argument("relative_value_iteration: epsilon must be positive");
    const int n = model.state_count;

    PolicySolution solution;
    solution.policy.assign(n, Action::idle());
    Vector value = Vector::Zero(n);
    Vector next = Vector::Zero(n);

    for (long iter = 1; iter <= options.max_iterations; ++iter) {
        const double* v = value.data();
        for (int s = 0; s < n; ++s) {
            double best = std::numeric_limits<double>::infinity();
            Action best_action = Action::idle();
            for (const auto& row : model.rows[s]) {
                double q = row.expected_reward;
                const int* ts = model.next_state.data() + row.begin;
                const double* ps = model.prob.data() + row.begin;
                for (std::uint32_t k = 0; k < row.count; ++k) q += ps[k] * v[ts[k]];
                // strict < keeps the earliest minimizer: idle, then cheapest
                if (q < best) {
                    best = q;
                    best_action = row.action;
                }
            }
            next[s] = best;
            solution.policy[s] = best_action;
        }

        const Vector diff = next - value;
        const double hi = diff.maxCoeff();
        const double lo = diff.minCoeff();
        const double span = hi - lo;
        solution.span_trace.push_back(span);
        solution.iterations = iter;

        value = next.array() - next[0];  // relative normalization, V(s0) = 0

        if (span < options.epsilon) {
            solution.gain_lower = lo;
            solution.gain_upper = hi;
            solution.values = value;
            solution.gain = evaluate_policy_exact(solution.policy, model).gain;
            return solution;
        }
    }
    throw NumericError("relative value iteration did not converge within " +
                           std::to_string(options.max_iterations) + " iterations",
                       solution.span_trace.empty() ? 0.0 : solution.span_trace.back(),
                       solution.span_trace);
}

EvaluationResult evaluate_policy_exact(const std::vector<Action>& policy,
                                       const TransitionModel& model) {
    const int n = model.state_count;
    if (static_cast<int>(policy.size()) != n)
        throw std::invalid_argument("evaluate_policy_exact: policy size mismatch");

    // Column s holds the outgoing distribution of state s, so mu' = P^T mu
    // is one step of the chain.
    std::vector<Eigen::Triplet<double>> triplets;
    Vector reward(n);
    for (int s = 0; s < n; ++s) {
        const ActionRow& row = model.row_for(s, policy[s]);  // throws if infeasible
        reward[s] = row.expected_reward;
        const auto targets = model.targets(row);
        const auto masses = model.masses(row);
        for (std::size_t k = 0; k < targets.size(); ++k)
            triplets.emplace_back(targets[k], s, masses[k]);
    }
    Eigen::SparseMatrix<double> step(n, n);
    step.setFromTriplets(triplets.begin(), triplets.end());

    const int start = state_index(State{0, model.scenario.aoi_cap}, model.scenario.aoi_cap);
    Vector mu = Vector::Zero(n);
    mu[start] = 1.0;

    constexpr double kTol = 1e-12;
    constexpr long kMaxIter = 1000000;
    double prev_residual = std::numeric_limits<double>::infinity();
    bool damped = false;
    EvaluationResult result;
    for (long iter = 1; iter <= kMaxIter; ++iter) {
        Vector advanced = step * mu;
        if (damped) advanced = 0.5 * (advanced + mu);
        advanced /= advanced.sum();
        const double residual = (advanced - mu).lpNorm<Eigen::Infinity>();
        mu.swap(advanced);
        result.iterations = iter;
        result.residual = residual;
        if (residual <= kTol) break;
        if (residual >= prev_residual) damped = true;  // cycling or stalling
        prev_residual = residual;
        if (iter == kMaxIter)
            throw NumericError("policy evaluation did not reach a stationary "
                               "distribution", residual);
    }

    result.stationary_distribution = mu;
    result.gain = mu.dot(reward);
    result.source_usage.assign(model.scenario.sources.size() + 1, 0.0);
    for (int s = 0; s < n; ++s) {
        result.source_usage[policy[s].id()] += mu[s];
        if (!policy[s].is_idle())
            result.avg_energy_per_slot +=
                mu[s] * model.scenario.sources[policy[s].source() - 1].cost;
    }
    return result;
}

ThresholdSummary extract_thresholds(const std::vector<Action>& policy,
                                    int battery_capacity, int aoi_cap) {
    if (static_cast<int>(policy.size()) != state_count(battery_capacity, aoi_cap))
        throw std::invalid_argument("extract_thresholds: policy size mismatch");
    ThresholdSummary summary;
    summary.idle_threshold.resize(battery_capacity + 1);
    summary.threshold_structured.resize(battery_capacity + 1);
    for (int b = 0; b <= battery_capacity; ++b) {
        int prefix = 0;
        while (prefix < aoi_cap &&
               policy[state_index(State{b, prefix + 1}, aoi_cap)].is_idle())
            ++prefix;
        bool structured = true;
        for (int aoi = prefix + 1; aoi <= aoi_cap; ++aoi)
            if (policy[state_index(State{b, aoi}, aoi_cap)].is_idle()) structured = false;
        summary.idle_threshold[b] = prefix;
        summary.threshold_structured[b] = structured;
    }
    return summary;
}

void write_policy_map_csv(const std::vector<Action>& policy, int battery_capacity,
                          int aoi_cap, std::ostream& out) {
    out << "battery,aoi,action\n";
    for (int b = 0; b <= battery_capacity; ++b)
        for (int aoi = 1; aoi <= aoi_cap; ++aoi)
            out << b << ',' << aoi << ','
                << policy[state_index(State{b, aoi}, aoi_cap)].id() << '\n';
}

}  // namespace aoi
