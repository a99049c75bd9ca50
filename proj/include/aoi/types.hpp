#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aoi {

using Vector = Eigen::VectorXd;

/// Rejected scenario description or malformed input file.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative computation failed to converge within its cap.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double residual,
                 std::vector<double> trace = {})
        : std::runtime_error(what), residual(residual), trace(std::move(trace)) {}

    double residual;
    std::vector<double> trace;
};

/// Battery level and age of the newest status update held by the monitor.
struct State {
    int battery = 0;
    int aoi = 1;

    friend bool operator==(const State&, const State&) = default;
};

/// Idle or a query to one of the n sources. Encoded as 0 for idle,
/// the 1-based source index otherwise (the encoding used in CSV exports).
class Action {
public:
    constexpr Action() = default;

    static constexpr Action idle() { return Action{0}; }
    static constexpr Action query(int source) { return Action{source}; }

    constexpr bool is_idle() const { return id_ == 0; }
    constexpr int source() const { return id_; }
    constexpr int id() const { return id_; }

    friend constexpr bool operator==(Action, Action) = default;

private:
    explicit constexpr Action(int id) : id_(id) {}
    int id_ = 0;
};

inline int state_count(int battery_capacity, int aoi_cap) {
    return (battery_capacity + 1) * aoi_cap;
}

// Dense state index: b * aoi_cap + (aoi - 1).
inline int state_index(const State& s, int aoi_cap) {
    return s.battery * aoi_cap + (s.aoi - 1);
}

inline State state_at(int index, int aoi_cap) {
    return State{index / aoi_cap, index % aoi_cap + 1};
}

}  // namespace aoi
