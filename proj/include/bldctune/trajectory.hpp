#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bldctune/rng.hpp"

namespace bldctune {

/// Position reference: a single step, or a seeded sequence of random holds
/// ("multi_step") with per-segment target and dwell drawn uniformly from the
/// configured ranges.
struct TrajectoryConfig {
    enum class Kind { step, multi_step };
    Kind kind = Kind::step;

    // step
    double amplitude = 1.0;   // rad
    double start_time = 0.0;  // s

    // multi_step
    std::uint64_t seed = 1;
    int count = 4;
    std::pair<double, double> amplitude_range{-1.0, 1.0};  // rad
    std::pair<double, double> dwell_range{0.05, 0.15};     // s
};

inline void validate(const TrajectoryConfig& t) {
    if (t.kind == TrajectoryConfig::Kind::step) {
        if (t.start_time < 0.0) {
            throw std::invalid_argument("step start_time must be >= 0");
        }
        return;
    }
    if (t.count < 1) {
        throw std::invalid_argument("multi_step count must be >= 1");
    }
    if (!(t.amplitude_range.first <= t.amplitude_range.second) ||
        !(t.dwell_range.first <= t.dwell_range.second) || t.dwell_range.first <= 0.0) {
        throw std::invalid_argument("multi_step ranges must be ordered with positive dwell");
    }
}

/// Piecewise-constant reference schedule: (time, target) pairs, target holds
/// until the next entry.
using ReferenceSchedule = std::vector<std::pair<double, double>>;

inline ReferenceSchedule build_schedule(const TrajectoryConfig& cfg) {
    validate(cfg);
    ReferenceSchedule schedule;
    if (cfg.kind == TrajectoryConfig::Kind::step) {
        if (cfg.start_time > 0.0) {
            schedule.emplace_back(0.0, 0.0);
        }
        schedule.emplace_back(cfg.start_time, cfg.amplitude);
        return schedule;
    }

    Rng rng(cfg.seed);
    double t = 0.0;
    for (int k = 0; k < cfg.count; ++k) {
        const double target =
            rng.uniform(cfg.amplitude_range.first, cfg.amplitude_range.second);
        schedule.emplace_back(t, target);
        t += rng.uniform(cfg.dwell_range.first, cfg.dwell_range.second);
    }
    return schedule;
}

inline double reference_at(const ReferenceSchedule& schedule, double t) {
    double value = 0.0;
    for (const auto& [start, target] : schedule) {
        if (t + 1e-12 >= start) {
            value = target;
        } else {
            break;
        }
    }
    return value;
}

/// Load torque as a function of time: constant, or stepwise linear-hold
/// breakpoints (value holds from each breakpoint until the next).
struct LoadProfile {
    enum class Kind { constant, piecewise };
    Kind kind = Kind::constant;
    double constant_value = 0.0;                         // N*m
    std::vector<std::pair<double, double>> breakpoints;  // (time s, torque N*m)
};

inline void validate(const LoadProfile& load) {
    if (load.kind == LoadProfile::Kind::piecewise) {
        if (load.breakpoints.empty()) {
            throw std::invalid_argument("piecewise load needs at least one breakpoint");
        }
        for (std::size_t i = 1; i < load.breakpoints.size(); ++i) {
            if (!(load.breakpoints[i].first > load.breakpoints[i - 1].first)) {
                throw std::invalid_argument("load breakpoints must increase in time");
            }
        }
    }
}

inline double load_torque_at(const LoadProfile& load, double t) {
    if (load.kind == LoadProfile::Kind::constant) {
        return load.constant_value;
    }
    double value = 0.0;
    for (const auto& [start, torque] : load.breakpoints) {
        if (t + 1e-12 >= start) {
            value = torque;
        } else {
            break;
        }
    }
    return value;
}

}  // namespace bldctune
