#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bldctune/cascade.hpp"
#include "bldctune/metrics.hpp"
#include "bldctune/motor.hpp"
#include "bldctune/nsga2.hpp"
#include "bldctune/trajectory.hpp"

namespace bldctune {

enum class ControlScheme { trapezoidal, foc };

inline std::string to_string(ControlScheme scheme) {
    return scheme == ControlScheme::trapezoidal ? "trapezoidal" : "foc";
}

inline ControlScheme scheme_from_string(const std::string& name) {
    if (name == "trapezoidal") {
        return ControlScheme::trapezoidal;
    }
    if (name == "foc") {
        return ControlScheme::foc;
    }
    throw std::invalid_argument("unknown control scheme: " + name);
}

/// Settings for the tuning campaign: the NSGA-II run over the outer position
/// PID, gene bounds, the THD analysis window, and the optional stage-one
/// single-objective pass over the inner speed PI.
struct TuningConfig {
    Nsga2Config nsga;
    Bounds position_bounds{{0.0, 0.0, 0.0}, {50.0, 200.0, 5.0}};  // [kp ki kd]
    Bounds inner_bounds{{0.0, 0.0}, {1.0, 100.0}};                // [kp ki]
    ThdWindow thd_window;
    double penalty_fitness = 1e6;
    bool tune_inner_first = false;
    double stage1_speed_step = 60.0;  // rad/s reference step for stage one
    double stage1_duration = 0.05;    // s
};

struct ExperimentConfig {
    MotorParams motor;
    ControlScheme scheme = ControlScheme::trapezoidal;
    CascadeConfig cascade;
    TrajectoryConfig trajectory;
    double sim_duration = 0.25;  // s
    LoadProfile load;
    double blowup_bound = 1e6;
    TuningConfig tuning;
};

inline void validate(const ExperimentConfig& cfg) {
    validate(cfg.motor);
    validate(cfg.cascade);
    if (cfg.scheme == ControlScheme::foc) {
        validate(cfg.cascade.current_gains);
    }
    validate(cfg.trajectory);
    validate(cfg.load);
    validate(cfg.tuning.nsga);
    validate(cfg.tuning.position_bounds);
    validate(cfg.tuning.inner_bounds);
    if (!(cfg.sim_duration > 0.0)) {
        throw std::invalid_argument("sim_duration must be positive");
    }
    if (!(cfg.blowup_bound > 0.0)) {
        throw std::invalid_argument("blowup_bound must be positive");
    }
    if (!(cfg.tuning.penalty_fitness > 0.0)) {
        throw std::invalid_argument("penalty_fitness must be positive");
    }
    if (!(cfg.tuning.stage1_duration > 0.0)) {
        throw std::invalid_argument("stage1_duration must be positive");
    }
    for (double b : cfg.tuning.position_bounds.lower) {
        if (b < 0.0) {
            throw std::invalid_argument("gain bounds must be non-negative");
        }
    }
    for (double b : cfg.tuning.inner_bounds.lower) {
        if (b < 0.0) {
            throw std::invalid_argument("gain bounds must be non-negative");
        }
    }
    if (cfg.tuning.position_bounds.dimension() != 3) {
        throw std::invalid_argument("position bounds must cover [kp, ki, kd]");
    }
    if (cfg.tuning.inner_bounds.dimension() != 2) {
        throw std::invalid_argument("inner bounds must cover [kp, ki]");
    }
}

/// Reachability heuristic: warns when the reference asks for more travel
/// than the bus-voltage speed ceiling allows within the horizon.
inline std::vector<std::string> config_warnings(const ExperimentConfig& cfg) {
    std::vector<std::string> warnings;
    const double speed_ceiling =
        cfg.motor.dc_link_voltage / (2.0 * cfg.motor.back_emf_const);

    const auto schedule = build_schedule(cfg.trajectory);
    double previous = 0.0;
    double travel = 0.0;
    for (const auto& [start, target] : schedule) {
        travel += std::abs(target - previous);
        previous = target;
    }
    if (travel > 0.7 * speed_ceiling * cfg.sim_duration) {
        std::ostringstream oss;
        oss << "trajectory asks for " << travel
            << " rad of travel; the bus-voltage speed ceiling (~" << speed_ceiling
            << " rad/s) makes that hard to reach within " << cfg.sim_duration << " s";
        warnings.push_back(oss.str());
    }
    return warnings;
}

// ---- JSON mapping ---------------------------------------------------------

using json = nlohmann::json;

inline void to_json(json& j, const MotorParams& p) {
    j = json{{"resistance_ohm", p.resistance},
             {"inductance_h", p.inductance},
             {"back_emf_const_vs_rad", p.back_emf_const},
             {"torque_const_nm_a", p.torque_const},
             {"inertia_kgm2", p.inertia},
             {"friction_nms", p.friction},
             {"pole_count", p.pole_count},
             {"dc_link_voltage_v", p.dc_link_voltage},
             {"sample_time_s", p.sample_time}};
}

inline void from_json(const json& j, MotorParams& p) {
    j.at("resistance_ohm").get_to(p.resistance);
    j.at("inductance_h").get_to(p.inductance);
    j.at("back_emf_const_vs_rad").get_to(p.back_emf_const);
    j.at("torque_const_nm_a").get_to(p.torque_const);
    j.at("inertia_kgm2").get_to(p.inertia);
    j.at("friction_nms").get_to(p.friction);
    j.at("pole_count").get_to(p.pole_count);
    j.at("dc_link_voltage_v").get_to(p.dc_link_voltage);
    j.at("sample_time_s").get_to(p.sample_time);
}

inline void to_json(json& j, const PidGains& g) {
    j = json{{"kp", g.kp},
             {"ki", g.ki},
             {"kd", g.kd},
             {"output_min", g.output_min},
             {"output_max", g.output_max},
             {"derivative_filter_coeff", g.derivative_filter_coeff}};
}

inline void from_json(const json& j, PidGains& g) {
    j.at("kp").get_to(g.kp);
    j.at("ki").get_to(g.ki);
    j.at("kd").get_to(g.kd);
    j.at("output_min").get_to(g.output_min);
    j.at("output_max").get_to(g.output_max);
    j.at("derivative_filter_coeff").get_to(g.derivative_filter_coeff);
}

inline void to_json(json& j, const CascadeConfig& c) {
    j = json{{"position_gains", c.position_gains},
             {"speed_gains", c.speed_gains},
             {"current_gains", c.current_gains},
             {"speed_loop_divisor", c.speed_loop_divisor},
             {"position_loop_divisor", c.position_loop_divisor}};
}

inline void from_json(const json& j, CascadeConfig& c) {
    j.at("position_gains").get_to(c.position_gains);
    j.at("speed_gains").get_to(c.speed_gains);
    j.at("current_gains").get_to(c.current_gains);
    j.at("speed_loop_divisor").get_to(c.speed_loop_divisor);
    j.at("position_loop_divisor").get_to(c.position_loop_divisor);
}

inline void to_json(json& j, const TrajectoryConfig& t) {
    if (t.kind == TrajectoryConfig::Kind::step) {
        j = json{{"type", "step"},
                 {"amplitude_rad", t.amplitude},
                 {"start_time_s", t.start_time}};
        return;
    }
    j = json{{"type", "multi_step"},
             {"seed", t.seed},
             {"count", t.count},
             {"amplitude_range_rad", {t.amplitude_range.first, t.amplitude_range.second}},
             {"dwell_range_s", {t.dwell_range.first, t.dwell_range.second}}};
}

inline void from_json(const json& j, TrajectoryConfig& t) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "step") {
        t.kind = TrajectoryConfig::Kind::step;
        j.at("amplitude_rad").get_to(t.amplitude);
        j.at("start_time_s").get_to(t.start_time);
        return;
    }
    if (type != "multi_step") {
        throw std::invalid_argument("unknown trajectory type: " + type);
    }
    t.kind = TrajectoryConfig::Kind::multi_step;
    j.at("seed").get_to(t.seed);
    j.at("count").get_to(t.count);
    t.amplitude_range = {j.at("amplitude_range_rad").at(0).get<double>(),
                         j.at("amplitude_range_rad").at(1).get<double>()};
    t.dwell_range = {j.at("dwell_range_s").at(0).get<double>(),
                     j.at("dwell_range_s").at(1).get<double>()};
}

inline void to_json(json& j, const LoadProfile& l) {
    if (l.kind == LoadProfile::Kind::constant) {
        j = json{{"type", "constant"}, {"value_nm", l.constant_value}};
        return;
    }
    json points = json::array();
    for (const auto& [t, v] : l.breakpoints) {
        points.push_back({t, v});
    }
    j = json{{"type", "piecewise"}, {"points_s_nm", points}};
}

inline void from_json(const json& j, LoadProfile& l) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "constant") {
        l.kind = LoadProfile::Kind::constant;
        j.at("value_nm").get_to(l.constant_value);
        return;
    }
    if (type != "piecewise") {
        throw std::invalid_argument("unknown load profile type: " + type);
    }
    l.kind = LoadProfile::Kind::piecewise;
    l.breakpoints.clear();
    for (const auto& point : j.at("points_s_nm")) {
        l.breakpoints.emplace_back(point.at(0).get<double>(), point.at(1).get<double>());
    }
}

inline void to_json(json& j, const Nsga2Config& n) {
    j = json{{"population_size", n.population_size},
             {"generations", n.generations},
             {"crossover_probability", n.crossover_probability},
             {"crossover_distribution_index", n.crossover_distribution_index},
             {"mutation_probability", n.mutation_probability},
             {"mutation_distribution_index", n.mutation_distribution_index},
             {"rng_seed", n.rng_seed}};
}

inline void from_json(const json& j, Nsga2Config& n) {
    j.at("population_size").get_to(n.population_size);
    j.at("generations").get_to(n.generations);
    j.at("crossover_probability").get_to(n.crossover_probability);
    j.at("crossover_distribution_index").get_to(n.crossover_distribution_index);
    j.at("mutation_probability").get_to(n.mutation_probability);
    j.at("mutation_distribution_index").get_to(n.mutation_distribution_index);
    j.at("rng_seed").get_to(n.rng_seed);
}

inline void to_json(json& j, const Bounds& b) {
    j = json{{"lower", b.lower}, {"upper", b.upper}};
}

inline void from_json(const json& j, Bounds& b) {
    j.at("lower").get_to(b.lower);
    j.at("upper").get_to(b.upper);
}

inline void to_json(json& j, const ThdWindow& w) {
    if (w.kind == ThdWindow::Kind::full) {
        j = json{{"type", "full"}};
        return;
    }
    j = json{{"type", "steady_state_fraction"}, {"fraction", w.fraction}};
}

inline void from_json(const json& j, ThdWindow& w) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "full") {
        w.kind = ThdWindow::Kind::full;
        return;
    }
    if (type != "steady_state_fraction") {
        throw std::invalid_argument("unknown thd window type: " + type);
    }
    w.kind = ThdWindow::Kind::steady_state_fraction;
    j.at("fraction").get_to(w.fraction);
}

inline void to_json(json& j, const TuningConfig& t) {
    j = json{{"nsga2", t.nsga},
             {"position_gain_bounds", t.position_bounds},
             {"inner_gain_bounds", t.inner_bounds},
             {"thd_window", t.thd_window},
             {"penalty_fitness", t.penalty_fitness},
             {"tune_inner_first", t.tune_inner_first},
             {"stage1_speed_step_rad_s", t.stage1_speed_step},
             {"stage1_duration_s", t.stage1_duration}};
}

inline void from_json(const json& j, TuningConfig& t) {
    j.at("nsga2").get_to(t.nsga);
    j.at("position_gain_bounds").get_to(t.position_bounds);
    j.at("inner_gain_bounds").get_to(t.inner_bounds);
    j.at("thd_window").get_to(t.thd_window);
    j.at("penalty_fitness").get_to(t.penalty_fitness);
    j.at("tune_inner_first").get_to(t.tune_inner_first);
    j.at("stage1_speed_step_rad_s").get_to(t.stage1_speed_step);
    j.at("stage1_duration_s").get_to(t.stage1_duration);
}

inline void to_json(json& j, const ExperimentConfig& c) {
    j = json{{"motor", c.motor},
             {"scheme", to_string(c.scheme)},
             {"cascade", c.cascade},
             {"trajectory", c.trajectory},
             {"sim_duration_s", c.sim_duration},
             {"load_torque", c.load},
             {"blowup_bound", c.blowup_bound},
             {"tuning", c.tuning}};
}

inline void from_json(const json& j, ExperimentConfig& c) {
    j.at("motor").get_to(c.motor);
    c.scheme = scheme_from_string(j.at("scheme").get<std::string>());
    j.at("cascade").get_to(c.cascade);
    j.at("trajectory").get_to(c.trajectory);
    j.at("sim_duration_s").get_to(c.sim_duration);
    j.at("load_torque").get_to(c.load);
    j.at("blowup_bound").get_to(c.blowup_bound);
    j.at("tuning").get_to(c.tuning);
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
    return json(cfg).dump(2) + "\n";
}

inline ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    try {
        json::parse(text).get_to(cfg);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    validate(cfg);
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open config file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

inline bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return json(a) == json(b);
}

/// Bundled defaults for the GBM2804H-100T fixture motor. Inner-loop gains
/// come from the stage-one single-objective run and are frozen here; the
/// outer position PID carries the hand-verified stable fixture gains.
inline ExperimentConfig default_config(ControlScheme scheme) {
    ExperimentConfig cfg;
    cfg.scheme = scheme;

    // Outer position PID: hand-verified stable fixture gains. Output is the
    // speed reference in rad/s, kept under the bus-voltage speed ceiling.
    cfg.cascade.position_gains = PidGains{35.0, 2.0, 0.1, -100.0, 100.0, 20.0};

    if (scheme == ControlScheme::trapezoidal) {
        // Stage-one result for the duty-commanding speed PI.
        cfg.cascade.speed_gains = PidGains{0.015, 26.0, 0.0, -1.0, 1.0, 20.0};
        cfg.cascade.current_gains = PidGains{0.0, 0.0, 0.0, -1.0, 1.0, 20.0};
        cfg.tuning.inner_bounds = Bounds{{0.0, 0.0}, {0.3, 50.0}};
    } else {
        // Stage-one result for the iq-commanding speed PI; current PI set by
        // loop shaping at ~3 krad/s (kp = L*wc, ki = R*wc).
        const double vdq_limit = 12.0 / std::sqrt(3.0);
        cfg.cascade.speed_gains = PidGains{0.105, 3.3, 0.0, -1.5, 1.5, 20.0};
        cfg.cascade.current_gains =
            PidGains{2.76, 16800.0, 0.0, -vdq_limit, vdq_limit, 20.0};
        cfg.tuning.inner_bounds = Bounds{{0.0, 0.0}, {0.2, 10.0}};
    }
    return cfg;
}

}  // namespace bldctune
