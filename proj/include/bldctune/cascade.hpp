#pragma once

#include <cstdint>
#include <stdexcept>

#include "bldctune/math_util.hpp"
#include "bldctune/motor.hpp"
#include "bldctune/pid.hpp"
#include "bldctune/power_stage.hpp"
#include "bldctune/transforms.hpp"

namespace bldctune {

/// Gains and loop rates for the cascaded controllers. The outer position PID
/// commands a speed reference; the speed PI commands duty (trapezoidal) or
/// q-axis current (FOC); the FOC current PIs command dq voltages. Each
/// loop's actuator limits live in its PidGains. Divisors decimate the outer
/// loops relative to the base sample time; held outputs bridge the gaps.
struct CascadeConfig {
    PidGains position_gains;
    PidGains speed_gains;
    PidGains current_gains;  // FOC only, shared by the d and q loops
    int speed_loop_divisor = 1;
    int position_loop_divisor = 1;
};

inline void validate(const CascadeConfig& c) {
    validate(c.position_gains);
    validate(c.speed_gains);
    if (c.speed_loop_divisor < 1 || c.position_loop_divisor < 1) {
        throw std::invalid_argument("cascade loop divisors must be >= 1");
    }
}

struct CascadeState {
    PidState position;
    PidState speed;
    PidState current_d;
    PidState current_q;
    double held_speed_ref = 0.0;
    double held_inner_out = 0.0;  // duty (trapezoidal) or iq reference (FOC)
    double last_vq = 0.0;         // clamped q-axis voltage command (FOC)
    std::uint64_t tick = 0;
};

// The dq frame is aligned with the rotor flux; back_emf_shape puts phase A's
// EMF a half electrical turn ahead of that axis, so the Park angle carries a
// pi offset. Positive iq then produces positive torque.
inline double rotor_flux_angle(double theta_e) {
    return wrap_two_pi(theta_e + kPi);
}

/// Position PID (outer, unwrapped mechanical angle) -> speed reference;
/// speed PI (inner) -> PWM duty in [-1, 1].
inline std::pair<double, CascadeState> trapezoidal_control_step(
    const CascadeConfig& cfg, const CascadeState& state, double theta_ref,
    const MotorState& measured, double dt) {
    CascadeState next = state;

    if (state.tick % static_cast<std::uint64_t>(cfg.position_loop_divisor) == 0) {
        const double outer_dt = dt * cfg.position_loop_divisor;
        auto [speed_ref, pos_state] = pid_step(cfg.position_gains, state.position,
                                               theta_ref, measured.theta_mech,
                                               outer_dt);
        next.position = pos_state;
        next.held_speed_ref = speed_ref;
    }

    if (state.tick % static_cast<std::uint64_t>(cfg.speed_loop_divisor) == 0) {
        const double inner_dt = dt * cfg.speed_loop_divisor;
        auto [duty, speed_state] = pid_step(cfg.speed_gains, state.speed,
                                            next.held_speed_ref, measured.omega,
                                            inner_dt);
        next.speed = speed_state;
        next.held_inner_out = clamp(duty, -1.0, 1.0);
    }

    ++next.tick;
    return {next.held_inner_out, next};
}

/// Position PID -> speed reference; speed PI -> iq reference; id reference
/// fixed at zero; current PIs -> dq voltages, clamped to the linear
/// modulation region and rotated back to phase voltages.
inline std::pair<PhaseVoltages, CascadeState> foc_control_step(
    const CascadeConfig& cfg, const CascadeState& state, double theta_ref,
    const MotorState& measured, const MotorParams& params, double dt) {
    CascadeState next = state;

    if (state.tick % static_cast<std::uint64_t>(cfg.position_loop_divisor) == 0) {
        const double outer_dt = dt * cfg.position_loop_divisor;
        auto [speed_ref, pos_state] = pid_step(cfg.position_gains, state.position,
                                               theta_ref, measured.theta_mech,
                                               outer_dt);
        next.position = pos_state;
        next.held_speed_ref = speed_ref;
    }

    if (state.tick % static_cast<std::uint64_t>(cfg.speed_loop_divisor) == 0) {
        const double inner_dt = dt * cfg.speed_loop_divisor;
        auto [iq_ref, speed_state] = pid_step(cfg.speed_gains, state.speed,
                                              next.held_speed_ref, measured.omega,
                                              inner_dt);
        next.speed = speed_state;
        next.held_inner_out = iq_ref;
    }

    const double angle = rotor_flux_angle(measured.theta_e);
    const TwoPhase i_ab = clarke(measured.ia, measured.ib, measured.ic);
    const DqPair i_dq = park(i_ab.alpha, i_ab.beta, angle);

    auto [vd_ref, d_state] =
        pid_step(cfg.current_gains, state.current_d, 0.0, i_dq.d, dt);
    auto [vq_ref, q_state] = pid_step(cfg.current_gains, state.current_q,
                                      next.held_inner_out, i_dq.q, dt);
    next.current_d = d_state;
    next.current_q = q_state;

    const auto [vd, vq] = clamp_modulation(vd_ref, vq_ref, params.dc_link_voltage);
    next.last_vq = vq;
    const TwoPhase v_ab = inverse_park(vd, vq, angle);
    const ThreePhase v = inverse_clarke(v_ab.alpha, v_ab.beta);

    ++next.tick;
    return {PhaseVoltages{v.a, v.b, v.c}, next};
}

}  // namespace bldctune
