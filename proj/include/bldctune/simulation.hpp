#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "bldctune/cascade.hpp"
#include "bldctune/config.hpp"
#include "bldctune/metrics.hpp"
#include "bldctune/motor.hpp"
#include "bldctune/power_stage.hpp"
#include "bldctune/trajectory.hpp"

namespace bldctune {

namespace detail {

inline Phase floating_phase_of(int sector) {
    const int idx = 3 - kSectorHigh[sector] - kSectorLow[sector];
    return idx == 0 ? Phase::A : idx == 1 ? Phase::B : Phase::C;
}

inline PidGains with_genes(PidGains gains, const std::vector<double>& genes) {
    gains.kp = genes[0];
    gains.ki = genes.size() > 1 ? genes[1] : 0.0;
    gains.kd = genes.size() > 2 ? genes[2] : 0.0;
    return gains;
}

}  // namespace detail

/// Steps the full closed loop (controller -> inverter -> motor) at the motor
/// sample time and records every sample. position_genes, when non-empty,
/// override the configured position PID's [kp, ki, kd] while keeping its
/// limits and filter. Terminates early with the diverged flag set when the
/// state exceeds the blow-up bound.
inline SimTrace run_simulation(const ExperimentConfig& config,
                               const std::vector<double>& position_genes = {}) {
    validate(config);

    CascadeConfig cascade = config.cascade;
    if (!position_genes.empty()) {
        cascade.position_gains =
            detail::with_genes(cascade.position_gains, position_genes);
    }

    const MotorParams& motor = config.motor;
    const double ts = motor.sample_time;
    const auto steps = static_cast<std::size_t>(std::llround(config.sim_duration / ts));
    const ReferenceSchedule schedule = build_schedule(config.trajectory);

    SimTrace trace;
    trace.sample_time = ts;
    trace.time.reserve(steps);

    MotorState state;
    CascadeState ctrl;

    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * ts;
        const double theta_ref = reference_at(schedule, t);
        const double load = load_torque_at(config.load, t);

        PhaseVoltages v;
        double actuation = 0.0;
        if (config.scheme == ControlScheme::trapezoidal) {
            auto [duty, next_ctrl] =
                trapezoidal_control_step(cascade, ctrl, theta_ref, state, ts);
            ctrl = next_ctrl;
            const int sector = hall_sector(state.theta_e);
            const double floating_emf =
                motor.back_emf_const *
                back_emf_shape(state.theta_e, detail::floating_phase_of(sector)) *
                state.omega;
            v = six_step_voltages(sector, duty, motor.dc_link_voltage, floating_emf);
            actuation = duty;
        } else {
            auto [voltages, next_ctrl] =
                foc_control_step(cascade, ctrl, theta_ref, state, motor, ts);
            ctrl = next_ctrl;
            v = voltages;
            actuation = ctrl.last_vq;
        }

        trace.time.push_back(t);
        trace.theta_ref.push_back(theta_ref);
        trace.theta_mech.push_back(state.theta_mech);
        trace.omega.push_back(state.omega);
        trace.torque.push_back(electromagnetic_torque(state, motor));
        trace.ia.push_back(state.ia);
        trace.ib.push_back(state.ib);
        trace.ic.push_back(state.ic);
        trace.actuation.push_back(actuation);

        state = step(state, MotorInput{v.va, v.vb, v.vc, load}, motor);
        if (diverged(state, config.blowup_bound)) {
            trace.diverged = true;
            break;
        }
    }
    return trace;
}

/// Both tuning objectives for one position-PID candidate; a diverged run
/// maps to the configured penalty pair.
inline FitnessPair evaluate_candidate(const ExperimentConfig& config,
                                      const std::vector<double>& position_genes) {
    const SimTrace trace = run_simulation(config, position_genes);
    const double penalty = config.tuning.penalty_fitness;
    if (trace.diverged) {
        return FitnessPair{penalty, penalty, true};
    }
    return FitnessPair{iae(trace),
                       torque_thd(trace, config.tuning.thd_window, penalty), false};
}

struct SpeedStepResult {
    double iae = 0.0;  // rad (speed error integral, rad/s * s)
    bool diverged = false;
};

/// Inner-loop-only run for stage-one tuning: the position loop is bypassed
/// and the speed loop tracks a reference step. pi_genes override the speed
/// PI's [kp, ki].
inline SpeedStepResult run_speed_step(const ExperimentConfig& config,
                                      const std::vector<double>& pi_genes) {
    validate(config);

    CascadeConfig cascade = config.cascade;
    if (!pi_genes.empty()) {
        cascade.speed_gains = detail::with_genes(cascade.speed_gains, pi_genes);
        cascade.speed_gains.kd = 0.0;
    }

    const MotorParams& motor = config.motor;
    const double ts = motor.sample_time;
    const auto steps =
        static_cast<std::size_t>(std::llround(config.tuning.stage1_duration / ts));
    const double omega_ref = config.tuning.stage1_speed_step;

    MotorState state;
    PidState speed_pid;
    PidState current_d;
    PidState current_q;

    SpeedStepResult result;
    for (std::size_t k = 0; k < steps; ++k) {
        result.iae += std::abs(omega_ref - state.omega) * ts;

        PhaseVoltages v;
        if (config.scheme == ControlScheme::trapezoidal) {
            auto [duty, next_pid] =
                pid_step(cascade.speed_gains, speed_pid, omega_ref, state.omega, ts);
            speed_pid = next_pid;
            const int sector = hall_sector(state.theta_e);
            const double floating_emf =
                motor.back_emf_const *
                back_emf_shape(state.theta_e, detail::floating_phase_of(sector)) *
                state.omega;
            v = six_step_voltages(sector, clamp(duty, -1.0, 1.0),
                                  motor.dc_link_voltage, floating_emf);
        } else {
            auto [iq_ref, next_pid] =
                pid_step(cascade.speed_gains, speed_pid, omega_ref, state.omega, ts);
            speed_pid = next_pid;

            const double angle = rotor_flux_angle(state.theta_e);
            const TwoPhase i_ab = clarke(state.ia, state.ib, state.ic);
            const DqPair i_dq = park(i_ab.alpha, i_ab.beta, angle);
            auto [vd_ref, d_state] =
                pid_step(cascade.current_gains, current_d, 0.0, i_dq.d, ts);
            auto [vq_ref, q_state] =
                pid_step(cascade.current_gains, current_q, iq_ref, i_dq.q, ts);
            current_d = d_state;
            current_q = q_state;
            const auto [vd, vq] =
                clamp_modulation(vd_ref, vq_ref, motor.dc_link_voltage);
            const TwoPhase v_ab = inverse_park(vd, vq, angle);
            const ThreePhase phases = inverse_clarke(v_ab.alpha, v_ab.beta);
            v = PhaseVoltages{phases.a, phases.b, phases.c};
        }

        state = step(state, MotorInput{v.va, v.vb, v.vc, 0.0}, motor);
        if (diverged(state, config.blowup_bound)) {
            result.diverged = true;
            break;
        }
    }
    return result;
}

}  // namespace bldctune
