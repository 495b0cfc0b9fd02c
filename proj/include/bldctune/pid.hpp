#pragma once

#include <stdexcept>
#include <utility>

#include "bldctune/math_util.hpp"

namespace bldctune {

/// Parallel-form discrete PID parameters. kd = 0 gives a plain PI.
/// derivative_filter_coeff is the derivative low-pass length in samples.
struct PidGains {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;
    double output_min = -1.0;
    double output_max = 1.0;
    double derivative_filter_coeff = 20.0;
};

inline void validate(const PidGains& g) {
    if (!(g.output_min < g.output_max)) {
        throw std::invalid_argument("pid output_min must be below output_max");
    }
    if (g.kp < 0.0 || g.ki < 0.0 || g.kd < 0.0) {
        throw std::invalid_argument("pid gains must be non-negative");
    }
}

struct PidState {
    double integrator = 0.0;
    double prev_measurement = 0.0;
    double filtered_derivative = 0.0;  // filtered d(-measurement)/dt
    bool primed = false;               // first call skips the derivative kick
};

/// One controller update. Derivative acts on the measurement through a
/// first-order filter; anti-windup halts integration while the output is
/// saturated in the direction of the error, and the integrator itself is
/// clamped to the output range.
inline std::pair<double, PidState> pid_step(const PidGains& gains,
                                            const PidState& state,
                                            double reference,
                                            double measurement, double dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("pid_step requires dt > 0");
    }

    const double error = reference - measurement;

    PidState next = state;
    double raw_derivative = 0.0;
    if (state.primed) {
        raw_derivative = -(measurement - state.prev_measurement) / dt;
    }
    const double n = gains.derivative_filter_coeff;
    const double alpha = 1.0 / (n + 1.0);
    next.filtered_derivative =
        state.filtered_derivative + alpha * (raw_derivative - state.filtered_derivative);
    next.prev_measurement = measurement;
    next.primed = true;

    const double unsaturated =
        gains.kp * error + state.integrator + gains.kd * next.filtered_derivative;

    const bool saturated_high = unsaturated > gains.output_max && error > 0.0;
    const bool saturated_low = unsaturated < gains.output_min && error < 0.0;
    if (!saturated_high && !saturated_low) {
        next.integrator = clamp(state.integrator + gains.ki * error * dt,
                                gains.output_min, gains.output_max);
    }

    const double output =
        clamp(gains.kp * error + next.integrator + gains.kd * next.filtered_derivative,
              gains.output_min, gains.output_max);
    return {output, next};
}

}  // namespace bldctune
