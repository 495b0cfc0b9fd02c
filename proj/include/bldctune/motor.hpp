#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "bldctune/math_util.hpp"

namespace bldctune {

/// Electrical and mechanical constants of the motor. All values SI.
/// inductance is the effective per-phase value (self minus mutual).
struct MotorParams {
    double resistance = 5.6;          // ohm
    double inductance = 0.92e-3;      // henry, L - M
    double back_emf_const = 0.047;    // V*s/rad
    double torque_const = 0.07;       // N*m/A, stored but unused: the torque
                                      // path is expressed through back_emf_const
    double inertia = 480e-9;          // kg*m^2
    double friction = 550e-9;         // N*m*s
    int pole_count = 14;              // must be even; pole pairs = pole_count/2
    double dc_link_voltage = 12.0;    // volt
    double sample_time = 5e-5;        // second

    double pole_pairs() const { return static_cast<double>(pole_count) / 2.0; }
};

inline void validate(const MotorParams& p) {
    if (!(p.resistance > 0.0) || !(p.inductance > 0.0) || !(p.inertia > 0.0) ||
        !(p.back_emf_const > 0.0) || !(p.friction >= 0.0) ||
        !(p.sample_time > 0.0) || !(p.dc_link_voltage > 0.0)) {
        throw std::invalid_argument("motor parameters must be positive (friction >= 0)");
    }
    if (p.pole_count < 2 || p.pole_count % 2 != 0) {
        throw std::invalid_argument("pole_count must be an even integer >= 2");
    }
}

/// State vector [ia ib ic omega theta_e] plus the unwrapped mechanical
/// angle used by the position loop. omega is mechanical, theta_e electrical.
struct MotorState {
    double ia = 0.0;          // ampere
    double ib = 0.0;          // ampere
    double ic = 0.0;          // ampere
    double omega = 0.0;       // rad/s mechanical
    double theta_e = 0.0;     // rad electrical, wrapped to [0, 2*pi)
    double theta_mech = 0.0;  // rad mechanical, unwrapped accumulator
};

struct MotorInput {
    double va = 0.0;           // volt
    double vb = 0.0;           // volt
    double vc = 0.0;           // volt
    double load_torque = 0.0;  // N*m
};

enum class Phase { A, B, C };

/// Unit trapezoidal back-EMF waveform: flat at +1 for 120 electrical degrees,
/// 60-degree linear ramps, flat at -1 for 120 degrees. Phase A's positive
/// flat top is centered at theta = pi/2; B and C are shifted by -120 and
/// -240 degrees. Periodic with period 2*pi.
inline double back_emf_shape(double theta_e, Phase phase) {
    static constexpr double kSixth = kPi / 6.0;   // 30 degrees
    static constexpr double kSlope = 6.0 / kPi;   // 2 units over 60 degrees

    double shift = 0.0;
    switch (phase) {
        case Phase::A: shift = 0.0; break;
        case Phase::B: shift = kTwoPi / 3.0; break;
        case Phase::C: shift = 2.0 * kTwoPi / 3.0; break;
    }
    const double t = wrap_two_pi(theta_e - shift);

    if (t < kSixth) {
        return t * kSlope;  // rising through zero at t = 0
    }
    if (t < 5.0 * kSixth) {
        return 1.0;
    }
    if (t < 7.0 * kSixth) {
        return 1.0 - (t - 5.0 * kSixth) * kSlope;
    }
    if (t < 11.0 * kSixth) {
        return -1.0;
    }
    return -1.0 + (t - 11.0 * kSixth) * kSlope;
}

using Mat5x5 = std::array<std::array<double, 5>, 5>;
using Mat5x4 = std::array<std::array<double, 4>, 5>;

/// Continuous-time state matrices evaluated at the given electrical angle.
/// Rows: three phase-current equations, the mechanical speed equation, and
/// the electrical-angle kinematic d(theta_e)/dt = (P/2) * omega. The input
/// matrix covers the four physical inputs [va vb vc load_torque].
inline std::pair<Mat5x5, Mat5x4> build_state_matrices(const MotorParams& params,
                                                      double theta_e) {
    validate(params);

    const double fa = back_emf_shape(theta_e, Phase::A);
    const double fb = back_emf_shape(theta_e, Phase::B);
    const double fc = back_emf_shape(theta_e, Phase::C);
    const double inv_l = 1.0 / params.inductance;
    const double inv_j = 1.0 / params.inertia;
    const double ke = params.back_emf_const;

    Mat5x5 a{};
    a[0][0] = -params.resistance * inv_l;
    a[0][3] = -ke * fa * inv_l;
    a[1][1] = -params.resistance * inv_l;
    a[1][3] = -ke * fb * inv_l;
    a[2][2] = -params.resistance * inv_l;
    a[2][3] = -ke * fc * inv_l;
    a[3][0] = ke * fa * inv_j;
    a[3][1] = ke * fb * inv_j;
    a[3][2] = ke * fc * inv_j;
    a[3][3] = -params.friction * inv_j;
    a[4][3] = params.pole_pairs();

    Mat5x4 b{};
    b[0][0] = inv_l;
    b[1][1] = inv_l;
    b[2][2] = inv_l;
    b[3][3] = -inv_j;

    return {a, b};
}

/// One forward-Euler step: x' = (Ts*A + I)*x + Ts*B*u, with A and B rebuilt
/// at the current electrical angle. The unwrapped mechanical angle advances
/// by Ts*omega; theta_e is wrapped to [0, 2*pi).
inline MotorState step(const MotorState& state, const MotorInput& input,
                       const MotorParams& params) {
    const auto [a, b] = build_state_matrices(params, state.theta_e);
    const std::array<double, 5> x{state.ia, state.ib, state.ic, state.omega,
                                  state.theta_e};
    const std::array<double, 4> u{input.va, input.vb, input.vc,
                                  input.load_torque};
    const double ts = params.sample_time;

    std::array<double, 5> next{};
    for (int i = 0; i < 5; ++i) {
        double acc = x[i];
        for (int j = 0; j < 5; ++j) {
            acc += ts * a[i][j] * x[j];
        }
        for (int j = 0; j < 4; ++j) {
            acc += ts * b[i][j] * u[j];
        }
        next[i] = acc;
    }

    MotorState out;
    out.ia = next[0];
    out.ib = next[1];
    out.ic = next[2];
    out.omega = next[3];
    out.theta_e = wrap_two_pi(next[4]);
    out.theta_mech = state.theta_mech + ts * state.omega;
    return out;
}

/// Electromagnetic torque in the omega-cancelled form Te = ke * sum(f_i * i_i),
/// well defined at standstill.
inline double electromagnetic_torque(const MotorState& state,
                                     const MotorParams& params) {
    const double fa = back_emf_shape(state.theta_e, Phase::A);
    const double fb = back_emf_shape(state.theta_e, Phase::B);
    const double fc = back_emf_shape(state.theta_e, Phase::C);
    return params.back_emf_const * (fa * state.ia + fb * state.ib + fc * state.ic);
}

/// Blow-up detector for unstable gain candidates.
inline bool diverged(const MotorState& state, double blowup_bound = 1e6) {
    const auto over = [blowup_bound](double v) {
        return !std::isfinite(v) || std::abs(v) > blowup_bound;
    };
    return over(state.ia) || over(state.ib) || over(state.ic) ||
           over(state.omega) || over(state.theta_e) || over(state.theta_mech);
}

}  // namespace bldctune
