#pragma once

#include <cmath>
#include <stdexcept>

#include "bldctune/math_util.hpp"
#include "bldctune/motor.hpp"

namespace bldctune {

struct PhaseVoltages {
    double va = 0.0;
    double vb = 0.0;
    double vc = 0.0;
};

/// Six 60-degree commutation sectors per electrical revolution, aligned so
/// the energized pair always sits on the back-EMF flat tops (|f| = 1).
/// Position feedback is ideal: no Hall hysteresis.
inline int hall_sector(double theta_e) {
    static constexpr double kSectorOrigin = kPi / 6.0;
    const double t = wrap_two_pi(theta_e - kSectorOrigin);
    int sector = static_cast<int>(t / (kPi / 3.0));
    if (sector > 5) {
        sector = 5;  // guard against t == 2*pi after rounding
    }
    return sector;
}

namespace detail {
// Per-sector (high, low) phase pair; the remaining phase floats.
// Sequence AB, AC, BC, BA, CA, CB starting at sector 0 = [30, 90) deg.
inline constexpr int kSectorHigh[6] = {0, 0, 1, 1, 2, 2};
inline constexpr int kSectorLow[6] = {1, 2, 2, 0, 0, 1};
}  // namespace detail

/// Average-value six-step inverter: the high phase of the sector's active
/// pair gets +duty*Vdc/2, the low phase -duty*Vdc/2. The floating phase is
/// fed its own instantaneous back-EMF so the average model drives no current
/// through it; that voltage is clamped to +/- Vdc/2 like a real half-bridge.
inline PhaseVoltages six_step_voltages(int sector, double duty, double vdc,
                                       double floating_phase_emf = 0.0) {
    if (sector < 0 || sector > 5) {
        throw std::invalid_argument("commutation sector must be in [0, 5]");
    }
    const double half_bus = vdc / 2.0;
    const double drive = clamp(duty, -1.0, 1.0) * half_bus;

    double v[3] = {0.0, 0.0, 0.0};
    v[detail::kSectorHigh[sector]] = drive;
    v[detail::kSectorLow[sector]] = -drive;
    const int floating = 3 - detail::kSectorHigh[sector] - detail::kSectorLow[sector];
    v[floating] = clamp(floating_phase_emf, -half_bus, half_bus);

    return PhaseVoltages{v[0], v[1], v[2]};
}

/// Limits the dq voltage vector to the linear modulation region Vdc/sqrt(3),
/// scaling the vector so the angle is preserved.
inline std::pair<double, double> clamp_modulation(double vd_ref, double vq_ref,
                                                  double vdc) {
    const double limit = vdc / std::sqrt(3.0);
    const double mag = std::hypot(vd_ref, vq_ref);
    if (mag <= limit || mag == 0.0) {
        return {vd_ref, vq_ref};
    }
    const double scale = limit / mag;
    return {vd_ref * scale, vq_ref * scale};
}

}  // namespace bldctune
