#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bldctune {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle to [0, 2*pi).
inline double wrap_two_pi(double angle) {
    double wrapped = std::fmod(angle, kTwoPi);
    if (wrapped < 0.0) {
        wrapped += kTwoPi;
    }
    return wrapped;
}

inline double clamp(double value, double lo, double hi) {
    return std::min(std::max(value, lo), hi);
}

template <typename... Ts>
bool all_finite(Ts... values) {
    return (std::isfinite(values) && ...);
}

}  // namespace bldctune
