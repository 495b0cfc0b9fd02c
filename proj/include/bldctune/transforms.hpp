#pragma once

#include <cmath>
#include <utility>

namespace bldctune {

struct TwoPhase {
    double alpha = 0.0;
    double beta = 0.0;
};

struct ThreePhase {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

struct DqPair {
    double d = 0.0;
    double q = 0.0;
};

/// Amplitude-invariant Clarke transform, abc -> alpha/beta.
inline TwoPhase clarke(double ia, double ib, double ic) {
    return TwoPhase{(2.0 / 3.0) * (ia - 0.5 * ib - 0.5 * ic),
                    (ib - ic) / std::sqrt(3.0)};
}

/// Park transform, alpha/beta -> dq at the given electrical angle.
inline DqPair park(double alpha, double beta, double theta_e) {
    const double c = std::cos(theta_e);
    const double s = std::sin(theta_e);
    return DqPair{alpha * c + beta * s, -alpha * s + beta * c};
}

inline TwoPhase inverse_park(double d, double q, double theta_e) {
    const double c = std::cos(theta_e);
    const double s = std::sin(theta_e);
    return TwoPhase{d * c - q * s, d * s + q * c};
}

/// Produces a zero-sum three-phase set.
inline ThreePhase inverse_clarke(double alpha, double beta) {
    const double half_sqrt3_beta = 0.5 * std::sqrt(3.0) * beta;
    return ThreePhase{alpha, -0.5 * alpha + half_sqrt3_beta,
                      -0.5 * alpha - half_sqrt3_beta};
}

}  // namespace bldctune
