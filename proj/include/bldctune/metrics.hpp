#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "bldctune/dft.hpp"

namespace bldctune {

/// Time-indexed record of one closed-loop run. Columns share one length;
/// time advances uniformly by sample_time. actuation holds the PWM duty for
/// trapezoidal runs and the q-axis voltage command for FOC runs.
struct SimTrace {
    double sample_time = 5e-5;
    std::vector<double> time;
    std::vector<double> theta_ref;
    std::vector<double> theta_mech;
    std::vector<double> omega;
    std::vector<double> torque;
    std::vector<double> ia;
    std::vector<double> ib;
    std::vector<double> ic;
    std::vector<double> actuation;
    bool diverged = false;

    std::size_t size() const { return time.size(); }
};

inline void validate(const SimTrace& trace) {
    const std::size_t n = trace.time.size();
    if (n < 2) {
        throw std::invalid_argument("trace must hold at least two samples");
    }
    const bool consistent =
        trace.theta_ref.size() == n && trace.theta_mech.size() == n &&
        trace.omega.size() == n && trace.torque.size() == n &&
        trace.ia.size() == n && trace.ib.size() == n && trace.ic.size() == n &&
        trace.actuation.size() == n;
    if (!consistent) {
        throw std::invalid_argument("trace columns must share one length");
    }
    const double tol = 1e-9 * trace.sample_time;
    for (std::size_t k = 1; k < n; ++k) {
        const double dt = trace.time[k] - trace.time[k - 1];
        if (std::abs(dt - trace.sample_time) > tol) {
            throw std::invalid_argument("trace time must advance uniformly by sample_time");
        }
    }
}

/// The two tuning objectives, both minimized. Diverged runs carry the
/// configured penalty values and are flagged.
struct FitnessPair {
    double f1_iae = 0.0;
    double f2_thd = 0.0;
    bool diverged = false;
};

/// Integrated absolute position error, rectangular rule over the full horizon.
inline double iae(const SimTrace& trace) {
    validate(trace);
    double sum = 0.0;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        sum += std::abs(trace.theta_ref[k] - trace.theta_mech[k]);
    }
    return trace.sample_time * sum;
}

struct SpectrumBin {
    double frequency = 0.0;  // hertz
    double magnitude = 0.0;  // amplitude of the underlying component
};

/// Single-sided amplitude spectrum: mean removal, periodic Hann window,
/// DFT, magnitudes corrected for the window's coherent gain so a
/// bin-centered sinusoid of amplitude A reads A at its bin.
inline std::vector<SpectrumBin> magnitude_spectrum(const std::vector<double>& signal,
                                                   double sample_time) {
    const std::size_t n = signal.size();
    if (n < 16) {
        throw std::invalid_argument("spectrum needs at least 16 samples");
    }
    if (!(sample_time > 0.0)) {
        throw std::invalid_argument("spectrum needs a positive sample time");
    }

    double mean = 0.0;
    for (double v : signal) {
        mean += v;
    }
    mean /= static_cast<double>(n);

    std::vector<double> windowed(n);
    double window_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double w =
            0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(k) / static_cast<double>(n)));
        windowed[k] = (signal[k] - mean) * w;
        window_sum += w;
    }

    const auto spectrum = fft_real(windowed);
    const std::size_t half = n / 2;
    std::vector<SpectrumBin> bins(half + 1);
    for (std::size_t k = 0; k <= half; ++k) {
        const bool interior = k != 0 && !(n % 2 == 0 && k == half);
        const double correction = (interior ? 2.0 : 1.0) / window_sum;
        bins[k].frequency =
            static_cast<double>(k) / (static_cast<double>(n) * sample_time);
        bins[k].magnitude = std::abs(spectrum[k]) * correction;
    }
    return bins;
}

/// Analysis window for torque_thd.
struct ThdWindow {
    enum class Kind { full, steady_state_fraction };
    Kind kind = Kind::steady_state_fraction;
    double fraction = 0.5;  // trailing fraction of the trace when steady-state
};

/// Total harmonic distortion of the torque column. DC is removed (mean
/// torque is useful output, not ripple); the fundamental is the dominant
/// spectral bin. The window spreads each tone over a few bins, so the
/// fundamental is credited with its whole spectral lobe and the ratio is
/// formed from lobe energies. A fundamental below the noise floor means a
/// ripple-free signal and yields zero.
inline double torque_thd(const SimTrace& trace,
                         const ThdWindow& window = ThdWindow{},
                         double divergence_penalty = 1e6) {
    validate(trace);
    if (trace.diverged) {
        return divergence_penalty;
    }

    std::size_t start = 0;
    if (window.kind == ThdWindow::Kind::steady_state_fraction) {
        if (!(window.fraction > 0.0 && window.fraction <= 1.0)) {
            throw std::invalid_argument("thd window fraction must be in (0, 1]");
        }
        start = trace.size() -
                static_cast<std::size_t>(std::ceil(window.fraction * trace.size()));
    }
    std::vector<double> torque(trace.torque.begin() + static_cast<std::ptrdiff_t>(start),
                               trace.torque.end());
    if (torque.size() < 16) {
        throw std::invalid_argument("thd analysis window needs at least 16 samples");
    }

    double rms = 0.0;
    for (double v : torque) {
        rms += v * v;
    }
    rms = std::sqrt(rms / static_cast<double>(torque.size()));

    const auto bins = magnitude_spectrum(torque, trace.sample_time);

    std::size_t fundamental = 1;
    for (std::size_t k = 2; k < bins.size(); ++k) {
        if (bins[k].magnitude > bins[fundamental].magnitude) {
            fundamental = k;
        }
    }
    if (bins[fundamental].magnitude <= 1e-12 * rms) {
        return 0.0;
    }

    // Hann main lobe spans two bins to each side of the peak.
    const std::size_t lobe_lo = fundamental > 2 ? fundamental - 2 : 1;
    const std::size_t lobe_hi = std::min(fundamental + 2, bins.size() - 1);

    double fundamental_energy = 0.0;
    double residual_energy = 0.0;
    for (std::size_t k = 1; k < bins.size(); ++k) {
        const double m2 = bins[k].magnitude * bins[k].magnitude;
        if (k >= lobe_lo && k <= lobe_hi) {
            fundamental_energy += m2;
        } else {
            residual_energy += m2;
        }
    }
    return std::sqrt(residual_energy / fundamental_energy);
}

}  // namespace bldctune
