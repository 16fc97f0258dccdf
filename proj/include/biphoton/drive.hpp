#pragma once

// Drive tones and envelopes. A DriveTone's detuning is stored as the
// in-frame angular detuning from the zero-field frequency of its line
// class (the rotating frame absorbs all optical-scale frequencies);
// helpers in sequence.hpp compute this from a Raman-resonance condition.

#include <cmath>
#include <string>

#include "atomic.hpp"
#include "units.hpp"

namespace biphoton {

enum class PulseShape { flattop_sin2, gaussian };

struct Envelope {
    PulseShape shape = PulseShape::flattop_sin2;
    double t_start = 0.0;   // us
    double duration = 1.0;  // us
    double rise = 0.2;      // us, ramp time for flattop shapes

    double value(double t) const {
        const double u = t - t_start;
        if (u <= 0.0 || u >= duration) return 0.0;
        switch (shape) {
            case PulseShape::flattop_sin2: {
                if (u < rise) {
                    const double s = std::sin(0.5 * pi * u / rise);
                    return s * s;
                }
                if (u > duration - rise) {
                    const double s = std::sin(0.5 * pi * (duration - u) / rise);
                    return s * s;
                }
                return 1.0;
            }
            case PulseShape::gaussian: {
                const double sigma = duration / 6.0;
                const double d = u - 0.5 * duration;
                return std::exp(-0.5 * d * d / (sigma * sigma));
            }
        }
        return 0.0;
    }
};

struct DriveTone {
    LineClass line_class = LineClass::d32_p32_850;
    Polarization polarization = Polarization::sigma_plus;
    double rabi = 0.0;      // rad/us, >= 0
    double detuning = 0.0;  // rad/us from the zero-field line frequency
    double phase = 0.0;     // rad, wrapped to [0, 2pi)

    // Raman bookkeeping (which path this tone addresses); indices into the
    // level graph. Kept for reports and calibration, not used by dynamics.
    int raman_initial = -1;
    int raman_target = -1;
};

struct BichromaticDrive {
    DriveTone tone_a;
    DriveTone tone_b;
    Envelope envelope;
};

} // namespace biphoton
