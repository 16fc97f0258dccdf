#pragma once

// Jones calculus for the analysis waveplates and the polarization basis
// conventions.
//
// Laboratory basis: H = (1,0), V = (0,1). Circular states R = (H - iV)/sqrt2,
// L = (H + iV)/sqrt2. The photonic qubit is carried by the cavity's
// circular polarizations and the embedding is fixed once: sigma+ maps to R,
// sigma- maps to L (|0> = sigma+, |1> = sigma-).
//
// With that embedding the logical Pauli eigenbases are
//   X: H/V,  Y: D/A,  Z: R/L,
// and the waveplate settings below route each basis' +1 eigenstate to the
// transmitted PBS port. Light passes the quarter waveplate first, then the
// half waveplate (U = U_hwp * U_qwp), then the splitter.

#include <Eigen/Dense>

#include "units.hpp"

namespace biphoton {

using Matrix2 = Eigen::Matrix2cd;
using Vector2 = Eigen::Vector2cd;

struct WaveplateSetting {
    double qwp_angle = 0.0;  // radians, fast axis from H, wrapped to [0, pi)
    double hwp_angle = 0.0;

    WaveplateSetting wrapped() const {
        auto wrap = [](double a) {
            double w = std::fmod(a, pi);
            if (w < 0.0) w += pi;
            return w;
        };
        return {wrap(qwp_angle), wrap(hwp_angle)};
    }
};

// General linear retarder, fast axis at angle theta, retardance delta.
inline Matrix2 retarder(double theta, double delta) {
    Matrix2 rot, d;
    rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    d << 1.0, 0.0, 0.0, std::polar(1.0, delta);
    return rot * d * rot.transpose();
}

inline Matrix2 qwp_unitary(double theta) { return retarder(theta, 0.5 * pi); }
inline Matrix2 hwp_unitary(double theta) { return retarder(theta, pi); }

inline Matrix2 waveplate_unitary(const WaveplateSetting& s) {
    return hwp_unitary(s.hwp_angle) * qwp_unitary(s.qwp_angle);
}

// Measurement bases for the two-photon Pauli correlations.
enum class MeasBasis { XX = 0, YY = 1, ZZ = 2 };

inline const char* basis_name(MeasBasis b) {
    switch (b) {
        case MeasBasis::XX: return "XX";
        case MeasBasis::YY: return "YY";
        case MeasBasis::ZZ: return "ZZ";
    }
    return "?";
}

// Polarization pair analyzed in each basis (the +1 eigenstate first).
inline const char* basis_polarizations(MeasBasis b) {
    switch (b) {
        case MeasBasis::XX: return "H/V";
        case MeasBasis::YY: return "D/A";
        case MeasBasis::ZZ: return "R/L";
    }
    return "?";
}

inline WaveplateSetting basis_settings(MeasBasis b) {
    switch (b) {
        case MeasBasis::XX: return {0.0, 0.0};                // H -> T
        case MeasBasis::YY: return {0.25 * pi, 0.375 * pi};   // A ... D/A onto ports
        case MeasBasis::ZZ: return {0.0, 0.125 * pi};         // R -> T
    }
    return {};
}

// Column-convention change of basis: amplitudes in (sigma+, sigma-) to
// amplitudes in (H, V).
inline Matrix2 sigma_to_hv() {
    Matrix2 c;
    const double r = 1.0 / std::sqrt(2.0);
    c << complexd{r, 0.0}, complexd{r, 0.0}, complexd{0.0, -r}, complexd{0.0, r};
    return c;
}

// Port amplitudes for a photon in the (sigma+, sigma-) basis: row 0 is the
// transmitted port, row 1 the reflected port.
inline Matrix2 port_matrix(MeasBasis b) {
    return waveplate_unitary(basis_settings(b)) * sigma_to_hv();
}

} // namespace biphoton
