#pragma once

// Fine-structure level scheme of 40Ca+ and its dipole-allowed lines.
// 40Ca+ has zero nuclear spin, so the 18-level fine-structure Zeeman
// basis is exact for this isotope; there is no hyperfine structure.
//
// Level indices are assigned by term (S1/2, P1/2, P3/2, D3/2, D5/2 in
// that order), then by m_j ascending, so operator matrices are
// reproducible bit-for-bit across runs.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "angular.hpp"
#include "units.hpp"

namespace biphoton {

enum class Term : std::uint8_t { S12 = 0, P12 = 1, P32 = 2, D32 = 3, D52 = 4 };

inline constexpr int term_count = 5;

inline constexpr double term_j(Term t) {
    switch (t) {
        case Term::S12:
        case Term::P12: return 0.5;
        case Term::P32:
        case Term::D32: return 1.5;
        case Term::D52: return 2.5;
    }
    return 0.0;
}

inline constexpr int term_l(Term t) {
    switch (t) {
        case Term::S12: return 0;
        case Term::P12:
        case Term::P32: return 1;
        case Term::D32:
        case Term::D52: return 2;
    }
    return 0;
}

inline std::string term_name(Term t) {
    switch (t) {
        case Term::S12: return "S1/2";
        case Term::P12: return "P1/2";
        case Term::P32: return "P3/2";
        case Term::D32: return "D3/2";
        case Term::D52: return "D5/2";
    }
    return "?";
}

struct Level {
    Term term;
    double j;    // total angular momentum
    double m_j;  // magnetic quantum number, |m_j| <= j
    int index;   // position in the fixed 18-level ordering

    double lande() const { return lande_g(term_l(term), 0.5, j); }
    std::string name() const {
        return term_name(term) + " m=" + std::to_string(m_j);
    }
};

inline constexpr int level_count = 18;

// q = m_j(upper) - m_j(lower); +1 is sigma+, 0 is pi, -1 is sigma-.
enum class Polarization : std::int8_t { sigma_minus = -1, pi = 0, sigma_plus = 1 };

inline int pol_q(Polarization p) { return static_cast<int>(p); }

inline std::string pol_name(Polarization p) {
    switch (p) {
        case Polarization::sigma_plus: return "sigma+";
        case Polarization::pi: return "pi";
        case Polarization::sigma_minus: return "sigma-";
    }
    return "?";
}

// Dipole-connected term pairs and their conventional wavelength labels (nm).
enum class LineClass : std::uint8_t {
    s12_p12_397 = 0,
    s12_p32_393 = 1,
    d32_p12_866 = 2,
    d32_p32_850 = 3,
    d52_p32_854 = 4,
};

inline constexpr int line_class_count = 5;

inline constexpr Term line_lower(LineClass c) {
    switch (c) {
        case LineClass::s12_p12_397:
        case LineClass::s12_p32_393: return Term::S12;
        case LineClass::d32_p12_866:
        case LineClass::d32_p32_850: return Term::D32;
        case LineClass::d52_p32_854: return Term::D52;
    }
    return Term::S12;
}

inline constexpr Term line_upper(LineClass c) {
    switch (c) {
        case LineClass::s12_p12_397:
        case LineClass::d32_p12_866: return Term::P12;
        default: return Term::P32;
    }
}

inline constexpr int line_wavelength_nm(LineClass c) {
    switch (c) {
        case LineClass::s12_p12_397: return 397;
        case LineClass::s12_p32_393: return 393;
        case LineClass::d32_p12_866: return 866;
        case LineClass::d32_p32_850: return 850;
        case LineClass::d52_p32_854: return 854;
    }
    return 0;
}

struct TransitionLine {
    LineClass line_class;
    int lower;  // level index
    int upper;  // level index
    Polarization polarization;
    double relative_amplitude;  // Clebsch-Gordan factor, Condon-Shortley signs
};

struct ZeemanConfig {
    double field_gauss = 8.25;
    double bohr_magneton_over_h_mhz_per_gauss = bohr_magneton_mhz_per_gauss;
};

// Zeeman shift of a level in MHz (ordinary frequency, signed):
// g_j * (mu_B/h) * B * m_j.
inline double zeeman_shift_mhz(const Level& lv, const ZeemanConfig& cfg) {
    if (cfg.field_gauss < 0.0) throw std::domain_error("zeeman: field must be >= 0");
    return lv.lande() * cfg.bohr_magneton_over_h_mhz_per_gauss * cfg.field_gauss * lv.m_j;
}

inline double zeeman_shift_angular(const Level& lv, const ZeemanConfig& cfg) {
    return angular(zeeman_shift_mhz(lv, cfg));
}

class LevelGraph {
  public:
    LevelGraph() {
        int idx = 0;
        for (int t = 0; t < term_count; ++t) {
            const Term term = static_cast<Term>(t);
            const double j = term_j(term);
            for (double m = -j; m <= j + 1e-9; m += 1.0)
                levels_.push_back(Level{term, j, m, idx++});
        }
        for (int c = 0; c < line_class_count; ++c) {
            const LineClass cls = static_cast<LineClass>(c);
            for (const Level& lo : levels_) {
                if (lo.term != line_lower(cls)) continue;
                for (const Level& up : levels_) {
                    if (up.term != line_upper(cls)) continue;
                    const double q = up.m_j - lo.m_j;
                    if (std::abs(q) > 1.0 + 1e-9) continue;
                    const double amp =
                        clebsch_gordan(lo.j, lo.m_j, 1.0, q, up.j, up.m_j);
                    if (amp == 0.0) continue;
                    lines_.push_back(TransitionLine{
                        cls, lo.index, up.index,
                        static_cast<Polarization>(static_cast<int>(std::llround(q))), amp});
                }
            }
        }
    }

    const std::vector<Level>& levels() const { return levels_; }
    const std::vector<TransitionLine>& lines() const { return lines_; }

    const Level& level(Term term, double m_j) const {
        for (const Level& lv : levels_)
            if (lv.term == term && std::abs(lv.m_j - m_j) < 1e-9) return lv;
        throw std::domain_error("LevelGraph: no such level " + term_name(term) +
                                " m=" + std::to_string(m_j));
    }

    const Level& level(int index) const { return levels_.at(static_cast<std::size_t>(index)); }

    std::vector<TransitionLine> lines_of(LineClass cls) const {
        std::vector<TransitionLine> out;
        for (const auto& ln : lines_)
            if (ln.line_class == cls) out.push_back(ln);
        return out;
    }

    std::vector<TransitionLine> lines_of(LineClass cls, Polarization pol) const {
        std::vector<TransitionLine> out;
        for (const auto& ln : lines_)
            if (ln.line_class == cls && ln.polarization == pol) out.push_back(ln);
        return out;
    }

    // The line lower -> upper with the given polarization, if present.
    const TransitionLine* find_line(int lower, int upper) const {
        for (const auto& ln : lines_)
            if (ln.lower == lower && ln.upper == upper) return &ln;
        return nullptr;
    }

  private:
    std::vector<Level> levels_;
    std::vector<TransitionLine> lines_;
};

// Shared immutable instance; the graph is deterministic and read-only.
inline const LevelGraph& level_graph() {
    static const LevelGraph graph;
    return graph;
}

} // namespace biphoton
