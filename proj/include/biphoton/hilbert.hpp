#pragma once

// Composite ion (x) cavity Hilbert space. The cavity carries two modes,
// labelled by the photon polarization they emit (sigma+ / sigma-), each
// truncated at photon_cutoff. Basis ordering is atom-major, then sigma+
// occupation, then sigma- occupation:
//   index(atom, n+, n-) = (atom * (n_max+1) + n+) * (n_max+1) + n-

#include <stdexcept>

#include "atomic.hpp"
#include "operators.hpp"

namespace biphoton {

struct HilbertSpace {
    int atom_dim = level_count;
    int photon_cutoff = 1;  // n_max per polarization mode

    int cav_dim() const { return photon_cutoff + 1; }
    int total_dim() const { return atom_dim * cav_dim() * cav_dim(); }

    int index(int atom, int n_plus, int n_minus) const {
        if (atom < 0 || atom >= atom_dim || n_plus < 0 || n_plus > photon_cutoff ||
            n_minus < 0 || n_minus > photon_cutoff)
            throw std::out_of_range("HilbertSpace::index");
        return (atom * cav_dim() + n_plus) * cav_dim() + n_minus;
    }

    int atom_of(int idx) const { return idx / (cav_dim() * cav_dim()); }
    int nplus_of(int idx) const { return (idx / cav_dim()) % cav_dim(); }
    int nminus_of(int idx) const { return idx % cav_dim(); }
};

// |upper><lower| on the ion, identity on the cavity.
inline CooOp atom_raising(const HilbertSpace& s, int upper, int lower, complexd amp = 1.0) {
    CooOp op(s.total_dim());
    for (int np = 0; np <= s.photon_cutoff; ++np)
        for (int nm = 0; nm <= s.photon_cutoff; ++nm)
            op.add(s.index(upper, np, nm), s.index(lower, np, nm), amp);
    return op;
}

// |level><level| on the ion, identity on the cavity.
inline CooOp atom_projector(const HilbertSpace& s, int level) {
    return atom_raising(s, level, level);
}

// Cavity annihilation operator for one polarization mode.
inline CooOp cavity_annihilation(const HilbertSpace& s, Polarization pol) {
    if (pol == Polarization::pi)
        throw std::invalid_argument("cavity_annihilation: cavity has no pi mode");
    CooOp op(s.total_dim());
    for (int atom = 0; atom < s.atom_dim; ++atom) {
        for (int np = 0; np <= s.photon_cutoff; ++np) {
            for (int nm = 0; nm <= s.photon_cutoff; ++nm) {
                if (pol == Polarization::sigma_plus && np > 0)
                    op.add(s.index(atom, np - 1, nm), s.index(atom, np, nm), std::sqrt(double(np)));
                if (pol == Polarization::sigma_minus && nm > 0)
                    op.add(s.index(atom, np, nm - 1), s.index(atom, np, nm), std::sqrt(double(nm)));
            }
        }
    }
    return op;
}

inline CooOp cavity_number(const HilbertSpace& s, Polarization pol) {
    const CooOp a = cavity_annihilation(s, pol);
    return CooOp::compose(a.adjoint(), a);
}

} // namespace biphoton
