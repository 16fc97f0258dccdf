#pragma once

// Time-dependent Hamiltonian and Lindblad generator for the ion-cavity
// system, in the rotating frame with the rotating-wave approximation.
//
// Frame convention: every term rotates at its zero-field optical frequency
// and the cavity modes rotate at the zero-field P3/2 - D5/2 frequency.
// What remains is MHz-scale: Zeeman shifts on the atomic diagonal, the
// cavity detuning on the photon-number diagonal, a static Jaynes-Cummings
// coupling, and drive tones carrying explicit exp(-i(delta t + phi))
// coefficient oscillations (a single frame cannot make both tones of a
// bichromatic pair static at once).
//
// Rate convention: kappa is the cavity FIELD decay rate; the cavity
// collapse channels carry rate 2*kappa.

#include <functional>
#include <string>
#include <vector>

#include "drive.hpp"
#include "hilbert.hpp"
#include "params.hpp"

namespace biphoton {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ChannelKind { cavity_sigma_plus, cavity_sigma_minus, spontaneous };

struct CollapseChannel {
    CooOp op;
    double rate;  // rad/us (angular), >= 0; 2*kappa for cavity channels
    ChannelKind kind;
    std::string label;
};

struct ToneTerm {
    CooOp raising;     // (Omega/2) * sum_lines cg |upper><lower|, cavity identity
    double detuning;   // rad/us
    double phase;      // rad
    Envelope envelope;

    complexd coefficient(double t) const {
        const double e = envelope.value(t);
        if (e == 0.0) return {0.0, 0.0};
        return e * std::polar(1.0, -(detuning * t + phase));
    }
};

// Collapse channels of the full system: one channel per (line class,
// polarization) for spontaneous emission (summing sublevel amplitudes so
// every upper level decays at the full class rate), plus the two cavity
// polarization modes at rate 2*kappa.
inline std::vector<CollapseChannel> build_collapse_channels(const HilbertSpace& space,
                                                            const SystemParams& params) {
    const auto& graph = level_graph();
    std::vector<CollapseChannel> channels;
    channels.push_back({cavity_annihilation(space, Polarization::sigma_plus), 2.0 * params.kappa(),
                        ChannelKind::cavity_sigma_plus, "cavity sigma+"});
    channels.push_back({cavity_annihilation(space, Polarization::sigma_minus), 2.0 * params.kappa(),
                        ChannelKind::cavity_sigma_minus, "cavity sigma-"});
    for (int c = 0; c < line_class_count; ++c) {
        const auto cls = static_cast<LineClass>(c);
        const double rate = params.spontaneous.angular_of(cls);
        if (rate <= 0.0) continue;
        for (auto q : {Polarization::sigma_minus, Polarization::pi, Polarization::sigma_plus}) {
            CooOp op(space.total_dim());
            for (const auto& ln : graph.lines_of(cls, q)) {
                const double amp = params.line_amplitude(ln);
                if (amp == 0.0) continue;
                const CooOp lower = atom_raising(space, ln.lower, ln.upper, amp);
                for (const auto& e : lower.entries()) op.add(e.row, e.col, e.value);
            }
            op.compress();
            if (op.empty()) continue;
            channels.push_back({std::move(op), rate, ChannelKind::spontaneous,
                                std::to_string(line_wavelength_nm(cls)) + "nm " + pol_name(q)});
        }
    }
    return channels;
}

class LindbladGenerator {
  public:
    LindbladGenerator(HilbertSpace space, CooOp h_static, std::vector<ToneTerm> tones,
                      std::vector<CollapseChannel> channels, bool recycle_cavity)
        : space_(space),
          h_static_(std::move(h_static)),
          tones_(std::move(tones)),
          channels_(std::move(channels)),
          k_half_(space.total_dim()) {
        for (std::size_t i = 0; i < channels_.size(); ++i) {
            const auto& ch = channels_[i];
            const CooOp ldl = CooOp::compose(ch.op.adjoint(), ch.op).scaled(0.5 * ch.rate);
            k_half_ = CooOp::sum(k_half_, ldl);
            const bool is_cavity = ch.kind != ChannelKind::spontaneous;
            if (!is_cavity || recycle_cavity) recycled_.push_back(i);
        }
        for (const auto& tn : tones_) tone_adjoints_.push_back(tn.raising.adjoint());
    }

    const HilbertSpace& space() const { return space_; }
    int dim() const { return space_.total_dim(); }
    const std::vector<CollapseChannel>& channels() const { return channels_; }
    const std::vector<ToneTerm>& tones() const { return tones_; }

    // Dense Hermitian H(t); the contract form of the Hamiltonian.
    Matrix hamiltonian(double t) const {
        Matrix h = h_static_.dense();
        for (const auto& tone : tones_) {
            const complexd c = tone.coefficient(t);
            if (c == complexd{0.0, 0.0}) continue;
            h += c * tone.raising.dense();
            h += (std::conj(c) * tone.raising.dense().adjoint()).eval();
        }
        return h;
    }

    // out = Lindblad (or no-cavity-jump conditional) right-hand side at X.
    template <class In, class Out>
    void rhs(double t, const In& X, Out&& out) const {
        out.setZero();
        const complexd mi{0.0, -1.0};
        h_static_.add_AX(mi, X, out);
        h_static_.add_XA(-mi, X, out);
        for (std::size_t i = 0; i < tones_.size(); ++i) {
            const complexd c = tones_[i].coefficient(t);
            if (c == complexd{0.0, 0.0}) continue;
            tones_[i].raising.add_AX(mi * c, X, out);
            tones_[i].raising.add_XA(-mi * c, X, out);
            tone_adjoints_[i].add_AX(mi * std::conj(c), X, out);
            tone_adjoints_[i].add_XA(-mi * std::conj(c), X, out);
        }
        // Anticommutator part: -{K/2, X} with K = sum rate L^dag L.
        k_half_.add_AX(-1.0, X, out);
        k_half_.add_XA(-1.0, X, out);
        // Recycling part: sum rate L X L^dag.
        for (std::size_t i : recycled_) {
            const auto& ch = channels_[i];
            ch.op.add_sandwich(ch.rate, ch.op, X, out);
        }
    }

    // Non-Hermitian effective evolution of a pure state:
    // dpsi/dt = -i H(t) psi - (K/2) psi.
    template <class In, class Out>
    void rhs_vec(double t, const In& x, Out&& out) const {
        out.setZero();
        const complexd mi{0.0, -1.0};
        h_static_.add_Ax(mi, x, out);
        for (std::size_t i = 0; i < tones_.size(); ++i) {
            const complexd c = tones_[i].coefficient(t);
            if (c == complexd{0.0, 0.0}) continue;
            tones_[i].raising.add_Ax(mi * c, x, out);
            tone_adjoints_[i].add_Ax(mi * std::conj(c), x, out);
        }
        k_half_.add_Ax(-1.0, x, out);
    }

  private:
    HilbertSpace space_;
    CooOp h_static_;
    std::vector<ToneTerm> tones_;
    std::vector<CollapseChannel> channels_;
    std::vector<std::size_t> recycled_;
    CooOp k_half_;
    std::vector<CooOp> tone_adjoints_;
};

// Assembles the in-frame Hamiltonian terms for a set of bichromatic drives.
inline CooOp build_static_hamiltonian(const HilbertSpace& space, const SystemParams& params) {
    const auto& graph = level_graph();
    CooOp h(space.total_dim());
    // Diagonal: Zeeman shifts plus cavity detuning per photon.
    for (int a = 0; a < space.atom_dim; ++a) {
        const double za = params.level_energy(graph.level(a));
        for (int np = 0; np <= space.photon_cutoff; ++np)
            for (int nm = 0; nm <= space.photon_cutoff; ++nm)
                h.add(space.index(a, np, nm), space.index(a, np, nm),
                      za + params.cavity_detuning() * (np + nm));
    }
    // Jaynes-Cummings coupling on the 854 nm class, sigma+/- lines only.
    for (const auto& ln : graph.lines_of(LineClass::d52_p32_854)) {
        if (ln.polarization == Polarization::pi) continue;
        const double amp = params.g0() * params.line_amplitude(ln);
        if (amp == 0.0) continue;
        for (int np = 0; np <= space.photon_cutoff; ++np) {
            for (int nm = 0; nm <= space.photon_cutoff; ++nm) {
                // photon creation with atomic lowering (and h.c.)
                if (ln.polarization == Polarization::sigma_plus && np < space.photon_cutoff) {
                    const double v = amp * std::sqrt(double(np + 1));
                    h.add(space.index(ln.lower, np + 1, nm), space.index(ln.upper, np, nm), v);
                    h.add(space.index(ln.upper, np, nm), space.index(ln.lower, np + 1, nm), v);
                }
                if (ln.polarization == Polarization::sigma_minus && nm < space.photon_cutoff) {
                    const double v = amp * std::sqrt(double(nm + 1));
                    h.add(space.index(ln.lower, np, nm + 1), space.index(ln.upper, np, nm), v);
                    h.add(space.index(ln.upper, np, nm), space.index(ln.lower, np, nm + 1), v);
                }
            }
        }
    }
    h.compress();
    return h;
}

inline ToneTerm build_tone_term(const HilbertSpace& space, const SystemParams& params,
                                const DriveTone& tone, const Envelope& env) {
    const auto& graph = level_graph();
    CooOp raising(space.total_dim());
    bool any_line = false;
    for (const auto& ln : graph.lines_of(tone.line_class, tone.polarization)) {
        const double amp = params.line_amplitude(ln);
        if (amp == 0.0) continue;
        any_line = true;
        if (tone.rabi == 0.0) continue;
        const CooOp up = atom_raising(space, ln.upper, ln.lower, 0.5 * tone.rabi * amp);
        for (const auto& e : up.entries()) raising.add(e.row, e.col, e.value);
    }
    raising.compress();
    if (!any_line)
        throw ConfigError("drive tone addresses a forbidden line: " +
                          std::to_string(line_wavelength_nm(tone.line_class)) + "nm " +
                          pol_name(tone.polarization));
    return ToneTerm{std::move(raising), tone.detuning, tone.phase, env};
}

inline std::vector<ToneTerm> build_tone_terms(const HilbertSpace& space,
                                              const SystemParams& params,
                                              const std::vector<BichromaticDrive>& drives) {
    std::vector<ToneTerm> tones;
    for (const auto& d : drives) {
        if (d.envelope.duration <= 0.0) throw ConfigError("drive envelope duration must be > 0");
        tones.push_back(build_tone_term(space, params, d.tone_a, d.envelope));
        tones.push_back(build_tone_term(space, params, d.tone_b, d.envelope));
    }
    return tones;
}

// Contract-level builder: dense Hermitian H(t) for the configured drives.
inline Matrix build_hamiltonian(const HilbertSpace& space, const SystemParams& params,
                                const std::vector<BichromaticDrive>& drives, double t) {
    LindbladGenerator gen(space, build_static_hamiltonian(space, params),
                          build_tone_terms(space, params, drives), {}, true);
    return gen.hamiltonian(t);
}

inline LindbladGenerator make_generator(const HilbertSpace& space, const SystemParams& params,
                                        const std::vector<BichromaticDrive>& drives,
                                        bool recycle_cavity) {
    return LindbladGenerator(space, build_static_hamiltonian(space, params),
                             build_tone_terms(space, params, drives),
                             build_collapse_channels(space, params), recycle_cavity);
}

} // namespace biphoton
