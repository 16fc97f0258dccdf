#pragma once

// Experiment sequence: initialization resets, the two bichromatic
// cavity-assisted Raman generation stages, and the Raman-resonance
// bookkeeping that turns stage specifications into drive tones.
//
// Scheme bookkeeping: the ion qubit after photon 1 lives on two D5/2
// sublevels (qubit0 emits the sigma+ photon, qubit1 the sigma- photon);
// the state map drives both onto one common target sublevel while the
// polarization of photon 2 inherits the which-path information. For each
// (from, to) pair the drive and cavity polarizations are solved from
// angular-momentum conservation; the default assignment is the only one
// consistent with the paper's D / D' naming, but it is configuration, not
// hard-coded physics.

#include <variant>
#include <vector>

#include "detection.hpp"
#include "drive.hpp"
#include "dynamics.hpp"
#include "generator.hpp"

namespace biphoton {

struct RamanScheme {
    int init_level;  // populated by the final initialization step
    int qubit0;      // ion state entangled with the sigma+ photon
    int qubit1;      // ion state entangled with the sigma- photon
    int map_target;  // common final state of the state map

    static RamanScheme standard() {
        const auto& g = level_graph();
        return {g.level(Term::D32, -0.5).index, g.level(Term::D52, -2.5).index,
                g.level(Term::D52, 1.5).index, g.level(Term::D52, -0.5).index};
    }
};

// One Raman path: drive leg from -> mid, cavity leg mid -> to.
struct RamanPath {
    int from, mid, to;
    Polarization drive_pol;
    Polarization cavity_pol;  // polarization of the emitted photon
};

inline RamanPath solve_raman_path(int from, int to) {
    const auto& g = level_graph();
    const Level& lf = g.level(from);
    const Level& lt = g.level(to);
    std::vector<RamanPath> found;
    for (int qd = -1; qd <= 1; ++qd) {
        for (int qc = -1; qc <= 1; qc += 2) {  // cavity couples sigma+/- only
            if (std::abs((lf.m_j + qd) - (lt.m_j + qc)) > 1e-9) continue;
            const double m_mid = lf.m_j + qd;
            if (std::abs(m_mid) > term_j(Term::P32) + 1e-9) continue;
            const int mid = g.level(Term::P32, m_mid).index;
            if (!g.find_line(from, mid) || !g.find_line(to, mid)) continue;
            found.push_back({from, mid, to, static_cast<Polarization>(qd),
                             static_cast<Polarization>(qc)});
        }
    }
    if (found.size() != 1)
        throw ConfigError("raman path from " + g.level(from).name() + " to " +
                          g.level(to).name() +
                          (found.empty() ? " does not exist" : " is ambiguous"));
    return found.front();
}

struct ToneSpec {
    double rabi_mhz_over_2pi = 1.0;
    double phase_rad = 0.0;
    // Offset from the computed Raman resonance; a free experimental knob.
    double detuning_from_resonance_mhz = 0.0;
};

struct InitializeStep {
    int target_level;
    double fidelity = 1.0;
};

struct GenerationStep {
    LineClass line_class = LineClass::d32_p32_850;
    ToneSpec tone_a;  // addresses the qubit0 path
    ToneSpec tone_b;  // addresses the qubit1 path
    double window_us = 5.0;          // collection slot measured from step start
    double pulse_duration_us = 4.0;  // drive envelope length
    double pulse_rise_us = 0.3;
    PulseShape pulse_shape = PulseShape::flattop_sin2;
};

struct WaitStep {
    double duration_us = 1.0;
};

using SequenceStep = std::variant<InitializeStep, GenerationStep, WaitStep>;

enum class InitErrorModel { zeeman_neighbors, uniform_manifold };

struct ErrorToggles {
    // Error in the measured qubit Zeeman splitting used to set the drive
    // tones; both stages use the same (wrong) estimate.
    double zeeman_mismatch_mhz = 0.0;
    // Physical Clebsch-Gordan asymmetry of the two Raman paths. Off
    // replaces the scheme by an idealized mirror-symmetric counterfactual
    // (degenerate intermediate manifold, path-averaged couplings).
    bool stark_asymmetry = true;
    // Lumped magnetic-field / laser drift dephasing applied to the final
    // two-photon coherences.
    bool drift_terms = false;
    double drift_coherence_loss = 0.02;
};

struct ExperimentConfig {
    SystemParams params;
    RamanScheme scheme = RamanScheme::standard();
    std::vector<SequenceStep> steps;
    DetectionModel detection;
    ErrorToggles toggles;
    InitErrorModel init_error_model = InitErrorModel::zeeman_neighbors;

    // Engine knobs.
    double obs_dt_us = 0.02;
    double solver_rtol = 3e-8;
    double efficiency_floor = 1e-6;

    std::vector<const GenerationStep*> generation_steps() const {
        std::vector<const GenerationStep*> out;
        for (const auto& s : steps)
            if (const auto* g = std::get_if<GenerationStep>(&s)) out.push_back(g);
        return out;
    }
    GenerationStep* generation_step(int index) {
        int seen = 0;
        for (auto& s : steps)
            if (auto* g = std::get_if<GenerationStep>(&s))
                if (seen++ == index) return g;
        return nullptr;
    }
};

// System parameters with the stark-asymmetry counterfactual applied when
// the toggle is off: the two intermediate sublevels are collapsed onto a
// degenerate manifold and each pair of corresponding path legs gets the
// signed geometric mean of its amplitudes.
inline SystemParams effective_params(const ExperimentConfig& cfg) {
    SystemParams p = cfg.params;
    if (cfg.toggles.stark_asymmetry) return p;
    const auto& g = level_graph();
    p.lande_override[Term::P32] = 0.0;
    const RamanPath gen0 = solve_raman_path(cfg.scheme.init_level, cfg.scheme.qubit0);
    const RamanPath gen1 = solve_raman_path(cfg.scheme.init_level, cfg.scheme.qubit1);
    const RamanPath map0 = solve_raman_path(cfg.scheme.qubit0, cfg.scheme.map_target);
    const RamanPath map1 = solve_raman_path(cfg.scheme.qubit1, cfg.scheme.map_target);
    auto symmetrize = [&](int lower_a, int upper_a, int lower_b, int upper_b) {
        const TransitionLine* la = g.find_line(lower_a, upper_a);
        const TransitionLine* lb = g.find_line(lower_b, upper_b);
        if (!la || !lb) throw ConfigError("stark counterfactual: missing path line");
        const double mean = std::sqrt(std::abs(la->relative_amplitude) *
                                      std::abs(lb->relative_amplitude));
        p.amplitude_override[{la->lower, la->upper}] =
            std::copysign(mean, la->relative_amplitude);
        p.amplitude_override[{lb->lower, lb->upper}] =
            std::copysign(mean, lb->relative_amplitude);
    };
    symmetrize(gen0.from, gen0.mid, gen1.from, gen1.mid);  // generation drive legs
    symmetrize(gen0.to, gen0.mid, gen1.to, gen1.mid);      // shared cavity/map-drive legs
    symmetrize(map0.to, map0.mid, map1.to, map1.mid);      // map cavity legs
    return p;
}

// Estimated level energy entering the tone-frequency computation: the true
// energy plus the (signed) Zeeman-splitting measurement error on the two
// qubit sublevels.
inline double estimated_energy(const ExperimentConfig& cfg, const SystemParams& params,
                               int level) {
    double e = params.level_energy(level_graph().level(level));
    const double eps = angular(cfg.toggles.zeeman_mismatch_mhz);
    if (level == cfg.scheme.qubit0) e += 0.5 * eps;
    if (level == cfg.scheme.qubit1) e -= 0.5 * eps;
    return e;
}

// Builds the bichromatic drive for a generation stage. stage_index 0 is the
// entangling stage (init -> qubits), 1 is the state map (qubits -> target).
inline BichromaticDrive build_generation_drive(const ExperimentConfig& cfg,
                                               const SystemParams& params,
                                               const GenerationStep& step, int stage_index,
                                               double step_start) {
    const int from0 = stage_index == 0 ? cfg.scheme.init_level : cfg.scheme.qubit0;
    const int from1 = stage_index == 0 ? cfg.scheme.init_level : cfg.scheme.qubit1;
    const int to0 = stage_index == 0 ? cfg.scheme.qubit0 : cfg.scheme.map_target;
    const int to1 = stage_index == 0 ? cfg.scheme.qubit1 : cfg.scheme.map_target;
    const RamanPath path_a = solve_raman_path(from0, to0);
    const RamanPath path_b = solve_raman_path(from1, to1);

    auto make_tone = [&](const RamanPath& path, const ToneSpec& spec) {
        DriveTone tone;
        tone.line_class = step.line_class;
        tone.polarization = path.drive_pol;
        tone.rabi = angular(spec.rabi_mhz_over_2pi);
        tone.phase = wrap_angle(spec.phase_rad);
        tone.detuning = estimated_energy(cfg, params, path.to) -
                        estimated_energy(cfg, params, path.from) + params.cavity_detuning() +
                        angular(spec.detuning_from_resonance_mhz);
        tone.raman_initial = path.from;
        tone.raman_target = path.to;
        return tone;
    };

    BichromaticDrive drive;
    drive.tone_a = make_tone(path_a, step.tone_a);
    drive.tone_b = make_tone(path_b, step.tone_b);
    drive.envelope = Envelope{step.pulse_shape, step_start, step.pulse_duration_us,
                              step.pulse_rise_us};
    return drive;
}

// Stochastic-reset initialization: probability `fidelity` in the target
// level, the remainder spread over an error-population model.
inline Eigen::VectorXd initialization_populations(const ExperimentConfig& cfg) {
    const auto& g = level_graph();
    Eigen::VectorXd pop = Eigen::VectorXd::Zero(level_count);
    bool any = false;
    for (const auto& s : cfg.steps) {
        const auto* init = std::get_if<InitializeStep>(&s);
        if (!init) continue;
        any = true;
        if (init->fidelity < 0.0 || init->fidelity > 1.0)
            throw ConfigError("initialize: fidelity must be in [0, 1]");
        pop.setZero();
        pop(init->target_level) = init->fidelity;
        const Level& target = g.level(init->target_level);
        std::vector<int> error_levels;
        for (const auto& lv : g.levels()) {
            if (lv.term != target.term || lv.index == target.index) continue;
            if (cfg.init_error_model == InitErrorModel::zeeman_neighbors &&
                std::abs(lv.m_j - target.m_j) > 1.0 + 1e-9)
                continue;
            error_levels.push_back(lv.index);
        }
        if (error_levels.empty()) error_levels.push_back(target.index);
        for (int idx : error_levels)
            pop(idx) += (1.0 - init->fidelity) / static_cast<double>(error_levels.size());
    }
    if (!any) throw ConfigError("sequence has no initialization step");
    return pop;
}

inline Matrix run_initialization(const ExperimentConfig& cfg, const HilbertSpace& space) {
    const Eigen::VectorXd pop = initialization_populations(cfg);
    Matrix rho = Matrix::Zero(space.total_dim(), space.total_dim());
    for (int a = 0; a < level_count; ++a)
        if (pop(a) != 0.0) rho(space.index(a, 0, 0), space.index(a, 0, 0)) = pop(a);
    return rho;
}

struct ResolvedStage {
    int index = 0;
    double slot_start = 0.0;
    double slot_end = 0.0;
    BichromaticDrive drive;
    const GenerationStep* spec = nullptr;
};

struct Schedule {
    HilbertSpace space;
    double t_end = 0.0;
    std::vector<ResolvedStage> stages;
    Matrix rho0;
};

inline Schedule resolve_schedule(const ExperimentConfig& cfg, const SystemParams& params) {
    Schedule sch;
    sch.space = HilbertSpace{level_count, params.photon_cutoff};
    double clock = 0.0;
    int gen_index = 0;
    for (const auto& s : cfg.steps) {
        if (std::holds_alternative<InitializeStep>(s)) continue;  // instantaneous reset
        if (const auto* w = std::get_if<WaitStep>(&s)) {
            if (w->duration_us < 0.0) throw ConfigError("wait duration must be >= 0");
            clock += w->duration_us;
            continue;
        }
        const auto& g = std::get<GenerationStep>(s);
        if (g.window_us <= 0.0) throw ConfigError("generation window must be > 0");
        ResolvedStage st;
        st.index = gen_index;
        st.slot_start = clock;
        st.slot_end = clock + g.window_us;
        st.drive = build_generation_drive(cfg, params, g, gen_index, clock);
        st.spec = &g;
        sch.stages.push_back(st);
        clock += g.window_us;
        ++gen_index;
    }
    sch.t_end = clock;
    sch.rho0 = run_initialization(cfg, sch.space);
    return sch;
}

// The paper sequence: cooling/pumping/STIRAP folded into one compound
// reset, then the 850 nm entangling pulse and the 854 nm state map.
inline std::vector<SequenceStep> standard_steps(const RamanScheme& scheme, double init_fidelity,
                                                const GenerationStep& stage1,
                                                const GenerationStep& stage2,
                                                double gap_us) {
    return {InitializeStep{scheme.init_level, init_fidelity}, stage1, WaitStep{gap_us}, stage2};
}

} // namespace biphoton
