// Scratch exploration tool (not part of the deliverable build).
#include <chrono>
#include <cstdio>

#include "biphoton/calibrate.hpp"
#include "biphoton/conditional.hpp"
#include "biphoton/presets.hpp"

using namespace biphoton;

static void report(const char* tag, const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    TwoPhotonState st = conditional_two_photon_state(cfg);
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto& sch = ConditionalEngine(cfg, EngineBlocks::rho_only).schedule();
    std::printf("== %s (%.1fs)\n", tag, dt);
    std::printf("  eff1=%.4f eff2=%.4f pair=%.5f leak=%.4f guard=%.2e overlap=%.2e herm=%.1e\n",
                st.stage1_efficiency, st.stage2_efficiency, st.efficiency, st.ion_photon.leakage,
                st.guard_double_emission, st.shape_overlap, st.hermiticity_defect);
    std::printf("  shape1 areas: +%.4f -%.4f | shape2: +%.4f -%.4f (slot2 [%0.1f,%0.1f])\n",
                st.shape1.area_plus(sch.stages[0].slot_start, sch.stages[0].slot_end),
                st.shape1.area_minus(sch.stages[0].slot_start, sch.stages[0].slot_end),
                st.shape2.area_plus(sch.stages[1].slot_start, sch.stages[1].slot_end),
                st.shape2.area_minus(sch.stages[1].slot_start, sch.stages[1].slot_end),
                sch.stages[1].slot_start, sch.stages[1].slot_end);
    std::printf("  diag rho2: %.4f %.4f %.4f %.4f  coh(+-, -+)=%.4f  bestF=%.4f\n",
                st.rho(0, 0).real(), st.rho(1, 1).real(), st.rho(2, 2).real(),
                st.rho(3, 3).real(), std::abs(st.rho(1, 2)), best_bell_fidelity(st.rho));
    std::printf("  XX=%.4f YY=%.4f ZZ=%.4f\n", pauli_expectation(st.rho, MeasBasis::XX),
                pauli_expectation(st.rho, MeasBasis::YY),
                pauli_expectation(st.rho, MeasBasis::ZZ));
}

int main(int argc, char** argv) {
    ExperimentConfig cfg = paper_default_config();
    double scan_dc = 0.0;
    bool do_balance = false;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--dc" && i + 1 < argc) cfg.params.cavity_detuning_mhz_over_2pi = std::atof(argv[++i]);
        if (a == "--balance") do_balance = true;
        if (a == "--r1a" && i + 1 < argc) cfg.generation_step(0)->tone_a.rabi_mhz_over_2pi = std::atof(argv[++i]);
        if (a == "--r1b" && i + 1 < argc) cfg.generation_step(0)->tone_b.rabi_mhz_over_2pi = std::atof(argv[++i]);
        if (a == "--r2a" && i + 1 < argc) cfg.generation_step(1)->tone_a.rabi_mhz_over_2pi = std::atof(argv[++i]);
        if (a == "--r2b" && i + 1 < argc) cfg.generation_step(1)->tone_b.rabi_mhz_over_2pi = std::atof(argv[++i]);
        if (a == "--stark-off") cfg.toggles.stark_asymmetry = false;
        if (a == "--mismatch" && i + 1 < argc) cfg.toggles.zeeman_mismatch_mhz = std::atof(argv[++i]);
        if (a == "--init" && i + 1 < argc) {
            for (auto& s : cfg.steps)
                if (auto* in = std::get_if<InitializeStep>(&s)) in->fidelity = std::atof(argv[++i]);
        }
        if (a == "--scale2" && i + 1 < argc) {
            const double s = std::atof(argv[++i]);
            cfg.generation_step(1)->tone_a.rabi_mhz_over_2pi *= s;
            cfg.generation_step(1)->tone_b.rabi_mhz_over_2pi *= s;
        }
    }
    (void)scan_dc;
    if (do_balance) {
        for (int stage : {0, 1}) {
            const auto t0 = std::chrono::steady_clock::now();
            try {
                auto r = calibrate_balance(cfg, stage, 1e-3);
                const double dt = std::chrono::duration<double>(
                                      std::chrono::steady_clock::now() - t0).count();
                std::printf("balance stage %d: ratio=%.6f imbalance=%.2e p+=%.4f p-=%.4f evals=%d (%.1fs)\n",
                            stage, r.ratio, r.imbalance, r.p_plus, r.p_minus, r.evaluations, dt);
                std::printf("  -> tone_b rabi now %.4f MHz\n",
                            cfg.generation_step(stage)->tone_b.rabi_mhz_over_2pi);
            } catch (const std::exception& e) {
                std::printf("balance stage %d FAILED: %s\n", stage, e.what());
            }
        }
    }
    report("config", cfg);
    return 0;
}
