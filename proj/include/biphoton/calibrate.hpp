#pragma once

// Balancing of the bichromatic drive: a scalar search on the tone Rabi
// ratio such that the stage emits both photon polarizations with equal
// probability. The imbalance is monotone in the ratio over the bracket,
// so an Illinois-type regula falsi converges quickly and deterministically.

#include "conditional.hpp"

namespace biphoton {

struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BalanceResult {
    double ratio = 1.0;       // multiplier applied to tone_b's Rabi frequency
    double imbalance = 0.0;   // P(sigma+) - P(sigma-) at the returned ratio
    double p_plus = 0.0;
    double p_minus = 0.0;
    int evaluations = 0;
};

// Per-polarization emission probability for one stage under the current
// configuration. Stage 0 uses the photon-1 flux; stage 1 the photon-2 flux.
inline std::pair<double, double> stage_polarization_probabilities(const ExperimentConfig& cfg,
                                                                  int stage) {
    const EngineBlocks blocks =
        stage == 0 ? EngineBlocks::rho_only : EngineBlocks::rho_and_sum;
    ConditionalEngine engine(cfg, blocks);
    // Integrate the full span for stage 1, only slot 1 for stage 0.
    Stage1Checkpoint ck = engine.run_stage1();
    const auto& sch = engine.schedule();
    if (stage == 0) {
        PhotonShape s;
        s.t = ck.grid_t;
        for (const auto& f : ck.flux1) {
            s.p_plus.push_back(f[0]);
            s.p_minus.push_back(f[1]);
        }
        return {s.area_plus(sch.stages[0].slot_start, sch.stages[0].slot_end),
                s.area_minus(sch.stages[0].slot_start, sch.stages[0].slot_end)};
    }
    TwoPhotonState st = engine.finish(std::move(ck));
    return {st.shape2.area_plus(sch.stages[1].slot_start, sch.stages[1].slot_end),
            st.shape2.area_minus(sch.stages[1].slot_start, sch.stages[1].slot_end)};
}

// Adjusts tone_b's Rabi frequency of the given stage (0 or 1) in place so
// that |P(sigma+) - P(sigma-)| < tol. Returns the applied ratio.
inline BalanceResult calibrate_balance(ExperimentConfig& cfg, int stage, double tol = 1e-3,
                                       int max_evaluations = 40) {
    GenerationStep* step = cfg.generation_step(stage);
    if (!step) throw CalibrationError("calibrate_balance: no such generation stage");
    const double rabi_b0 = step->tone_b.rabi_mhz_over_2pi;
    if (rabi_b0 <= 0.0 || step->tone_a.rabi_mhz_over_2pi <= 0.0)
        throw CalibrationError("calibrate_balance: stage Rabi frequencies must be > 0");

    int evals = 0;
    auto imbalance = [&](double ratio) {
        step->tone_b.rabi_mhz_over_2pi = rabi_b0 * ratio;
        const auto [pp, pm] = stage_polarization_probabilities(cfg, stage);
        ++evals;
        return std::tuple{pp - pm, pp, pm};
    };

    // Bracket a sign change, expanding geometrically around 1.
    double lo = 1.0, hi = 1.0;
    auto [f1, pp1, pm1] = imbalance(1.0);
    if (std::abs(f1) < tol * 0.3) {
        return {1.0, f1, pp1, pm1, evals};
    }
    double f_lo = f1, f_hi = f1;
    // Raising tone_b's power raises P(sigma-) for the b path, lowering the
    // imbalance f = P+ - P-.
    const double grow = 1.6;
    for (int k = 0; k < 12 && f_lo * f_hi > 0.0; ++k) {
        if (f1 > 0.0) {
            hi *= grow;
            std::tie(f_hi, std::ignore, std::ignore) = imbalance(hi);
        } else {
            lo /= grow;
            std::tie(f_lo, std::ignore, std::ignore) = imbalance(lo);
        }
    }
    if (f_lo * f_hi > 0.0) {
        step->tone_b.rabi_mhz_over_2pi = rabi_b0;
        throw CalibrationError(
            "calibrate_balance: no sign change in the searched ratio bracket [" +
            std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }

    // Illinois regula falsi on the bracket.
    double best_ratio = 1.0, best_f = f1, best_pp = pp1, best_pm = pm1;
    double side = 0.0;
    while (evals < max_evaluations) {
        const double mid = (hi * f_lo - lo * f_hi) / (f_lo - f_hi);
        auto [fm, ppm, pmm] = imbalance(mid);
        if (std::abs(fm) < std::abs(best_f)) {
            best_ratio = mid;
            best_f = fm;
            best_pp = ppm;
            best_pm = pmm;
        }
        if (std::abs(fm) < tol * 0.3) break;
        if (fm * f_lo < 0.0) {
            hi = mid;
            f_hi = fm;
            if (side == -1.0) f_lo *= 0.5;
            side = -1.0;
        } else {
            lo = mid;
            f_lo = fm;
            if (side == 1.0) f_hi *= 0.5;
            side = 1.0;
        }
    }
    if (std::abs(best_f) >= tol) {
        step->tone_b.rabi_mhz_over_2pi = rabi_b0;
        throw CalibrationError("calibrate_balance: did not reach |imbalance| < " +
                               std::to_string(tol) + " after " + std::to_string(evals) +
                               " evaluations (best " + std::to_string(best_f) + ")");
    }
    step->tone_b.rabi_mhz_over_2pi = rabi_b0 * best_ratio;
    return {best_ratio, best_f, best_pp, best_pm, evals};
}

} // namespace biphoton
