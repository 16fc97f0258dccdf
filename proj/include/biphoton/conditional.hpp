#pragma once

// Deterministic two-photon state extraction by ordered jump-channel
// decomposition.
//
// The no-cavity-jump state rho evolves under the conditional generator
// (cavity recycling removed, spontaneous emission kept). Alongside it,
// source-fed accumulators
//
//   Y_pq(t) = int_0^t E_nc(t <- s)[ 2 kappa a_p rho(s) a_q^dag ] ds ,
//
// one per photon-1 polarization pair (p, q), satisfy
//
//   dY_pq/dt = L_nc(t)[Y_pq] + [s in slot1] 2 kappa a_p rho a_q^dag ,
//
// i.e. they carry everything that emitted its first photon inside slot 1,
// conditioned on no further cavity emission. The two-photon matrix is then
//
//   rho2[(p,p'),(q,q')] = int_slot2 2 kappa tr( a_q'^dag a_p' Y_pq(t) ) dt ,
//
// its trace the pair-generation probability. The same pass yields photon
// temporal shapes, the ion-photon state after stage 1, and the
// double-emission guard that validates the sequential factorization.

#include <memory>
#include <string>
#include <vector>

#include "sequence.hpp"

namespace biphoton {

struct PhotonShape {
    std::vector<double> t;        // us, uniform grid over the full sequence
    std::vector<double> p_plus;   // emission density per us, sigma+ channel
    std::vector<double> p_minus;

    double area_plus(double t0, double t1) const { return area(p_plus, t0, t1); }
    double area_minus(double t0, double t1) const { return area(p_minus, t0, t1); }
    double total_area() const {
        return area(p_plus, t.front(), t.back()) + area(p_minus, t.front(), t.back());
    }

    // Normalized so the area across both polarizations is 1.
    PhotonShape normalized() const {
        PhotonShape s = *this;
        const double a = total_area();
        if (a > 0.0) {
            for (double& x : s.p_plus) x /= a;
            for (double& x : s.p_minus) x /= a;
        }
        return s;
    }

  private:
    double area(const std::vector<double>& f, double t0, double t1) const {
        double acc = 0.0;
        for (std::size_t i = 1; i < t.size(); ++i) {
            if (t[i] <= t0 || t[i - 1] >= t1) continue;
            acc += 0.5 * (f[i] + f[i - 1]) * (t[i] - t[i - 1]);
        }
        return acc;
    }
};

struct IonPhotonState {
    // Basis (ion, photon): (q0,s+), (q0,s-), (q1,s+), (q1,s-), normalized
    // together with the leakage.
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
    double leakage = 0.0;  // photon-1 emission weight outside the qubit subspace
};

struct TwoPhotonState {
    // Basis (photon1, photon2) over (sigma+, sigma-): ++, +-, -+, --.
    Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
    double efficiency = 0.0;         // pair probability per sequence run
    double stage1_efficiency = 0.0;  // photon-1 emission probability in slot 1
    double stage2_efficiency = 0.0;  // conditional photon-2 probability
    double leakage = 0.0;
    double guard_double_emission = 0.0;  // both-photon amplitude inside slot 1
    double shape_overlap = 0.0;          // min-overlap of the normalized shapes
    double hermiticity_defect = 0.0;
    PhotonShape shape1, shape2;
    IonPhotonState ion_photon;
    std::vector<std::string> warnings;
};

enum class EngineBlocks { rho_only, rho_and_sum, full };

struct Stage1Checkpoint {
    double t = 0.0;
    Matrix state;  // [rho | Y++ | Y-- | Y+-] as dim x 4dim
    std::vector<double> grid_t;
    std::vector<std::array<double, 2>> flux1;  // per-pol photon-1 density so far
    std::vector<std::array<double, 2>> flux2;
    Matrix slot1_end_state;  // snapshot for the ion-photon state
    bool have_slot1_snapshot = false;
};

namespace detail {

struct FluxOps {
    CooOp a_plus, a_minus;
    CooOp n_plus, n_minus;               // a^dag a
    std::array<std::array<CooOp, 2>, 2> cross;  // cross[p'][q'] = a_q'^dag a_p'

    explicit FluxOps(const HilbertSpace& space)
        : a_plus(cavity_annihilation(space, Polarization::sigma_plus)),
          a_minus(cavity_annihilation(space, Polarization::sigma_minus)),
          n_plus(CooOp::compose(a_plus.adjoint(), a_plus)),
          n_minus(CooOp::compose(a_minus.adjoint(), a_minus)) {
        const CooOp* a[2] = {&a_plus, &a_minus};
        for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q)
                cross[p][q] = CooOp::compose(a[q]->adjoint(), *a[p]);
    }
};

} // namespace detail

class ConditionalEngine {
  public:
    ConditionalEngine(const ExperimentConfig& cfg, EngineBlocks blocks = EngineBlocks::full)
        : cfg_(cfg),
          params_(effective_params(cfg)),
          schedule_(resolve_schedule(cfg, params_)),
          blocks_(blocks),
          flux_ops_(schedule_.space) {
        if (schedule_.stages.size() != 2)
            throw ConfigError("conditional engine: the protocol needs exactly two "
                              "generation stages");
        std::vector<BichromaticDrive> drives;
        for (const auto& st : schedule_.stages) drives.push_back(st.drive);
        generator_ = std::make_unique<LindbladGenerator>(
            make_generator(schedule_.space, params_, drives, /*recycle_cavity=*/false));
    }

    const Schedule& schedule() const { return schedule_; }
    const LindbladGenerator& generator() const { return *generator_; }

    int n_blocks() const {
        switch (blocks_) {
            case EngineBlocks::rho_only: return 1;
            case EngineBlocks::rho_and_sum: return 2;
            case EngineBlocks::full: return 4;
        }
        return 4;
    }

    // Runs stage 1 (and the gap) only, returning a checkpoint from which
    // stage-2 variations can be resumed.
    Stage1Checkpoint run_stage1() const {
        Stage1Checkpoint ck = initial_checkpoint();
        integrate_span(ck, stage2().slot_start, nullptr);
        return ck;
    }

    TwoPhotonState run() const {
        Stage1Checkpoint ck = initial_checkpoint();
        return finish(std::move(ck));
    }

    TwoPhotonState finish(Stage1Checkpoint ck) const {
        TwoPhotonState out;
        integrate_span(ck, schedule_.t_end, &out);
        assemble(ck, out);
        return out;
    }

  private:
    ExperimentConfig cfg_;
    SystemParams params_;
    Schedule schedule_;
    EngineBlocks blocks_;
    detail::FluxOps flux_ops_;
    std::unique_ptr<LindbladGenerator> generator_;

    const ResolvedStage& stage1() const { return schedule_.stages[0]; }
    const ResolvedStage& stage2() const { return schedule_.stages[1]; }
    int dim() const { return schedule_.space.total_dim(); }

    Stage1Checkpoint initial_checkpoint() const {
        Stage1Checkpoint ck;
        ck.t = 0.0;
        ck.state = Matrix::Zero(dim(), n_blocks() * dim());
        ck.state.block(0, 0, dim(), dim()) = schedule_.rho0;
        return ck;
    }

    // Shared right-hand side over the packed block state.
    template <class In, class Out>
    void packed_rhs(double t, const In& S, Out&& D) const {
        const int d = dim();
        const int nb = n_blocks();
        for (int b = 0; b < nb; ++b)
            generator_->rhs(t, S.block(0, b * d, d, d), D.block(0, b * d, d, d));
        if (t >= stage1().slot_start && t < stage1().slot_end) {
            const double r = 2.0 * params_.kappa();
            const auto rho = S.block(0, 0, d, d);
            const auto& ap = flux_ops_.a_plus;
            const auto& am = flux_ops_.a_minus;
            if (blocks_ == EngineBlocks::rho_and_sum) {
                auto y = D.block(0, d, d, d);
                ap.add_sandwich(r, ap, rho, y);
                am.add_sandwich(r, am, rho, y);
            } else if (blocks_ == EngineBlocks::full) {
                ap.add_sandwich(r, ap, rho, D.block(0, d, d, d));
                am.add_sandwich(r, am, rho, D.block(0, 2 * d, d, d));
                ap.add_sandwich(r, am, rho, D.block(0, 3 * d, d, d));
            }
        }
    }

    // Integrate from ck.t to t_stop, accumulating grid observables; when
    // `out` is non-null, also the slot-2 pair-flux tensor.
    void integrate_span(Stage1Checkpoint& ck, double t_stop, TwoPhotonState* out) const {
        const int d = dim();
        const double r = 2.0 * params_.kappa();
        const double dt = cfg_.obs_dt_us;
        std::vector<double> obs;
        for (double t = std::ceil(ck.t / dt - 1e-9) * dt; t <= t_stop + 1e-12; t += dt)
            if (t > ck.t + 1e-12) obs.push_back(t);
        // Slot boundaries join the grid so the source-term switching always
        // falls on a step edge (and the slot-1 snapshot is exact).
        for (double edge : {stage1().slot_start, stage1().slot_end, stage2().slot_start,
                            stage2().slot_end, t_stop}) {
            if (edge > ck.t + 1e-12 && edge < t_stop + 1e-12) obs.push_back(edge);
        }
        std::sort(obs.begin(), obs.end());
        obs.erase(std::unique(obs.begin(), obs.end(),
                              [](double a, double b) { return std::abs(a - b) < 1e-10; }),
                  obs.end());
        if (obs.empty() || std::abs(obs.back() - t_stop) > 1e-9) obs.push_back(t_stop);

        // rho2 integrand samples over slot 2, Simpson-composited afterwards.
        struct PairSample {
            double t;
            std::array<std::array<complexd, 4>, 3> f;  // [block pq][(p'q')]
        };
        std::vector<PairSample> pair_samples;

        auto observe = [&](double t, const Matrix& S) {
            const auto rho = S.block(0, 0, d, d);
            std::array<double, 2> f1{
                r * flux_ops_.n_plus.trace_product(rho).real(),
                r * flux_ops_.n_minus.trace_product(rho).real()};
            std::array<double, 2> f2{0.0, 0.0};
            if (blocks_ != EngineBlocks::rho_only) {
                Matrix ysum;
                if (blocks_ == EngineBlocks::rho_and_sum)
                    ysum = S.block(0, d, d, d);
                else
                    ysum = S.block(0, d, d, d) + S.block(0, 2 * d, d, d);
                f2 = {r * flux_ops_.n_plus.trace_product(ysum).real(),
                      r * flux_ops_.n_minus.trace_product(ysum).real()};
            }
            ck.grid_t.push_back(t);
            ck.flux1.push_back(f1);
            ck.flux2.push_back(f2);
            if (!ck.have_slot1_snapshot && t >= stage1().slot_end - 1e-12) {
                ck.slot1_end_state = S;
                ck.have_slot1_snapshot = true;
            }
            if (out && blocks_ == EngineBlocks::full && t >= stage2().slot_start - 1e-12 &&
                t <= stage2().slot_end + 1e-12) {
                PairSample ps;
                ps.t = t;
                for (int blk = 0; blk < 3; ++blk) {
                    const auto y = S.block(0, (blk + 1) * d, d, d);
                    for (int pp = 0; pp < 2; ++pp)
                        for (int qq = 0; qq < 2; ++qq)
                            ps.f[blk][pp * 2 + qq] =
                                r * flux_ops_.cross[pp][qq].trace_product(y);
                }
                pair_samples.push_back(ps);
            }
        };

        IntegratorOptions opt;
        opt.rtol = cfg_.solver_rtol;
        opt.atol = cfg_.solver_rtol * 1e-2;
        opt.h_max = 0.5;
        auto rhs = [this](double t, const Matrix& S, Matrix& D) { packed_rhs(t, S, D); };
        integrate_adaptive(rhs, ck.state, ck.t, t_stop, std::span<const double>(obs), observe,
                           opt);
        ck.t = t_stop;

        if (out && !pair_samples.empty()) {
            // Composite trapezoid over the recorded slot-2 samples.
            Eigen::Matrix4cd raw = Eigen::Matrix4cd::Zero();
            auto add_block = [&](int blk, int p, int q, complexd w, const PairSample& s) {
                for (int pp = 0; pp < 2; ++pp)
                    for (int qq = 0; qq < 2; ++qq)
                        raw(p * 2 + pp, q * 2 + qq) += w * s.f[blk][pp * 2 + qq];
            };
            for (std::size_t i = 1; i < pair_samples.size(); ++i) {
                const double w = 0.5 * (pair_samples[i].t - pair_samples[i - 1].t);
                for (const auto* s : {&pair_samples[i - 1], &pair_samples[i]}) {
                    add_block(0, 0, 0, w, *s);
                    add_block(1, 1, 1, w, *s);
                    add_block(2, 0, 1, w, *s);
                }
            }
            // The (-,+) block is the adjoint image of (+,-).
            for (int pp = 0; pp < 2; ++pp)
                for (int qq = 0; qq < 2; ++qq)
                    raw(2 + qq, 0 + pp) = std::conj(raw(0 + pp, 2 + qq));
            out->rho = raw;
        }
    }

    void assemble(const Stage1Checkpoint& ck, TwoPhotonState& out) const {
        // Shapes over the full grid.
        out.shape1.t = ck.grid_t;
        out.shape2.t = ck.grid_t;
        for (std::size_t i = 0; i < ck.grid_t.size(); ++i) {
            out.shape1.p_plus.push_back(ck.flux1[i][0]);
            out.shape1.p_minus.push_back(ck.flux1[i][1]);
            out.shape2.p_plus.push_back(ck.flux2[i][0]);
            out.shape2.p_minus.push_back(ck.flux2[i][1]);
        }

        const double s1a = stage1().slot_start, s1b = stage1().slot_end;
        const double s2a = stage2().slot_start, s2b = stage2().slot_end;
        out.stage1_efficiency =
            out.shape1.area_plus(s1a, s1b) + out.shape1.area_minus(s1a, s1b);

        // Double-emission guard: photon-2 flux inside slot 1.
        out.guard_double_emission =
            out.shape2.area_plus(s1a, s1b) + out.shape2.area_minus(s1a, s1b);

        // Shape overlap (min of the normalized densities). The pair's
        // photon-1 density is the first-emission flux before the state map
        // begins; first emissions inside slot 2 (spontaneous-decay-fed
        // strays that skipped photon 1) are not part of the pair and are
        // excluded here.
        PhotonShape pair1 = out.shape1;
        for (std::size_t i = 0; i < pair1.t.size(); ++i) {
            if (pair1.t[i] >= s2a) {
                pair1.p_plus[i] = 0.0;
                pair1.p_minus[i] = 0.0;
            }
        }
        const PhotonShape n1 = pair1.normalized();
        const PhotonShape n2 = out.shape2.normalized();
        double overlap = 0.0;
        for (std::size_t i = 1; i < n1.t.size(); ++i) {
            const double da = std::min(n1.p_plus[i] + n1.p_minus[i],
                                       n2.p_plus[i] + n2.p_minus[i]);
            const double db = std::min(n1.p_plus[i - 1] + n1.p_minus[i - 1],
                                       n2.p_plus[i - 1] + n2.p_minus[i - 1]);
            overlap += 0.5 * (da + db) * (n1.t[i] - n1.t[i - 1]);
        }
        out.shape_overlap = overlap;
        out.shape1 = pair1;

        // Two-photon state: normalize, drift toggle, hermiticity bookkeeping.
        Eigen::Matrix4cd raw = out.rho;
        out.efficiency = std::max(0.0, raw.trace().real());
        out.stage2_efficiency =
            out.stage1_efficiency > 0.0 ? out.efficiency / out.stage1_efficiency : 0.0;
        if (out.efficiency > 0.0) {
            Eigen::Matrix4cd rho2 = raw / raw.trace().real();
            out.hermiticity_defect = (rho2 - rho2.adjoint()).cwiseAbs().maxCoeff();
            rho2 = 0.5 * (rho2 + rho2.adjoint()).eval();
            if (cfg_.toggles.drift_terms) {
                const double keep = 1.0 - cfg_.toggles.drift_coherence_loss;
                for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 4; ++j)
                        if (i != j) rho2(i, j) *= keep;
            }
            out.rho = rho2;
        }
        if (out.efficiency < cfg_.efficiency_floor)
            out.warnings.push_back("pair efficiency below configured floor");

        // Ion-photon state snapshot from the end of slot 1 (full mode only).
        if (blocks_ == EngineBlocks::full && ck.have_slot1_snapshot)
            out.ion_photon = extract_ion_photon(ck.slot1_end_state);

        for (int i = 0; i < 4; ++i)
            if (out.rho(i, i).real() < -1e-10)
                out.warnings.push_back("negative population in rho2 diagonal");
    }

    IonPhotonState extract_ion_photon(const Matrix& packed) const {
        IonPhotonState ip;
        const int d = dim();
        const auto& space = schedule_.space;
        const int vac0 = space.index(cfg_.scheme.qubit0, 0, 0);
        const int vac1 = space.index(cfg_.scheme.qubit1, 0, 0);
        const int ion_idx[2] = {vac0, vac1};
        // (ion i, photon p) x (ion j, photon q) from Y_pq entries.
        auto yblock = [&](int p, int q) -> Matrix {
            if (p == 0 && q == 0) return packed.block(0, d, d, d);
            if (p == 1 && q == 1) return packed.block(0, 2 * d, d, d);
            if (p == 0 && q == 1) return packed.block(0, 3 * d, d, d);
            return packed.block(0, 3 * d, d, d).adjoint();
        };
        double total = 0.0;
        for (int p = 0; p < 2; ++p) total += yblock(p, p).trace().real();
        if (total <= 0.0) return ip;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int p = 0; p < 2; ++p)
                    for (int q = 0; q < 2; ++q)
                        ip.rho(i * 2 + p, j * 2 + q) =
                            yblock(p, q)(ion_idx[i], ion_idx[j]) / total;
        ip.leakage = 1.0 - ip.rho.trace().real();
        return ip;
    }
};

inline TwoPhotonState conditional_two_photon_state(const ExperimentConfig& cfg) {
    return ConditionalEngine(cfg, EngineBlocks::full).run();
}

} // namespace biphoton
