#pragma once

// First-order Monte-Carlo wave-function unraveling. Deterministic
// non-unitary evolution under H_eff = H - (i/2) sum rate L^dag L; a jump
// fires when the squared norm decays through a pre-drawn threshold, with
// the channel chosen proportionally to rate * <L^dag L>; the state is
// renormalized after each jump. Identical (seed, problem) gives identical
// trajectories.

#include <vector>

#include "generator.hpp"
#include "integrate.hpp"
#include "rng.hpp"

namespace biphoton {

struct JumpEvent {
    double time;               // us
    std::size_t channel;       // index into generator channels()
    ChannelKind kind;
    std::string label;
};

struct TrajectoryResult {
    Vector state;  // normalized final state
    std::vector<JumpEvent> jumps;
};

namespace detail {

// Integrate the non-Hermitian evolution until either t1 is reached or the
// squared norm drops below threshold. Returns the stop time; psi holds the
// (unnormalized) state there. The crossing is located by regula falsi on
// the log of the squared norm (its decay is near-exponential).
template <class Rhs>
double evolve_until_threshold(Rhs&& rhs, Vector& psi, double t0, double t1, double threshold,
                              double time_tol, const IntegratorOptions& opt) {
    double t = t0;
    Vector prev = psi;
    const double h_obs = std::max(64.0 * time_tol, (t1 - t0) / 64.0);
    while (t < t1 - 1e-13) {
        const double t_next = std::min(t + h_obs, t1);
        prev = psi;
        const double n_before = psi.squaredNorm();
        integrate_adaptive(rhs, psi, t, t_next, opt);
        const double n_after = psi.squaredNorm();
        if (n_after <= threshold) {
            double lo = t, hi = t_next, n_lo = n_before, n_hi = n_after;
            while (hi - lo > time_tol) {
                const double f_lo = std::log(std::max(n_lo, 1e-300) / threshold);
                const double f_hi = std::log(std::max(n_hi, 1e-300) / threshold);
                double frac = f_lo / std::max(f_lo - f_hi, 1e-12);
                frac = std::clamp(frac, 0.05, 0.95);
                const double mid = lo + (hi - lo) * frac;
                Vector probe = prev;
                integrate_adaptive(rhs, probe, lo, mid, opt);
                const double n_mid = probe.squaredNorm();
                if (n_mid <= threshold) {
                    hi = mid;
                    n_hi = n_mid;
                } else {
                    lo = mid;
                    n_lo = n_mid;
                    prev.swap(probe);
                }
            }
            psi = prev;
            integrate_adaptive(rhs, psi, lo, hi, opt);
            return hi;
        }
        t = t_next;
    }
    return t1;
}

} // namespace detail

inline TrajectoryResult mcwf_trajectory(const LindbladGenerator& gen, Vector psi, double t0,
                                        double t1, std::uint64_t seed,
                                        const IntegratorOptions& user_opt = {},
                                        double jump_time_tol = 1e-5) {
    if (psi.size() != gen.dim())
        throw std::invalid_argument("mcwf_trajectory: dimension mismatch");
    Rng rng(seed);
    IntegratorOptions opt = user_opt;
    auto rhs = [&gen](double t, const Vector& x, Vector& out) { gen.rhs_vec(t, x, out); };

    TrajectoryResult result;
    psi.normalize();
    double t = t0;
    while (t < t1 - 1e-13) {
        const double threshold = rng.uniform();
        if (threshold <= 0.0) continue;
        const double t_stop =
            detail::evolve_until_threshold(rhs, psi, t, t1, threshold, jump_time_tol, opt);
        if (t_stop >= t1 - 1e-13) {
            t = t1;
            break;
        }
        // A jump fired at t_stop: pick the channel by rate * <L^dag L>.
        const auto& channels = gen.channels();
        if (channels.empty())
            throw std::runtime_error("mcwf_trajectory: norm decayed with no collapse channels");
        std::vector<double> weights(channels.size());
        std::vector<Vector> jumped(channels.size());
        double total = 0.0;
        for (std::size_t c = 0; c < channels.size(); ++c) {
            jumped[c] = Vector::Zero(psi.size());
            channels[c].op.add_Ax(1.0, psi, jumped[c]);
            weights[c] = channels[c].rate * jumped[c].squaredNorm();
            total += weights[c];
        }
        if (total < 1e-300)
            throw std::runtime_error(
                "mcwf_trajectory: norm underflow without jump resolution");
        const std::size_t c = rng.choose(weights, total);
        psi = jumped[c] / jumped[c].norm();
        result.jumps.push_back({t_stop, c, channels[c].kind, channels[c].label});
        t = t_stop;
    }
    const double n = psi.norm();
    if (n < 1e-150)
        throw std::runtime_error("mcwf_trajectory: norm underflow without jump resolution");
    result.state = psi / n;
    return result;
}

} // namespace biphoton
