#pragma once

// Adaptive Dormand-Prince 5(4) integrator over Eigen-like states
// (dense complex matrices or vectors). The 5th-order solution propagates
// (FSAL); the embedded 4th-order difference drives PI-free step control.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "operators.hpp"

namespace biphoton {

struct IntegrationError : std::runtime_error {
    double t_reached;
    explicit IntegrationError(const std::string& what, double t)
        : std::runtime_error(what), t_reached(t) {}
};

struct IntegratorOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double h_initial = 1e-3;  // us
    double h_min = 1e-12;
    double h_max = 1.0;
};

struct IntegrationStats {
    long steps = 0;
    long rejected = 0;
    // Sum of accepted local-error maxima (absolute, per entry); an upper
    // proxy for the accumulated truncation error.
    double error_estimate = 0.0;
};

namespace detail {

// Dormand-Prince coefficients.
inline constexpr double dp_c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// b (5th order) equals the last a-row (FSAL); d = b5 - b4 gives the error.
inline constexpr double dp_d[7] = {71.0 / 57600,    0.0,         -71.0 / 16695, 71.0 / 1920,
                                   -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

template <class State>
double scaled_error_norm(const State& err, const State& y0, const State& y1, double atol,
                         double rtol) {
    double worst = 0.0;
    const auto* e = err.data();
    const auto* a = y0.data();
    const auto* b = y1.data();
    const long n = static_cast<long>(err.size());
    for (long i = 0; i < n; ++i) {
        const double scale = atol + rtol * std::max(std::abs(a[i]), std::abs(b[i]));
        worst = std::max(worst, std::abs(e[i]) / scale);
    }
    return worst;
}

template <class State>
double max_abs(const State& x) {
    double worst = 0.0;
    const auto* p = x.data();
    for (long i = 0; i < static_cast<long>(x.size()); ++i)
        worst = std::max(worst, std::abs(p[i]));
    return worst;
}

} // namespace detail

// One Dormand-Prince step from (t, y) with stepsize h. k1 must hold
// rhs(t, y) on entry; on exit holds rhs(t+h, y_new) (FSAL). Returns the
// scaled error norm; fills y_new.
template <class State, class Rhs>
double dp_step(Rhs&& rhs, double t, const State& y, double h, State& y_new, State& k1,
               std::array<State, 7>& k, State& scratch, double atol, double rtol) {
    using namespace detail;
    k[0] = k1;
    for (int stage = 1; stage < 7; ++stage) {
        scratch = y;
        for (int j = 0; j < stage; ++j)
            if (dp_a[stage][j] != 0.0) scratch += (h * dp_a[stage][j]) * k[j];
        rhs(t + dp_c[stage] * h, scratch, k[stage]);
    }
    // 5th-order solution is the stage-7 argument (a[6] row are the b's).
    y_new = y;
    for (int j = 0; j < 6; ++j)
        if (dp_a[6][j] != 0.0) y_new += (h * dp_a[6][j]) * k[j];
    // Error estimate.
    scratch = (h * dp_d[0]) * k[0];
    for (int j = 2; j < 7; ++j) scratch += (h * dp_d[j]) * k[j];
    const double err = scaled_error_norm(scratch, y, y_new, atol, rtol);
    k1 = k[6];
    return err;
}

// Integrate y' = rhs(t, y) from t0 to t1 adaptively, invoking
// observer(t, y) at every time in obs_times (ascending, within [t0, t1]).
template <class State, class Rhs, class Observer>
IntegrationStats integrate_adaptive(Rhs&& rhs, State& y, double t0, double t1,
                                    std::span<const double> obs_times, Observer&& observer,
                                    const IntegratorOptions& opt = {}) {
    IntegrationStats stats;
    if (t1 < t0) throw std::invalid_argument("integrate_adaptive: t1 < t0");
    std::size_t next_obs = 0;
    while (next_obs < obs_times.size() && obs_times[next_obs] <= t0 + 1e-15) {
        observer(obs_times[next_obs], y);
        ++next_obs;
    }
    if (t1 == t0) return stats;

    State k1(y), y_new(y), scratch(y);
    std::array<State, 7> k;
    k.fill(y);
    rhs(t0, y, k1);

    double t = t0;
    double h = std::min({opt.h_initial, opt.h_max, t1 - t0});
    while (t < t1 - 1e-14) {
        // Step exactly onto the next observation time (or t1).
        double target = t1;
        if (next_obs < obs_times.size() && obs_times[next_obs] < target)
            target = obs_times[next_obs];
        if (target - t <= 1e-13) {
            if (target < t1 - 1e-14) {
                observer(target, y);
                ++next_obs;
                continue;
            }
            break;
        }
        bool clamped = false;
        double h_try = h;
        if (t + h_try >= target - 1e-14) {
            h_try = target - t;
            clamped = true;
        }
        double err = dp_step(rhs, t, y, h_try, y_new, k1, k, scratch, opt.atol, opt.rtol);
        if (!std::isfinite(err)) err = 1e6;
        if (err <= 1.0) {
            stats.error_estimate += detail::max_abs(scratch);
            t = clamped ? target : t + h_try;
            y.swap(y_new);
            ++stats.steps;
            while (next_obs < obs_times.size() && obs_times[next_obs] <= t + 1e-12 &&
                   obs_times[next_obs] < t1 - 1e-14) {
                observer(t, y);
                ++next_obs;
            }
        } else {
            ++stats.rejected;
            rhs(t, y, k1);  // k1 was clobbered by FSAL; recompute at current point
        }
        const double grow = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h = h_try * std::clamp(grow, 0.2, 5.0);
        h = std::min(h, opt.h_max);
        if (h < opt.h_min)
            throw IntegrationError("integrate_adaptive: step size underflow", t);
    }
    // Observation times coinciding with t1.
    while (next_obs < obs_times.size() && obs_times[next_obs] <= t1 + 1e-12) {
        observer(t1, y);
        ++next_obs;
    }
    return stats;
}

template <class State, class Rhs>
IntegrationStats integrate_adaptive(Rhs&& rhs, State& y, double t0, double t1,
                                    const IntegratorOptions& opt = {}) {
    return integrate_adaptive(rhs, y, t0, t1, std::span<const double>{},
                              [](double, const State&) {}, opt);
}

// Fixed-step Dormand-Prince (no error control); used by convergence-order
// tests.
template <class State, class Rhs>
void integrate_fixed(Rhs&& rhs, State& y, double t0, double t1, long n_steps) {
    const double h = (t1 - t0) / static_cast<double>(n_steps);
    State k1(y), y_new(y), scratch(y);
    std::array<State, 7> k;
    k.fill(y);
    double t = t0;
    rhs(t0, y, k1);
    for (long i = 0; i < n_steps; ++i) {
        dp_step(rhs, t, y, h, y_new, k1, k, scratch, 1.0, 1.0);
        y.swap(y_new);
        t += h;
    }
}

} // namespace biphoton
