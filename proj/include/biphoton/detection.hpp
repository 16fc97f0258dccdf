#pragma once

// Detection chain: polarizing splitter with finite extinction, detector
// efficiency, dark counts, arrival-time post-selection, correlation
// counting and the three-basis Bell-fidelity witness.
//
// Splitter cross-talk is modeled as independent per-photon leakage with
// probability 1/extinction. Dark counts are Poisson within each timing
// window only; detector dead time and jitter are not modeled.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "jones.hpp"
#include "rng.hpp"

namespace biphoton {

enum class DetectorPort : int { T = 0, R = 1 };

inline const char* port_name(DetectorPort p) { return p == DetectorPort::T ? "T" : "R"; }

struct TimingWindow {
    double start = 0.0;  // us
    double end = 0.0;

    double length() const { return end - start; }
    bool contains(double t) const { return t >= start && t < end; }
};

struct DetectionModel {
    double extinction_ratio = 15000.0;
    double dark_count_rate_per_us = 0.0;  // per detector
    std::array<TimingWindow, 2> timing_window{};  // one per photon slot
    double detection_efficiency = 1.0;

    void validate() const {
        if (extinction_ratio < 1.0)
            throw std::invalid_argument("detection: extinction ratio must be >= 1");
        if (detection_efficiency <= 0.0 || detection_efficiency > 1.0)
            throw std::invalid_argument("detection: efficiency must be in (0, 1]");
        if (timing_window[0].end > timing_window[1].start &&
            timing_window[1].length() > 0.0 && timing_window[0].length() > 0.0)
            throw std::invalid_argument("detection: photon slot windows must be disjoint");
    }
};

struct ClickRecord {
    long shot = 0;
    int slot = 0;  // 1 or 2
    DetectorPort detector = DetectorPort::T;
    double timestamp = 0.0;  // us, >= 0
};

struct CorrelationCounts {
    MeasBasis basis = MeasBasis::ZZ;
    long n_pp = 0;  // both photons on the T port
    long n_pm = 0;  // photon 1 on T, photon 2 on R
    long n_mp = 0;
    long n_mm = 0;

    long total() const { return n_pp + n_pm + n_mp + n_mm; }
};

struct RejectionTally {
    long missing_click = 0;   // a slot window with no click
    long double_click = 0;    // more than one click in a slot window
    long outside_window = 0;  // clicks falling outside both windows (dropped)
    long accepted = 0;
};

struct TwoPhotonEvent {
    long shot;
    DetectorPort port1;
    DetectorPort port2;
    double t1;
    double t2;
};

// Keeps shots with exactly one in-window click per photon slot.
inline std::vector<TwoPhotonEvent> post_select(const std::vector<ClickRecord>& clicks,
                                               const DetectionModel& model,
                                               RejectionTally* tally = nullptr) {
    RejectionTally local;
    std::vector<TwoPhotonEvent> events;
    std::size_t i = 0;
    while (i < clicks.size()) {
        const long shot = clicks[i].shot;
        std::array<std::vector<const ClickRecord*>, 2> per_slot;
        while (i < clicks.size() && clicks[i].shot == shot) {
            const auto& c = clicks[i];
            if (model.timing_window[0].contains(c.timestamp))
                per_slot[0].push_back(&c);
            else if (model.timing_window[1].contains(c.timestamp))
                per_slot[1].push_back(&c);
            else
                ++local.outside_window;
            ++i;
        }
        if (per_slot[0].size() == 1 && per_slot[1].size() == 1) {
            ++local.accepted;
            events.push_back({shot, per_slot[0][0]->detector, per_slot[1][0]->detector,
                              per_slot[0][0]->timestamp, per_slot[1][0]->timestamp});
        } else if (per_slot[0].size() > 1 || per_slot[1].size() > 1) {
            ++local.double_click;
        } else {
            ++local.missing_click;
        }
    }
    if (tally) *tally = local;
    return events;
}

inline CorrelationCounts count_events(const std::vector<TwoPhotonEvent>& events,
                                      MeasBasis basis) {
    CorrelationCounts c;
    c.basis = basis;
    for (const auto& e : events) {
        const bool p1 = e.port1 == DetectorPort::T;
        const bool p2 = e.port2 == DetectorPort::T;
        if (p1 && p2)
            ++c.n_pp;
        else if (p1)
            ++c.n_pm;
        else if (p2)
            ++c.n_mp;
        else
            ++c.n_mm;
    }
    return c;
}

// Samples the detection of a given two-photon polarization state (4x4
// density matrix over (sigma+,sigma-) x (sigma+,sigma-)) in one basis.
// Returns the raw click stream; feed it to post_select / count_events.
// Timestamps are drawn from the supplied per-slot arrival densities when
// given, else uniformly inside each window.
struct ArrivalSampler {
    std::vector<double> t;
    std::vector<double> cdf;  // normalized

    static ArrivalSampler from_density(const std::vector<double>& t,
                                       const std::vector<double>& density) {
        ArrivalSampler s;
        s.t = t;
        s.cdf.resize(t.size(), 0.0);
        double acc = 0.0;
        for (std::size_t i = 1; i < t.size(); ++i) {
            acc += 0.5 * (density[i] + density[i - 1]) * (t[i] - t[i - 1]);
            s.cdf[i] = acc;
        }
        if (acc > 0.0)
            for (double& x : s.cdf) x /= acc;
        return s;
    }

    double sample(Rng& rng) const {
        const double u = rng.uniform();
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.begin()) return t.front();
        if (it == cdf.end()) return t.back();
        const std::size_t hi = static_cast<std::size_t>(it - cdf.begin());
        const double c0 = cdf[hi - 1], c1 = cdf[hi];
        const double w = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.5;
        return t[hi - 1] + w * (t[hi] - t[hi - 1]);
    }

    bool usable() const { return t.size() >= 2 && cdf.back() > 0.0; }
};

struct DetectOptions {
    long n_shots = 10000;
    std::uint64_t seed = 1;
    const ArrivalSampler* arrivals1 = nullptr;
    const ArrivalSampler* arrivals2 = nullptr;
    // Probability that a shot produces the photon pair at all (generation
    // efficiency); non-generated shots contribute only dark counts.
    double pair_probability = 1.0;
};

inline std::vector<ClickRecord> detect_state(const Eigen::Matrix4cd& rho2, MeasBasis basis,
                                             const DetectionModel& model,
                                             const DetectOptions& opt) {
    model.validate();
    const Matrix2 m = port_matrix(basis);
    // Joint port probabilities p[o1][o2] from Born's rule.
    Eigen::Matrix4cd u4 = Eigen::Matrix4cd::Zero();
    for (int o1 = 0; o1 < 2; ++o1)
        for (int o2 = 0; o2 < 2; ++o2)
            for (int s1 = 0; s1 < 2; ++s1)
                for (int s2 = 0; s2 < 2; ++s2)
                    u4(o1 * 2 + o2, s1 * 2 + s2) = m(o1, s1) * m(o2, s2);
    const Eigen::Matrix4cd rot = u4 * rho2 * u4.adjoint();
    std::array<double, 4> p{};
    double norm = 0.0;
    for (int k = 0; k < 4; ++k) {
        p[k] = std::max(0.0, rot(k, k).real());
        norm += p[k];
    }
    for (double& x : p) x /= norm;

    Rng rng(opt.seed);
    std::vector<ClickRecord> clicks;
    clicks.reserve(static_cast<std::size_t>(opt.n_shots) * 2);
    const double flip = 1.0 / model.extinction_ratio;
    for (long shot = 0; shot < opt.n_shots; ++shot) {
        if (opt.pair_probability < 1.0 && rng.uniform() >= opt.pair_probability) {
            // no pair this shot; dark counts only
        } else {
            const std::size_t k = rng.choose(p, 1.0);
            const std::array<DetectorPort, 2> ideal{k < 2 ? DetectorPort::T : DetectorPort::R,
                                                    (k % 2 == 0) ? DetectorPort::T
                                                                 : DetectorPort::R};
            for (int slot = 0; slot < 2; ++slot) {
                DetectorPort port = ideal[slot];
                if (rng.uniform() < flip)
                    port = (port == DetectorPort::T) ? DetectorPort::R : DetectorPort::T;
                if (rng.uniform() >= model.detection_efficiency) continue;
                const auto* sampler = slot == 0 ? opt.arrivals1 : opt.arrivals2;
                double ts;
                if (sampler && sampler->usable()) {
                    ts = sampler->sample(rng);
                } else {
                    const auto& w = model.timing_window[slot];
                    ts = rng.uniform(w.start, w.end);
                }
                clicks.push_back({shot, slot + 1, port, ts});
            }
        }
        // Dark counts, Poisson in each window per detector.
        for (int slot = 0; slot < 2; ++slot) {
            const auto& w = model.timing_window[static_cast<std::size_t>(slot)];
            if (model.dark_count_rate_per_us <= 0.0 || w.length() <= 0.0) continue;
            for (int det = 0; det < 2; ++det) {
                const int n = rng.poisson(model.dark_count_rate_per_us * w.length());
                for (int j = 0; j < n; ++j)
                    clicks.push_back({shot, slot + 1, static_cast<DetectorPort>(det),
                                      rng.uniform(w.start, w.end)});
            }
        }
    }
    // post_select expects clicks grouped by shot; they are produced in order.
    return clicks;
}

struct ExpectationResult {
    double value = 0.0;
    double standard_error = 0.0;
};

// (n_pp + n_mm - n_pm - n_mp) / total with binomial error propagation.
inline ExpectationResult correlation_expectation(const CorrelationCounts& c) {
    const long n = c.total();
    if (n <= 0) throw std::invalid_argument("correlation_expectation: no events");
    const double e = static_cast<double>(c.n_pp + c.n_mm - c.n_pm - c.n_mp) / n;
    const double se = std::sqrt(std::max(0.0, 1.0 - e * e) / static_cast<double>(n));
    return {e, se};
}

// Bootstrap standard error by multinomial resampling of the four counts.
inline ExpectationResult correlation_expectation_bootstrap(const CorrelationCounts& c,
                                                           int n_boot, std::uint64_t seed) {
    const long n = c.total();
    if (n <= 0) throw std::invalid_argument("correlation_expectation: no events");
    const std::array<double, 4> p{static_cast<double>(c.n_pp) / n,
                                  static_cast<double>(c.n_pm) / n,
                                  static_cast<double>(c.n_mp) / n,
                                  static_cast<double>(c.n_mm) / n};
    Rng rng(seed);
    double sum = 0.0, sumsq = 0.0;
    for (int b = 0; b < n_boot; ++b) {
        std::array<long, 4> k{};
        for (long i = 0; i < n; ++i) ++k[rng.choose(p, 1.0)];
        const double e = static_cast<double>(k[0] + k[3] - k[1] - k[2]) / n;
        sum += e;
        sumsq += e * e;
    }
    const double mean = sum / n_boot;
    return {correlation_expectation(c).value,
            std::sqrt(std::max(0.0, sumsq / n_boot - mean * mean))};
}

enum class BellTarget { psi_plus, psi_minus };

// F(psi+-) = (1 +- <XX> +- <YY> - <ZZ>) / 4, errors in quadrature.
inline ExpectationResult bell_fidelity(ExpectationResult exx, ExpectationResult eyy,
                                       ExpectationResult ezz, BellTarget target) {
    for (const auto& e : {exx, eyy, ezz})
        if (e.value < -1.0 - 1e-12 || e.value > 1.0 + 1e-12)
            throw std::invalid_argument("bell_fidelity: expectation out of [-1, 1]");
    const double s = (target == BellTarget::psi_plus) ? 1.0 : -1.0;
    const double f = 0.25 * (1.0 + s * exx.value + s * eyy.value - ezz.value);
    const double df = 0.25 * std::sqrt(exx.standard_error * exx.standard_error +
                                       eyy.standard_error * eyy.standard_error +
                                       ezz.standard_error * ezz.standard_error);
    return {f, df};
}

// Two-photon Pauli expectations straight from a 4x4 polarization state
// (basis ++, +-, -+, -- over sigma+/sigma-).
inline double pauli_expectation(const Eigen::Matrix4cd& rho, MeasBasis basis) {
    switch (basis) {
        case MeasBasis::XX:
            return 2.0 * (rho(0, 3).real() + rho(1, 2).real());
        case MeasBasis::YY:
            return 2.0 * (rho(1, 2).real() - rho(0, 3).real());
        case MeasBasis::ZZ:
            return (rho(0, 0) + rho(3, 3) - rho(1, 1) - rho(2, 2)).real();
    }
    return 0.0;
}

// Best Bell-state fidelity over the free superposition phase:
// max_phi <Psi(phi)| rho |Psi(phi)> with Psi(phi) = (|+-> + e^{i phi}|-+>)/sqrt2.
inline double best_bell_fidelity(const Eigen::Matrix4cd& rho) {
    return 0.5 * (rho(1, 1).real() + rho(2, 2).real()) + std::abs(rho(1, 2));
}

} // namespace biphoton
