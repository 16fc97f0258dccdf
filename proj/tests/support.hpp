#pragma once

// Shared toy models and helpers for the test suites. The toys exercise the
// same generator/integrator machinery as the full system but on spaces
// small enough for analytic or brute-force oracles.

#include <catch2/catch_amalgamated.hpp>

#include "biphoton/dynamics.hpp"
#include "biphoton/generator.hpp"
#include "biphoton/rng.hpp"

namespace testsup {

using namespace biphoton;

inline CooOp coo_from_dense(const Matrix& m) {
    CooOp op(static_cast<int>(m.rows()));
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c)
            if (m(r, c) != complexd{0.0, 0.0}) op.add(r, c, m(r, c));
    return op;
}

// Two-level atom, no cavity: H = (omega/2) sigma_x + (delta/2) sigma_z,
// optional decay |0><1| at rate gamma.
inline LindbladGenerator two_level(double omega, double delta = 0.0, double gamma = 0.0,
                                   bool recycle = true) {
    HilbertSpace space{2, 0};
    Matrix h = Matrix::Zero(2, 2);
    h(0, 1) = 0.5 * omega;
    h(1, 0) = 0.5 * omega;
    h(0, 0) = -0.5 * delta;
    h(1, 1) = 0.5 * delta;
    std::vector<CollapseChannel> channels;
    if (gamma > 0.0) {
        Matrix l = Matrix::Zero(2, 2);
        l(0, 1) = 1.0;
        channels.push_back({coo_from_dense(l), gamma, ChannelKind::spontaneous, "decay"});
    }
    return LindbladGenerator(space, coo_from_dense(h), {}, std::move(channels), recycle);
}

// One decaying cavity mode (sigma+), trivial single-level atom.
inline LindbladGenerator cavity_decay(double kappa_field) {
    HilbertSpace space{1, 1};
    CooOp h(space.total_dim());
    std::vector<CollapseChannel> channels;
    channels.push_back({cavity_annihilation(space, Polarization::sigma_plus), 2.0 * kappa_field,
                        ChannelKind::cavity_sigma_plus, "cavity"});
    return LindbladGenerator(space, h, {}, std::move(channels), true);
}

// Three-level Raman toy with one relevant cavity mode: drive g->e (Rabi
// omega, detuning delta via diagonal), cavity coupling e->f with strength
// g0, spontaneous emission e->g at rate gamma, cavity field decay kappa.
// Atom indices: 0 = g, 1 = e, 2 = f.
struct LambdaToy {
    HilbertSpace space{3, 1};
    double omega, g0, delta, gamma, kappa;

    LindbladGenerator generator(bool recycle_cavity) const {
        Matrix h = Matrix::Zero(space.total_dim(), space.total_dim());
        auto idx = [&](int atom, int n) { return space.index(atom, n, 0); };
        for (int n = 0; n <= 1; ++n) {
            h(idx(1, n), idx(0, n)) += 0.5 * omega;
            h(idx(0, n), idx(1, n)) += 0.5 * omega;
            h(idx(1, n), idx(1, n)) += delta;
        }
        h(idx(2, 1), idx(1, 0)) += g0;
        h(idx(1, 0), idx(2, 1)) += g0;
        std::vector<CollapseChannel> channels;
        Matrix l = Matrix::Zero(space.total_dim(), space.total_dim());
        for (int n = 0; n <= 1; ++n) l(idx(0, n), idx(1, n)) = 1.0;
        channels.push_back({coo_from_dense(l), gamma, ChannelKind::spontaneous, "spont e->g"});
        channels.push_back({cavity_annihilation(space, Polarization::sigma_plus), 2.0 * kappa,
                            ChannelKind::cavity_sigma_plus, "cavity"});
        return LindbladGenerator(space, coo_from_dense(h), {}, std::move(channels),
                                 recycle_cavity);
    }

    Vector initial() const {
        Vector v = Vector::Zero(space.total_dim());
        v(space.index(0, 0, 0)) = 1.0;
        return v;
    }
};

inline Matrix random_hermitian(int dim, Rng& rng) {
    Matrix m(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) m(r, c) = complexd{rng.gaussian(), rng.gaussian()};
    return 0.5 * (m + m.adjoint().eval());
}

inline Matrix random_density(int dim, Rng& rng) {
    Matrix m(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) m(r, c) = complexd{rng.gaussian(), rng.gaussian()};
    Matrix rho = m * m.adjoint();
    rho /= rho.trace().real();
    return rho;
}

// Regularized upper incomplete gamma Q(a, x), for chi-square p-values.
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) return 1.0;
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) {
        // Series for P(a, x), return 1 - P.
        double sum = 1.0 / a, term = sum;
        for (int n = 1; n < 500; ++n) {
            term *= x / (a + n);
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-15) break;
        }
        const double p = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
        return 1.0 - p;
    }
    // Continued fraction for Q(a, x).
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace testsup
