#pragma once

// Density-matrix propagation and validation on top of the Lindblad
// generator, plus expectation values.

#include <Eigen/Eigenvalues>

#include "generator.hpp"
#include "integrate.hpp"

namespace biphoton {

struct DensityCheck {
    double hermiticity_error = 0.0;  // max |rho - rho^dag|
    double trace_error = 0.0;        // |tr rho - 1|
    double min_eigenvalue = 0.0;

    bool ok(double herm_tol = 1e-10, double trace_tol = 1e-8, double pos_tol = -1e-8) const {
        return hermiticity_error < herm_tol && trace_error < trace_tol &&
               min_eigenvalue >= pos_tol;
    }
};

inline DensityCheck check_density(const Matrix& rho) {
    DensityCheck c;
    c.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    c.trace_error = std::abs(rho.trace() - complexd{1.0, 0.0});
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()),
                                             Eigen::EigenvaluesOnly);
    c.min_eigenvalue = es.eigenvalues().minCoeff();
    return c;
}

// tr(op * rho).
inline complexd expectation(const Matrix& op, const Matrix& rho) {
    if (op.rows() != rho.rows())
        throw std::invalid_argument("expectation: dimension mismatch");
    return (op * rho).trace();
}

inline complexd expectation(const CooOp& op, const Matrix& rho) {
    if (op.dim() != rho.rows())
        throw std::invalid_argument("expectation: dimension mismatch");
    return op.trace_product(rho);
}

// The Lindblad right-hand side as a standalone value (contract form).
inline Matrix lindblad_rhs(const LindbladGenerator& gen, double t, const Matrix& rho) {
    if (rho.rows() != gen.dim())
        throw std::invalid_argument("lindblad_rhs: dimension mismatch");
    Matrix out(rho.rows(), rho.cols());
    gen.rhs(t, rho, out);
    return out;
}

// Adaptive master-equation propagation; returns the final state.
inline Matrix propagate_me(const LindbladGenerator& gen, Matrix rho, double t0, double t1,
                           double rtol = 1e-8, IntegrationStats* stats_out = nullptr) {
    if (rho.rows() != gen.dim())
        throw std::invalid_argument("propagate_me: dimension mismatch");
    IntegratorOptions opt;
    opt.rtol = rtol;
    opt.atol = rtol * 1e-2;
    auto rhs = [&gen](double t, const Matrix& x, Matrix& out) { gen.rhs(t, x, out); };
    IntegrationStats stats = integrate_adaptive(rhs, rho, t0, t1, opt);
    if (stats_out) *stats_out = stats;
    return rho;
}

inline Matrix pure_density(const Vector& psi) { return psi * psi.adjoint(); }

} // namespace biphoton
