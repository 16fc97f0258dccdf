#pragma once

// Minimal COO sparse operator used for Hamiltonian terms and collapse
// operators. Dense complex matrices (Eigen) are the semantic contract for
// states; these sparse operators are a storage optimization for the very
// sparse coupling structure (a few entries per 72x72 operator).

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

#include "units.hpp"

namespace biphoton {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct CooEntry {
    int row;
    int col;
    complexd value;
};

class CooOp {
  public:
    CooOp() = default;
    explicit CooOp(int dim) : dim_(dim) {}

    int dim() const { return dim_; }
    bool empty() const { return entries_.empty(); }
    const std::vector<CooEntry>& entries() const { return entries_; }

    void add(int row, int col, complexd value) {
        if (row < 0 || row >= dim_ || col < 0 || col >= dim_)
            throw std::out_of_range("CooOp::add: index out of range");
        if (value != complexd{0.0, 0.0}) entries_.push_back({row, col, value});
    }

    // Merge duplicate (row, col) entries; keeps a deterministic order.
    void compress() {
        std::sort(entries_.begin(), entries_.end(), [](const CooEntry& a, const CooEntry& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        std::vector<CooEntry> merged;
        for (const auto& e : entries_) {
            if (!merged.empty() && merged.back().row == e.row && merged.back().col == e.col)
                merged.back().value += e.value;
            else
                merged.push_back(e);
        }
        std::erase_if(merged, [](const CooEntry& e) { return std::abs(e.value) == 0.0; });
        entries_ = std::move(merged);
    }

    CooOp adjoint() const {
        CooOp out(dim_);
        for (const auto& e : entries_) out.add(e.col, e.row, std::conj(e.value));
        out.compress();
        return out;
    }

    CooOp scaled(complexd s) const {
        CooOp out(dim_);
        for (const auto& e : entries_) out.add(e.row, e.col, s * e.value);
        return out;
    }

    Matrix dense() const {
        Matrix m = Matrix::Zero(dim_, dim_);
        for (const auto& e : entries_) m(e.row, e.col) += e.value;
        return m;
    }

    // out += alpha * A * X. Sweeps columns so both operands stay
    // cache-resident on column-major storage.
    template <class In, class Out>
    void add_AX(complexd alpha, const In& X, Out&& out) const {
        const long n = X.cols();
        for (long j = 0; j < n; ++j) {
            auto xj = X.col(j);
            auto oj = out.col(j);
            for (const auto& e : entries_) oj(e.row) += (alpha * e.value) * xj(e.col);
        }
    }
    // out += alpha * X * A
    template <class In, class Out>
    void add_XA(complexd alpha, const In& X, Out&& out) const {
        for (const auto& e : entries_) out.col(e.col) += (alpha * e.value) * X.col(e.row);
    }
    // out += alpha * A * x
    template <class In, class Out>
    void add_Ax(complexd alpha, const In& x, Out&& out) const {
        for (const auto& e : entries_) out(e.row) += (alpha * e.value) * x(e.col);
    }
    // <x| A |x>
    complexd expectation(const Vector& x) const {
        complexd s{0.0, 0.0};
        for (const auto& e : entries_) s += std::conj(x(e.row)) * e.value * x(e.col);
        return s;
    }
    // tr(A X)
    template <class In>
    complexd trace_product(const In& X) const {
        complexd s{0.0, 0.0};
        for (const auto& e : entries_) s += e.value * X(e.col, e.row);
        return s;
    }
    // alpha * A X B^dagger accumulated into out (B = other).
    template <class In, class Out>
    void add_sandwich(double alpha, const CooOp& other, const In& X, Out&& out) const {
        for (const auto& a : entries_)
            for (const auto& b : other.entries_)
                out(a.row, b.row) += alpha * a.value * std::conj(b.value) * X(a.col, b.col);
    }

    static CooOp compose(const CooOp& a, const CooOp& b) {
        if (a.dim() != b.dim()) throw std::invalid_argument("CooOp::compose: dim mismatch");
        CooOp out(a.dim());
        for (const auto& ea : a.entries_)
            for (const auto& eb : b.entries_)
                if (ea.col == eb.row) out.add(ea.row, eb.col, ea.value * eb.value);
        out.compress();
        return out;
    }

    static CooOp sum(const CooOp& a, const CooOp& b) {
        if (a.dim() != b.dim()) throw std::invalid_argument("CooOp::sum: dim mismatch");
        CooOp out(a.dim());
        for (const auto& e : a.entries_) out.add(e.row, e.col, e.value);
        for (const auto& e : b.entries_) out.add(e.row, e.col, e.value);
        out.compress();
        return out;
    }

  private:
    int dim_ = 0;
    std::vector<CooEntry> entries_;
};

} // namespace biphoton
