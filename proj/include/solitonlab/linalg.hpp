#pragma once

// Thin dense symmetric linear algebra on top of LAPACKE.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <lapacke.h>

#include "solitonlab/error.hpp"

namespace solitonlab {

// Dense n x n matrix, row-major. Used for self-adjoint operators only.
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

    std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    double* data() noexcept { return a_.data(); }
    const double* data() const noexcept { return a_.data(); }

    // max |A - A^T|
    double asymmetry() const {
        double m = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
        }
        return m;
    }

    void symmetrize() {
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) {
                const double avg = 0.5 * ((*this)(i, j) + (*this)(j, i));
                (*this)(i, j) = avg;
                (*this)(j, i) = avg;
            }
        }
    }

    std::vector<double> apply(const std::vector<double>& v) const {
        std::vector<double> out(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            const double* row = a_.data() + i * n_;
            double s = 0.0;
            for (std::size_t j = 0; j < n_; ++j) s += row[j] * v[j];
            out[i] = s;
        }
        return out;
    }

    // max_i sum_j |a_ij|, an upper bound on the spectral radius.
    double norm_inf() const {
        double m = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n_; ++j) s += std::abs((*this)(i, j));
            m = std::max(m, s);
        }
        return m;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

struct EigenPairs {
    std::vector<double> values;                // ascending
    std::vector<std::vector<double>> vectors;  // one unit vector per value
};

// The `count` smallest eigenpairs (dsyevr, index range). The input is copied.
inline EigenPairs smallest_eigenpairs(const SymmetricMatrix& a, std::size_t count) {
    const auto n = static_cast<lapack_int>(a.size());
    count = std::min<std::size_t>(count, a.size());
    if (count == 0) return {};
    std::vector<double> work(a.data(), a.data() + a.size() * a.size());
    std::vector<double> w(a.size());
    const auto m_req = static_cast<lapack_int>(count);
    std::vector<double> z(a.size() * count);
    std::vector<lapack_int> isuppz(2 * count);
    lapack_int m = 0;
    const lapack_int info = LAPACKE_dsyevr(LAPACK_ROW_MAJOR, 'V', 'I', 'U', n, work.data(), n, 0.0, 0.0, 1, m_req,
                                           0.0, &m, w.data(), z.data(), m_req, isuppz.data());
    if (info != 0) throw NumericError("dsyevr failed with info = " + std::to_string(info));
    EigenPairs out;
    out.values.assign(w.begin(), w.begin() + m);
    out.vectors.assign(static_cast<std::size_t>(m), std::vector<double>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (lapack_int k = 0; k < m; ++k) out.vectors[static_cast<std::size_t>(k)][i] = z[i * count + k];
    }
    return out;
}

// All eigenvalues, ascending.
inline std::vector<double> eigenvalues(const SymmetricMatrix& a) {
    const auto n = static_cast<lapack_int>(a.size());
    std::vector<double> work(a.data(), a.data() + a.size() * a.size());
    std::vector<double> w(a.size());
    const lapack_int info = LAPACKE_dsyevd(LAPACK_ROW_MAJOR, 'N', 'U', n, work.data(), n, w.data());
    if (info != 0) throw NumericError("dsyevd failed with info = " + std::to_string(info));
    return w;
}

// Solves A x = b for symmetric (possibly indefinite) A by Bunch-Kaufman.
inline std::vector<double> solve_symmetric(const SymmetricMatrix& a, const std::vector<double>& b) {
    const auto n = static_cast<lapack_int>(a.size());
    if (b.size() != a.size()) throw ShapeError("solve_symmetric: right-hand side length mismatch");
    std::vector<double> work(a.data(), a.data() + a.size() * a.size());
    std::vector<double> x = b;
    std::vector<lapack_int> ipiv(a.size());
    const lapack_int info = LAPACKE_dsysv(LAPACK_ROW_MAJOR, 'U', n, 1, work.data(), n, ipiv.data(), x.data(), 1);
    if (info > 0) throw NumericError("dsysv: matrix is exactly singular");
    if (info < 0) throw NumericError("dsysv failed with info = " + std::to_string(info));
    for (double v : x) {
        if (!std::isfinite(v)) throw NumericError("dsysv produced a non-finite solution");
    }
    return x;
}

}  // namespace solitonlab
