#pragma once

// Dense discretizations of the linearized operators at a standing wave phi,
//
//   L_minus = d^4 - beta d^2 + omega - (alpha+1)|phi|^alpha,
//   L_plus  = d^4 - beta d^2 + omega - |phi|^alpha,
//
// with the multiplier part realized as a circulant Fourier differentiation
// matrix. For even profiles the operators commute with x -> -x, so the
// matrix splits exactly into even and odd blocks of about half the size;
// eigen_report_by_parity uses that to cut the O(N^3) cost by four.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "solitonlab/error.hpp"
#include "solitonlab/grid.hpp"
#include "solitonlab/linalg.hpp"
#include "solitonlab/petviashvili.hpp"

namespace solitonlab {

enum class LinearizedOperator { Lminus, Lplus };
enum class Sector { Full, Even, Odd };

inline const char* to_string(Sector s) {
    switch (s) {
        case Sector::Full: return "full";
        case Sector::Even: return "even";
        case Sector::Odd: return "odd";
    }
    return "?";
}

namespace detail {

// Orthonormal basis of a parity sector, as sparse combinations of nodal unit
// vectors. Reflection maps node j to N - j (mod N): x_{N-j} = -x_j.
struct SectorBasis {
    struct Term {
        std::size_t node;
        double weight;
    };
    std::vector<std::vector<Term>> vectors;

    static SectorBasis make(std::size_t n, Sector sector) {
        SectorBasis b;
        const double r = 1.0 / std::sqrt(2.0);
        if (sector == Sector::Full) {
            b.vectors.reserve(n);
            for (std::size_t j = 0; j < n; ++j) b.vectors.push_back({{j, 1.0}});
            return b;
        }
        if (sector == Sector::Even) {
            b.vectors.push_back({{0, 1.0}});
            b.vectors.push_back({{n / 2, 1.0}});
        }
        const double sign = sector == Sector::Even ? 1.0 : -1.0;
        for (std::size_t j = 1; j < n / 2; ++j) b.vectors.push_back({{j, r}, {n - j, sign * r}});
        return b;
    }
};

}  // namespace detail

struct OperatorMatrix {
    SymmetricMatrix entries;
    GridPtr grid;  // may be null for synthetic matrices
    Sector sector = Sector::Full;

    std::size_t size() const noexcept { return entries.size(); }

    // Maps a coefficient vector of this sector back to nodal values.
    std::vector<double> lift(std::span<const double> coeffs) const {
        if (sector == Sector::Full || !grid) return {coeffs.begin(), coeffs.end()};
        const auto basis = detail::SectorBasis::make(grid->size(), sector);
        std::vector<double> out(grid->size(), 0.0);
        for (std::size_t p = 0; p < basis.vectors.size(); ++p) {
            for (const auto& t : basis.vectors[p]) out[t.node] += t.weight * coeffs[p];
        }
        return out;
    }

    // Nodal values projected onto this sector's basis.
    std::vector<double> restrict_vector(std::span<const double> nodal) const {
        if (sector == Sector::Full || !grid) return {nodal.begin(), nodal.end()};
        const auto basis = detail::SectorBasis::make(grid->size(), sector);
        std::vector<double> out(basis.vectors.size(), 0.0);
        for (std::size_t p = 0; p < basis.vectors.size(); ++p) {
            for (const auto& t : basis.vectors[p]) out[p] += t.weight * nodal[t.node];
        }
        return out;
    }
};

namespace detail {

inline std::vector<double> operator_potential(const RealProfile& phi, double alpha, LinearizedOperator which) {
    const double coupling = which == LinearizedOperator::Lminus ? alpha + 1.0 : 1.0;
    std::vector<double> v(phi.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = -coupling * std::pow(std::abs(phi.values[j]), alpha);
    return v;
}

// First column of the circulant matrix of the multiplier symbol(xi) + omega.
inline std::vector<double> circulant_column(const SpectralGrid& g, const Dispersion& disp, double omega) {
    std::vector<cplx> c(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) c[k] = disp(g.fft_wavenumbers()[k]) + omega;
    g.fft_backward(c);
    std::vector<double> out(g.size());
    const double inv_n = 1.0 / static_cast<double>(g.size());
    for (std::size_t m = 0; m < g.size(); ++m) out[m] = c[m].real() * inv_n;
    return out;
}

template <class Entry>
SymmetricMatrix assemble_in_basis(const SectorBasis& basis, Entry&& entry) {
    const std::size_t m = basis.vectors.size();
    SymmetricMatrix a(m);
    for (std::size_t p = 0; p < m; ++p) {
        for (std::size_t q = 0; q < m; ++q) {
            double s = 0.0;
            for (const auto& tp : basis.vectors[p]) {
                for (const auto& tq : basis.vectors[q]) s += tp.weight * tq.weight * entry(tp.node, tq.node);
            }
            a(p, q) = s;
        }
    }
    return a;
}

}  // namespace detail

// Discretized L_minus or L_plus in the requested sector, symmetrized.
inline OperatorMatrix build_operator(const RealProfile& phi, double alpha, double omega, LinearizedOperator which,
                                     const Dispersion& disp = Dispersion::mixed(), Sector sector = Sector::Full) {
    phi.validate();
    require_positive(alpha, "alpha");
    require_positive(omega, "omega");
    const SpectralGrid& g = *phi.grid;
    const std::size_t n = g.size();
    const auto col = detail::circulant_column(g, disp, omega);
    const auto pot = detail::operator_potential(phi, alpha, which);
    auto entry = [&](std::size_t i, std::size_t j) {
        const double v = col[(i + n - j) % n];
        return i == j ? v + pot[i] : v;
    };
    OperatorMatrix out;
    out.grid = phi.grid;
    out.sector = sector;
    out.entries = detail::assemble_in_basis(detail::SectorBasis::make(n, sector), entry);
    out.entries.symmetrize();
    return out;
}

// Even or odd block of a full-grid operator.
inline OperatorMatrix restrict_to_sector(const OperatorMatrix& full, Sector sector) {
    if (full.sector != Sector::Full || !full.grid) throw ParameterError("restrict_to_sector needs a full-grid operator");
    OperatorMatrix out;
    out.grid = full.grid;
    out.sector = sector;
    out.entries = detail::assemble_in_basis(detail::SectorBasis::make(full.size(), sector),
                                            [&](std::size_t i, std::size_t j) { return full.entries(i, j); });
    out.entries.symmetrize();
    return out;
}

// The same operator applied spectrally (no matrix), for cross-checks.
inline std::vector<double> apply_linearized(const RealProfile& phi, double alpha, double omega, LinearizedOperator which,
                                            std::span<const double> v, const Dispersion& disp = Dispersion::mixed()) {
    const SpectralGrid& g = *phi.grid;
    g.check_length(v.size(), "apply_linearized");
    const auto symbol = g.fft_symbol([&](double xi) { return disp(xi) + omega; });
    std::vector<double> out = detail::apply_fft_symbol_real(g, v, symbol);
    const auto pot = detail::operator_potential(phi, alpha, which);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += pot[j] * v[j];
    return out;
}

inline double default_tol_zero(double omega) { return 1e-6 * (omega + 1.0); }

struct EigenReport {
    int n_negative = 0;
    int n_zero = 0;
    std::vector<double> smallest_eigenvalues;          // ascending
    std::vector<std::vector<double>> eigenvectors;     // nodal values, unit 2-norm
    std::vector<Sector> sectors;                       // where each eigenpair lives
    double tol_zero = 0.0;
    GridPtr grid;  // null for reports built from a bare matrix
};

namespace detail {

inline EigenReport classify(EigenPairs pairs, double tol_zero, std::size_t keep, const OperatorMatrix& op) {
    EigenReport r;
    r.tol_zero = tol_zero;
    r.grid = op.grid;
    for (double v : pairs.values) {
        if (v < -tol_zero) ++r.n_negative;
        else if (std::abs(v) <= tol_zero) ++r.n_zero;
    }
    const std::size_t m = std::min(keep, pairs.values.size());
    for (std::size_t i = 0; i < m; ++i) {
        r.smallest_eigenvalues.push_back(pairs.values[i]);
        r.eigenvectors.push_back(op.lift(pairs.vectors[i]));
        r.sectors.push_back(op.sector);
    }
    return r;
}

inline EigenReport merge(const EigenReport& a, const EigenReport& b, std::size_t keep) {
    EigenReport r;
    r.tol_zero = std::max(a.tol_zero, b.tol_zero);
    r.n_negative = a.n_negative + b.n_negative;
    r.n_zero = a.n_zero + b.n_zero;
    r.grid = a.grid ? a.grid : b.grid;
    std::size_t i = 0, j = 0;
    while (r.smallest_eigenvalues.size() < keep && (i < a.smallest_eigenvalues.size() || j < b.smallest_eigenvalues.size())) {
        const bool take_a = j >= b.smallest_eigenvalues.size() ||
                            (i < a.smallest_eigenvalues.size() && a.smallest_eigenvalues[i] <= b.smallest_eigenvalues[j]);
        const EigenReport& src = take_a ? a : b;
        std::size_t& k = take_a ? i : j;
        r.smallest_eigenvalues.push_back(src.smallest_eigenvalues[k]);
        r.eigenvectors.push_back(src.eigenvectors[k]);
        r.sectors.push_back(src.sectors[k]);
        ++k;
    }
    return r;
}

}  // namespace detail

// Counts of negative and zero eigenvalues plus the `keep` smallest eigenpairs.
// Only the low end of the spectrum is computed; the window grows until it
// reaches past +tol_zero, so the counts are complete.
inline EigenReport eigen_report(const OperatorMatrix& op, double tol_zero, std::size_t keep = 6) {
    if (!(tol_zero >= 0.0)) throw ParameterError("tol_zero must be non-negative");
    std::size_t window = std::max<std::size_t>(keep, 8);
    while (true) {
        EigenPairs pairs = smallest_eigenpairs(op.entries, window);
        const bool complete = pairs.values.empty() || pairs.values.back() > tol_zero || window >= op.size();
        if (complete) return detail::classify(std::move(pairs), tol_zero, keep, op);
        window *= 2;
    }
}

inline EigenReport eigen_report(const SymmetricMatrix& m, double tol_zero, std::size_t keep = 6) {
    OperatorMatrix op;
    op.entries = m;
    return eigen_report(op, tol_zero, keep);
}

// Same spectrum as eigen_report(full), computed blockwise in the even and odd
// sectors. Valid when the profile is even about x = 0.
inline EigenReport eigen_report_by_parity(const OperatorMatrix& full, double tol_zero, std::size_t keep = 6) {
    const EigenReport even = eigen_report(restrict_to_sector(full, Sector::Even), tol_zero, keep);
    const EigenReport odd = eigen_report(restrict_to_sector(full, Sector::Odd), tol_zero, keep);
    return detail::merge(even, odd, keep);
}

// Spectrum of the block-diagonal composite diag(L_minus, L_plus): the union.
inline EigenReport composite_report(const EigenReport& minus, const EigenReport& plus, std::size_t keep = 6) {
    return detail::merge(minus, plus, keep);
}

// |<v, w>| / (|v| |w|) in the discrete 2-norm.
inline double correlation(std::span<const double> v, std::span<const double> w) {
    double vw = 0.0, vv = 0.0, ww = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        vw += v[i] * w[i];
        vv += v[i] * v[i];
        ww += w[i] * w[i];
    }
    if (vv == 0.0 || ww == 0.0) return 0.0;
    return std::abs(vw) / std::sqrt(vv * ww);
}

// Eigenvector of the zero eigenvalue closest to 0, if the report has one.
inline std::optional<std::vector<double>> kernel_vector(const EigenReport& r) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < r.smallest_eigenvalues.size(); ++i) {
        if (std::abs(r.smallest_eigenvalues[i]) > r.tol_zero) continue;
        if (!best || std::abs(r.smallest_eigenvalues[i]) < std::abs(r.smallest_eigenvalues[*best])) best = i;
    }
    if (!best) return std::nullopt;
    return r.eigenvectors[*best];
}

namespace detail {

inline bool single_signed(std::span<const double> v) {
    double vmax = 0.0, vmin = 0.0;
    for (double x : v) {
        vmax = std::max(vmax, x);
        vmin = std::min(vmin, x);
    }
    const double scale = std::max(vmax, -vmin);
    if (scale == 0.0) return false;
    const double band = 1e-8 * scale;
    return vmin >= -band || vmax <= band;
}

}  // namespace detail

// True when the eigenvector of the most negative eigenvalue has one sign,
// ignoring entries below 1e-8 of its maximum magnitude. For operators on a
// grid the test is applied to the Fourier coefficients: the ground state of
// L_minus is positive on the transform side, while in x it can pick up small
// oscillating tails once omega exceeds 1/4 of the decay scale.
inline bool ground_state_positivity(const EigenReport& r) {
    if (r.n_negative < 1 || r.eigenvectors.empty()) {
        throw ParameterError("ground_state_positivity: report has no negative eigenvalue");
    }
    const auto& v = r.eigenvectors.front();
    if (!r.grid) return detail::single_signed(v);
    const auto coeffs = forward_transform(RealProfile{r.grid, v});
    std::vector<double> re(coeffs.size());
    double imag = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        re[k] = coeffs[k].real();
        imag = std::max(imag, std::abs(coeffs[k].imag()));
        scale = std::max(scale, std::abs(coeffs[k]));
    }
    // An even eigenvector has a real transform; anything else is not a ground state.
    if (imag > 1e-8 * scale) return false;
    return detail::single_signed(re);
}

// Physical-space version of the same test, regardless of any grid.
inline bool ground_state_positivity_physical(const EigenReport& r) {
    if (r.n_negative < 1 || r.eigenvectors.empty()) {
        throw ParameterError("ground_state_positivity: report has no negative eigenvalue");
    }
    return detail::single_signed(r.eigenvectors.front());
}

// Discrete log-concavity test: the second difference of log(samples) must be
// negative at every interior node except the node(s) within one step of 0.
inline bool check_pf2_logconcavity(std::span<const double> samples, double xi_start, double xi_step) {
    if (!(xi_step > 0.0)) throw ParameterError("check_pf2_logconcavity: step must be positive");
    std::vector<double> logs(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(samples[i] > 0.0) || !std::isfinite(samples[i])) {
            throw DomainError("check_pf2_logconcavity: samples must be positive and finite");
        }
        logs[i] = std::log(samples[i]);
    }
    for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
        const double xi = xi_start + static_cast<double>(i) * xi_step;
        if (std::abs(xi) < xi_step) continue;
        if (!(logs[i + 1] - 2.0 * logs[i] + logs[i - 1] < 0.0)) return false;
    }
    return true;
}

struct NegativeDirection {
    RealProfile chi;        // solution of L_minus chi = phi, orthogonal to the kernel
    double scalar = 0.0;    // <chi, phi>_{L^2}
    double residual = 0.0;  // max |L_minus chi - phi|
};

// Solves L_minus chi = phi on the dense full-grid discretization. The kernel
// direction phi' is deflated: the matrix gets a rank-one shift along it and
// both right-hand side and solution are projected onto its complement.
// With use_even_sector the solve runs in the even block instead, where
// L_minus is invertible because phi' is odd.
inline NegativeDirection negative_direction(const RealProfile& phi, double alpha, double omega,
                                            const Dispersion& disp = Dispersion::mixed(), bool use_even_sector = false) {
    const SpectralGrid& g = *phi.grid;
    NegativeDirection out;
    std::vector<double> x;
    if (use_even_sector) {
        const OperatorMatrix op = build_operator(phi, alpha, omega, LinearizedOperator::Lminus, disp, Sector::Even);
        x = op.lift(solve_symmetric(op.entries, op.restrict_vector(phi.values)));
    } else {
        OperatorMatrix op = build_operator(phi, alpha, omega, LinearizedOperator::Lminus, disp, Sector::Full);
        std::vector<double> k = derivative(phi, 1).values;
        double kk = 0.0;
        for (double v : k) kk += v * v;
        if (kk == 0.0) throw DegenerateInputError("negative_direction: profile has no kernel direction");
        for (double& v : k) v /= std::sqrt(kk);
        const double shift = omega + 1.0;
        for (std::size_t i = 0; i < k.size(); ++i) {
            for (std::size_t j = 0; j < k.size(); ++j) op.entries(i, j) += shift * k[i] * k[j];
        }
        auto project = [&](std::vector<double>& v) {
            double c = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) c += k[i] * v[i];
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * k[i];
        };
        std::vector<double> rhs = phi.values;
        project(rhs);
        x = solve_symmetric(op.entries, rhs);
        project(x);
    }
    out.chi = RealProfile(phi.grid, x);
    const auto lx = apply_linearized(phi, alpha, omega, LinearizedOperator::Lminus, x, disp);
    for (std::size_t j = 0; j < g.size(); ++j) out.residual = std::max(out.residual, std::abs(lx[j] - phi.values[j]));
    out.scalar = inner(out.chi, phi);
    return out;
}

inline double negative_direction_scalar(const RealProfile& phi, double alpha, double omega,
                                        const Dispersion& disp = Dispersion::mixed(), bool use_even_sector = false) {
    return negative_direction(phi, alpha, omega, disp, use_even_sector).scalar;
}

}  // namespace solitonlab
