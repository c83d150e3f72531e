#pragma once

// Petviashvili fixed-point iteration for the profile equation
//
//   phi'''' - beta phi'' + omega phi - |phi|^alpha phi = 0,
//
// in Fourier space:  phi_hat_{n+1} = M_n^nu (xi^4 + beta xi^2 + omega)^{-1} (|phi_n|^alpha phi_n)^,
// with the stabilizing factor M_n = <S phi_n, phi_n> / <|phi_n|^alpha phi_n, phi_n>.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "solitonlab/error.hpp"
#include "solitonlab/explicit.hpp"
#include "solitonlab/grid.hpp"

namespace solitonlab {

// a * exp(-(x/width)^2). A non-positive amplitude selects the heuristic (2 omega)^{1/alpha}.
struct GaussianGuess {
    double amplitude = 0.0;
    double width = 1.0;
};
struct ExplicitSechGuess {};
struct ProvidedGuess {
    std::vector<double> values;
};
using InitialGuess = std::variant<GaussianGuess, ExplicitSechGuess, ProvidedGuess>;

struct SolverConfig {
    std::optional<double> nu;  // default (alpha + 2)/(alpha + 1)
    double tol_error = 1e-12;  // on Error(n) = |phi_n - phi_{n-1}|_inf
    double tol_stab = 1e-12;   // on |1 - M_n|
    double tol_res = 1e-10;    // on RES(n) = |T phi_n|_inf
    int max_iter = 2000;
    InitialGuess initial_guess = GaussianGuess{};
    double dispersion_beta = 1.0;  // 1: mixed dispersion, 0: pure fourth order
    bool recenter = true;

    double nu_for(double alpha) const { return nu.value_or((alpha + 2.0) / (alpha + 1.0)); }
    Dispersion dispersion() const { return Dispersion::with_beta(dispersion_beta); }

    void validate() const {
        if (!(tol_error > 0.0) || !(tol_stab > 0.0) || !(tol_res > 0.0)) {
            throw ParameterError("solver tolerances must be positive");
        }
        if (max_iter < 1) throw ParameterError("max_iter must be >= 1");
        if (nu && !(*nu > 0.0)) throw ParameterError("nu must be positive");
        if (!std::isfinite(dispersion_beta) || dispersion_beta < 0.0) {
            throw ParameterError("dispersion_beta must be a finite non-negative number");
        }
    }
};

struct SolverDiagnostics {
    int iterations = 0;
    std::vector<double> error_history;
    std::vector<double> stab_history;
    std::vector<double> res_history;
    bool converged = false;
};

struct SolveResult {
    RealProfile profile;
    SolverDiagnostics diagnostics;
};

namespace detail {

// |phi|^alpha phi, written as sign(phi) |phi|^{alpha+1} so non-integer alpha is fine.
inline double power_nonlinearity(double v, double alpha) {
    if (alpha == 2.0) return v * v * v;
    return std::copysign(std::pow(std::abs(v), alpha + 1.0), v);
}

inline double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace detail

// M = <(d^4 - beta d^2 + omega) phi, phi> / <|phi|^alpha phi, phi>.
inline double stabilizing_factor(const RealProfile& profile, double alpha, double omega, double beta = 1.0) {
    profile.validate();
    const SpectralGrid& g = *profile.grid;
    const Dispersion disp = Dispersion::with_beta(beta);
    std::vector<cplx> work(profile.values.begin(), profile.values.end());
    g.fft_forward(work);
    const double num = spectral_energy(g, work, [&](double xi) { return disp(xi) + omega; });
    double den = 0.0;
    for (double v : profile.values) den += detail::power_nonlinearity(v, alpha) * v;
    den *= g.dx();
    if (den == 0.0 || !std::isfinite(den)) throw DegenerateInputError("stabilizing factor: zero denominator");
    return num / den;
}

// |phi'''' - beta phi'' + omega phi - |phi|^alpha phi|_inf with spectral derivatives.
inline double residual(const RealProfile& profile, double alpha, double omega, const Dispersion& disp) {
    profile.validate();
    const SpectralGrid& g = *profile.grid;
    const auto symbol = g.fft_symbol([&](double xi) { return disp(xi) + omega; });
    const std::vector<double> lin = detail::apply_fft_symbol_real(g, profile.values, symbol);
    double m = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        m = std::max(m, std::abs(lin[j] - detail::power_nonlinearity(profile.values[j], alpha)));
    }
    return m;
}

inline double residual(const RealProfile& profile, double alpha, double omega, double beta = 1.0) {
    return residual(profile, alpha, omega, Dispersion::with_beta(beta));
}

// Translate by whole cells so that max |phi| sits on the node x = 0.
inline RealProfile recenter_on_peak(const RealProfile& profile) {
    const auto& v = profile.values;
    std::size_t peak = 0;
    for (std::size_t j = 1; j < v.size(); ++j) {
        if (std::abs(v[j]) > std::abs(v[peak])) peak = j;
    }
    const auto cells = static_cast<std::ptrdiff_t>(profile.grid->center_index()) - static_cast<std::ptrdiff_t>(peak);
    if (cells == 0) return profile;
    return RealProfile(profile.grid, shift_cells<double>(v, cells));
}

inline RealProfile initial_profile(const InitialGuess& guess, double alpha, double omega, const GridPtr& grid) {
    return std::visit(
        [&](const auto& g) -> RealProfile {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, GaussianGuess>) {
                if (!(g.width > 0.0)) throw ParameterError("Gaussian guess width must be positive");
                const double a = g.amplitude > 0.0 ? g.amplitude : std::pow(2.0 * omega, 1.0 / alpha);
                RealProfile p(grid);
                const auto x = grid->nodes();
                for (std::size_t j = 0; j < p.size(); ++j) {
                    const double s = x[j] / g.width;
                    p.values[j] = a * std::exp(-s * s);
                }
                return p;
            } else if constexpr (std::is_same_v<T, ExplicitSechGuess>) {
                return phi_exact(alpha, grid);
            } else {
                return RealProfile(grid, g.values);
            }
        },
        guess);
}

namespace detail {

// Working state of one solve; everything in raw FFT order.
class PetviashviliKernel {
public:
    PetviashviliKernel(double alpha, double omega, const SpectralGrid& g, const Dispersion& disp, double nu)
        : alpha_(alpha), omega_(omega), g_(g), nu_(nu), n_(g.size()) {
        symbol_ = g.fft_symbol([&](double xi) { return disp(xi) + omega; });
        phi_hat_.resize(n_);
        nl_.resize(n_);
        nl_hat_.resize(n_);
        next_hat_.resize(n_);
        work_.resize(n_);
    }

    // Loads phi_n and forms its transform and nonlinear term.
    void load(std::span<const double> phi) {
        phi_.assign(phi.begin(), phi.end());
        for (std::size_t j = 0; j < n_; ++j) {
            phi_hat_[j] = phi[j];
            const double nl = power_nonlinearity(phi[j], alpha_);
            nl_[j] = nl;
            nl_hat_[j] = nl;
        }
        g_.fft_forward(phi_hat_);
        g_.fft_forward(nl_hat_);
    }

    double stabilizing_factor() const {
        const double num = spectral_energy_with(symbol_);
        double den = 0.0;
        for (std::size_t j = 0; j < n_; ++j) den += nl_[j] * phi_[j];
        den *= g_.dx();
        if (den == 0.0 || !std::isfinite(den)) throw DegenerateInputError("stabilizing factor: zero denominator");
        return num / den;
    }

    // RES of the loaded iterate, with the linear part formed from the
    // spectral coefficients that define it (see scaled_nl_prev_).
    double residual(bool have_prev) const {
        if (!have_prev) return residual_physical();
        std::vector<cplx> r(n_);
        const double inv_n = 1.0 / static_cast<double>(n_);
        for (std::size_t k = 0; k < n_; ++k) r[k] = (scaled_nl_prev_[k] - nl_hat_[k]) * inv_n;
        g_.fft_backward(r);
        double m = 0.0;
        for (const cplx& v : r) m = std::max(m, std::abs(v.real()));
        return m;
    }

    // phi_{n+1} from the loaded phi_n and M_n; returns the new physical samples.
    std::vector<double> advance(double m) {
        const double factor = std::pow(m, nu_);
        const double inv_n = 1.0 / static_cast<double>(n_);
        scaled_nl_prev_.resize(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            scaled_nl_prev_[k] = factor * nl_hat_[k];
            next_hat_[k] = scaled_nl_prev_[k] / symbol_[k];
            work_[k] = next_hat_[k] * inv_n;
        }
        g_.fft_backward(work_);
        std::vector<double> out(n_);
        double max_re = 0.0;
        double max_im = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            out[j] = work_[j].real();
            if (!std::isfinite(out[j]) || !std::isfinite(work_[j].imag())) {
                throw DivergenceError("Petviashvili iteration produced a non-finite value");
            }
            max_re = std::max(max_re, std::abs(out[j]));
            max_im = std::max(max_im, std::abs(work_[j].imag()));
        }
        if (max_im > 1e-13 * std::max(1.0, max_re)) {
            throw DivergenceError("Petviashvili iterate left the real line (imaginary residue " +
                                  std::to_string(max_im) + ")");
        }
        return out;
    }

private:
    double spectral_energy_with(const std::vector<double>& weight) const {
        double s = 0.0;
        for (std::size_t k = 0; k < n_; ++k) s += weight[k] * std::norm(phi_hat_[k]);
        return s * g_.dx() / static_cast<double>(n_);
    }

    double residual_physical() const {
        std::vector<cplx> r(n_);
        const double inv_n = 1.0 / static_cast<double>(n_);
        for (std::size_t k = 0; k < n_; ++k) r[k] = symbol_[k] * phi_hat_[k] * inv_n;
        g_.fft_backward(r);
        double m = 0.0;
        for (std::size_t j = 0; j < n_; ++j) m = std::max(m, std::abs(r[j].real() - nl_[j]));
        return m;
    }

    double alpha_;
    double omega_;
    const SpectralGrid& g_;
    double nu_;
    std::size_t n_;
    std::vector<double> symbol_;
    std::vector<double> phi_;
    std::vector<double> nl_;
    std::vector<cplx> phi_hat_;
    std::vector<cplx> nl_hat_;
    std::vector<cplx> next_hat_;
    // M_{n-1}^nu (|phi_{n-1}|^alpha phi_{n-1})^ = (xi^4 + beta xi^2 + omega) phi_hat_n exactly.
    std::vector<cplx> scaled_nl_prev_;
    mutable std::vector<cplx> work_;
};

}  // namespace detail

// One Petviashvili update phi_n -> phi_{n+1}.
inline RealProfile petviashvili_step(const RealProfile& profile, double alpha, double omega,
                                     const SolverConfig& config = {}) {
    profile.validate();
    detail::PetviashviliKernel kernel(alpha, omega, *profile.grid, config.dispersion(), config.nu_for(alpha));
    kernel.load(profile.values);
    return RealProfile(profile.grid, kernel.advance(kernel.stabilizing_factor()));
}

inline SolveResult petviashvili_solve(double alpha, double omega, const GridPtr& grid, const SolverConfig& config = {}) {
    require_positive(alpha, "alpha");
    require_positive(omega, "omega");
    config.validate();

    RealProfile phi = initial_profile(config.initial_guess, alpha, omega, grid);
    detail::PetviashviliKernel kernel(alpha, omega, *grid, config.dispersion(), config.nu_for(alpha));

    SolveResult result;
    SolverDiagnostics& diag = result.diagnostics;
    std::vector<double> prev;
    bool have_prev = false;

    kernel.load(phi.values);
    for (int it = 1; it <= config.max_iter; ++it) {
        const double m = kernel.stabilizing_factor();
        std::vector<double> next = kernel.advance(m);
        prev = std::move(phi.values);
        phi.values = std::move(next);
        have_prev = true;

        kernel.load(phi.values);
        double err = 0.0;
        for (std::size_t j = 0; j < prev.size(); ++j) err = std::max(err, std::abs(phi.values[j] - prev[j]));
        const double m_new = kernel.stabilizing_factor();
        const double stab = std::abs(1.0 - m_new);
        const double res = kernel.residual(have_prev);

        if (!std::isfinite(err) || !std::isfinite(stab) || !std::isfinite(res)) {
            throw DivergenceError("Petviashvili diagnostics became non-finite at iteration " + std::to_string(it));
        }
        diag.error_history.push_back(err);
        diag.stab_history.push_back(stab);
        diag.res_history.push_back(res);
        diag.iterations = it;
        if (detail::max_abs(phi.values) == 0.0) {
            throw DivergenceError("Petviashvili iteration collapsed to the zero profile");
        }
        if (err <= config.tol_error && stab <= config.tol_stab && res <= config.tol_res) {
            diag.converged = true;
            break;
        }
    }

    result.profile = config.recenter ? recenter_on_peak(phi) : phi;
    return result;
}

}  // namespace solitonlab
