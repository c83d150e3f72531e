#pragma once

// Closed-form objects: the sech^{4/alpha} standing wave that exists at the
// single frequency omega0(alpha), its Fourier transforms, the classical NLS
// sech profile, and the closed d''(omega) laws of the two scale-invariant
// comparison models.

#include <cmath>
#include <utility>

#include "solitonlab/error.hpp"
#include "solitonlab/grid.hpp"
#include "solitonlab/special.hpp"

namespace solitonlab {

struct ExplicitWaveParams {
    double alpha = 0.0;
    double a0 = 0.0;      // amplitude
    double b0 = 0.0;      // inverse width
    double omega0 = 0.0;  // the only frequency with a sech-type solution
};

inline void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw ParameterError(std::string(name) + " must be positive and finite");
    }
}

inline ExplicitWaveParams explicit_params(double alpha) {
    require_positive(alpha, "alpha");
    const double a = alpha;
    const double q = a * a + 4.0 * a + 8.0;
    ExplicitWaveParams p;
    p.alpha = a;
    p.a0 = std::pow((3.0 * a * a * a + 22.0 * a * a + 48.0 * a + 32.0) / (2.0 * q * q), 1.0 / a);
    p.b0 = a / (2.0 * std::sqrt(q));
    p.omega0 = 4.0 * (a * a + 4.0 * a + 4.0) / (a * a * a * a + 8.0 * a * a * a + 32.0 * a * a + 64.0 * a + 64.0);
    return p;
}

inline double sech(double x) { return 1.0 / std::cosh(x); }

// phi(x) = a0 sech^{4/alpha}(b0 x), solving phi'''' - phi'' + omega0 phi - |phi|^alpha phi = 0.
inline RealProfile phi_exact(double alpha, const GridPtr& grid) {
    const ExplicitWaveParams p = explicit_params(alpha);
    RealProfile out(grid);
    const auto x = grid->nodes();
    for (std::size_t j = 0; j < out.size(); ++j) out.values[j] = p.a0 * std::pow(sech(p.b0 * x[j]), 4.0 / alpha);
    return out;
}

// Continuous transform of phi_exact through Gamma functions:
// 2^{4/alpha-2} (a0/b0) Gamma(4/alpha)^{-1} |Gamma(2/alpha + i xi/(2 b0))|^2.
// Equals the dx-normalized transform up to a constant factor.
inline double phi_hat_exact(double alpha, double xi) {
    const ExplicitWaveParams p = explicit_params(alpha);
    const double s = 4.0 / alpha;
    const double log_prefactor = (s - 2.0) * std::log(2.0) + std::log(p.a0 / p.b0) - std::lgamma(s);
    const double g2 = abs_gamma_squared(0.5 * s, xi / (2.0 * p.b0));
    const double v = std::exp(log_prefactor) * g2;
    if (!std::isfinite(v)) throw DomainError("phi_hat_exact: overflow");
    return v;
}

// Transform of phi_exact^alpha = a0^alpha sech^4(b0 x) in elementary form:
// (a0^alpha/(3 b0^2)) (1/4 + (alpha^2+4alpha+8)/(4alpha^2) xi^2) (pi/cosh(c xi)) (xi/sinh(c xi)),
// c = pi/(4 b0). Same convention constant caveat as phi_hat_exact.
inline double phi_pow_alpha_hat_exact(double alpha, double xi) {
    const ExplicitWaveParams p = explicit_params(alpha);
    const double c = M_PI / (4.0 * p.b0);
    const double quad = 0.25 + (alpha * alpha + 4.0 * alpha + 8.0) / (4.0 * alpha * alpha) * xi * xi;
    // xi / sinh(c xi) -> 1/c at the removable singularity.
    const double ratio = std::abs(xi) < 1e-8 ? 1.0 / c : xi / std::sinh(c * xi);
    return std::pow(p.a0, alpha) / (3.0 * p.b0 * p.b0) * quad * (M_PI / std::cosh(c * xi)) * ratio;
}

// (omega (alpha+2)/2)^{1/alpha} sech^{2/alpha}(alpha sqrt(omega) x / 2), the
// positive solution of -phi'' + omega phi - |phi|^alpha phi = 0.
inline RealProfile nls_sech_solution(double alpha, double omega, const GridPtr& grid) {
    require_positive(alpha, "alpha");
    require_positive(omega, "omega");
    const double amp = std::pow(omega * (alpha + 2.0) / 2.0, 1.0 / alpha);
    const double k = alpha * std::sqrt(omega) / 2.0;
    RealProfile out(grid);
    const auto x = grid->nodes();
    for (std::size_t j = 0; j < out.size(); ++j) out.values[j] = amp * std::pow(sech(k * x[j]), 2.0 / alpha);
    return out;
}

// d'' for the second-order NLS, sign(4 - alpha).
inline double d2_closed_nls(double alpha, double omega, double mass) {
    require_positive(alpha, "alpha");
    require_positive(omega, "omega");
    require_positive(mass, "mass");
    return (1.0 / (2.0 * omega)) * ((4.0 - alpha) / (2.0 * alpha)) * mass;
}

// d'' for the pure fourth-order NLS i u_t - u_xxxx + |u|^alpha u = 0, sign(8 - alpha).
inline double d2_closed_pure4nls(double alpha, double omega, double mass) {
    require_positive(alpha, "alpha");
    require_positive(omega, "omega");
    require_positive(mass, "mass");
    return (1.0 / (2.0 * omega)) * ((8.0 - alpha) / (2.0 * alpha)) * mass;
}

struct ConstrainedFunctional {
    double B = 0.0;    // (1/2) int |u_xx|^2 + |u_x|^2 + omega |u|^2
    double tau = 0.0;  // int |u|^{alpha+2}
};

inline ConstrainedFunctional constrained_functional(const RealProfile& profile, double alpha, double omega) {
    profile.validate();
    const SpectralGrid& g = *profile.grid;
    std::vector<cplx> work(profile.values.begin(), profile.values.end());
    g.fft_forward(work);
    ConstrainedFunctional out;
    out.B = 0.5 * spectral_energy(g, work, [omega](double xi) {
                const double xi2 = xi * xi;
                return xi2 * xi2 + xi2 + omega;
            });
    double s = 0.0;
    for (double v : profile.values) s += std::pow(std::abs(v), alpha + 2.0);
    out.tau = g.dx() * s;
    return out;
}

}  // namespace solitonlab
