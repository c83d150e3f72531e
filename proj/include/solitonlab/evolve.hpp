#pragma once

// Strang split-step Fourier integrator for
//
//   i u_t + u_xx - u_xxxx + |u|^alpha u = 0,
//
// the conserved energy and mass, and the H^2 distance from a field to the
// orbit {e^{i theta} phi(. - r)} of a standing wave profile.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "solitonlab/error.hpp"
#include "solitonlab/explicit.hpp"
#include "solitonlab/grid.hpp"
#include "solitonlab/petviashvili.hpp"

namespace solitonlab {

struct EvolutionState {
    ComplexField field;
    double time = 0.0;
    double dt = 0.0;
    long step_count = 0;
};

inline EvolutionState make_state(ComplexField field, double dt) {
    require_positive(dt, "dt");
    field.validate();
    return EvolutionState{std::move(field), 0.0, dt, 0};
}

namespace detail {

// |u|^alpha from |u|^2, with multiplication chains for even integer alpha.
inline double modulus_power(double abs2, double alpha) {
    if (alpha == 2.0) return abs2;
    if (alpha == 4.0) return abs2 * abs2;
    if (alpha == 6.0) return abs2 * abs2 * abs2;
    if (alpha == 8.0) {
        const double a4 = abs2 * abs2;
        return a4 * a4;
    }
    return std::pow(abs2, 0.5 * alpha);
}

}  // namespace detail

class SplitStep {
public:
    SplitStep(GridPtr grid, double alpha, double dt, Dispersion disp = Dispersion::mixed(), bool nonlinear = true)
        : grid_(std::move(grid)), alpha_(alpha), dt_(dt), nonlinear_(nonlinear) {
        require_positive(alpha, "alpha");
        require_positive(dt, "dt");
        const double inv_n = 1.0 / static_cast<double>(grid_->size());
        propagator_.resize(grid_->size());
        for (std::size_t k = 0; k < grid_->size(); ++k) {
            const double xi = grid_->fft_wavenumbers()[k];
            propagator_[k] = std::polar(inv_n, -disp(xi) * dt);
        }
    }

    double alpha() const noexcept { return alpha_; }
    double dt() const noexcept { return dt_; }
    const GridPtr& grid() const noexcept { return grid_; }

    // One step in place. Throws BlowUpError carrying the time of the failed step.
    void advance(EvolutionState& s) const {
        check(s);
        std::vector<cplx>& u = s.field.values;
        half_nonlinear(u);
        grid_->fft_forward(u);
        for (std::size_t k = 0; k < u.size(); ++k) u[k] *= propagator_[k];
        grid_->fft_backward(u);
        half_nonlinear(u);
        ++s.step_count;
        s.time = static_cast<double>(s.step_count) * s.dt;
        for (const cplx& v : u) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                throw BlowUpError("split-step produced a non-finite value at t = " + std::to_string(s.time), s.time);
            }
        }
    }

    void advance(EvolutionState& s, long steps) const {
        for (long i = 0; i < steps; ++i) advance(s);
    }

    EvolutionState step(EvolutionState s) const {
        advance(s);
        return s;
    }

private:
    void check(const EvolutionState& s) const {
        if (s.field.grid != grid_) grid_->check_length(s.field.values.size(), "SplitStep");
        if (s.dt != dt_) throw ParameterError("SplitStep: state dt differs from the integrator dt");
    }

    void half_nonlinear(std::vector<cplx>& u) const {
        if (!nonlinear_) return;
        const double h = 0.5 * dt_;
        for (cplx& v : u) {
            const double phase = detail::modulus_power(std::norm(v), alpha_) * h;
            v *= cplx(std::cos(phase), std::sin(phase));
        }
    }

    GridPtr grid_;
    double alpha_;
    double dt_;
    bool nonlinear_;
    std::vector<cplx> propagator_;  // exp(-i disp(xi) dt) / N in raw FFT order
};

// F(u) = (1/2) int |u|^2
inline double mass(const ComplexField& u) {
    double s = 0.0;
    for (const cplx& v : u.values) s += std::norm(v);
    return 0.5 * u.grid->dx() * s;
}

// E(u) = (1/2) int |u_xx|^2 + |u_x|^2 - (2/(alpha+2)) int |u|^{alpha+2}
inline double energy(const ComplexField& u, double alpha, Dispersion disp = Dispersion::mixed()) {
    const SpectralGrid& g = *u.grid;
    g.check_length(u.values.size(), "energy");
    std::vector<cplx> work = u.values;
    g.fft_forward(work);
    const double kinetic = spectral_energy(g, work, [&](double xi) { return disp(xi); });
    double potential = 0.0;
    for (const cplx& v : u.values) {
        const double a2 = std::norm(v);
        potential += detail::modulus_power(a2, alpha) * a2;
    }
    potential *= g.dx();
    return 0.5 * kinetic - 2.0 / (alpha + 2.0) * potential;
}

struct ConservationAudit {
    std::vector<double> times;
    std::vector<double> energies;
    std::vector<double> masses;
    double energy_drift = 0.0;  // max |E(t) - E(0)| / |E(0)|
    double mass_drift = 0.0;    // max |F(t) - F(0)| / |F(0)|
};

// Advances `state` to t_final, recording E and F every `sample_every` steps.
inline ConservationAudit conservation_audit(EvolutionState& state, const SplitStep& stepper, double t_final,
                                            long sample_every = 100, Dispersion disp = Dispersion::mixed()) {
    if (sample_every < 1) throw ParameterError("sample_every must be positive");
    const long total = std::lround(t_final / state.dt);
    ConservationAudit a;
    auto record = [&] {
        a.times.push_back(state.time);
        a.energies.push_back(energy(state.field, stepper.alpha(), disp));
        a.masses.push_back(mass(state.field));
    };
    record();
    for (long n = 1; n <= total; ++n) {
        stepper.advance(state);
        if (n % sample_every == 0 || n == total) record();
    }
    const auto drift = [](const std::vector<double>& q) {
        double m = 0.0;
        const double ref = std::abs(q.front());
        for (double v : q) m = std::max(m, std::abs(v - q.front()));
        return ref > 0.0 ? m / ref : m;
    };
    a.energy_drift = drift(a.energies);
    a.mass_drift = drift(a.masses);
    return a;
}

struct OrbitalFit {
    double distance = 0.0;
    double theta = 0.0;
    double shift = 0.0;  // r, so that u ~ e^{i theta} phi(. - r)
};

namespace detail {

inline double h2_distance_to(const SpectralGrid& g, const std::vector<cplx>& u_hat, const std::vector<cplx>& phi_hat,
                             double theta, double r) {
    const cplx rot = std::polar(1.0, theta);
    double s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double xi = g.fft_wavenumbers()[k];
        const cplx diff = u_hat[k] - rot * std::polar(1.0, -xi * r) * phi_hat[k];
        s += h2_weight(xi) * std::norm(diff);
    }
    return std::sqrt(s * g.dx() / static_cast<double>(g.size()));
}

// <u, phi(. - r)>_{H^2} for a continuous shift r.
inline cplx h2_overlap(const SpectralGrid& g, const std::vector<cplx>& u_hat, const std::vector<cplx>& phi_hat,
                       double r) {
    cplx s{};
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double xi = g.fft_wavenumbers()[k];
        s += h2_weight(xi) * u_hat[k] * std::conj(phi_hat[k]) * std::polar(1.0, xi * r);
    }
    return s * g.dx() / static_cast<double>(g.size());
}

}  // namespace detail

// inf over theta and whole-cell shifts r of |u - e^{i theta} phi(. - r)|_{H^2}.
// The overlap for every shift comes from one FFT cross-correlation; the best
// shift and its two neighbours are then evaluated directly so that small
// distances do not suffer cancellation. With `subcell` the shift is refined
// continuously between the neighbours by golden-section search.
inline OrbitalFit orbital_fit(const ComplexField& u, const RealProfile& phi, bool subcell = false) {
    const SpectralGrid& g = *u.grid;
    g.check_length(phi.values.size(), "orbital_distance");
    g.check_length(u.values.size(), "orbital_distance");
    std::vector<cplx> u_hat = u.values;
    g.fft_forward(u_hat);
    std::vector<cplx> phi_hat(phi.values.begin(), phi.values.end());
    g.fft_forward(phi_hat);

    std::vector<cplx> corr(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        corr[k] = h2_weight(g.fft_wavenumbers()[k]) * u_hat[k] * std::conj(phi_hat[k]);
    }
    g.fft_backward(corr);  // corr[m] ~ overlap with phi shifted by m cells
    std::size_t best = 0;
    for (std::size_t m = 1; m < g.size(); ++m) {
        if (std::abs(corr[m]) > std::abs(corr[best])) best = m;
    }

    const auto n = static_cast<std::ptrdiff_t>(g.size());
    auto shift_of = [&](std::ptrdiff_t m) {
        m = ((m % n) + n) % n;
        if (m >= n / 2) m -= n;
        return static_cast<double>(m) * g.dx();
    };
    OrbitalFit fit;
    fit.distance = std::numeric_limits<double>::infinity();
    auto consider = [&](double r) {
        const cplx c = detail::h2_overlap(g, u_hat, phi_hat, r);
        const double theta = std::arg(c);
        const double d = detail::h2_distance_to(g, u_hat, phi_hat, theta, r);
        if (d < fit.distance) fit = OrbitalFit{d, theta, r};
    };
    const auto mb = static_cast<std::ptrdiff_t>(best);
    for (std::ptrdiff_t m : {mb - 1, mb, mb + 1}) consider(shift_of(m));

    if (subcell) {
        const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = fit.shift - g.dx(), b = fit.shift + g.dx();
        auto objective = [&](double r) { return -std::abs(detail::h2_overlap(g, u_hat, phi_hat, r)); };
        double c = b - invphi * (b - a), d = a + invphi * (b - a);
        double fc = objective(c), fd = objective(d);
        for (int it = 0; it < 60 && b - a > 1e-12 * g.dx(); ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - invphi * (b - a);
                fc = objective(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + invphi * (b - a);
                fd = objective(d);
            }
        }
        consider(0.5 * (a + b));
    }
    return fit;
}

inline double orbital_distance(const ComplexField& u, const RealProfile& phi, bool subcell = false) {
    return orbital_fit(u, phi, subcell).distance;
}

struct ExperimentSeries {
    std::vector<double> times;
    std::vector<double> distances;
    double phi_h2_norm = 0.0;
    bool truncated = false;  // blow-up stopped the run early
    double blowup_time = std::numeric_limits<double>::quiet_NaN();
};

// Evolves u0 = (1 + delta) phi and records the orbital distance every
// `sample_every` steps up to t_final.
inline ExperimentSeries stability_experiment(const RealProfile& phi, double alpha, double delta, double t_final,
                                             double dt, long sample_every = 500,
                                             Dispersion disp = Dispersion::mixed()) {
    if (!(delta >= 0.0 && delta <= 0.1)) throw ParameterError("stability_experiment: delta must lie in [0, 0.1]");
    require_positive(t_final, "t_final");
    if (sample_every < 1) throw ParameterError("sample_every must be positive");
    const SplitStep stepper(phi.grid, alpha, dt, disp);
    ComplexField u0(phi);
    for (cplx& v : u0.values) v *= 1.0 + delta;
    EvolutionState s = make_state(std::move(u0), dt);

    ExperimentSeries out;
    out.phi_h2_norm = norm(phi, NormKind::H2);
    auto record = [&] {
        out.times.push_back(s.time);
        out.distances.push_back(orbital_distance(s.field, phi));
    };
    record();
    const long total = std::lround(t_final / dt);
    try {
        for (long n = 1; n <= total; ++n) {
            stepper.advance(s);
            if (n % sample_every == 0 || n == total) record();
        }
    } catch (const BlowUpError& e) {
        out.truncated = true;
        out.blowup_time = e.time();
    }
    return out;
}

// Solves for the profile at (alpha, omega) first.
inline ExperimentSeries stability_experiment(double alpha, double omega, double delta, double t_final, double dt,
                                             const GridPtr& grid, const SolverConfig& config = {},
                                             long sample_every = 500) {
    const SolveResult r = petviashvili_solve(alpha, omega, grid, config);
    if (!r.diagnostics.converged) {
        throw DivergenceError("stability_experiment: profile solve did not converge");
    }
    return stability_experiment(r.profile, alpha, delta, t_final, dt, sample_every, config.dispersion());
}

}  // namespace solitonlab
