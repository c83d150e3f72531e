#pragma once

// Solitary branch continuation in omega and the slope quantity
//
//   d''(omega) = (1/2) d/domega  int phi_omega^2 dx,
//
// whose sign decides orbital stability (d'' > 0) or instability (d'' < 0)
// once the linearized operator has one negative eigenvalue and a
// two-dimensional kernel. Masses use the trapezoid rule and d'' a forward
// difference attributed to the left endpoint.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

#include "solitonlab/error.hpp"
#include "solitonlab/explicit.hpp"
#include "solitonlab/grid.hpp"
#include "solitonlab/petviashvili.hpp"

namespace solitonlab {

inline double profile_mass(const RealProfile& p) {
    double s = 0.0;
    for (double v : p.values) s += v * v;
    return p.grid->dx() * s;
}

// Slowest exponential decay rate of a linear tail at frequency omega:
// min Re(kappa) over roots of quartic kappa^4 - quadratic kappa^2 + omega = 0.
inline double tail_decay_rate(double omega, const Dispersion& disp) {
    using C = std::complex<double>;
    if (disp.quartic == 0.0) return std::sqrt(omega / disp.quadratic);
    const C disc = std::sqrt(C(disp.quadratic * disp.quadratic - 4.0 * disp.quartic * omega));
    double rate = std::numeric_limits<double>::infinity();
    for (const C k2 : {(disp.quadratic + disc) / (2.0 * disp.quartic), (disp.quadratic - disc) / (2.0 * disp.quartic)}) {
        rate = std::min(rate, std::abs(std::sqrt(k2).real()));
    }
    return rate;
}

// Tails must fall below ~1e-10 before reaching the periodic boundary.
inline constexpr double tail_decades = 23.0;

inline double min_resolved_omega(const SpectralGrid& grid, const Dispersion& disp) {
    const double kappa = tail_decades / grid.half_width();
    const double k2 = kappa * kappa;
    // Invert omega -> rate for a real-rate tail: omega = quadratic k^2 - quartic k^4.
    const double w = disp.quadratic * k2 - disp.quartic * k2 * k2;
    if (w > 0.0) return w;
    // Pure fourth order: rate = omega^{1/4}/sqrt(2).
    return std::pow(std::sqrt(2.0) * kappa, 4.0) / disp.quartic;
}

struct SolitaryBranch {
    double alpha = 0.0;
    double beta = 1.0;
    std::vector<double> omegas;
    std::vector<RealProfile> profiles;
    std::vector<double> masses;
    std::vector<bool> converged_flags;
    std::vector<int> iterations;
    std::vector<double> residuals;  // final RES(n) of each solve
    bool truncated = false;  // a mid-branch solve diverged; later omegas are missing

    std::size_t size() const noexcept { return omegas.size(); }
};

inline std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

// Warm-started sweep over n_points equispaced frequencies in [omega_start, omega_end].
inline SolitaryBranch continue_branch(double alpha, double omega_start, double omega_end, std::size_t n_points,
                                      const GridPtr& grid, const SolverConfig& config = {}) {
    require_positive(alpha, "alpha");
    require_positive(omega_start, "omega_start");
    if (!(omega_end > omega_start)) throw ParameterError("continue_branch: need omega_start < omega_end");
    if (n_points < 2) throw ParameterError("continue_branch: need at least 2 points");
    const double floor = min_resolved_omega(*grid, config.dispersion());
    if (omega_start < floor) {
        throw ParameterError("continue_branch: omega_start = " + std::to_string(omega_start) +
                             " is below the smallest frequency resolved by this domain (" + std::to_string(floor) +
                             "); enlarge the half width");
    }

    SolitaryBranch b;
    b.alpha = alpha;
    b.beta = config.dispersion_beta;
    SolverConfig cfg = config;
    std::optional<RealProfile> seed;
    for (const double omega : linspace(omega_start, omega_end, n_points)) {
        if (seed) cfg.initial_guess = ProvidedGuess{seed->values};
        SolveResult r;
        try {
            r = petviashvili_solve(alpha, omega, grid, cfg);
        } catch (const DivergenceError& e) {
            if (b.omegas.empty()) throw BranchError(std::string("first branch point diverged: ") + e.what());
            b.truncated = true;
            break;
        }
        if (b.omegas.empty() && !r.diagnostics.converged) {
            throw BranchError("first branch point did not converge at omega = " + std::to_string(omega));
        }
        b.omegas.push_back(omega);
        b.masses.push_back(profile_mass(r.profile));
        b.converged_flags.push_back(r.diagnostics.converged);
        b.iterations.push_back(r.diagnostics.iterations);
        b.residuals.push_back(r.diagnostics.res_history.empty() ? 0.0 : r.diagnostics.res_history.back());
        if (r.diagnostics.converged) seed = r.profile;
        b.profiles.push_back(std::move(r.profile));
    }
    return b;
}

struct D2Sample {
    double omega = 0.0;
    double d2 = 0.0;
    double mass = 0.0;  // mass at omega, used for the noise threshold
};

enum class DifferenceScheme { Forward, Centered };

inline std::vector<D2Sample> d_second(const SolitaryBranch& b, DifferenceScheme scheme = DifferenceScheme::Forward) {
    std::vector<D2Sample> out;
    const std::size_t n = b.size();
    if (scheme == DifferenceScheme::Forward) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (!b.converged_flags[i] || !b.converged_flags[i + 1]) continue;
            const double d2 = 0.5 * (b.masses[i + 1] - b.masses[i]) / (b.omegas[i + 1] - b.omegas[i]);
            out.push_back({b.omegas[i], d2, b.masses[i]});
        }
    } else {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (!b.converged_flags[i - 1] || !b.converged_flags[i] || !b.converged_flags[i + 1]) continue;
            const double d2 = 0.5 * (b.masses[i + 1] - b.masses[i - 1]) / (b.omegas[i + 1] - b.omegas[i - 1]);
            out.push_back({b.omegas[i], d2, b.masses[i]});
        }
    }
    if (out.empty()) throw InsufficientDataError("d_second: fewer than two consecutive converged branch points");
    return out;
}

// +1 / -1, or 0 when |d''| is below 1e-6 * mass / omega.
inline int d2_sign(double d2, double mass, double omega) {
    if (!std::isfinite(d2)) return 0;
    if (std::abs(d2) < 1e-6 * mass / omega) return 0;
    return d2 > 0.0 ? 1 : -1;
}

inline int d2_sign(const D2Sample& s) { return d2_sign(s.d2, s.mass, s.omega); }

// Number of strict sign flips along a d'' series, ignoring undetermined entries.
inline int count_sign_changes(const std::vector<D2Sample>& samples) {
    int changes = 0;
    int last = 0;
    for (const auto& s : samples) {
        const int sg = d2_sign(s);
        if (sg == 0) continue;
        if (last != 0 && sg != last) ++changes;
        last = sg;
    }
    return changes;
}

struct LocalD2 {
    double omega = 0.0;
    double d2 = 0.0;
    double mass = 0.0;
    RealProfile profile;  // solution at omega
};

inline constexpr double default_d2_step = 1e-4;

// d''(omega) from two solves at omega and omega + h, the second seeded by the first.
inline LocalD2 local_d_second(double alpha, double omega, const GridPtr& grid, const SolverConfig& config = {},
                              double h = default_d2_step) {
    require_positive(h, "h");
    SolveResult a = petviashvili_solve(alpha, omega, grid, config);
    if (!a.diagnostics.converged) {
        throw DivergenceError("local d'': no convergence at omega = " + std::to_string(omega));
    }
    SolverConfig next = config;
    next.initial_guess = ProvidedGuess{a.profile.values};
    SolveResult b = petviashvili_solve(alpha, omega + h, grid, next);
    if (!b.diagnostics.converged) {
        throw DivergenceError("local d'': no convergence at omega = " + std::to_string(omega + h));
    }
    LocalD2 out;
    out.omega = omega;
    out.mass = profile_mass(a.profile);
    out.d2 = 0.5 * (profile_mass(b.profile) - out.mass) / h;
    out.profile = std::move(a.profile);
    return out;
}

// Frequency where d'' changes sign inside [omega_lo, omega_hi]: a coarse scan
// locates the first flip, then bisection on local d'' narrows it to tol_omega.
inline std::optional<double> find_omega_c(double alpha, double omega_lo, double omega_hi, const GridPtr& grid,
                                          const SolverConfig& config = {}, double tol_omega = 1e-4,
                                          std::size_t scan_points = 24) {
    require_positive(tol_omega, "tol_omega");
    const SolitaryBranch b = continue_branch(alpha, omega_lo, omega_hi, scan_points, grid, config);
    const auto samples = d_second(b);
    std::optional<std::size_t> flip;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const int s0 = d2_sign(samples[i]);
        const int s1 = d2_sign(samples[i + 1]);
        if (s0 != 0 && s1 != 0 && s0 != s1) {
            flip = i;
            break;
        }
    }
    if (!flip) return std::nullopt;

    double lo = samples[*flip].omega;
    double hi = samples[*flip + 1].omega;
    const double h = std::min(default_d2_step, 0.1 * tol_omega);
    SolverConfig cfg = config;
    // Seed every bisection solve from the branch profile at the left end.
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (b.omegas[i] == lo) cfg.initial_guess = ProvidedGuess{b.profiles[i].values};
    }
    const int sign_lo = local_d_second(alpha, lo, grid, cfg, h).d2 > 0.0 ? 1 : -1;
    while (hi - lo > tol_omega) {
        const double mid = 0.5 * (lo + hi);
        const LocalD2 m = local_d_second(alpha, mid, grid, cfg, h);
        const int s = m.d2 > 0.0 ? 1 : -1;
        if (s == sign_lo) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// g(alpha) = d''(omega0(alpha)) on the branch through the explicit wave.
inline double d2_at_omega0(double alpha, const GridPtr& grid, const SolverConfig& config = {},
                           double h = default_d2_step) {
    SolverConfig cfg = config;
    cfg.initial_guess = ExplicitSechGuess{};
    return local_d_second(alpha, explicit_params(alpha).omega0, grid, cfg, h).d2;
}

// Root of g(alpha) = d''(omega0(alpha)) by bisection, bracket width <= tol_alpha.
inline double find_alpha0(double alpha_lo, double alpha_hi, const GridPtr& grid, const SolverConfig& config = {},
                          double tol_alpha = 1e-2) {
    require_positive(alpha_lo, "alpha_lo");
    if (!(alpha_hi > alpha_lo)) throw ParameterError("find_alpha0: need alpha_lo < alpha_hi");
    require_positive(tol_alpha, "tol_alpha");
    const double g_lo = d2_at_omega0(alpha_lo, grid, config);
    const double g_hi = d2_at_omega0(alpha_hi, grid, config);
    if (!(g_lo * g_hi < 0.0)) {
        throw BracketError("find_alpha0: d''(omega0) has the same sign at both ends of the bracket");
    }
    double lo = alpha_lo, hi = alpha_hi;
    const bool lo_positive = g_lo > 0.0;
    while (hi - lo > tol_alpha) {
        const double mid = 0.5 * (lo + hi);
        const bool positive = d2_at_omega0(mid, grid, config) > 0.0;
        if (positive == lo_positive) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct StabilityMap {
    std::vector<double> alpha_grid;
    std::vector<double> omega_grid;
    // Row-major [alpha][omega]: +1, -1, 0 (undetermined) or NaN (solve failed).
    std::vector<double> sign_matrix;
    std::vector<double> d2_matrix;

    double sign(std::size_t ia, std::size_t iw) const { return sign_matrix[ia * omega_grid.size() + iw]; }
    double d2(std::size_t ia, std::size_t iw) const { return d2_matrix[ia * omega_grid.size() + iw]; }
};

namespace detail {

inline void scan_row(double alpha, const std::vector<double>& omegas, const GridPtr& grid, const SolverConfig& config,
                     double h, double* sign_row, double* d2_row) {
    SolverConfig cfg = config;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        try {
            const LocalD2 r = local_d_second(alpha, omegas[i], grid, cfg, h);
            d2_row[i] = r.d2;
            sign_row[i] = d2_sign(r.d2, r.mass, r.omega);
            cfg.initial_guess = ProvidedGuess{r.profile.values};
        } catch (const Error&) {
            d2_row[i] = std::numeric_limits<double>::quiet_NaN();
            sign_row[i] = std::numeric_limits<double>::quiet_NaN();
            cfg.initial_guess = config.initial_guess;
        }
    }
}

}  // namespace detail

// Sign of d'' on an (alpha, omega) lattice. Rows are independent jobs run on
// `jobs` worker threads; inside a row each cell seeds the next.
inline StabilityMap region_scan(const std::vector<double>& alpha_grid, const std::vector<double>& omega_grid,
                                const GridPtr& grid, const SolverConfig& config = {}, unsigned jobs = 1,
                                double h = default_d2_step) {
    if (alpha_grid.empty() || omega_grid.empty()) throw ParameterError("region_scan: empty grid");
    for (double w : omega_grid) require_positive(w, "omega");
    for (double a : alpha_grid) require_positive(a, "alpha");
    StabilityMap map;
    map.alpha_grid = alpha_grid;
    map.omega_grid = omega_grid;
    const std::size_t cols = omega_grid.size();
    map.sign_matrix.assign(alpha_grid.size() * cols, 0.0);
    map.d2_matrix.assign(alpha_grid.size() * cols, 0.0);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t row = next++; row < alpha_grid.size(); row = next++) {
            detail::scan_row(alpha_grid[row], omega_grid, grid, config, h, &map.sign_matrix[row * cols],
                             &map.d2_matrix[row * cols]);
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(alpha_grid.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return map;
}

struct Omega0Crossing {
    std::vector<int> signs_on_curve;  // sign of d'' at the cell nearest omega0(alpha), per alpha row
    std::optional<double> alpha0;     // midpoint of the first + to - switch along the curve
};

// Reads the map along the explicit-wave curve omega = omega0(alpha).
inline Omega0Crossing omega0_crossing(const StabilityMap& map) {
    Omega0Crossing out;
    for (std::size_t ia = 0; ia < map.alpha_grid.size(); ++ia) {
        const double w0 = explicit_params(map.alpha_grid[ia]).omega0;
        std::size_t best = 0;
        for (std::size_t iw = 1; iw < map.omega_grid.size(); ++iw) {
            if (std::abs(map.omega_grid[iw] - w0) < std::abs(map.omega_grid[best] - w0)) best = iw;
        }
        const double s = map.sign(ia, best);
        out.signs_on_curve.push_back(std::isnan(s) ? 0 : static_cast<int>(s));
    }
    for (std::size_t ia = 0; ia + 1 < out.signs_on_curve.size(); ++ia) {
        if (out.signs_on_curve[ia] > 0 && out.signs_on_curve[ia + 1] < 0) {
            out.alpha0 = 0.5 * (map.alpha_grid[ia] + map.alpha_grid[ia + 1]);
            break;
        }
    }
    return out;
}

enum class OrbitalVerdict { Stable, Unstable, Inconclusive };

inline const char* to_string(OrbitalVerdict v) {
    switch (v) {
        case OrbitalVerdict::Stable: return "stable";
        case OrbitalVerdict::Unstable: return "unstable";
        case OrbitalVerdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

// Stability criterion: with n(L) = 1 and z(L) = 2 the sign of d'' decides.
inline OrbitalVerdict classify_orbital(double d2, int n_negative, int n_zero) {
    if (n_negative != 1 || n_zero != 2 || d2 == 0.0 || !std::isfinite(d2)) return OrbitalVerdict::Inconclusive;
    return d2 > 0.0 ? OrbitalVerdict::Stable : OrbitalVerdict::Unstable;
}

}  // namespace solitonlab
