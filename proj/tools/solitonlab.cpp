// solitonlab: command-line front end for the standing-wave solver, the
// spectral checks, d''(omega) continuation and split-step experiments.
//
// Exit codes: 0 success, 1 usage, 2 numerical non-convergence, 3 internal
// numeric failure. Failures also print a JSON error record on stderr and
// leave error.json in the output directory.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "output.hpp"
#include "solitonlab/evolve.hpp"
#include "solitonlab/explicit.hpp"
#include "solitonlab/petviashvili.hpp"
#include "solitonlab/spectra.hpp"
#include "solitonlab/stability.hpp"

using namespace solitonlab;
using tools::OutputDir;
using tools::Table;
using json = nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kNoConvergence = 2, kNumeric = 3 };

// Thrown when a run finished but did not meet its convergence target.
struct NotConverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonFlags {
    double half_width = SpectralGrid::default_half_width;
    std::size_t points = SpectralGrid::default_points;
    std::string out_dir = ".";
    std::string format = "csv";
    std::uint64_t seed = 0;

    GridPtr grid() const { return SpectralGrid::make(half_width, points); }

    OutputDir output() const {
        std::string dir = out_dir;
        if (const char* env = std::getenv("SOLITONLAB_OUT"); env && *env) dir = env;
        return OutputDir(dir, format == "json" ? tools::Format::Json : tools::Format::Csv);
    }
};

struct SolverFlags {
    std::optional<double> nu;
    double tol_error = 1e-12;
    double tol_stab = 1e-12;
    double tol_res = 1e-10;
    int max_iter = 2000;
    double beta = 1.0;
    std::string guess = "gaussian";
    double guess_amplitude = 0.0;
    double guess_width = 1.0;
    double guess_noise = 0.0;

    SolverConfig config(const CommonFlags& common, const GridPtr& grid, double alpha, double omega) const {
        SolverConfig c;
        c.nu = nu;
        c.tol_error = tol_error;
        c.tol_stab = tol_stab;
        c.tol_res = tol_res;
        c.max_iter = max_iter;
        c.dispersion_beta = beta;
        if (guess == "sech") c.initial_guess = ExplicitSechGuess{};
        else c.initial_guess = GaussianGuess{guess_amplitude, guess_width};
        if (guess_noise > 0.0) {
            // Even multiplicative noise keeps the guess symmetric about x = 0.
            RealProfile p = initial_profile(c.initial_guess, alpha, omega, grid);
            std::mt19937_64 rng(common.seed);
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            const std::size_t n = p.size();
            for (std::size_t j = 0; j <= n / 2; ++j) {
                const double f = 1.0 + guess_noise * u(rng);
                p.values[j] *= f;
                if (j != 0 && j != n / 2) p.values[n - j] *= f;
            }
            c.initial_guess = ProvidedGuess{p.values};
        }
        c.validate();
        return c;
    }
};

void add_common(CLI::App* app, CommonFlags& f) {
    app->add_option("--half-width", f.half_width, "Half width L of the periodic domain [-L, L)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--points", f.points, "Number of grid points N (power of two)")->capture_default_str();
    app->add_option("--output-dir,-o", f.out_dir, "Output directory (SOLITONLAB_OUT overrides)")
        ->capture_default_str();
    app->add_option("--format", f.format, "Table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app->add_option("--seed", f.seed, "Seed for randomized initial data")->capture_default_str();
}

void add_solver(CLI::App* app, SolverFlags& f) {
    app->add_option("--nu", f.nu, "Exponent of the stabilizing factor (default (alpha+2)/(alpha+1))")
        ->check(CLI::PositiveNumber);
    app->add_option("--tol-error", f.tol_error, "Tolerance on Error(n)")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--tol-stab", f.tol_stab, "Tolerance on |1 - M_n|")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--tol-res", f.tol_res, "Tolerance on RES(n)")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--max-iter", f.max_iter, "Iteration cap")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--beta", f.beta, "Coefficient of the second-order term (0: pure fourth order)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--guess", f.guess, "Initial guess")->check(CLI::IsMember({"gaussian", "sech"}))->capture_default_str();
    app->add_option("--guess-amplitude", f.guess_amplitude, "Gaussian amplitude (0: (2 omega)^(1/alpha))")
        ->capture_default_str();
    app->add_option("--guess-width", f.guess_width, "Gaussian width")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--guess-noise", f.guess_noise, "Relative even noise added to the guess, drawn from --seed")
        ->check(CLI::Range(0.0, 0.5))
        ->capture_default_str();
}

json history_json(const SolverDiagnostics& d) {
    return json{{"iterations", d.iterations},
                {"converged", d.converged},
                {"error", d.error_history},
                {"stab", d.stab_history},
                {"res", d.res_history}};
}

Table diagnostics_table(const SolverDiagnostics& d) {
    Table t{{"iteration", "error", "stab", "res"}, {}};
    for (std::size_t i = 0; i < d.error_history.size(); ++i) {
        t.add({static_cast<double>(i + 1), d.error_history[i], d.stab_history[i], d.res_history[i]});
    }
    return t;
}

double min_value(const RealProfile& p) { return *std::min_element(p.values.begin(), p.values.end()); }
double max_value(const RealProfile& p) { return *std::max_element(p.values.begin(), p.values.end()); }

// ---------------------------------------------------------------------------

struct SolveCmd {
    CommonFlags common;
    SolverFlags solver;
    double alpha = 0.0;
    double omega = 0.0;

    int run() const {
        const GridPtr g = common.grid();
        const OutputDir out = common.output();
        const SolveResult r = petviashvili_solve(alpha, omega, g, solver.config(common, g, alpha, omega));
        Table t{{"x", "phi"}, {}};
        for (std::size_t j = 0; j < g->size(); ++j) t.add({g->nodes()[j], r.profile.values[j]});
        out.write_table("profile", t);
        json d = history_json(r.diagnostics);
        d["alpha"] = alpha;
        d["omega"] = omega;
        d["peak"] = max_value(r.profile);
        d["min"] = min_value(r.profile);
        d["mass"] = profile_mass(r.profile);
        out.write_json("diagnostics", d);
        std::printf("converged=%s iterations=%d peak=%.12g min=%.6g\n", r.diagnostics.converged ? "yes" : "no",
                    r.diagnostics.iterations, max_value(r.profile), min_value(r.profile));
        if (!r.diagnostics.converged) throw NotConverged("solver hit max_iter without meeting the tolerances");
        return kOk;
    }
};

struct VerifyExactCmd {
    CommonFlags common;
    SolverFlags solver;
    double alpha = 0.0;
    double tolerance = 1e-9;

    int run() const {
        const GridPtr g = common.grid();
        const OutputDir out = common.output();
        const double omega = explicit_params(alpha).omega0;
        const SolveResult r = petviashvili_solve(alpha, omega, g, solver.config(common, g, alpha, omega));
        const RealProfile exact = phi_exact(alpha, g);
        double dist = 0.0;
        Table t{{"x", "phi_numeric", "phi_exact"}, {}};
        for (std::size_t j = 0; j < g->size(); ++j) {
            dist = std::max(dist, std::abs(r.profile.values[j] - exact.values[j]));
            t.add({g->nodes()[j], r.profile.values[j], exact.values[j]});
        }
        out.write_table("profile", t);
        out.write_table("diagnostics", diagnostics_table(r.diagnostics));
        out.write_json("verify", json{{"alpha", alpha},
                                      {"omega0", omega},
                                      {"linf_distance", dist},
                                      {"tolerance", tolerance},
                                      {"iterations", r.diagnostics.iterations},
                                      {"converged", r.diagnostics.converged}});
        std::printf("alpha=%g omega0=%.17g iterations=%d linf_distance=%.3e\n", alpha, omega, r.diagnostics.iterations,
                    dist);
        if (!r.diagnostics.converged || !(dist <= tolerance)) {
            throw NotConverged("distance to the explicit wave exceeds the tolerance");
        }
        return kOk;
    }
};

struct SpectrumCmd {
    CommonFlags common;
    SolverFlags solver;
    double alpha = 0.0;
    std::optional<double> omega;
    std::optional<double> tol_zero;
    std::size_t keep = 6;
    bool full_matrix = false;
    bool with_chi = false;

    int run() const {
        const GridPtr g = common.grid();
        const OutputDir out = common.output();
        const double w = omega.value_or(explicit_params(alpha).omega0);
        const SolverConfig cfg = solver.config(common, g, alpha, w);
        const SolveResult r = petviashvili_solve(alpha, w, g, cfg);
        if (!r.diagnostics.converged) throw NotConverged("profile solve did not converge");
        const RealProfile& phi = r.profile;
        const Dispersion disp = cfg.dispersion();
        const double tol = tol_zero.value_or(default_tol_zero(w));

        auto report = [&](LinearizedOperator which) {
            const OperatorMatrix full = build_operator(phi, alpha, w, which, disp);
            return full_matrix ? eigen_report(full, tol, keep) : eigen_report_by_parity(full, tol, keep);
        };
        const EigenReport minus = report(LinearizedOperator::Lminus);
        const EigenReport plus = report(LinearizedOperator::Lplus);
        const EigenReport both = composite_report(minus, plus, 2 * keep);

        json j{{"alpha", alpha},
               {"omega", w},
               {"tol_zero", tol},
               {"n_minus", minus.n_negative},
               {"z_minus", minus.n_zero},
               {"n_plus", plus.n_negative},
               {"z_plus", plus.n_zero},
               {"n_composite", both.n_negative},
               {"z_composite", both.n_zero},
               {"eigenvalues_minus", minus.smallest_eigenvalues},
               {"eigenvalues_plus", plus.smallest_eigenvalues}};
        if (minus.n_negative >= 1) j["ground_state_single_signed"] = ground_state_positivity(minus);
        if (auto k = kernel_vector(minus)) j["kernel_minus_vs_dphi"] = correlation(*k, derivative(phi, 1).values);
        if (auto k = kernel_vector(plus)) j["kernel_plus_vs_phi"] = correlation(*k, phi.values);

        const LocalD2 d2 = local_d_second(alpha, w, g, cfg);
        j["d2"] = d2.d2;
        j["verdict"] = to_string(classify_orbital(d2.d2, both.n_negative, both.n_zero));
        if (with_chi) {
            const NegativeDirection nd = negative_direction(phi, alpha, w, disp);
            j["chi_phi"] = nd.scalar;
            j["chi_residual"] = nd.residual;
        }
        out.write_json("spectrum", j);

        Table t{{"operator", "index", "eigenvalue"}, {}};
        for (std::size_t i = 0; i < minus.smallest_eigenvalues.size(); ++i) {
            t.add({0.0, static_cast<double>(i), minus.smallest_eigenvalues[i]});
        }
        for (std::size_t i = 0; i < plus.smallest_eigenvalues.size(); ++i) {
            t.add({1.0, static_cast<double>(i), plus.smallest_eigenvalues[i]});
        }
        out.write_table("eigenvalues", t);
        std::cout << j.dump(2) << '\n';
        return kOk;
    }
};

struct BranchFlags {
    double alpha = 0.0;
    double omega_min = 0.02;
    double omega_max = 0.25;
    std::size_t steps = 24;

    void add(CLI::App* app) {
        app->add_option("--alpha", alpha, "Nonlinearity exponent")->required()->check(CLI::PositiveNumber);
        app->add_option("--omega-min", omega_min, "First frequency")->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--omega-max", omega_max, "Last frequency")->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--steps", steps, "Number of frequencies (equispaced)")->check(CLI::Range(2, 100000))
            ->capture_default_str();
    }
};

struct BranchCmd {
    CommonFlags common;
    SolverFlags solver;
    BranchFlags branch;
    bool profiles = false;

    int run() const {
        const GridPtr g = common.grid();
        const OutputDir out = common.output();
        const SolverConfig cfg = solver.config(common, g, branch.alpha, branch.omega_min);
        const SolitaryBranch b =
            continue_branch(branch.alpha, branch.omega_min, branch.omega_max, branch.steps, g, cfg);
        Table t{{"omega", "mass", "converged", "iterations", "min_phi", "max_phi"}, {}};
        for (std::size_t i = 0; i < b.size(); ++i) {
            t.add({b.omegas[i], b.masses[i], b.converged_flags[i] ? 1.0 : 0.0, static_cast<double>(b.iterations[i]),
                   min_value(b.profiles[i]), max_value(b.profiles[i])});
        }
        out.write_table("branch", t);
        if (profiles) {
            Table p{{"omega", "x", "phi"}, {}};
            for (std::size_t i = 0; i < b.size(); ++i) {
                for (std::size_t j = 0; j < g->size(); ++j) p.add({b.omegas[i], g->nodes()[j], b.profiles[i].values[j]});
            }
            out.write_table("profiles", p);
        }
        std::printf("points=%zu truncated=%s\n", b.size(), b.truncated ? "yes" : "no");
        return kOk;
    }
};

struct DmapCmd {
    CommonFlags common;
    SolverFlags solver;
    BranchFlags branch;
    bool centered = false;
    std::optional<double> omega_c_tol;

    int run() const {
        const GridPtr g = common.grid();
        const OutputDir out = common.output();
        const SolverConfig cfg = solver.config(common, g, branch.alpha, branch.omega_min);
        const SolitaryBranch b =
            continue_branch(branch.alpha, branch.omega_min, branch.omega_max, branch.steps, g, cfg);
        const auto samples = d_second(b, centered ? DifferenceScheme::Centered : DifferenceScheme::Forward);
        Table t{{"omega", "d2", "mass", "sign"}, {}};
        for (const auto& s : samples) t.add({s.omega, s.d2, s.mass, static_cast<double>(d2_sign(s))});
        out.write_table("d2", t);
        json j{{"alpha", branch.alpha},
               {"beta", b.beta},
               {"sign_changes", count_sign_changes(samples)},
               {"truncated", b.truncated},
               {"omega0", explicit_params(branch.alpha).omega0}};
        if (omega_c_tol) {
            const auto wc = find_omega_c(branch.alpha, branch.omega_min, branch.omega_max, g, cfg, *omega_c_tol,
                                         branch.steps);
            j["omega_c"] = wc ? json(*wc) : json(nullptr);
        }
        out.write_json("d2", j);
        std::cout << j.dump(2) << '\n';
        return kOk;
    }
};

struct Alpha0Cmd {
    CommonFlags common;
    SolverFlags solver;
    double alpha_min = 4.0;
    double alpha_max = 5.5;
    double tol = 1e-2;
    std::size_t samples = 0;

    int run() const {
        const GridPtr g = common.grid();
        const OutputDir out = common.output();
        const SolverConfig cfg = solver.config(common, g, alpha_min, explicit_params(alpha_min).omega0);
        if (samples > 0) {
            Table t{{"alpha", "omega0", "d2", "sign"}, {}};
            for (const double a : linspace(alpha_min, alpha_max, samples)) {
                const double w0 = explicit_params(a).omega0;
                const double d2 = d2_at_omega0(a, g, cfg);
                t.add({a, w0, d2, d2 > 0.0 ? 1.0 : (d2 < 0.0 ? -1.0 : 0.0)});
            }
            out.write_table("d2_omega0", t);
        }
        const double a0 = find_alpha0(alpha_min, alpha_max, g, cfg, tol);
        const json j{{"alpha0", a0}, {"omega0_at_alpha0", explicit_params(a0).omega0}, {"tol_alpha", tol}};
        out.write_json("alpha0", j);
        std::cout << j.dump(2) << '\n';
        return kOk;
    }
};

struct RegionCmd {
    CommonFlags common;
    SolverFlags solver;
    double alpha_min = 1.0;
    double alpha_max = 7.0;
    std::size_t alpha_steps = 25;
    double omega_min = 0.02;
    double omega_max = 0.25;
    std::size_t omega_steps = 24;
    unsigned jobs = 1;

    int run() const {
        const GridPtr g = common.grid();
        const OutputDir out = common.output();
        if (!(alpha_max > alpha_min)) throw ParameterError("--alpha-max must exceed --alpha-min");
        if (!(omega_max > omega_min)) throw ParameterError("--omega-max must exceed --omega-min");
        const SolverConfig cfg = solver.config(common, g, alpha_min, omega_min);
        const auto alphas = linspace(alpha_min, alpha_max, alpha_steps);
        const auto omegas = linspace(omega_min, omega_max, omega_steps);
        const StabilityMap map = region_scan(alphas, omegas, g, cfg, jobs);
        Table t{{"alpha", "omega", "sign", "d2"}, {}};
        for (std::size_t ia = 0; ia < alphas.size(); ++ia) {
            for (std::size_t iw = 0; iw < omegas.size(); ++iw) t.add({alphas[ia], omegas[iw], map.sign(ia, iw), map.d2(ia, iw)});
        }
        out.write_table("region", t);
        const Omega0Crossing c = omega0_crossing(map);
        json j{{"signs_on_omega0_curve", c.signs_on_curve}};
        j["alpha0_estimate"] = c.alpha0 ? json(*c.alpha0) : json(nullptr);
        if (c.alpha0) j["omega0_at_crossing"] = explicit_params(*c.alpha0).omega0;
        out.write_json("region", j);
        std::cout << j.dump(2) << '\n';
        return kOk;
    }
};

struct EvolveCmd {
    CommonFlags common;
    SolverFlags solver;
    double alpha = 0.0;
    std::optional<double> omega;
    double delta = 0.01;
    double t_final = 50.0;
    double dt = 1e-3;
    long sample_every = 500;

    int run() const {
        const GridPtr g = common.grid();
        const OutputDir out = common.output();
        if (!(delta >= 0.0 && delta <= 0.1)) throw ParameterError("--delta must lie in [0, 0.1]");
        const double w = omega.value_or(explicit_params(alpha).omega0);
        const SolverConfig cfg = solver.config(common, g, alpha, w);
        const SolveResult r = petviashvili_solve(alpha, w, g, cfg);
        if (!r.diagnostics.converged) throw NotConverged("profile solve did not converge");
        const RealProfile& phi = r.profile;
        const Dispersion disp = cfg.dispersion();

        const SplitStep stepper(g, alpha, dt, disp);
        ComplexField u0(phi);
        for (auto& v : u0.values) v *= 1.0 + delta;
        EvolutionState s = make_state(std::move(u0), dt);
        Table t{{"t", "distance", "energy", "mass"}, {}};
        auto record = [&] {
            t.add({s.time, orbital_distance(s.field, phi), energy(s.field, alpha, disp), mass(s.field)});
        };
        record();
        bool truncated = false;
        double blowup_time = std::nan("");
        const long total = std::lround(t_final / dt);
        try {
            for (long n = 1; n <= total; ++n) {
                stepper.advance(s);
                if (n % sample_every == 0 || n == total) record();
            }
        } catch (const BlowUpError& e) {
            truncated = true;
            blowup_time = e.time();
        }
        out.write_table("evolution", t);

        double dmax = 0.0, e_drift = 0.0, f_drift = 0.0;
        const auto& first = t.rows.front();
        for (const auto& row : t.rows) {
            dmax = std::max(dmax, row[1]);
            e_drift = std::max(e_drift, std::abs(row[2] - first[2]) / std::abs(first[2]));
            f_drift = std::max(f_drift, std::abs(row[3] - first[3]) / std::abs(first[3]));
        }
        const json j{{"alpha", alpha},
                     {"omega", w},
                     {"delta", delta},
                     {"phi_h2_norm", norm(phi, NormKind::H2)},
                     {"initial_distance", first[1]},
                     {"max_distance", dmax},
                     {"growth_factor", first[1] > 0.0 ? dmax / first[1] : std::nan("")},
                     {"energy_drift", e_drift},
                     {"mass_drift", f_drift},
                     {"truncated", truncated},
                     {"blowup_time", truncated ? json(blowup_time) : json(nullptr)}};
        out.write_json("evolve", j);
        std::cout << j.dump(2) << '\n';
        return kOk;
    }
};

int report_error(const std::string& out_dir, const char* kind, const std::string& message, int code) {
    const json j{{"error", kind}, {"message", message}, {"exit_code", code}};
    std::cerr << j.dump() << '\n';
    try {
        std::string dir = out_dir;
        if (const char* env = std::getenv("SOLITONLAB_OUT"); env && *env) dir = env;
        OutputDir(dir, tools::Format::Json).write_json("error", j);
    } catch (...) {
        // The stderr record is enough when the directory is not writable.
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Standing waves of the mixed-dispersion fourth-order NLS: solver, spectra, d''(omega), evolution"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML file with option values (one [section] per subcommand)");

    SolveCmd solve;
    auto* s = app.add_subcommand("solve", "Petviashvili solve at one (alpha, omega); writes profile and diagnostics");
    add_common(s, solve.common);
    add_solver(s, solve.solver);
    s->add_option("--alpha", solve.alpha, "Nonlinearity exponent")->required()->check(CLI::PositiveNumber);
    s->add_option("--omega", solve.omega, "Frequency")->required()->check(CLI::PositiveNumber);

    VerifyExactCmd verify;
    auto* v = app.add_subcommand("verify-exact", "Solve at omega0(alpha) and compare with the explicit sech wave");
    add_common(v, verify.common);
    add_solver(v, verify.solver);
    v->add_option("--alpha", verify.alpha, "Nonlinearity exponent")->required()->check(CLI::PositiveNumber);
    v->add_option("--tolerance", verify.tolerance, "Pass threshold on the max-norm distance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    SpectrumCmd spectrum;
    auto* sp = app.add_subcommand("spectrum", "Negative and zero eigenvalues of L-, L+ and the composite operator");
    add_common(sp, spectrum.common);
    add_solver(sp, spectrum.solver);
    sp->add_option("--alpha", spectrum.alpha, "Nonlinearity exponent")->required()->check(CLI::PositiveNumber);
    sp->add_option("--omega", spectrum.omega, "Frequency (default omega0(alpha))")->check(CLI::PositiveNumber);
    sp->add_option("--tol-zero", spectrum.tol_zero, "Zero-eigenvalue band (default 1e-6 (omega + 1))")
        ->check(CLI::PositiveNumber);
    sp->add_option("--keep", spectrum.keep, "Eigenvalues reported per operator")->capture_default_str();
    sp->add_flag("--full-matrix", spectrum.full_matrix, "Eigensolve the full matrix instead of parity blocks");
    sp->add_flag("--negative-direction", spectrum.with_chi, "Also solve L- chi = phi and report <chi, phi>");

    BranchCmd branch;
    auto* b = app.add_subcommand("branch", "Warm-started continuation in omega; writes masses per point");
    add_common(b, branch.common);
    add_solver(b, branch.solver);
    branch.branch.add(b);
    b->add_flag("--profiles", branch.profiles, "Also write every profile (long format)");

    DmapCmd dmap;
    auto* d = app.add_subcommand("dmap", "d''(omega) along a branch, optionally with the threshold omega_c");
    add_common(d, dmap.common);
    add_solver(d, dmap.solver);
    dmap.branch.add(d);
    d->add_flag("--centered", dmap.centered, "Centered instead of forward differences");
    d->add_option("--omega-c", dmap.omega_c_tol, "Locate omega_c to this tolerance")->check(CLI::PositiveNumber);

    Alpha0Cmd alpha0;
    auto* a0 = app.add_subcommand("alpha0", "Root of d''(omega0(alpha)) in alpha");
    add_common(a0, alpha0.common);
    add_solver(a0, alpha0.solver);
    a0->add_option("--alpha-min", alpha0.alpha_min, "Bracket start")->check(CLI::PositiveNumber)->capture_default_str();
    a0->add_option("--alpha-max", alpha0.alpha_max, "Bracket end")->check(CLI::PositiveNumber)->capture_default_str();
    a0->add_option("--tol", alpha0.tol, "Bracket width at exit")->check(CLI::PositiveNumber)->capture_default_str();
    a0->add_option("--samples", alpha0.samples, "Also tabulate d''(omega0) at this many alphas")->capture_default_str();

    RegionCmd region;
    auto* rg = app.add_subcommand("region", "Sign of d'' on an (alpha, omega) lattice");
    add_common(rg, region.common);
    add_solver(rg, region.solver);
    rg->add_option("--alpha-min", region.alpha_min, "")->check(CLI::PositiveNumber)->capture_default_str();
    rg->add_option("--alpha-max", region.alpha_max, "")->check(CLI::PositiveNumber)->capture_default_str();
    rg->add_option("--alpha-steps", region.alpha_steps, "")->check(CLI::Range(1, 100000))->capture_default_str();
    rg->add_option("--omega-min", region.omega_min, "")->check(CLI::PositiveNumber)->capture_default_str();
    rg->add_option("--omega-max", region.omega_max, "")->check(CLI::PositiveNumber)->capture_default_str();
    rg->add_option("--omega-steps", region.omega_steps, "")->check(CLI::Range(1, 100000))->capture_default_str();
    rg->add_option("--jobs,-j", region.jobs, "Worker threads")->check(CLI::Range(1, 1024))->capture_default_str();

    EvolveCmd evolve;
    auto* ev = app.add_subcommand("evolve", "Split-step evolution of (1 + delta) phi with orbital distance and E, F");
    add_common(ev, evolve.common);
    add_solver(ev, evolve.solver);
    ev->add_option("--alpha", evolve.alpha, "Nonlinearity exponent")->required()->check(CLI::PositiveNumber);
    ev->add_option("--omega", evolve.omega, "Frequency (default omega0(alpha))")->check(CLI::PositiveNumber);
    ev->add_option("--delta", evolve.delta, "Amplitude perturbation")->capture_default_str();
    ev->add_option("--t-final", evolve.t_final, "Final time")->check(CLI::PositiveNumber)->capture_default_str();
    ev->add_option("--dt", evolve.dt, "Time step")->check(CLI::PositiveNumber)->capture_default_str();
    ev->add_option("--sample-every", evolve.sample_every, "Steps between samples")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    std::string out_dir = ".";
    for (const CommonFlags* c : {&solve.common, &verify.common, &spectrum.common, &branch.common, &dmap.common,
                                 &alpha0.common, &region.common, &evolve.common}) {
        if (c->out_dir != ".") out_dir = c->out_dir;
    }
    try {
        if (*s) return solve.run();
        if (*v) return verify.run();
        if (*sp) return spectrum.run();
        if (*b) return branch.run();
        if (*d) return dmap.run();
        if (*a0) return alpha0.run();
        if (*rg) return region.run();
        if (*ev) return evolve.run();
    } catch (const ParameterError& e) {
        return report_error(out_dir, "parameter", e.what(), kUsage);
    } catch (const ShapeError& e) {
        return report_error(out_dir, "shape", e.what(), kUsage);
    } catch (const NotConverged& e) {
        return report_error(out_dir, "not_converged", e.what(), kNoConvergence);
    } catch (const DivergenceError& e) {
        return report_error(out_dir, "divergence", e.what(), kNoConvergence);
    } catch (const BranchError& e) {
        return report_error(out_dir, "branch", e.what(), kNoConvergence);
    } catch (const BracketError& e) {
        return report_error(out_dir, "bracket", e.what(), kNoConvergence);
    } catch (const InsufficientDataError& e) {
        return report_error(out_dir, "insufficient_data", e.what(), kNoConvergence);
    } catch (const Error& e) {
        return report_error(out_dir, "numeric", e.what(), kNumeric);
    } catch (const std::exception& e) {
        return report_error(out_dir, "internal", e.what(), kNumeric);
    }
    return kUsage;
}
