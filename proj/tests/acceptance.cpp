// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any hard criterion fails; criterion 10b (instability growth) is soft.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "solitonlab/evolve.hpp"
#include "solitonlab/explicit.hpp"
#include "solitonlab/petviashvili.hpp"
#include "solitonlab/spectra.hpp"
#include "solitonlab/stability.hpp"
#include "support/quad_dft.hpp"

using namespace solitonlab;
using testsupport::quad;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int hard_failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void run(const char* id, const char* title, bool soft, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %s (%s): %s [%.1f s]%s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(),
                seconds_since(t0), (!o.pass && soft) ? " (soft)" : "");
    std::fflush(stdout);
    if (!o.pass && !soft) ++hard_failures;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double linf_distance(const RealProfile& a, const RealProfile& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a.values[j] - b.values[j]));
    return m;
}

const std::vector<double> kAlphas{1.0, 2.0, 4.0};

struct ExactRun {
    SolveResult result;
    double seconds = 0.0;
};

const std::vector<ExactRun>& exact_runs() {
    static const std::vector<ExactRun> runs = [] {
        std::vector<ExactRun> out;
        const GridPtr g = SpectralGrid::make();
        for (double a : kAlphas) {
            const auto t0 = std::chrono::steady_clock::now();
            SolveResult r = petviashvili_solve(a, explicit_params(a).omega0, g);
            out.push_back({std::move(r), seconds_since(t0)});
        }
        return out;
    }();
    return runs;
}

Outcome criterion1() {
    const GridPtr g = SpectralGrid::make();
    Outcome o{true, ""};
    std::ostringstream ss;
    for (std::size_t i = 0; i < kAlphas.size(); ++i) {
        const ExactRun& r = exact_runs()[i];
        const double d = linf_distance(r.result.profile, phi_exact(kAlphas[i], g));
        ss << "alpha=" << kAlphas[i] << " Linf=" << fmt("%.2e", d) << " t=" << fmt("%.2f", r.seconds) << "s; ";
        o.pass = o.pass && r.result.diagnostics.converged && d <= 1e-9 && r.seconds <= 10.0;
    }
    o.detail = ss.str();
    return o;
}

Outcome criterion2() {
    Outcome o{true, ""};
    std::ostringstream ss;
    for (std::size_t i = 0; i < kAlphas.size(); ++i) {
        const auto& d = exact_runs()[i].result.diagnostics;
        const double e = d.error_history.back(), m = d.stab_history.back(), res = d.res_history.back();
        ss << "alpha=" << kAlphas[i] << " err=" << fmt("%.1e", e) << " |1-M|=" << fmt("%.1e", m)
           << " RES=" << fmt("%.1e", res) << "; ";
        o.pass = o.pass && e <= 1e-12 && m <= 1e-12 && res <= 1e-10;
    }
    o.detail = ss.str();
    return o;
}

// omega0 = 4(a+2)^2 / (a^4 + 8a^3 + 32a^2 + 64a + 64) for integer a, compared
// as reduced fractions.
Outcome criterion3() {
    auto check = [](long a, long num, long den) {
        const long p = 4 * (a + 2) * (a + 2);
        const long q = a * a * a * a + 8 * a * a * a + 32 * a * a + 64 * a + 64;
        const long g = std::gcd(p, q);
        return p / g == num && q / g == den;
    };
    const bool exact = check(2, 4, 25) && check(4, 9, 100);
    const bool floating = explicit_params(2.0).omega0 == 4.0 / 25.0 && std::abs(explicit_params(4.0).omega0 - 0.09) <= 1e-17;
    return {exact && floating, std::string("rational ") + (exact ? "ok" : "mismatch") + ", double " +
                                   (floating ? "ok" : "mismatch")};
}

// The FFT supplies the discrete transform where it is resolvable (formula
// value >= 1e-8 of its peak). Beyond that double rounding of the peak swamps
// the coefficient, so the same discrete sum is evaluated in quad precision.
Outcome criterion4() {
    const double L = 200.0;
    const std::size_t n = 8192;
    const GridPtr g = SpectralGrid::make(L, n);
    Outcome o{true, ""};
    std::ostringstream ss;
    for (double a : kAlphas) {
        const auto p = explicit_params(a);
        const quad a0 = p.a0, b0 = p.b0, qa = a;
        RealProfile phi = phi_exact(a, g);
        RealProfile phi_a(g);
        for (std::size_t j = 0; j < n; ++j) phi_a.values[j] = std::pow(phi.values[j], a);
        const auto f1 = forward_transform(phi);
        const auto f2 = forward_transform(phi_a);
        testsupport::QuadCosineTransform q1(L, n, [&](quad x) { return a0 * powq(testsupport::sechq(b0 * x), 4 / qa); });
        testsupport::QuadCosineTransform q2(L, n, [&](quad x) {
            const quad s = testsupport::sechq(b0 * x);
            return powq(a0, qa) * s * s * s * s;
        });
        const std::size_t c = g->center_index();
        const double c1 = f1[c].real() / phi_hat_exact(a, 0.0);
        const double c2 = f2[c].real() / phi_pow_alpha_hat_exact(a, 0.0);
        double worst1 = 0.0, worst2 = 0.0;
        std::size_t quad_points = 0;
        const long smax = static_cast<long>(std::floor(5.0 * L / M_PI));
        for (long s = -smax; s <= smax; ++s) {
            const double xi = M_PI * static_cast<double>(s) / L;
            const double e1 = c1 * phi_hat_exact(a, xi);
            const double e2 = c2 * phi_pow_alpha_hat_exact(a, xi);
            const std::size_t k = static_cast<std::size_t>(static_cast<long>(c) + s);
            const bool fft1 = e1 >= 1e-8 * c1 * phi_hat_exact(a, 0.0);
            const bool fft2 = e2 >= 1e-8 * c2 * phi_pow_alpha_hat_exact(a, 0.0);
            // Even profiles: the cosine sum covers +s and -s alike.
            const double v1 = fft1 ? f1[k].real() : static_cast<double>(q1.at(s));
            const double v2 = fft2 ? f2[k].real() : static_cast<double>(q2.at(s));
            quad_points += (fft1 ? 0 : 1) + (fft2 ? 0 : 1);
            worst1 = std::max(worst1, std::abs(v1 / e1 - 1.0));
            worst2 = std::max(worst2, std::abs(v2 / e2 - 1.0));
        }
        ss << "alpha=" << a << " c=(" << fmt("%.6f", c1) << "," << fmt("%.6f", c2) << ") rel=("
           << fmt("%.1e", worst1) << "," << fmt("%.1e", worst2) << ") quad_pts=" << quad_points << "; ";
        o.pass = o.pass && worst1 <= 1e-6 && worst2 <= 1e-6;
    }
    o.detail = ss.str();
    return o;
}

Outcome criterion5() {
    Outcome o{true, ""};
    std::ostringstream ss;
    for (double a : kAlphas) {
        const double w = explicit_params(a).omega0;
        const double tol = default_tol_zero(w);
        std::vector<int> counts_by_n;
        for (std::size_t n : {std::size_t{4096}, std::size_t{8192}}) {
            const GridPtr g = SpectralGrid::make(200.0, n);
            const RealProfile phi = phi_exact(a, g);
            const EigenReport m =
                eigen_report_by_parity(build_operator(phi, a, w, LinearizedOperator::Lminus), tol);
            const EigenReport p = eigen_report_by_parity(build_operator(phi, a, w, LinearizedOperator::Lplus), tol);
            const EigenReport both = composite_report(m, p);
            const bool counts = m.n_negative == 1 && m.n_zero == 1 && p.n_negative == 0 && p.n_zero == 1 &&
                                both.n_negative == 1 && both.n_zero == 2;
            const bool ground = m.n_negative >= 1 && ground_state_positivity(m);
            const auto km = kernel_vector(m);
            const auto kp = kernel_vector(p);
            const double cm = km ? correlation(*km, derivative(phi, 1).values) : 0.0;
            const double cp = kp ? correlation(*kp, phi.values) : 0.0;
            counts_by_n.insert(counts_by_n.end(), {m.n_negative, m.n_zero, p.n_negative, p.n_zero});
            ss << "alpha=" << a << " N=" << n << " n/z(L-)=" << m.n_negative << "/" << m.n_zero
               << " n/z(L+)=" << p.n_negative << "/" << p.n_zero << " corr=(" << fmt("%.8f", cm) << ","
               << fmt("%.8f", cp) << ")" << (ground ? "" : " ground-state-sign-change") << "; ";
            o.pass = o.pass && counts && ground && cm >= 0.999999 && cp >= 0.999999;
        }
        o.pass = o.pass && std::equal(counts_by_n.begin(), counts_by_n.begin() + 4, counts_by_n.begin() + 4);
    }
    o.detail = ss.str();
    return o;
}

Outcome criterion6() {
    Outcome o{true, ""};
    std::ostringstream ss;
    const double step = 20.0 / 399.0;
    for (double a : kAlphas) {
        std::vector<double> samples;
        for (int i = 0; i < 400; ++i) samples.push_back(phi_pow_alpha_hat_exact(a, -10.0 + step * i));
        // Independent of check_pf2_logconcavity: the second difference itself.
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
            worst = std::max(worst, std::log(samples[i - 1]) - 2.0 * std::log(samples[i]) + std::log(samples[i + 1]));
        }
        const bool lib = check_pf2_logconcavity(samples, -10.0, step);
        ss << "alpha=" << a << " max second difference=" << fmt("%.3e", worst) << "; ";
        o.pass = o.pass && lib && worst < 0.0;
    }
    o.detail = ss.str();
    return o;
}

Outcome criterion7() {
    const GridPtr g = SpectralGrid::make();
    Outcome o{true, ""};
    std::ostringstream ss;
    for (double a : {2.0, 3.0, 4.0, 5.0, 5.5}) {
        const SolitaryBranch b = continue_branch(a, 0.02, 0.25, 24, g);
        const auto samples = d_second(b);
        int pos = 0, neg = 0;
        for (const auto& s : samples) {
            const int sg = d2_sign(s);
            pos += sg > 0;
            neg += sg < 0;
        }
        const int changes = count_sign_changes(samples);
        bool ok = !b.truncated && samples.size() == 23;
        if (a <= 4.0) ok = ok && pos == static_cast<int>(samples.size());
        else if (a == 5.0) ok = ok && changes == 1 && d2_sign(samples.front()) < 0 && d2_sign(samples.back()) > 0;
        else ok = ok && neg == static_cast<int>(samples.size());
        ss << "alpha=" << a << " +" << pos << "/-" << neg << " changes=" << changes << "; ";
        o.pass = o.pass && ok;
    }
    const double a0 = find_alpha0(4.0, 5.5, g);
    ss << "alpha0=" << fmt("%.4f", a0);
    o.pass = o.pass && a0 >= 4.6 && a0 <= 5.0;
    o.detail = ss.str();
    return o;
}

// Full-grid solve with the phi' direction deflated, checked against the
// finite-difference mass slope from the solver.
Outcome criterion8() {
    const GridPtr g = SpectralGrid::make();
    Outcome o{true, ""};
    std::ostringstream ss;
    for (double a : {2.0, 4.0, 6.0}) {
        const double w = explicit_params(a).omega0;
        const RealProfile phi = phi_exact(a, g);
        const NegativeDirection nd = negative_direction(phi, a, w);
        const double d2 = d2_at_omega0(a, g);
        const bool ok = (nd.scalar > 0.0) == (d2 < 0.0) && nd.scalar != 0.0 && d2 != 0.0 &&
                        nd.residual <= 1e-6 * norm(phi, NormKind::Linf) && (a != 2.0 || nd.scalar < 0.0);
        ss << "alpha=" << a << " <chi,phi>=" << fmt("%.5f", nd.scalar) << " d''=" << fmt("%.5f", d2) << "; ";
        o.pass = o.pass && ok;
    }
    o.detail = ss.str();
    return o;
}

Outcome criterion9() {
    const GridPtr g = SpectralGrid::make();
    SolverConfig cfg;
    cfg.dispersion_beta = 0.0;
    Outcome o{true, ""};
    std::ostringstream ss;
    for (double a : {4.0, 10.0}) {
        for (double w : {0.05, 0.2}) {
            const LocalD2 d = local_d_second(a, w, g, cfg);
            const int sg = d2_sign(d.d2, d.mass, w);
            const double closed = d2_closed_pure4nls(a, w, d.mass);
            ss << "alpha=" << a << " omega=" << w << " d''=" << fmt("%.4e", d.d2) << " closed=" << fmt("%.4e", closed)
               << "; ";
            o.pass = o.pass && sg == (a < 8.0 ? 1 : -1);
        }
    }
    o.detail = ss.str();
    return o;
}

Outcome criterion10a() {
    const GridPtr g = SpectralGrid::make();
    const double w = explicit_params(2.0).omega0;
    const SolveResult r = petviashvili_solve(2.0, w, g);
    const SplitStep stepper(g, 2.0, 1e-3);
    EvolutionState s = make_state(ComplexField(r.profile), 1e-3);
    const ConservationAudit audit = conservation_audit(s, stepper, 20.0, 100);
    const ExperimentSeries e = stability_experiment(r.profile, 2.0, 0.01, 50.0, 1e-3, 100);
    const double dmax = *std::max_element(e.distances.begin(), e.distances.end());
    const double bound = 5.0 * 0.01 * e.phi_h2_norm;
    std::ostringstream ss;
    ss << "E drift=" << fmt("%.2e", audit.energy_drift) << " F drift=" << fmt("%.2e", audit.mass_drift)
       << " max orbital distance=" << fmt("%.4f", dmax) << " bound=" << fmt("%.4f", bound);
    return {audit.energy_drift <= 1e-7 && audit.mass_drift <= 1e-10 && !e.truncated && dmax <= bound, ss.str()};
}

Outcome criterion10b() {
    const GridPtr g = SpectralGrid::make();
    const ExperimentSeries e = stability_experiment(6.0, explicit_params(6.0).omega0, 0.01, 50.0, 1e-3, g, {}, 100);
    const double d0 = e.distances.front();
    const double dmax = *std::max_element(e.distances.begin(), e.distances.end());
    std::ostringstream ss;
    ss << "initial=" << fmt("%.4f", d0) << " max=" << fmt("%.4f", dmax) << " growth=" << fmt("%.1f", dmax / d0)
       << (e.truncated ? " blow-up at t=" + fmt("%.3f", e.blowup_time) : "");
    return {dmax >= 10.0 * d0, ss.str()};
}

Outcome criterion11() {
    const GridPtr g = SpectralGrid::make();
    const SolveResult hi = petviashvili_solve(3.0, 1.0, g);
    const SolveResult lo = petviashvili_solve(3.0, 0.2, g);
    const double min_hi = *std::min_element(hi.profile.values.begin(), hi.profile.values.end());
    const double min_lo = *std::min_element(lo.profile.values.begin(), lo.profile.values.end());
    std::ostringstream ss;
    ss << "min phi(omega=1)=" << fmt("%.4e", min_hi) << " min phi(omega=0.2)=" << fmt("%.4e", min_lo);
    return {hi.diagnostics.converged && lo.diagnostics.converged && min_hi < 0.0 && min_lo > -1e-10, ss.str()};
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    run("1", "exact-solution reproduction", false, criterion1);
    run("2", "diagnostics at convergence", false, criterion2);
    run("3", "frequency formulas", false, criterion3);
    run("4", "Gamma-formula transforms", false, criterion4);
    run("5", "spectral counts", false, criterion5);
    run("6", "PF(2) log-concavity", false, criterion6);
    run("7", "d'' sign structure and alpha0", false, criterion7);
    run("8", "negative direction vs d''", false, criterion8);
    run("9", "pure fourth-order signs", false, criterion9);
    run("10a", "conservation and orbital bound", false, criterion10a);
    run("10b", "instability growth at alpha=6", true, criterion10b);
    run("11", "sign-changing tails", false, criterion11);
    std::printf("total %.1f s, %d hard failure(s)\n", seconds_since(t0), hard_failures);
    return hard_failures == 0 ? 0 : 1;
}
