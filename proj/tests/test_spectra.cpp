#include <gtest/gtest.h>

#include <cmath>

#include "solitonlab/explicit.hpp"
#include "solitonlab/petviashvili.hpp"
#include "solitonlab/spectra.hpp"
#include "solitonlab/stability.hpp"

using namespace solitonlab;

namespace {

// Small enough for dense eigensolves in a unit test. The alpha = 4 tail is
// about 1e-11 at the edge, so fourth-derivative checks there carry a small
// periodization error.
GridPtr small_grid() {
    static const GridPtr g = SpectralGrid::make(80.0, 1024);
    return g;
}

double rel_max(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0, s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
        s = std::max(s, std::abs(b[i]));
    }
    return d / s;
}

}  // namespace

TEST(BuildOperator, SymmetricAndMatchesSpectralApplication) {
    auto g = small_grid();
    const RealProfile phi = phi_exact(2.0, g);
    for (auto which : {LinearizedOperator::Lminus, LinearizedOperator::Lplus}) {
        const OperatorMatrix op = build_operator(phi, 2.0, 0.16, which);
        EXPECT_LE(op.entries.asymmetry(), 1e-10);
        std::vector<double> v(g->size());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = std::exp(-0.05 * std::pow(g->nodes()[j] - 3.0, 2.0));
        // Rounding in the quartic part scales with xi_max^4 ~ 1.6e5 here.
        EXPECT_LE(rel_max(op.entries.apply(v), apply_linearized(phi, 2.0, 0.16, which, v)), 1e-9);
    }
}

TEST(BuildOperator, ZeroModesAndQuadraticForm) {
    auto g = small_grid();
    for (double alpha : {1.0, 2.0, 4.0}) {
        const double w = explicit_params(alpha).omega0;
        const RealProfile phi = phi_exact(alpha, g);
        const RealProfile dphi = derivative(phi, 1);
        const auto lp = apply_linearized(phi, alpha, w, LinearizedOperator::Lplus, phi.values);
        const auto lm_d = apply_linearized(phi, alpha, w, LinearizedOperator::Lminus, dphi.values);
        const auto lm = apply_linearized(phi, alpha, w, LinearizedOperator::Lminus, phi.values);
        double a = 0.0, b = 0.0;
        for (std::size_t j = 0; j < g->size(); ++j) {
            a = std::max(a, std::abs(lp[j]));
            b = std::max(b, std::abs(lm_d[j]));
        }
        EXPECT_LE(a / norm(phi, NormKind::Linf), 1e-7) << alpha;
        EXPECT_LE(b / norm(dphi, NormKind::Linf), 1e-5) << alpha;
        // <L- phi, phi> = -alpha int phi^{alpha+2}
        double q = 0.0, t = 0.0;
        for (std::size_t j = 0; j < g->size(); ++j) {
            q += lm[j] * phi.values[j];
            t += std::pow(phi.values[j], alpha + 2.0);
        }
        EXPECT_NEAR(q / (-alpha * t), 1.0, 1e-8) << alpha;
    }
}

TEST(EigenReport, CountsAtExplicitWave) {
    auto g = small_grid();
    for (double alpha : {1.0, 2.0, 4.0}) {
        const double w = explicit_params(alpha).omega0;
        const RealProfile phi = phi_exact(alpha, g);
        const double tol = default_tol_zero(w);
        const EigenReport minus = eigen_report(build_operator(phi, alpha, w, LinearizedOperator::Lminus), tol);
        const EigenReport plus = eigen_report(build_operator(phi, alpha, w, LinearizedOperator::Lplus), tol);
        EXPECT_EQ(minus.n_negative, 1) << alpha;
        EXPECT_EQ(minus.n_zero, 1) << alpha;
        EXPECT_EQ(plus.n_negative, 0) << alpha;
        EXPECT_EQ(plus.n_zero, 1) << alpha;
        const EigenReport both = composite_report(minus, plus);
        EXPECT_EQ(both.n_negative, 1);
        EXPECT_EQ(both.n_zero, 2);

        EXPECT_TRUE(ground_state_positivity(minus)) << alpha;
        ASSERT_TRUE(kernel_vector(minus));
        ASSERT_TRUE(kernel_vector(plus));
        EXPECT_GE(correlation(*kernel_vector(minus), derivative(phi, 1).values), 0.999999);
        EXPECT_GE(correlation(*kernel_vector(plus), phi.values), 0.999999);
    }
}

TEST(EigenReport, ParityBlocksReproduceFullSpectrum) {
    auto g = small_grid();
    const RealProfile phi = phi_exact(2.0, g);
    const OperatorMatrix full = build_operator(phi, 2.0, 0.16, LinearizedOperator::Lminus);
    const EigenReport a = eigen_report(full, default_tol_zero(0.16), 8);
    const EigenReport b = eigen_report_by_parity(full, default_tol_zero(0.16), 8);
    EXPECT_EQ(a.n_negative, b.n_negative);
    EXPECT_EQ(a.n_zero, b.n_zero);
    ASSERT_EQ(a.smallest_eigenvalues.size(), b.smallest_eigenvalues.size());
    for (std::size_t i = 0; i < a.smallest_eigenvalues.size(); ++i) {
        EXPECT_NEAR(a.smallest_eigenvalues[i], b.smallest_eigenvalues[i], 1e-9);
    }
    EXPECT_EQ(b.sectors[0], Sector::Even);  // ground state
    EXPECT_EQ(b.sectors[1], Sector::Odd);   // phi'
}

TEST(EigenReport, EvenSectorHasNoKernelForLminus) {
    auto g = small_grid();
    for (double alpha : {2.0, 4.0}) {
        const double w = explicit_params(alpha).omega0;
        const OperatorMatrix even =
            build_operator(phi_exact(alpha, g), alpha, w, LinearizedOperator::Lminus, Dispersion::mixed(), Sector::Even);
        const EigenReport r = eigen_report(even, default_tol_zero(w));
        EXPECT_EQ(r.n_zero, 0) << alpha;
        EXPECT_EQ(r.n_negative, 1) << alpha;
    }
}

TEST(EigenReport, ContinuousSpectrumStartsNearOmega) {
    auto g = small_grid();
    const double w = 0.16;
    const EigenReport r =
        eigen_report(build_operator(phi_exact(2.0, g), 2.0, w, LinearizedOperator::Lplus), default_tol_zero(w), 40);
    // Past the kernel the box modes of the continuum follow, starting at omega;
    // the attractive potential pulls the lowest ones a little below it.
    std::size_t above = 0;
    for (double v : r.smallest_eigenvalues) {
        if (v > default_tol_zero(w)) {
            ++above;
            EXPECT_GE(v, w - 5e-3);
        }
    }
    EXPECT_EQ(above, 39u);
    EXPECT_GT(r.smallest_eigenvalues.back(), w + 0.5);
}

TEST(EigenReport, GroundStateSignInPhysicalSpace) {
    // In x the L- ground state of the alpha = 4 wave picks up small negative
    // lobes; on the transform side it is single-signed.
    auto g = small_grid();
    const double w = explicit_params(4.0).omega0;
    const EigenReport r =
        eigen_report(build_operator(phi_exact(4.0, g), 4.0, w, LinearizedOperator::Lminus), default_tol_zero(w));
    ASSERT_EQ(r.n_negative, 1);
    EXPECT_TRUE(ground_state_positivity(r));
    EXPECT_FALSE(ground_state_positivity_physical(r));
}

TEST(EigenReport, SyntheticMatrices) {
    SymmetricMatrix m(2);
    m(0, 0) = -1.0;
    m(1, 1) = 1.0;
    const EigenReport r = eigen_report(m, 1e-9);
    EXPECT_EQ(r.n_negative, 1);
    EXPECT_EQ(r.n_zero, 0);
    EXPECT_TRUE(ground_state_positivity(r));

    SymmetricMatrix pos(3);
    for (std::size_t i = 0; i < 3; ++i) pos(i, i) = 1.0 + static_cast<double>(i);
    EXPECT_THROW(ground_state_positivity(eigen_report(pos, 1e-9)), ParameterError);

    // More negative eigenvalues than the first window holds.
    SymmetricMatrix many(60);
    for (std::size_t i = 0; i < 60; ++i) many(i, i) = static_cast<double>(i) - 30.0;
    const EigenReport rm = eigen_report(many, 1e-9);
    EXPECT_EQ(rm.n_negative, 30);
    EXPECT_EQ(rm.n_zero, 1);

    // A sign-changing ground state.
    SymmetricMatrix mixed(2);
    mixed(0, 0) = 0.0;
    mixed(1, 1) = 0.0;
    mixed(0, 1) = mixed(1, 0) = 1.0;  // eigenvector of -1 is (1, -1)/sqrt2
    EXPECT_FALSE(ground_state_positivity(eigen_report(mixed, 1e-9)));
}

TEST(PF2, LogConcaveSamples) {
    const double step = 20.0 / 399.0;
    std::vector<double> sech_samples, gauss, pow_hat;
    for (int i = 0; i < 400; ++i) {
        const double xi = -10.0 + step * i;
        sech_samples.push_back(1.0 / std::cosh(xi));
        gauss.push_back(std::exp(-xi * xi));
        pow_hat.push_back(phi_pow_alpha_hat_exact(2.0, xi));
    }
    EXPECT_TRUE(check_pf2_logconcavity(sech_samples, -10.0, step));
    EXPECT_TRUE(check_pf2_logconcavity(gauss, -10.0, step));
    EXPECT_TRUE(check_pf2_logconcavity(pow_hat, -10.0, step));
}

TEST(PF2, RejectsConvexAndNonPositive) {
    std::vector<double> convex;
    for (int i = 0; i < 50; ++i) convex.push_back(std::exp(0.01 * i * i));
    EXPECT_FALSE(check_pf2_logconcavity(convex, 0.0, 1.0));
    std::vector<double> bad{1.0, 0.5, 0.0, 0.5};
    EXPECT_THROW(check_pf2_logconcavity(bad, 0.0, 1.0), DomainError);
    EXPECT_THROW(check_pf2_logconcavity(convex, 0.0, 0.0), ParameterError);
}

TEST(NegativeDirection, SignsAndRoutesAgree) {
    auto g = small_grid();
    for (double alpha : {2.0, 6.0}) {
        const double w = explicit_params(alpha).omega0;
        const RealProfile phi = phi_exact(alpha, g);
        const NegativeDirection full = negative_direction(phi, alpha, w);
        const NegativeDirection even = negative_direction(phi, alpha, w, Dispersion::mixed(), true);
        EXPECT_NEAR(full.scalar, even.scalar, 1e-8 * std::abs(full.scalar));
        EXPECT_LE(full.residual, 1e-6 * norm(phi, NormKind::Linf));
        if (alpha == 2.0) {
            EXPECT_LT(full.scalar, 0.0);
        } else {
            EXPECT_GT(full.scalar, 0.0);
        }
    }
}

TEST(NegativeDirection, MatchesFiniteDifferenceSlope) {
    // <chi, phi> = -(d phi/d omega, phi) = -d''(omega)
    auto g = small_grid();
    for (double alpha : {2.0, 4.0, 6.0}) {
        const double w = explicit_params(alpha).omega0;
        SolverConfig cfg;
        cfg.initial_guess = ExplicitSechGuess{};
        const LocalD2 d2 = local_d_second(alpha, w, g, cfg, 1e-5);
        const double s = negative_direction_scalar(phi_exact(alpha, g), alpha, w);
        EXPECT_NEAR(s / (-d2.d2), 1.0, 1e-3) << alpha;
    }
}
