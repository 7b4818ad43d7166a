#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "plyap/pmath.hpp"
#include "plyap/shooting.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace {

using plyap::PiecewiseWeight;
using plyap::Sign;
constexpr double pi = std::numbers::pi;

plyap::ProblemSpec constant_problem(double p, double L) {
    return plyap::make_problem(p, PiecewiseWeight::constant(L, 1.0), PiecewiseWeight::constant(L, 1.0));
}

double fd_oracle(const plyap::ProblemSpec& s, int k, int n = 2000) {
    auto P = oracle::fd_pencil([&](double x) { return s.a.value(x); }, [&](double x) { return s.rho.value(x); },
                               s.length(), n);
    return oracle::fd_sturm_eigenvalue(P, k);
}

TEST(IntegrateIvp, SineOnZeroPi) {
    auto s = constant_problem(2.0, pi);
    auto r = plyap::integrate_ivp(s, 1.0);
    EXPECT_NEAR(r.u_end, 0.0, 1e-8);
    EXPECT_EQ(r.zero_count, 2);
    auto r4 = plyap::integrate_ivp(s, 4.0);
    EXPECT_EQ(r4.zero_count, 3);
    auto r25 = plyap::integrate_ivp(s, 2.5);
    EXPECT_EQ(r25.zero_count, 2);
    EXPECT_GT(std::abs(r25.u_end), 0.1);
}

TEST(IntegrateIvp, SamplesFollowSine) {
    plyap::IvpOptions opt;
    opt.sample_spacing = pi / 64;
    auto r = plyap::integrate_ivp(constant_problem(2.0, pi), 1.0, opt);
    ASSERT_GE(r.samples.size(), 65u);
    for (const auto& smp : r.samples) EXPECT_NEAR(smp.u, std::sin(smp.x), 1e-8);
}

TEST(Eigenvalue, ConstantCoefficientSquares) {
    auto s = constant_problem(2.0, pi);
    for (int k = 1; k <= 6; ++k) {
        auto e = plyap::eigenvalue(s, k, Sign::plus);
        EXPECT_NEAR(e.lambda, k * k, 1e-6 * k * k);
        EXPECT_EQ(e.nodal_count, k + 1);
        EXPECT_EQ(e.zeros.size(), static_cast<std::size_t>(k + 1));
        EXPECT_FALSE(e.two_sided);
    }
}

TEST(Eigenvalue, PLaplacianClosedForm) {
    for (double p : {1.5, 2.5, 3.0, 4.0}) {
        for (double L : {1.0, 2.0}) {
            auto s = constant_problem(p, L);
            for (int k = 1; k <= 3; ++k) {
                const double ref = std::pow(k * oracle::pi_p_beta(p) / L, p);
                EXPECT_NEAR(plyap::eigenvalue(s, k, Sign::plus).lambda, ref, 1e-6 * ref) << "p = " << p << " k = " << k;
            }
        }
    }
}

TEST(Eigenvalue, PThreeUnitInterval) {
    const double ref = std::pow(oracle::pi_p_beta(3.0), 3.0);
    EXPECT_NEAR(plyap::eigenvalue(constant_problem(3.0, 1.0), 1, Sign::plus).lambda, ref, 1e-6 * ref);
    EXPECT_NEAR(ref, 28.29, 0.01);
}

TEST(Eigenvalue, StepWeightMatchesFiniteDifferences) {
    auto s = plyap::make_problem(2.0, PiecewiseWeight::constant(1.0, 1.0), PiecewiseWeight::steps({0.5, 1.0}, {1.0, -1.0}));
    const double ref = fd_oracle(s, 1);
    EXPECT_NEAR(plyap::eigenvalue(s, 1, Sign::plus).lambda, ref, 1e-4 * ref);
}

TEST(Eigenvalue, MatchesFiniteDifferencesOnRandomWeights) {
    gen::Rng r(31);
    for (int t = 0; t < 5; ++t) {
        auto a = t % 2 ? gen::positive_coefficient(r) : PiecewiseWeight::constant(1.0, 1.0);
        auto s = plyap::make_problem(2.0, a, gen::sign_changing_weight(r));
        for (int k = 1; k <= 3; ++k) {
            const double ref = fd_oracle(s, k);
            EXPECT_NEAR(plyap::eigenvalue(s, k, Sign::plus).lambda, ref, 1e-3 * ref) << "trial " << t << " k " << k;
        }
    }
}

TEST(Eigenvalue, NodalCountOnRandomWeights) {
    gen::Rng r(32);
    for (int t = 0; t < 6; ++t) {
        auto s = plyap::make_problem(t % 2 ? 3.0 : 2.0, gen::positive_coefficient(r), gen::sign_changing_weight(r));
        for (int k = 1; k <= 6; ++k) {
            for (Sign sg : {Sign::plus, Sign::minus}) {
                auto e = plyap::eigenvalue(s, k, sg);
                EXPECT_EQ(e.nodal_count, k + 1);
                ASSERT_EQ(e.zeros.size(), static_cast<std::size_t>(k + 1));
                EXPECT_EQ(e.zeros.front(), 0.0);
                EXPECT_NEAR(e.zeros.back(), 1.0, 1e-8);
                for (std::size_t i = 1; i < e.zeros.size(); ++i) EXPECT_GT(e.zeros[i], e.zeros[i - 1]);
                EXPECT_EQ(sg == Sign::plus, e.lambda > 0.0);
            }
        }
    }
}

TEST(Eigenvalue, EigenfunctionNormalization) {
    auto s = plyap::make_problem(2.0, PiecewiseWeight::constant(1.0, 1.0), PiecewiseWeight::sinusoid(1.0, 1.0, 2 * pi, 0.0, 0.3));
    auto e = plyap::eigenvalue(s, 2, Sign::plus);
    double peak = 0.0;
    for (const auto& smp : e.samples) peak = std::max(peak, std::abs(smp.u));
    // scaled by the maximum over the whole trajectory, which can fall between samples
    EXPECT_LE(peak, 1.0 + 1e-12);
    EXPECT_GE(peak, 1.0 - 1e-5);
    ASSERT_GT(e.samples.size(), 2u);
    EXPECT_GT(e.samples[1].u, 0.0);
    EXPECT_LE(e.terminal_residual, 1e-8);
}

TEST(Eigenvalue, WeightMonotonicityUnderBumps) {
    // rho1 = rho, rho2 = rho + bump >= rho1: the positive ladder decreases and
    // the negative ladder moves towards -infinity, |lambda^-| grows.
    gen::Rng r(33);
    for (int t = 0; t < 6; ++t) {
        auto rho1 = gen::sign_changing_weight(r);
        auto rho2 = rho1.plus(gen::bump(1.0, r.uniform(0.1, 0.9), r.uniform(0.05, 0.3), r.uniform(0.2, 2.0)));
        const auto a = PiecewiseWeight::constant(1.0, 1.0);
        auto s1 = plyap::make_problem(2.0, a, rho1);
        auto s2 = plyap::make_problem(2.0, a, rho2);
        for (int k = 1; k <= 2; ++k) {
            const double p1 = plyap::eigenvalue(s1, k, Sign::plus).lambda;
            const double p2 = plyap::eigenvalue(s2, k, Sign::plus).lambda;
            EXPECT_GE(p1, p2 * (1.0 - 1e-9));
            if (plyap::negative_mass(rho2) > 1e-3) {
                const double m1 = plyap::eigenvalue(s1, k, Sign::minus).lambda;
                const double m2 = plyap::eigenvalue(s2, k, Sign::minus).lambda;
                EXPECT_GE(m1, m2 * (1.0 + 1e-9));
            }
        }
    }
}

TEST(Eigenvalue, MonotonicityNegativeLadderExample) {
    // rho1 = -2 <= rho2 = -1: lambda^-(rho1) = -mu/2 lies above lambda^-(rho2) = -mu.
    const auto a = PiecewiseWeight::constant(pi, 1.0);
    const double m1 = plyap::eigenvalue(plyap::make_problem(2.0, a, PiecewiseWeight::constant(pi, -2.0)), 1, Sign::minus).lambda;
    const double m2 = plyap::eigenvalue(plyap::make_problem(2.0, a, PiecewiseWeight::constant(pi, -1.0)), 1, Sign::minus).lambda;
    EXPECT_NEAR(m1, -0.5, 1e-8);
    EXPECT_NEAR(m2, -1.0, 1e-8);
    EXPECT_GT(m1, m2);
}

TEST(Eigenvalue, ScalingAndSymmetry) {
    gen::Rng r(34);
    for (int t = 0; t < 5; ++t) {
        auto a = gen::positive_coefficient(r);
        auto rho = gen::sign_changing_weight(r);
        const double p = r.uniform(1.6, 3.5);
        const double c = r.uniform(0.2, 5.0);
        auto s = plyap::make_problem(p, a, rho);
        auto sc = plyap::make_problem(p, a, rho.scaled(c));
        auto neg = plyap::make_problem(p, a, rho.negated());
        for (int k = 1; k <= 2; ++k) {
            const double l = plyap::eigenvalue(s, k, Sign::plus).lambda;
            EXPECT_NEAR(plyap::eigenvalue(sc, k, Sign::plus).lambda, l / c, 1e-8 * l / c);
            const double lm = plyap::eigenvalue(s, k, Sign::minus).lambda;
            EXPECT_NEAR(lm, -plyap::eigenvalue(neg, k, Sign::plus).lambda, 1e-8 * std::abs(lm));
        }
    }
}

TEST(Eigenvalue, Errors) {
    auto a = PiecewiseWeight::constant(1.0, 1.0);
    auto neg = plyap::make_problem(2.0, a, PiecewiseWeight::constant(1.0, -1.0));
    EXPECT_THROW(plyap::eigenvalue(neg, 1, Sign::plus), plyap::NoEigenvalue);
    EXPECT_THROW(plyap::eigenvalue(neg, 0, Sign::minus), plyap::DomainError);
    EXPECT_THROW(plyap::make_problem(2.0, PiecewiseWeight::constant(2.0, 1.0), PiecewiseWeight::constant(1.0, 1.0)),
                 plyap::DomainError);
    EXPECT_THROW(plyap::make_problem(2.0, PiecewiseWeight::steps({0.5, 1.0}, {1.0, 0.0}), PiecewiseWeight::constant(1.0, 1.0)),
                 plyap::DomainError);
    EXPECT_THROW(plyap::make_problem(1.0, a, a), plyap::DomainError);
}

TEST(Eigenvalue, DeepNegativeTailUsesTwoSidedMatching) {
    auto s = plyap::make_problem(2.0, PiecewiseWeight::constant(1.0, 1.0), PiecewiseWeight::sinusoid(1.0, 1.0, 2 * pi, 0.0, 0.0));
    auto e = plyap::eigenvalue(s, 10, Sign::plus);
    EXPECT_EQ(e.nodal_count, 11);
    EXPECT_LE(e.terminal_residual, 1e-6);
    const double ref = fd_oracle(s, 10, 4000);
    EXPECT_NEAR(e.lambda, ref, 1e-3 * ref);
}

TEST(RayleighQuotient, Sines) {
    auto s = constant_problem(2.0, pi);
    for (int k : {1, 2}) {
        std::vector<plyap::Sample> u;
        for (int i = 0; i <= 4000; ++i) {
            const double x = pi * i / 4000;
            u.push_back({x, std::sin(k * x)});
        }
        EXPECT_NEAR(plyap::rayleigh_quotient(s, u), k * k, 1e-5);
    }
}

TEST(RayleighQuotient, ReproducesEigenvalue) {
    gen::Rng r(35);
    for (int t = 0; t < 4; ++t) {
        auto s = plyap::make_problem(t < 2 ? 2.0 : 3.0, gen::positive_coefficient(r), gen::sign_changing_weight(r));
        plyap::ShootingOptions opt;
        opt.samples = 8192;
        for (int k = 1; k <= 3; ++k) {
            auto e = plyap::eigenvalue(s, k, Sign::plus, opt);
            EXPECT_NEAR(plyap::rayleigh_quotient(s, e.samples), e.lambda, 1e-4 * e.lambda);
        }
    }
}

TEST(RayleighQuotient, DegenerateDenominator) {
    auto s = plyap::make_problem(2.0, PiecewiseWeight::constant(1.0, 1.0), PiecewiseWeight::steps({0.5, 1.0}, {1.0, -1.0}));
    std::vector<plyap::Sample> u;
    for (int i = 0; i <= 100; ++i) u.push_back({i / 100.0, std::sin(pi * i / 100.0)});
    EXPECT_THROW(plyap::rayleigh_quotient(s, u), plyap::DegenerateDenominator);
}

TEST(WeylEstimate, ConstantWeights) {
    EXPECT_NEAR(plyap::weyl_estimate(constant_problem(2.0, pi), 5, Sign::plus), 25.0, 1e-9);
    const double ref = std::pow(oracle::pi_p_beta(3.0), 3.0);
    EXPECT_NEAR(plyap::weyl_estimate(constant_problem(3.0, 1.0), 1, Sign::plus), ref, 1e-8 * ref);
}

TEST(WeylEstimate, SinusoidHighIndex) {
    auto s = plyap::make_problem(2.0, PiecewiseWeight::constant(1.0, 1.0), PiecewiseWeight::sinusoid(1.0, 1.0, 2 * pi, 0.0, 0.0));
    const double est = plyap::weyl_estimate(s, 10, Sign::plus);
    const double lam = plyap::eigenvalue(s, 10, Sign::plus).lambda;
    EXPECT_NEAR(est, lam, 0.15 * lam);
    EXPECT_THROW(plyap::weyl_estimate(plyap::make_problem(2.0, PiecewiseWeight::constant(1.0, 2.0), s.rho), 1, Sign::plus),
                 plyap::DomainError);
}

} // namespace
