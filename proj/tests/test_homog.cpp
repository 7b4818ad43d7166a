#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "plyap/homog.hpp"
#include "support/oracles.hpp"

namespace {

using plyap::PiecewiseWeight;
using plyap::Sign;
constexpr double pi = std::numbers::pi;

PiecewiseWeight sinus(double offset) { return PiecewiseWeight::sinusoid(1.0, 1.0, 2 * pi, 0.0, offset); }

plyap::SweepConfig config(double p, PiecewiseWeight a, PiecewiseWeight rho, std::vector<double> eps,
                          plyap::SignSelection sign = plyap::SignSelection::plus) {
    plyap::SweepConfig cfg(plyap::make_problem(p, std::move(a), std::move(rho)));
    cfg.epsilons = std::move(eps);
    cfg.sign = sign;
    return cfg;
}

TEST(LimitEigenvalue, Examples) {
    EXPECT_NEAR(plyap::limit_eigenvalue(1.0, 1.0, 2.0, pi, 1), 1.0, 1e-12);
    EXPECT_NEAR(plyap::limit_eigenvalue(1.6, 0.5, 2.0, 1.0, 1), 3.2 * pi * pi, 1e-10);
    const double pi3 = oracle::pi_p_beta(3.0);
    EXPECT_NEAR(plyap::limit_eigenvalue(1.0, 1.0, 3.0, 1.0, 2), std::pow(2 * pi3, 3), 1e-8);
    EXPECT_NEAR(std::pow(2 * pi3, 3), 226.3, 0.1);
    EXPECT_THROW(plyap::limit_eigenvalue(1.0, 0.0, 2.0, 1.0, 1), plyap::NoEigenvalue);
    EXPECT_THROW(plyap::limit_eigenvalue(1.0, -1.0, 2.0, 1.0, 1), plyap::DomainError);
}

TEST(LimitEigenvalue, MatchesShootingOnLimitProblem) {
    auto s = plyap::make_problem(2.0, PiecewiseWeight::constant(1.0, 1.6), PiecewiseWeight::constant(1.0, 0.5));
    EXPECT_NEAR(plyap::eigenvalue(s, 1, Sign::plus).lambda, plyap::limit_eigenvalue(1.6, 0.5, 2.0, 1.0, 1), 1e-6 * 31.58);
}

TEST(EffectiveCoefficient, StepAndConstant) {
    EXPECT_NEAR(plyap::effective_coefficient(PiecewiseWeight::steps({0.5, 1.0}, {1.0, 4.0}), 2.0), 1.6, 1e-12);
    EXPECT_NEAR(plyap::effective_coefficient(PiecewiseWeight::constant(3.0, 2.0), 3.0), 2.0, 1e-12);
}

TEST(DivergenceLowerBound, Examples) {
    const auto a = PiecewiseWeight::constant(1.0, 1.0);
    const double b = plyap::divergence_lower_bound(0.125, 1, 2.0, a, sinus(0.0));
    EXPECT_NEAR(b, pi / (4 * 0.125), 1e-12);
    EXPECT_NEAR(b, 6.283, 1e-3);
    EXPECT_NEAR(plyap::divergence_lower_bound(0.0625, 1, 2.0, a, sinus(0.0)), 2 * b, 1e-12);
    const double k1 = plyap::divergence_lower_bound(0.125, 1, 3.0, a, sinus(0.0));
    EXPECT_NEAR(plyap::divergence_lower_bound(0.125, 2, 3.0, a, sinus(0.0)), 4 * k1, 1e-12);
}

TEST(ComparisonShiftBound, Examples) {
    const auto a = PiecewiseWeight::constant(1.0, 1.0);
    EXPECT_NEAR(plyap::comparison_shift_bound(0.125, 1, 2.0, a, sinus(-0.25)),
                plyap::divergence_lower_bound(0.125, 1, 2.0, a, sinus(0.0)), 1e-10);
    EXPECT_TRUE(std::isinf(plyap::comparison_shift_bound(0.125, 1, 2.0, a, PiecewiseWeight::constant(1.0, -1.0))));
    EXPECT_THROW(plyap::comparison_shift_bound(0.125, 1, 2.0, a, sinus(0.25)), plyap::DomainError);

    for (double eps : {0.125, 0.0625}) {
        auto cfg = config(2.0, a, sinus(-0.25), {eps});
        auto res = plyap::sweep(cfg);
        ASSERT_FALSE(res.rows[0].failed) << res.rows[0].error;
        EXPECT_GE(res.rows[0].lambda, res.rows[0].lower_bound);
    }
}

TEST(TestFunctionBound, Examples) {
    EXPECT_NEAR(plyap::test_function_upper_bound(1, 2.0, 1.0, 0.25, 1.0, 0.5), 256.0, 1e-10);
    double prev = INFINITY;
    for (double h : {0.05, 0.1, 0.2, 0.3, 0.4, 0.49}) {
        const double b = plyap::test_function_upper_bound(1, 2.0, 1.0, h, 1.0, 0.5);
        EXPECT_LT(b, prev);
        prev = b;
    }
    EXPECT_THROW(plyap::test_function_upper_bound(1, 2.0, 1.0, 0.5, 1.0, 0.5), plyap::DomainError);
    EXPECT_NEAR(plyap::printed_upper_bound(1, 2.0, 1.0, 0.5), 16.0, 1e-12);
}

TEST(Sweep, TriviallyPeriodicIsExact) {
    auto cfg = config(2.0, PiecewiseWeight::constant(1.0, 1.0), PiecewiseWeight::constant(1.0, 1.0), {0.5, 0.25, 0.125});
    auto res = plyap::sweep(cfg);
    for (const auto& r : res.rows) EXPECT_NEAR(r.lambda, pi * pi, 1e-8 * pi * pi);
    ASSERT_EQ(res.ladders.size(), 1u);
    EXPECT_EQ(res.ladders[0].observed, "converges");
    EXPECT_TRUE(res.ladders[0].consistent);
    EXPECT_LT(res.ladders[0].final_relative_error, 1e-8);
}

TEST(Sweep, ZeroMeanDiverges) {
    auto cfg = config(2.0, PiecewiseWeight::constant(1.0, 1.0), sinus(0.0), {0.25, 0.125, 0.0625, 0.03125},
                      plyap::SignSelection::both);
    auto res = plyap::sweep(cfg);
    EXPECT_EQ(res.mean, 0.0);
    double prev = 0.0;
    for (const auto& r : res.rows) {
        ASSERT_FALSE(r.failed) << r.error;
        EXPECT_GE(std::abs(r.lambda), r.lower_bound);
        EXPECT_TRUE(std::isnan(r.limit));
        EXPECT_TRUE(std::isinf(r.upper_bound));
        // eps-scaled values stay above the eps-free constant 1 / (2 * 2/pi)
        EXPECT_GE(std::abs(r.lambda) * r.epsilon, pi / 4.0 * 0.95);
        if (r.sign == Sign::plus) {
            EXPECT_GT(r.lambda, prev);
            prev = r.lambda;
        }
    }
    for (const auto& l : res.ladders) {
        EXPECT_EQ(l.observed, "diverges");
        EXPECT_TRUE(l.consistent);
    }
}

TEST(Sweep, PositiveMeanConverges) {
    auto cfg = config(2.0, PiecewiseWeight::constant(1.0, 1.0), sinus(0.5), {0.25, 0.125, 0.0625, 0.03125},
                      plyap::SignSelection::both);
    auto res = plyap::sweep(cfg);
    EXPECT_NEAR(res.mean, 0.5, 1e-14);
    for (const auto& r : res.rows) {
        ASSERT_FALSE(r.failed) << r.error;
        EXPECT_GE(std::abs(r.lambda), r.lower_bound);
        if (r.sign == Sign::plus) {
            EXPECT_NEAR(r.limit, 2 * pi * pi, 1e-9);
            EXPECT_LE(r.lambda, r.minmax_upper_bound * (1 + 1e-9));
            if (std::isfinite(r.upper_bound)) { EXPECT_LE(r.lambda, r.upper_bound); }
            EXPECT_DOUBLE_EQ(r.printed_upper_bound, 16.0);
        }
    }
    ASSERT_EQ(res.ladders.size(), 2u);
    EXPECT_EQ(res.ladders[0].expected, plyap::Classification::converges);
    EXPECT_EQ(res.ladders[0].observed, "converges");
    EXPECT_TRUE(res.ladders[0].monotone_tail);
    EXPECT_LT(res.ladders[0].final_relative_error, 0.02);
    EXPECT_TRUE(std::isfinite(res.ladders[0].rate));
    EXPECT_EQ(res.ladders[1].expected, plyap::Classification::diverges_minus);
    EXPECT_EQ(res.ladders[1].observed, "diverges");
}

TEST(Sweep, UpperBoundHoldsAtEpsOneThirtySecond) {
    auto cfg = config(2.0, PiecewiseWeight::constant(1.0, 1.0), sinus(0.5), {0.03125});
    auto res = plyap::sweep(cfg);
    EXPECT_LE(res.rows[0].lambda, 256.0);
    EXPECT_DOUBLE_EQ(res.rows[0].upper_bound, 256.0);
}

TEST(Sweep, NegativeMeanPositiveLadderHasNoMinusEigenvalueIssue) {
    auto cfg = config(2.0, PiecewiseWeight::constant(1.0, 1.0), PiecewiseWeight::constant(1.0, -1.0), {0.5});
    auto res = plyap::sweep(cfg);
    ASSERT_EQ(res.rows.size(), 1u);
    EXPECT_TRUE(res.rows[0].failed);
    EXPECT_TRUE(std::isinf(res.rows[0].lower_bound));
}

TEST(Sweep, RowsOrderedDeterministically) {
    auto cfg = config(2.0, PiecewiseWeight::constant(1.0, 1.0), sinus(0.3), {0.5, 0.25}, plyap::SignSelection::both);
    cfg.k_list = {1, 2};
    cfg.threads = 3;
    auto res = plyap::sweep(cfg);
    ASSERT_EQ(res.rows.size(), 8u);
    std::size_t i = 0;
    for (double eps : {0.5, 0.25})
        for (int k : {1, 2})
            for (Sign s : {Sign::plus, Sign::minus}) {
                EXPECT_EQ(res.rows[i].epsilon, eps);
                EXPECT_EQ(res.rows[i].k, k);
                EXPECT_EQ(res.rows[i].sign, s);
                ++i;
            }
    cfg.threads = 1;
    auto serial = plyap::sweep(cfg);
    for (std::size_t j = 0; j < res.rows.size(); ++j) EXPECT_EQ(serial.rows[j].lambda, res.rows[j].lambda);
}

TEST(SweepConfig, Validation) {
    auto cfg = config(2.0, PiecewiseWeight::constant(1.0, 1.0), sinus(0.0), {0.25, 0.5});
    EXPECT_THROW(cfg.validate(), plyap::DomainError);
    cfg.epsilons = {0.25};
    cfg.k_list = {0};
    EXPECT_THROW(cfg.validate(), plyap::DomainError);
    cfg.k_list = {1};
    cfg.epsilons = {1e-4};
    cfg.segment_cap = 100;
    EXPECT_THROW(cfg.validate(), plyap::ResourceError);
}

TEST(FitRate, PowerLaw) {
    std::vector<double> eps{0.25, 0.125, 0.0625}, err;
    for (double e : eps) err.push_back(3.0 * e * e);
    EXPECT_NEAR(plyap::fit_rate(eps, err), 2.0, 1e-12);
    EXPECT_TRUE(std::isnan(plyap::fit_rate({0.5}, {1.0})));
}

} // namespace
