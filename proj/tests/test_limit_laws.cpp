#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gpmax/errors.hpp"
#include "gpmax/limit_laws.hpp"
#include "gpmax/rng.hpp"
#include "oracles.hpp"

using namespace gpmax;

namespace {

// Plain trapezoid over a wide range, independent of the library quadrature.
double mixture_trapezoid(double coef, double shift, double x)
{
    const double h = 1e-3;
    double s = 0.0;
    for (double z = -14.0; z <= 14.0; z += h)
    {
        s += oracle::gumbel_cdf(x - coef * z, shift) * std::exp(-0.5 * z * z);
    }
    return s * h / std::sqrt(2.0 * std::numbers::pi);
}

std::vector<LimitLaw> all_laws()
{
    return {LimitLaw::degenerate(0.3), LimitLaw::gumbel(0.0), LimitLaw::gumbel(std::log(0.5)), LimitLaw::normal(),
            LimitLaw::mixture(1.0, 0.0), LimitLaw::mixture(0.25, -0.4)};
}

}  // namespace

TEST(LimitCdf, Examples)
{
    EXPECT_NEAR(limit_cdf(LimitLaw::gumbel(), 0.0), 0.367879441171442, 1e-15);
    EXPECT_NEAR(limit_cdf(LimitLaw::gumbel(std::log(0.5)), 0.0), 0.606530659712633, 1e-15);
    EXPECT_DOUBLE_EQ(limit_cdf(LimitLaw::normal(), 0.0), 0.5);
    EXPECT_EQ(limit_cdf(LimitLaw::degenerate(2.0), 1.999), 0.0);
    EXPECT_EQ(limit_cdf(LimitLaw::degenerate(2.0), 2.0), 1.0);
}

TEST(LimitCdf, ShiftAlgebra)
{
    for (double p1 : {0.1, 0.5, 0.9})
    {
        for (double x : {-3.0, -0.5, 0.0, 1.0, 4.0})
        {
            EXPECT_NEAR(limit_cdf(LimitLaw::gumbel(std::log(p1)), x), std::exp(-p1 * std::exp(-x)), 1e-12);
        }
    }
}

TEST(LimitCdf, MixtureAgainstTrapezoid)
{
    for (double coef : {0.1, 1.0, 3.0})
    {
        for (double x : {-4.0, -1.0, 0.0, 2.0, 6.0})
        {
            EXPECT_NEAR(limit_cdf(LimitLaw::mixture(coef, 0.3), x), mixture_trapezoid(coef, 0.3, x), 1e-10)
                << coef << " " << x;
        }
    }
}

TEST(LimitCdf, MixtureAgainstMonteCarlo)
{
    NormalStream rng(StreamId{99, 0, 0});
    const std::size_t m = 1000000;
    std::vector<double> xs{-2.0, 0.0, 2.0};
    std::vector<std::size_t> hits(xs.size(), 0);
    for (std::size_t i = 0; i < m; ++i)
    {
        const double v = -std::log(-std::log(rng.uniform())) + rng();
        for (std::size_t k = 0; k < xs.size(); ++k)
        {
            hits[k] += v <= xs[k];
        }
    }
    for (std::size_t k = 0; k < xs.size(); ++k)
    {
        const double f = limit_cdf(LimitLaw::mixture(1.0), xs[k]);
        const double se = std::sqrt(f * (1.0 - f) / m);
        EXPECT_NEAR(double(hits[k]) / m, f, 3.0 * se) << xs[k];
    }
}

TEST(LimitCdf, MixtureDegeneracy)
{
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i)
    {
        const double x = -5.0 + 0.06 * i;
        worst = std::max(worst, std::abs(limit_cdf(LimitLaw::mixture(1e-4, 0.2), x) - limit_cdf(LimitLaw::gumbel(0.2), x)));
    }
    EXPECT_LE(worst, 1e-3);
    EXPECT_THROW(LimitLaw::mixture(0.0), DomainError);
}

TEST(LimitCdf, MonotoneWithLimits)
{
    for (const auto& law : all_laws())
    {
        double prev = 0.0;
        for (int i = 0; i < 200; ++i)
        {
            const double x = -20.0 + 40.0 * i / 199.0;
            const double f = limit_cdf(law, x);
            EXPECT_GE(f, prev - 1e-15) << to_string(law) << " x=" << x;
            EXPECT_GE(f, 0.0);
            EXPECT_LE(f, 1.0);
            prev = f;
        }
        EXPECT_LT(limit_cdf(law, -20.0), 1e-6) << to_string(law);
        EXPECT_GT(limit_cdf(law, 40.0), 1.0 - 1e-6) << to_string(law);
    }
}

TEST(LimitSample, GumbelMean)
{
    const std::size_t m = 1000000;
    const auto xs = limit_sample(LimitLaw::gumbel(), 7, m);
    double s = 0.0;
    for (double x : xs) s += x;
    EXPECT_NEAR(s / m, std::numbers::egamma, 3.0 * (std::numbers::pi / std::sqrt(6.0)) / 1e3);
}

TEST(LimitSample, Degenerate)
{
    const auto xs = limit_sample(LimitLaw::degenerate(2.0), 1, 1000);
    EXPECT_TRUE(std::all_of(xs.begin(), xs.end(), [](double x) { return x == 2.0; }));
    EXPECT_THROW(limit_sample(LimitLaw::normal(), 1, 0), DomainError);
}

TEST(LimitSample, SelfConsistentKs)
{
    const std::size_t m = 100000;
    for (const auto& law : all_laws())
    {
        if (law.kind == LimitLaw::Kind::degenerate)
        {
            continue;
        }
        const auto xs = limit_sample(law, 11, m);
        const double ks = oracle::ks_one_sample(xs, [&](double x) { return limit_cdf(law, x); });
        EXPECT_LE(ks, 1.63 / std::sqrt(double(m))) << to_string(law);
    }
    EXPECT_EQ(limit_sample(LimitLaw::gumbel(), 5, 10), limit_sample(LimitLaw::gumbel(), 5, 10));
}

TEST(LimitQuantile, Inverts)
{
    for (double p : {0.01, 0.3, 0.5, 0.9, 0.999})
    {
        EXPECT_NEAR(limit_quantile(LimitLaw::gumbel(), p), -std::log(-std::log(p)), 2e-9);
        const double q = limit_quantile(LimitLaw::mixture(0.7, 0.1), p);
        EXPECT_NEAR(limit_cdf(LimitLaw::mixture(0.7, 0.1), q), p, 1e-8);
    }
    EXPECT_NEAR(limit_quantile(LimitLaw::normal(), 0.975), 1.959963985, 2e-9);
    EXPECT_EQ(limit_quantile(LimitLaw::degenerate(3.0), 0.2), 3.0);
    EXPECT_THROW(limit_quantile(LimitLaw::normal(), 1.0), DomainError);
}

TEST(LambdaHat, WeightIdentity)
{
    EXPECT_EQ(lambda_hat_shift(DriftSet{{1.0}, {1.0}}, 0.7), 0.0);
    const DriftSet d{{1.0, 2.0, 4.0}, {0.5, 0.3, 0.2}};
    EXPECT_EQ(lambda_hat_shift(d, 0.0), 0.0);
    EXPECT_NEAR(lambda_hat_shift(d, std::numeric_limits<double>::infinity()), std::log(0.5), 1e-15);
    EXPECT_NEAR(lambda_hat_shift(d, 0.5), std::log(0.5 + 0.3 * std::exp(-0.5) + 0.2 * std::exp(-1.5)), 1e-15);
}

TEST(PredictLimit, DependentBrownianNormal)
{
    ModelSpec m;
    m.sigma0 = 0.5;
    const auto f = HorizonFamily::constant_horizon(1.0);
    const auto p = predict_limit(m, f);
    EXPECT_EQ(p.recipe.kind, NormalizerKind::b_sigma0);
    EXPECT_EQ(p.law.kind, LimitLaw::Kind::normal);
    const auto ns = p.recipe.evaluate(std::exp(12.5), m, f);
    EXPECT_DOUBLE_EQ(ns.scale, 0.5);
    EXPECT_NEAR(ns.center, seq_ab(std::exp(12.5), m, f).center, 1e-15);
}

TEST(PredictLimit, S3MixtureOnGapBoundary)
{
    ModelSpec m;
    m.H = 0.6;
    m.H0 = 0.2;
    m.sigma0 = 0.8;
    const auto p = predict_limit(m, HorizonFamily::power_log(2.5, 0.3));
    EXPECT_EQ(p.recipe.kind, NormalizerKind::b_a);
    ASSERT_EQ(p.law.kind, LimitLaw::Kind::mixture);
    EXPECT_NEAR(p.law.coef, 0.8 / 0.3, 1e-9);
    EXPECT_EQ(p.law.shift, 0.0);
}

TEST(PredictLimit, InhomogeneousLongHorizon)
{
    ModelSpec m;
    m.H = 0.6;
    m.H0 = 0.1;
    m.sigma0 = 1.0;
    m.drift = {{1.0, 2.0}, {0.25, 0.75}};
    const auto p = predict_limit(m, HorizonFamily::power_log(3.0, 1.0));
    EXPECT_EQ(p.recipe.scenario.scenario, Scenario::S5);
    EXPECT_EQ(p.recipe.kind, NormalizerKind::d_e);
    EXPECT_EQ(p.law, LimitLaw::gumbel(std::log(0.25)));
    EXPECT_EQ(p.recipe.x0, std::numeric_limits<double>::infinity());
}

TEST(PredictLimit, IndependentMaxima)
{
    ModelSpec m;
    m.drift = {{1.0, 2.0}, {0.5, 0.5}};
    auto p = predict_limit(m, HorizonFamily::power_log(4.0, 1.0));
    EXPECT_EQ(p.recipe.kind, NormalizerKind::d_e);
    EXPECT_EQ(p.law, LimitLaw::gumbel(std::log(0.5)));
    // q1 = 1/lambda at gamma = -1/(beta-H), inside S2 when H < 1/2
    m.H = 0.3;
    m.H0 = 0.3;
    p = predict_limit(m, HorizonFamily::power_log(-1.0 / 0.7, 2.0));
    EXPECT_EQ(p.recipe.kind, NormalizerKind::b_a);
    EXPECT_NEAR(p.law.shift, std::log(0.5 + 0.5 * std::exp(-0.5)), 1e-12);
    p = predict_limit(m, HorizonFamily::power_log(-2.0, 2.0));
    EXPECT_EQ(p.law, LimitLaw::gumbel(0.0));
}

TEST(PredictLimit, DegenerateS1)
{
    ModelSpec m;
    const auto p = predict_limit(m, HorizonFamily::power_log(-2.0, 4.0));
    EXPECT_EQ(p.recipe.kind, NormalizerKind::identity);
    EXPECT_EQ(p.law.kind, LimitLaw::Kind::degenerate);
    EXPECT_NEAR(p.law.point, 0.25, 1e-12);
    const auto ns = p.recipe.evaluate(1e6, m, HorizonFamily::power_log(-2.0, 4.0));
    EXPECT_EQ(ns.center, 0.0);
    EXPECT_EQ(ns.scale, 1.0);
}
