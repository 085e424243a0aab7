#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gpmax/errors.hpp"
#include "gpmax/gp_synthesis.hpp"
#include "oracles.hpp"

using namespace gpmax;

TEST(FbmCov, Examples)
{
    EXPECT_DOUBLE_EQ(fbm_cov(1, 1, 0.5), 1.0);
    EXPECT_DOUBLE_EQ(fbm_cov(1, 2, 0.5), 1.0);
    for (double h : {0.1, 0.3, 0.7, 0.95})
    {
        EXPECT_DOUBLE_EQ(fbm_cov(1, 1, h), 1.0);
    }
    EXPECT_THROW(fbm_cov(-1, 1, 0.5), DomainError);
    EXPECT_THROW(fbm_cov(1, 1, 1.0), DomainError);
    EXPECT_THROW(fbm_cov(1, 1, 0.0), DomainError);
}

TEST(Grid, Validation)
{
    EXPECT_THROW(validate_grid({1.0, 0}), DomainError);
    EXPECT_THROW(validate_grid({0.0, 4}), DomainError);
    const Grid g{2.0, 4};
    EXPECT_EQ(g.points(), 5u);
    EXPECT_DOUBLE_EQ(g.time(4), 2.0);
    EXPECT_DOUBLE_EQ(g.dt(), 0.5);
}

TEST(SampleFbm, StartsAtZeroAndReportsMethod)
{
    for (double h : {0.2, 0.5, 0.8})
    {
        const auto p = sample_fbm(h, {3.0, 64}, {1, 0, 0});
        EXPECT_EQ(p.values.size(), 65u);
        EXPECT_EQ(p.values[0], 0.0);
        EXPECT_EQ(p.method, h == 0.5 ? SynthesisMethod::increments : SynthesisMethod::circulant);
    }
    SynthesisOptions chol;
    chol.force_cholesky = true;
    EXPECT_EQ(sample_fbm(0.3, {1.0, 16}, {1, 0, 0}, chol).method, SynthesisMethod::cholesky);
    chol.zero_noise = false;
}

TEST(SampleFbm, ForcedCholeskyRespectsLimit)
{
    SynthesisOptions chol;
    chol.force_cholesky = true;
    EXPECT_THROW(sample_fbm(0.3, {1.0, kMaxCholesky + 1}, {1, 0, 0}, chol), DomainError);
}

TEST(SampleFbm, VarianceAtOne)
{
    const int reps = 10000;
    for (double h : {0.3, 0.5, 0.7})
    {
        double s2 = 0;
        for (int r = 0; r < reps; ++r)
        {
            const auto p = sample_fbm(h, {1.0, 32}, {2024, std::uint64_t(r), 0});
            s2 += p.values.back() * p.values.back();
        }
        EXPECT_NEAR(s2 / reps, 1.0, 3.0 * std::sqrt(2.0 / reps)) << "H=" << h;
    }
}

TEST(SampleFbm, BrownianIncrementsUncorrelated)
{
    const int reps = 10000;
    double sxy = 0, sxx = 0, syy = 0;
    for (int r = 0; r < reps; ++r)
    {
        const auto p = sample_fbm(0.5, {1.0, 2}, {99, std::uint64_t(r), 3});
        const double a = p.values[1] - p.values[0];
        const double b = p.values[2] - p.values[1];
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    EXPECT_NEAR(sxy / std::sqrt(sxx * syy), 0.0, 3.0 / std::sqrt(reps));
}

namespace {

void check_covariance(double h, const SynthesisOptions& opts)
{
    const int reps = 20000;
    const Grid g{1.0, 7};  // 8 points
    const std::size_t k = g.points();
    std::vector<double> s(k * k, 0.0), s4(k * k, 0.0);
    for (int r = 0; r < reps; ++r)
    {
        const auto p = sample_fbm(h, g, {5, std::uint64_t(r), 1}, opts);
        for (std::size_t a = 0; a < k; ++a)
        {
            for (std::size_t b = 0; b < k; ++b)
            {
                const double v = p.values[a] * p.values[b];
                s[a * k + b] += v;
                s4[a * k + b] += v * v;
            }
        }
    }
    for (std::size_t a = 1; a < k; ++a)
    {
        for (std::size_t b = 1; b < k; ++b)
        {
            const double mean = s[a * k + b] / reps;
            const double var = s4[a * k + b] / reps - mean * mean;
            const double se = std::sqrt(var / reps);
            EXPECT_NEAR(mean, fbm_cov(g.time(a), g.time(b), h), 5.0 * se)
                << "H=" << h << " entry " << a << "," << b;
        }
    }
}

}  // namespace

TEST(SampleFbm, CovarianceMatrixCirculant)
{
    for (double h : {0.3, 0.5, 0.7})
    {
        check_covariance(h, {});
    }
}

TEST(SampleFbm, CovarianceMatrixCholesky)
{
    SynthesisOptions chol;
    chol.force_cholesky = true;
    for (double h : {0.3, 0.7})
    {
        check_covariance(h, chol);
    }
}

TEST(SampleFbm, SelfSimilarity)
{
    const int reps = 10000;
    for (double h : {0.3, 0.5, 0.7})
    {
        std::vector<double> a, b;
        for (int r = 0; r < reps; ++r)
        {
            a.push_back(path_supremum(sample_fbm(h, {2.0, 128}, {10, std::uint64_t(r), 0})));
            b.push_back(std::pow(2.0, h) *
                        path_supremum(sample_fbm(h, {1.0, 128}, {20, std::uint64_t(r), 0})));
        }
        EXPECT_LE(oracle::ks_two_sample(a, b), 0.05) << "H=" << h;
    }
}

TEST(SampleFbm, Deterministic)
{
    for (double h : {0.35, 0.5})
    {
        const auto a = sample_fbm(h, {4.0, 1000}, {3, 17, 5});
        const auto b = sample_fbm(h, {4.0, 1000}, {3, 17, 5});
        EXPECT_EQ(a.values, b.values);
        const auto c = sample_fbm(h, {4.0, 1000}, {3, 18, 5});
        EXPECT_NE(a.values, c.values);
    }
}

TEST(SampleFbm, BrownianHorizonNesting)
{
    // Same step, doubled horizon: the first half is the shorter path.
    const auto a = sample_fbm(0.5, {1.0, 50}, {8, 2, 1});
    const auto b = sample_fbm(0.5, {2.0, 100}, {8, 2, 1});
    for (std::size_t j = 0; j < a.values.size(); ++j)
    {
        EXPECT_EQ(a.values[j], b.values[j]);
    }
}

TEST(SampleFbm, SingleIntervalGrid)
{
    const auto p = sample_fbm(0.3, {1.0, 1}, {1, 1, 1});
    EXPECT_EQ(p.values.size(), 2u);
    EXPECT_EQ(p.values[0], 0.0);
}

TEST(PathSupremum, Examples)
{
    EXPECT_EQ(path_supremum({{1.0, 2}, {0.0, -1.0, -2.0}}), 0.0);
    EXPECT_EQ(path_supremum({{1.0, 2}, {0.0, 3.0, 1.0}}), 3.0);

    ModelSpec m;
    SynthesisOptions zero;
    zero.zero_noise = true;
    const auto paths = assemble_model_paths(m, 1, {1.0, 4}, {1, 0, 0}, zero);
    EXPECT_EQ(path_supremum(paths.front()), 0.0);
}

TEST(AssembleModelPaths, ZeroNoiseGivesTrend)
{
    ModelSpec m;
    m.sigma0 = 0.7;
    m.beta = 1.5;
    m.drift = {{0.5, 2.0}, {0.5, 0.5}};
    SynthesisOptions zero;
    zero.zero_noise = true;
    const Grid g{3.0, 6};
    const auto paths = assemble_model_paths(m, 4, g, {1, 0, 0}, zero);
    const auto counts = allocate_counts(m.drift, 4);
    ASSERT_EQ(paths.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i)
    {
        const double c = i < counts[0] ? 0.5 : 2.0;
        for (std::size_t j = 0; j < g.points(); ++j)
        {
            EXPECT_DOUBLE_EQ(paths[i].values[j], -c * std::pow(g.time(j), 1.5));
        }
        EXPECT_EQ(paths[i].method, SynthesisMethod::deterministic);
    }
}

TEST(AssembleModelPaths, SinglePathMatchesDefinition)
{
    ModelSpec m;
    m.H = 0.3;
    m.H0 = 0.7;
    m.sigma0 = 0.5;
    m.beta = 1.2;
    m.drift = {{1.3}, {1.0}};
    const Grid g{2.0, 16};
    const StreamId rep{42, 9, 0};
    const auto paths = assemble_model_paths(m, 1, g, rep);
    const auto xi = sample_fbm(m.H, g, rep.with_component(1));
    const auto x = sample_fbm(m.H0, g, rep.with_component(0));
    for (std::size_t j = 0; j < g.points(); ++j)
    {
        const double want = xi.values[j] + m.sigma0 * x.values[j] - 1.3 * std::pow(g.time(j), m.beta);
        EXPECT_NEAR(paths[0].values[j], want, 1e-14);
    }
}

TEST(AssembleModelPaths, IndependentWithoutCommonComponent)
{
    ModelSpec m;
    m.sigma0 = 0.0;
    const int reps = 5000;
    double sxy = 0, sx = 0, sy = 0, sxx = 0, syy = 0;
    for (int r = 0; r < reps; ++r)
    {
        const auto p = assemble_model_paths(m, 2, {1.0, 32}, {3, std::uint64_t(r), 0});
        const double a = path_supremum(p[0]);
        const double b = path_supremum(p[1]);
        sx += a, sy += b, sxy += a * b, sxx += a * a, syy += b * b;
    }
    const double cov = sxy / reps - sx / reps * sy / reps;
    const double corr = cov / std::sqrt((sxx / reps - sx * sx / reps / reps) * (syy / reps - sy * sy / reps / reps));
    EXPECT_NEAR(corr, 0.0, 4.0 / std::sqrt(reps));
}

TEST(ReplicaSuprema, MatchesAssembledPaths)
{
    ModelSpec m;
    m.H = 0.4;
    m.H0 = 0.6;
    m.sigma0 = 0.8;
    m.drift = {{1.0, 3.0}, {0.6, 0.4}};
    const Grid g{5.0, 40};
    const StreamId rep{7, 123, 0};
    const std::size_t n = 7;
    const auto paths = assemble_model_paths(m, n, g, rep);
    std::vector<double> sups(n), half(n);
    replica_suprema(m, n, g, rep, sups, half);
    for (std::size_t i = 0; i < n; ++i)
    {
        EXPECT_NEAR(sups[i], path_supremum(paths[i]), 1e-13);
        double even = paths[i].values[0];
        for (std::size_t j = 0; j < g.points(); j += 2)
        {
            even = std::max(even, paths[i].values[j]);
        }
        EXPECT_NEAR(half[i], even, 1e-13);
        EXPECT_LE(half[i], sups[i]);
    }
}

TEST(ReplicaSuprema, BrownianDriftTail)
{
    // Grid sup on a fine mesh approaches the exact Brownian drift identity from below.
    ModelSpec m;
    const int reps = 20000;
    const double u = 1.0;
    int hits = 0;
    std::vector<double> s(1);
    for (int r = 0; r < reps; ++r)
    {
        replica_suprema(m, 1, {2.0, 4096}, {77, std::uint64_t(r), 0}, s);
        hits += s[0] > u;
    }
    const double p = oracle::brownian_drift_sup_sf(u, 1.0, 2.0);
    const double phat = double(hits) / reps;
    EXPECT_LE(phat, p + 3.0 * std::sqrt(p * (1 - p) / reps));
    EXPECT_GE(phat, p - 0.02 - 3.0 * std::sqrt(p * (1 - p) / reps));
}

TEST(ReplicaSuprema, RejectsBadInputs)
{
    ModelSpec m;
    std::vector<double> s(2);
    EXPECT_THROW(replica_suprema(m, 3, {1.0, 4}, {}, s), DomainError);
    m.beta = 0.1;
    EXPECT_THROW(replica_suprema(m, 2, {1.0, 4}, {}, s), ValidationError);
}
