#include "gpmax/mc_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "gpmax/errors.hpp"
#include "gpmax/rng.hpp"

namespace gpmax {

namespace {

bool power_of_two(std::size_t m)
{
    return m >= 2 && (m & (m - 1)) == 0;
}

std::vector<double> normalize(const std::vector<double>& raw, const NormalizerSet& ns)
{
    std::vector<double> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
    {
        out[i] = (raw[i] - ns.center) / ns.scale;
    }
    return out;
}

}  // namespace

void validate_sim_config(const SimConfig& cfg)
{
    validate_model(cfg.model);
    validate_family(cfg.family);
    std::vector<std::string> bad;
    if (cfg.n < 1)
    {
        bad.push_back("n must be at least 1");
    }
    if (cfg.replicas < 1)
    {
        bad.push_back("replicas must be at least 1");
    }
    if (!power_of_two(cfg.grid_m))
    {
        bad.push_back("grid_m must be a power of two >= 2");
    }
    if (cfg.normalize_at && !(*cfg.normalize_at >= 3.0))
    {
        bad.push_back("normalize_at must be >= 3");
    }
    if (!bad.empty())
    {
        throw ValidationError(bad);
    }
}

SimResult simulate_maxima(const SimConfig& cfg, const ConstantProvider& constants)
{
    validate_sim_config(cfg);
    SimResult res;
    res.horizon = horizon(cfg.family, static_cast<double>(cfg.n), cfg.model);
    res.prediction = predict_limit(cfg.model, cfg.family);
    const double at = cfg.normalize_at.value_or(static_cast<double>(cfg.n));
    res.recipe_used = res.prediction.recipe.evaluate(at, cfg.model, cfg.family, constants);
    if (!(res.recipe_used.scale > 0.0) || !std::isfinite(res.recipe_used.center))
    {
        throw DomainError("normalizing recipe produced a non-positive scale or non-finite center");
    }

    const Grid grid{res.horizon, cfg.grid_m};
    // Surface grid/model errors before spawning workers.
    {
        std::vector<double> probe(cfg.n);
        replica_suprema(cfg.model, cfg.n, Grid{res.horizon, 2}, StreamId{cfg.seed, 0, 0}, probe, {}, cfg.synthesis);
    }

    res.raw.assign(cfg.replicas, 0.0);
    res.raw_half_mesh.assign(cfg.replicas, 0.0);
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::size_t failed_replica = 0;

    auto worker = [&]() {
        std::vector<double> sups(cfg.n);
        std::vector<double> half(cfg.n);
        for (;;)
        {
            const std::size_t r = next.fetch_add(1);
            if (r >= cfg.replicas)
            {
                return;
            }
            try
            {
                replica_suprema(cfg.model, cfg.n, grid, StreamId{cfg.seed, r, 0}, sups, half, cfg.synthesis);
            }
            catch (...)
            {
                std::lock_guard lock(err_mutex);
                if (!first_error)
                {
                    first_error = std::current_exception();
                    failed_replica = r;
                }
                next.store(cfg.replicas);
                return;
            }
            res.raw[r] = *std::max_element(sups.begin(), sups.end());
            res.raw_half_mesh[r] = *std::max_element(half.begin(), half.end());
        }
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cfg.replicas)));
    if (threads == 1)
    {
        worker();
    }
    else
    {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
        {
            pool.emplace_back(worker);
        }
        for (auto& th : pool)
        {
            th.join();
        }
    }
    if (first_error)
    {
        try
        {
            std::rethrow_exception(first_error);
        }
        catch (const std::exception& e)
        {
            std::ostringstream os;
            os << "replica " << failed_replica << " (seed " << cfg.seed << ", n " << cfg.n << ", grid_m "
               << cfg.grid_m << ", T " << res.horizon << "): " << e.what();
            throw DomainError(os.str());
        }
    }

    res.normalized = normalize(res.raw, res.recipe_used);
    res.normalized_half_mesh = normalize(res.raw_half_mesh, res.recipe_used);
    res.ecdf = res.normalized;
    std::sort(res.ecdf.begin(), res.ecdf.end());
    return res;
}

SimResult independent_maxima(const SimConfig& cfg, const ConstantProvider& constants)
{
    SimConfig c = cfg;
    c.model.sigma0 = 0.0;
    return simulate_maxima(c, constants);
}

GofReport gof(std::span<const double> sample, const LimitLaw& law)
{
    if (sample.size() < 100)
    {
        throw DomainError("goodness of fit needs at least 100 points");
    }
    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    const std::size_t m = x.size();
    const double dm = static_cast<double>(m);
    std::vector<double> F(m);
    for (std::size_t i = 0; i < m; ++i)
    {
        F[i] = limit_cdf(law, x[i]);
    }
    GofReport rep;
    rep.sample_size = m;
    for (std::size_t i = 0; i < m; ++i)
    {
        rep.ks = std::max({rep.ks, (i + 1) / dm - F[i], F[i] - i / dm});
    }
    constexpr double kEps = 1e-300;
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i)
    {
        const double lo = std::max(F[i], kEps);
        const double hi = std::max(1.0 - F[m - 1 - i], kEps);
        s += (2.0 * i + 1.0) * (std::log(lo) + std::log(hi));
    }
    rep.ad = std::max(0.0, -dm - s / dm);
    return rep;
}

double ks_two_sample(std::span<const double> a_in, std::span<const double> b_in)
{
    if (a_in.empty() || b_in.empty())
    {
        throw DomainError("two-sample KS needs non-empty samples");
    }
    std::vector<double> a(a_in.begin(), a_in.end());
    std::vector<double> b(b_in.begin(), b_in.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size())
    {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    return d;
}

double ks_band(std::size_t m)
{
    return 1.358 / std::sqrt(static_cast<double>(m));
}

double ks_two_sample_band(std::size_t m1, std::size_t m2)
{
    const double a = static_cast<double>(m1);
    const double b = static_cast<double>(m2);
    return 1.358 * std::sqrt((a + b) / (a * b));
}

double bootstrap_ks_stderr(std::span<const double> sample, const LimitLaw& law, std::size_t resamples,
                           std::uint64_t seed)
{
    if (resamples < 2)
    {
        throw DomainError("bootstrap needs at least 2 resamples");
    }
    const std::size_t m = sample.size();
    std::vector<double> ks(resamples);
    std::vector<double> draw(m);
    for (std::size_t b = 0; b < resamples; ++b)
    {
        StreamEngine eng(StreamId{seed, b, 0});
        for (auto& x : draw)
        {
            x = sample[eng() % m];
        }
        ks[b] = gof(draw, law).ks;
    }
    double mean = 0.0;
    for (double v : ks) mean += v;
    mean /= static_cast<double>(resamples);
    double var = 0.0;
    for (double v : ks) var += (v - mean) * (v - mean);
    return std::sqrt(var / static_cast<double>(resamples - 1));
}

std::vector<SweepRow> convergence_sweep(const ModelSpec& model, const HorizonFamily& family,
                                        const std::vector<std::size_t>& ns, std::size_t replicas,
                                        std::size_t grid_m, std::uint64_t seed, unsigned threads,
                                        const ConstantProvider& constants)
{
    if (!std::is_sorted(ns.begin(), ns.end()) || std::adjacent_find(ns.begin(), ns.end()) != ns.end())
    {
        throw DomainError("sweep n-list must be strictly increasing");
    }
    std::vector<SweepRow> rows;
    for (std::size_t n : ns)
    {
        SimConfig cfg;
        cfg.model = model;
        cfg.family = family;
        cfg.n = n;
        cfg.replicas = replicas;
        cfg.grid_m = grid_m;
        cfg.seed = seed + n;
        cfg.threads = threads;
        const SimResult r = simulate_maxima(cfg, constants);
        const GofReport g = gof(r.normalized, r.prediction.law);
        rows.push_back({n, g.ks, g.ad, r.recipe_used.center, r.recipe_used.scale});
    }
    return rows;
}

}  // namespace gpmax
