#include "gpmax/gp_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <fftw3.h>

#include "gpmax/errors.hpp"

namespace gpmax {

namespace {

// fGn autocovariance at integer lag k for unit step.
double fgn_acov(std::size_t k, double hurst)
{
    const double h2 = 2.0 * hurst;
    const double kk = static_cast<double>(k);
    if (k == 0)
    {
        return 1.0;
    }
    return 0.5 * (std::pow(kk + 1.0, h2) - 2.0 * std::pow(kk, h2) + std::pow(kk - 1.0, h2));
}

std::mutex& fftw_mutex()
{
    static std::mutex m;
    return m;
}

template <class T>
struct FftwDeleter
{
    void operator()(T* p) const { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter<T>>;

template <class T>
FftwBuffer<T> fftw_alloc(std::size_t count)
{
    auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * count));
    if (p == nullptr)
    {
        throw std::bad_alloc();
    }
    return FftwBuffer<T>(p);
}

// Square-root spectral weights for circulant embedding of size 2m.
struct Spectrum
{
    std::vector<double> weight;  // m+1 entries
    bool psd = true;
};

std::shared_ptr<const Spectrum> spectrum(double hurst, std::size_t m)
{
    static std::map<std::pair<double, std::size_t>, std::shared_ptr<const Spectrum>> cache;
    std::lock_guard<std::mutex> lock(fftw_mutex());
    const auto key = std::make_pair(hurst, m);
    if (auto it = cache.find(key); it != cache.end())
    {
        return it->second;
    }

    // Eigenvalues of the symmetric circulant with first row
    // c_0..c_m, c_{m-1}..c_1 are its DCT-I.
    auto in = fftw_alloc<double>(m + 1);
    auto out = fftw_alloc<double>(m + 1);
    for (std::size_t j = 0; j <= m; ++j)
    {
        in[j] = fgn_acov(j, hurst);
    }
    fftw_plan plan = fftw_plan_r2r_1d(static_cast<int>(m + 1), in.get(), out.get(), FFTW_REDFT00,
                                      FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    auto spec = std::make_shared<Spectrum>();
    spec->weight.resize(m + 1);
    double largest = 0.0;
    double smallest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= m; ++k)
    {
        largest = std::max(largest, std::abs(out[k]));
        smallest = std::min(smallest, out[k]);
    }
    spec->psd = smallest >= -1e-10 * largest;
    const double big_n = 2.0 * static_cast<double>(m);
    for (std::size_t k = 0; k <= m; ++k)
    {
        const double lam = std::max(out[k], 0.0);
        const bool edge = (k == 0 || k == m);
        spec->weight[k] = std::sqrt(lam / (edge ? big_n : 2.0 * big_n));
    }
    cache.emplace(key, spec);
    return spec;
}

fftw_plan c2r_plan(std::size_t big_n)
{
    static std::map<std::size_t, fftw_plan> plans;
    std::lock_guard<std::mutex> lock(fftw_mutex());
    if (auto it = plans.find(big_n); it != plans.end())
    {
        return it->second;
    }
    auto in = fftw_alloc<fftw_complex>(big_n / 2 + 1);
    auto out = fftw_alloc<double>(big_n);
    fftw_plan plan = fftw_plan_dft_c2r_1d(static_cast<int>(big_n), in.get(), out.get(), FFTW_ESTIMATE);
    plans.emplace(big_n, plan);
    return plan;
}

struct CirculantWorkspace
{
    std::size_t big_n = 0;
    FftwBuffer<fftw_complex> in;
    FftwBuffer<double> out;

    void reserve(std::size_t n)
    {
        if (n != big_n)
        {
            in = fftw_alloc<fftw_complex>(n / 2 + 1);
            out = fftw_alloc<double>(n);
            big_n = n;
        }
    }
};

void circulant_fgn(const Spectrum& spec, std::size_t m, NormalStream& normals, std::span<double> fgn)
{
    thread_local CirculantWorkspace ws;
    const std::size_t big_n = 2 * m;
    ws.reserve(big_n);
    const fftw_plan plan = c2r_plan(big_n);

    auto* in = ws.in.get();
    in[0][0] = spec.weight[0] * normals();
    in[0][1] = 0.0;
    for (std::size_t k = 1; k < m; ++k)
    {
        in[k][0] = spec.weight[k] * normals();
        in[k][1] = spec.weight[k] * normals();
    }
    in[m][0] = spec.weight[m] * normals();
    in[m][1] = 0.0;
    fftw_execute_dft_c2r(plan, in, ws.out.get());
    std::copy_n(ws.out.get(), m, fgn.begin());
}

// Lower Cholesky factor of the unit-step fBm covariance at t = 1..m.
std::shared_ptr<const Eigen::MatrixXd> cholesky_factor(double hurst, std::size_t m)
{
    static std::mutex mutex;
    static std::map<std::pair<double, std::size_t>, std::shared_ptr<const Eigen::MatrixXd>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    const auto key = std::make_pair(hurst, m);
    if (auto it = cache.find(key); it != cache.end())
    {
        return it->second;
    }
    const auto dim = static_cast<Eigen::Index>(m);
    Eigen::MatrixXd cov(dim, dim);
    for (Eigen::Index a = 0; a < dim; ++a)
    {
        for (Eigen::Index b = 0; b <= a; ++b)
        {
            const double v = fbm_cov(static_cast<double>(a + 1), static_cast<double>(b + 1), hurst);
            cov(a, b) = v;
            cov(b, a) = v;
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
    {
        throw DomainError("sample_fbm: fBm covariance is not positive definite");
    }
    auto factor = std::make_shared<const Eigen::MatrixXd>(llt.matrixL());
    cache.emplace(key, factor);
    return factor;
}

void check_hurst(double hurst)
{
    if (!(hurst > 0.0 && hurst < 1.0))
    {
        throw DomainError("hurst index must lie in (0,1)");
    }
}

}  // namespace

void validate_grid(const Grid& grid)
{
    if (grid.m < 1 || !(grid.tmax > 0.0) || !std::isfinite(grid.tmax))
    {
        throw DomainError("grid requires m >= 1 and tmax > 0");
    }
}

std::string_view to_string(SynthesisMethod m)
{
    switch (m)
    {
        case SynthesisMethod::increments: return "increments";
        case SynthesisMethod::circulant: return "circulant";
        case SynthesisMethod::cholesky: return "cholesky";
        case SynthesisMethod::deterministic: return "deterministic";
    }
    return "unknown";
}

double fbm_cov(double s, double t, double hurst)
{
    check_hurst(hurst);
    if (s < 0.0 || t < 0.0)
    {
        throw DomainError("fbm_cov: times must be nonnegative");
    }
    const double h2 = 2.0 * hurst;
    return 0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(s - t), h2));
}

SynthesisMethod sample_fbm_into(double hurst, const Grid& grid, NormalStream& normals,
                                std::span<double> out, const SynthesisOptions& opts)
{
    check_hurst(hurst);
    validate_grid(grid);
    const std::size_t m = grid.m;
    if (out.size() != m + 1)
    {
        throw DomainError("sample_fbm_into: output span must hold m+1 values");
    }
    out[0] = 0.0;
    if (opts.zero_noise)
    {
        std::fill(out.begin(), out.end(), 0.0);
        return SynthesisMethod::deterministic;
    }

    const double scale = std::pow(grid.dt(), hurst);
    if (hurst == 0.5 && !opts.force_cholesky)
    {
        double x = 0.0;
        for (std::size_t j = 1; j <= m; ++j)
        {
            x += scale * normals();
            out[j] = x;
        }
        return SynthesisMethod::increments;
    }

    std::shared_ptr<const Spectrum> spec;
    if (!opts.force_cholesky)
    {
        spec = spectrum(hurst, m);
    }
    if (spec && spec->psd)
    {
        // fGn lands in out[1..m], then accumulate in place.
        circulant_fgn(*spec, m, normals, out.subspan(1));
        double x = 0.0;
        for (std::size_t j = 1; j <= m; ++j)
        {
            x += scale * out[j];
            out[j] = x;
        }
        return SynthesisMethod::circulant;
    }

    if (m > kMaxCholesky)
    {
        throw DomainError("sample_fbm: circulant embedding failed and m exceeds the Cholesky limit");
    }
    const auto factor = cholesky_factor(hurst, m);
    Eigen::VectorXd z(static_cast<Eigen::Index>(m));
    for (Eigen::Index a = 0; a < z.size(); ++a)
    {
        z[a] = normals();
    }
    const Eigen::VectorXd x = factor->triangularView<Eigen::Lower>() * z;
    for (std::size_t j = 1; j <= m; ++j)
    {
        out[j] = scale * x[static_cast<Eigen::Index>(j - 1)];
    }
    return SynthesisMethod::cholesky;
}

Path sample_fbm(double hurst, const Grid& grid, const StreamId& stream, const SynthesisOptions& opts)
{
    validate_grid(grid);
    Path p{grid, std::vector<double>(grid.points()), SynthesisMethod::increments};
    NormalStream normals(stream);
    p.method = sample_fbm_into(hurst, grid, normals, p.values, opts);
    return p;
}

namespace {

// sigma0 X(t_j) - c_k t_j^beta for every drift block k.
std::vector<std::vector<double>> replica_baselines(const ModelSpec& model, const Grid& grid,
                                                   const StreamId& replica, const SynthesisOptions& opts)
{
    const std::size_t pts = grid.points();
    std::vector<double> common(pts, 0.0);
    if (model.sigma0 > 0.0)
    {
        NormalStream normals(replica.with_component(0));
        sample_fbm_into(model.H0, grid, normals, common, opts);
    }
    std::vector<std::vector<double>> base(model.drift.size(), std::vector<double>(pts));
    for (std::size_t j = 0; j < pts; ++j)
    {
        const double tb = std::pow(grid.time(j), model.beta);
        for (std::size_t k = 0; k < base.size(); ++k)
        {
            base[k][j] = model.sigma0 * common[j] - model.drift.values[k] * tb;
        }
    }
    return base;
}

void check_replica_inputs(const ModelSpec& model, std::size_t n, const Grid& grid)
{
    validate_model(model);
    validate_grid(grid);
    if (n < 1)
    {
        throw DomainError("number of component processes must be at least 1");
    }
}

}  // namespace

std::vector<Path> assemble_model_paths(const ModelSpec& model, std::size_t n, const Grid& grid,
                                       const StreamId& replica, const SynthesisOptions& opts)
{
    check_replica_inputs(model, n, grid);
    const auto base = replica_baselines(model, grid, replica, opts);
    const auto counts = allocate_counts(model.drift, n);

    std::vector<Path> paths;
    paths.reserve(n);
    std::size_t index = 0;
    for (std::size_t kk = 0; kk < counts.size(); ++kk)
    {
        const std::size_t k = opts.reverse_blocks ? counts.size() - 1 - kk : kk;
        for (std::size_t r = 0; r < counts[k]; ++r, ++index)
        {
            Path p{grid, std::vector<double>(grid.points()), SynthesisMethod::increments};
            NormalStream normals(replica.with_component(static_cast<std::uint32_t>(index + 1)));
            p.method = sample_fbm_into(model.H, grid, normals, p.values, opts);
            for (std::size_t j = 0; j < p.values.size(); ++j)
            {
                p.values[j] += base[k][j];
            }
            paths.push_back(std::move(p));
        }
    }
    return paths;
}

double path_supremum(const Path& p)
{
    return *std::max_element(p.values.begin(), p.values.end());
}

void replica_suprema(const ModelSpec& model, std::size_t n, const Grid& grid, const StreamId& replica,
                     std::span<double> sups, std::span<double> half_mesh, const SynthesisOptions& opts)
{
    check_replica_inputs(model, n, grid);
    if (sups.size() != n || (!half_mesh.empty() && half_mesh.size() != n))
    {
        throw DomainError("replica_suprema: output spans must hold n values");
    }
    const auto base = replica_baselines(model, grid, replica, opts);
    const auto counts = allocate_counts(model.drift, n);
    std::vector<double> buf(grid.points());
    const std::size_t pts = buf.size();

    std::size_t index = 0;
    for (std::size_t kk = 0; kk < counts.size(); ++kk)
    {
        const std::size_t k = opts.reverse_blocks ? counts.size() - 1 - kk : kk;
        const double* b = base[k].data();
        for (std::size_t r = 0; r < counts[k]; ++r, ++index)
        {
            NormalStream normals(replica.with_component(static_cast<std::uint32_t>(index + 1)));
            sample_fbm_into(model.H, grid, normals, buf, opts);
            double even = -std::numeric_limits<double>::infinity();
            double odd = even;
            std::size_t j = 0;
            for (; j + 1 < pts; j += 2)
            {
                even = std::max(even, buf[j] + b[j]);
                odd = std::max(odd, buf[j + 1] + b[j + 1]);
            }
            if (j < pts)
            {
                even = std::max(even, buf[j] + b[j]);
            }
            sups[index] = std::max(even, odd);
            if (!half_mesh.empty())
            {
                half_mesh[index] = even;
            }
        }
    }
}

}  // namespace gpmax
