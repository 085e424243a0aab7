#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gpmax/gp_synthesis.hpp"
#include "gpmax/horizons.hpp"
#include "gpmax/limit_laws.hpp"
#include "gpmax/model.hpp"

namespace gpmax {

struct SimConfig
{
    ModelSpec model;
    HorizonFamily family;
    std::size_t n = 1000;
    std::size_t replicas = 2000;
    std::size_t grid_m = 4096;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    //! Index at which the normalizing recipe is evaluated; defaults to n.
    std::optional<double> normalize_at;
    SynthesisOptions synthesis;
};

//! Throws DomainError unless n >= 1, replicas >= 1 and grid_m is a power of two >= 2.
void validate_sim_config(const SimConfig& cfg);

struct SimResult
{
    std::vector<double> raw;
    std::vector<double> normalized;
    //! Same replicas observed on every other grid point (grid_m / 2 intervals).
    std::vector<double> raw_half_mesh;
    std::vector<double> normalized_half_mesh;
    NormalizerSet recipe_used;
    Prediction prediction;
    double horizon = 0;
    //! Sorted copy of normalized.
    std::vector<double> ecdf;
};

SimResult simulate_maxima(const SimConfig& cfg, const ConstantProvider& constants = ConstantProvider::global());

//! simulate_maxima with sigma0 = 0: the independent maxima (tilde M_n, or hat M_n for several drifts).
SimResult independent_maxima(const SimConfig& cfg, const ConstantProvider& constants = ConstantProvider::global());

struct GofReport
{
    double ks = 0;
    double ad = 0;
    std::size_t sample_size = 0;
};

//! One-sample KS and Anderson-Darling against a fixed law. Requires >= 100 points.
GofReport gof(std::span<const double> sample, const LimitLaw& law);

double ks_two_sample(std::span<const double> a, std::span<const double> b);

//! Two-sided 95% KS critical values.
double ks_band(std::size_t m);
double ks_two_sample_band(std::size_t m1, std::size_t m2);

//! Standard deviation of the KS statistic under resampling of the sample with replacement.
double bootstrap_ks_stderr(std::span<const double> sample, const LimitLaw& law, std::size_t resamples,
                           std::uint64_t seed);

struct SweepRow
{
    std::size_t n = 0;
    double ks = 0;
    double ad = 0;
    double center = 0;
    double scale = 0;
};

//! One independent simulation per n (seeded with seed + n), gof against the predicted law.
std::vector<SweepRow> convergence_sweep(const ModelSpec& model, const HorizonFamily& family,
                                        const std::vector<std::size_t>& ns, std::size_t replicas,
                                        std::size_t grid_m, std::uint64_t seed, unsigned threads = 1,
                                        const ConstantProvider& constants = ConstantProvider::global());

}  // namespace gpmax
