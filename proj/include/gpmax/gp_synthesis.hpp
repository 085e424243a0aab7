#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "gpmax/model.hpp"
#include "gpmax/rng.hpp"

namespace gpmax {

//! Uniform grid t_j = j * tmax / m, j = 0..m.
struct Grid
{
    double tmax = 1.0;
    std::size_t m = 1;

    std::size_t points() const { return m + 1; }
    double dt() const { return tmax / static_cast<double>(m); }
    double time(std::size_t j) const { return tmax * static_cast<double>(j) / static_cast<double>(m); }
};

//! Throws DomainError unless m >= 1 and tmax > 0.
void validate_grid(const Grid& grid);

enum class SynthesisMethod
{
    increments,   // H = 1/2: independent Gaussian increments
    circulant,    // circulant embedding of fractional Gaussian noise
    cholesky,     // dense covariance factorization
    deterministic // noise disabled by the test hook
};

std::string_view to_string(SynthesisMethod m);

struct SynthesisOptions
{
    //! Skip circulant embedding; only valid for m <= kMaxCholesky.
    bool force_cholesky = false;
    //! Replace every Gaussian draw by zero (leaves only the trend).
    bool zero_noise = false;
    //! Assign drift blocks to indices from the largest drift down.
    bool reverse_blocks = false;
};

inline constexpr std::size_t kMaxCholesky = 2048;

struct Path
{
    Grid grid;
    std::vector<double> values;
    SynthesisMethod method = SynthesisMethod::increments;
};

//! Covariance of standard fBm: (s^2h + t^2h - |s-t|^2h) / 2.
double fbm_cov(double s, double t, double hurst);

//! Exact Gaussian sample of standard fBm on the grid, deterministic in the stream.
Path sample_fbm(double hurst, const Grid& grid, const StreamId& stream,
                const SynthesisOptions& opts = {});

//! Allocation-free variant: writes m+1 values into out.
SynthesisMethod sample_fbm_into(double hurst, const Grid& grid, NormalStream& normals,
                                std::span<double> out, const SynthesisOptions& opts = {});

/*!
 * X_i(t) + sigma0 X(t) - c_i t^beta for i < n on one replica.
 *
 * The replica stream supplies (seed, replica); the common process uses
 * component 0 and X_i uses component i+1. Drift blocks follow allocate_counts
 * in index order (reversed with reverse_blocks).
 */
std::vector<Path> assemble_model_paths(const ModelSpec& model, std::size_t n, const Grid& grid,
                                       const StreamId& replica, const SynthesisOptions& opts = {});

//! Grid maximum; biased low relative to the continuous supremum.
double path_supremum(const Path& p);

/*!
 * Streaming form of assemble_model_paths + path_supremum, used by the Monte
 * Carlo engine. Writes sup_i into sups (size n). When half_mesh is nonempty it
 * also receives the maximum over even grid points only, i.e. the same paths
 * observed on the grid with m/2 intervals.
 */
void replica_suprema(const ModelSpec& model, std::size_t n, const Grid& grid, const StreamId& replica,
                     std::span<double> sups, std::span<double> half_mesh = {},
                     const SynthesisOptions& opts = {});

}  // namespace gpmax
