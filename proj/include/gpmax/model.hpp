#pragma once

#include <cstddef>
#include <vector>

namespace gpmax {

//! Finite set of trend coefficients c_1 < ... < c_k and their limiting
//! proportions among the n component processes.
struct DriftSet
{
    std::vector<double> values{1.0};
    std::vector<double> proportions{1.0};

    //! Smallest drift; this is the c used by all normalizing sequences.
    double c() const { return values.front(); }
    std::size_t size() const { return values.size(); }
    bool homogeneous() const { return values.size() == 1; }

    bool operator==(const DriftSet&) const = default;
};

/*!
 * Parameters of max_{i<=n} sup_{t<=T} (X_i(t) + sigma0 X(t) - c_i t^beta).
 *
 * X_i has self-similarity index H, X has index H0. The local structure of the
 * standardized X_i is K(t) = kK * t^(alpha/2). The noise scale of X_i is 1.
 */
struct ModelSpec
{
    double H = 0.5;
    double H0 = 0.5;
    double sigma0 = 0.0;
    double beta = 1.0;
    double alpha = 1.0;
    double kK = 1.0;
    DriftSet drift;

    double c() const { return drift.c(); }

    bool operator==(const ModelSpec&) const = default;
};

//! Returns the model unchanged, or throws ValidationError listing every failed constraint.
ModelSpec validate_model(const ModelSpec& spec);

//! Splits n indices into drift blocks: m_j = round(p_j n) for j >= 2 and the
//! remainder to j = 1, keeping m_1 >= 1.
std::vector<std::size_t> allocate_counts(const DriftSet& drift, std::size_t n);

//! lim_{t->0} t / K(t)^2 for the pure power K.
enum class QRegime
{
    zero,
    finite,
    infinite
};

struct LocalQ
{
    QRegime regime;
    double value;  // 0, 1/kK^2 or +inf
};

LocalQ local_q(const ModelSpec& spec);

//! K(t) = kK t^(alpha/2)
double k_function(const ModelSpec& spec, double t);

//! Exact inverse of the power K: (y / kK)^(2/alpha).
double k_inverse(const ModelSpec& spec, double y);

}  // namespace gpmax
