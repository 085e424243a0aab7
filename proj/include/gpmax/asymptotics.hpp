#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>

#include "gpmax/model.hpp"

namespace gpmax {

struct ModelConstants
{
    double t0 = 0;
    double A = 0;
    double B = 0;
    double tau = 0;
    double ttilde0 = 0;
    double c = 0;
};

//! Throws DomainError unless 0 < H < beta and c > 0.
ModelConstants model_constants(double H, double c, double beta);
inline ModelConstants model_constants(const ModelSpec& m) { return model_constants(m.H, m.c(), m.beta); }

/*!
 * Monte Carlo settings for the Pickands and Piterbarg constants.
 *
 * Each replicate simulates W(t) = sqrt(2) B(t) - |t|^alpha on [-T, T] with
 * mesh eta and returns a ratio of Riemann sums whose mean is the constant
 * (normalized-supremum representation). Piterbarg constants with d >= 2 use
 * the rescaled direct expectation on [0, 2T] instead. Stderr comes from
 * `batches` equal batches of replicates.
 */
struct ConstantParams
{
    double T = 10.0;
    double eta = 2.5e-4;
    std::size_t replicates = 10000;
    std::size_t batches = 20;
    std::uint64_t seed = 20240101;
    unsigned threads = 1;

    bool operator==(const ConstantParams&) const = default;
};

struct ConstantEstimate
{
    double value = 0;
    double std_error = 0;
    ConstantParams params;
    std::string method;  // "normalized-sup" or "scaled-direct"
};

//! MC estimate of the Pickands constant H_alpha. Throws BudgetError for infeasible params.
ConstantEstimate pickands_constant(double alpha, const ConstantParams& params = {});

//! MC estimate of the Piterbarg constant P_alpha^d, d > 0.
ConstantEstimate piterbarg_constant(double alpha, double d, const ConstantParams& params = {});

/*!
 * Resolves H_alpha and P_alpha^d for the asymptotic formulas.
 *
 * Closed forms: H_1 = 1, H_2 = 1/sqrt(pi), P_1^d = 1 + 1/d and
 * P_2^d = (1 + sqrt(1 + 1/d)) / 2. Anything else is estimated once with the
 * provider's params and cached. Overrides take precedence over both.
 */
class ConstantProvider
{
  public:
    explicit ConstantProvider(ConstantParams params = {}) : params_(params) {}

    double pickands(double alpha) const;
    double piterbarg(double alpha, double d) const;

    void set_pickands(double alpha, double value);
    void set_piterbarg(double alpha, double d, double value);

    const ConstantParams& params() const { return params_; }

    //! Shared instance with default params.
    static ConstantProvider& global();

  private:
    ConstantParams params_;
    mutable std::mutex mutex_;
    mutable std::map<double, double> pickands_;
    mutable std::map<std::pair<double, double>, double> piterbarg_;
};

std::optional<double> closed_form_pickands(double alpha);
std::optional<double> closed_form_piterbarg(double alpha, double d);

/*!
 * Tail prefactor D_{c0}(y) for the finite-horizon asymptotics. The caller
 * multiplies by y^{-1} exp(-y^2/2). Requires y > 0 and H - c0 beta > 0.
 */
double capital_D(double y, double c0, const ModelSpec& model,
                 const ConstantProvider& constants = ConstantProvider::global());

//! R(u) for the smallest drift c of the model.
double big_R(double u, const ModelSpec& model, const ConstantProvider& constants = ConstantProvider::global());

//! Leading-order P(sup_{t>=0} X_H(t) - c t^beta > u).
double psi_infinite(double u, const ModelSpec& model,
                    const ConstantProvider& constants = ConstantProvider::global());

enum class DRegime
{
    D1,
    D2,
    D3
};

//! Threshold-dependent horizon regime. s0 is used by D2 (D1 means s0 = 0);
//! x by D3 and may be +infinity.
struct DLabel
{
    DRegime regime = DRegime::D1;
    double s0 = 0;
    double x = 0;
};

/*!
 * Leading-order P(sup_{[0,Tu]} X_H(t) - c t^beta > u) under the given regime.
 * Throws RegimeError when a D2 label has s0 outside (0, t0) or a D3 label has
 * x = -infinity.
 */
double psi_finite(double u, double Tu, const ModelSpec& model, const DLabel& regime,
                  const ConstantProvider& constants = ConstantProvider::global());

double normal_cdf(double x);

}  // namespace gpmax
