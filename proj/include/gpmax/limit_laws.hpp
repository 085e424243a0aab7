#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gpmax/horizons.hpp"
#include "gpmax/normalizers.hpp"

namespace gpmax {

//! Degenerate(point), Gumbel Lambda + shift, standard Normal, or Lambda + shift + coef * N.
struct LimitLaw
{
    enum class Kind
    {
        degenerate,
        gumbel,
        normal,
        mixture
    };
    Kind kind = Kind::gumbel;
    double point = 0;
    double shift = 0;
    double coef = 0;

    static LimitLaw degenerate(double point) { return {Kind::degenerate, point, 0.0, 0.0}; }
    static LimitLaw gumbel(double shift = 0.0) { return {Kind::gumbel, 0.0, shift, 0.0}; }
    static LimitLaw normal() { return {Kind::normal, 0.0, 0.0, 0.0}; }
    //! Throws DomainError unless coef > 0.
    static LimitLaw mixture(double coef, double shift = 0.0);

    bool operator==(const LimitLaw&) const = default;
};

std::string to_string(LimitLaw::Kind k);
std::string to_string(const LimitLaw& law);

//! Mixture CDFs integrate over the Normal component on [-10, 10] (abs error <= 1e-10).
double limit_cdf(const LimitLaw& law, double x);

//! m i.i.d. draws. Deterministic in seed.
std::vector<double> limit_sample(const LimitLaw& law, std::uint64_t seed, std::size_t m);

//! Smallest x with F(x) >= p, by bisection to 1e-9. p in (0, 1).
double limit_quantile(const LimitLaw& law, double p);

//! Which sequence normalizes M_n at a given n.
struct Recipe
{
    NormalizerKind kind = NormalizerKind::identity;
    ScenarioLabel scenario;
    SubcaseLabel subcase;
    //! Deviation fed to d_n; +inf under S5.
    double x0 = 0;

    NormalizerSet evaluate(double n, const ModelSpec& model, const HorizonFamily& family,
                           const ConstantProvider& constants = ConstantProvider::global()) const;
};

struct Prediction
{
    Recipe recipe;
    LimitLaw law;
};

//! Shift of Lambda-hat for an inhomogeneous drift set: 0, log(p1 + sum p_j e^{-(c_j - c) q1}) or log p1.
double lambda_hat_shift(const DriftSet& drift, double q1);

/*!
 * Pairs the normalizer with the limit law for (model, family). With sigma0 = 0
 * the laws are those of the independent maxima.
 */
Prediction predict_limit(const ModelSpec& model, const HorizonFamily& family);
Prediction predict_limit(const ModelSpec& model, const HorizonFamily& family, const ScenarioLabel& s,
                         const SubcaseLabel& sub);

}  // namespace gpmax
