#include "gpmax/limit_laws.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gpmax/errors.hpp"
#include "gpmax/rng.hpp"

namespace gpmax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCut = 10.0;

double gumbel_cdf(double x, double shift)
{
    return std::exp(-std::exp(-(x - shift)));
}

double mixture_cdf(double coef, double shift, double x)
{
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * M_PI);
    auto integrand = [&](double z) { return gumbel_cdf(x - coef * z, shift) * inv_sqrt_2pi * std::exp(-0.5 * z * z); };
    double err = 0.0;
    const double body =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, -kCut, kCut, 15, 1e-13, &err);
    // Below -10 the Gumbel factor is 1 to within rounding; above +10 the mass is negligible.
    return std::min(1.0, body + normal_cdf(-kCut));
}

}  // namespace

LimitLaw LimitLaw::mixture(double coef, double shift)
{
    if (!(coef > 0.0) || !std::isfinite(coef))
    {
        throw DomainError("mixture coefficient must be positive and finite");
    }
    return {Kind::mixture, 0.0, shift, coef};
}

std::string to_string(LimitLaw::Kind k)
{
    switch (k)
    {
        case LimitLaw::Kind::degenerate: return "degenerate";
        case LimitLaw::Kind::gumbel: return "gumbel";
        case LimitLaw::Kind::normal: return "normal";
        case LimitLaw::Kind::mixture: return "gumbel-normal-mixture";
    }
    return "unknown";
}

std::string to_string(const LimitLaw& law)
{
    std::ostringstream os;
    os.precision(10);
    switch (law.kind)
    {
        case LimitLaw::Kind::degenerate: os << "Degenerate(" << law.point << ")"; break;
        case LimitLaw::Kind::gumbel: os << "Gumbel(shift=" << law.shift << ")"; break;
        case LimitLaw::Kind::normal: os << "Normal(0,1)"; break;
        case LimitLaw::Kind::mixture: os << "Gumbel(shift=" << law.shift << ")+" << law.coef << "*Normal"; break;
    }
    return os.str();
}

double limit_cdf(const LimitLaw& law, double x)
{
    if (std::isnan(x))
    {
        throw DomainError("limit_cdf at NaN");
    }
    if (x == kInf)
    {
        return 1.0;
    }
    if (x == -kInf)
    {
        return 0.0;
    }
    switch (law.kind)
    {
        case LimitLaw::Kind::degenerate: return x >= law.point ? 1.0 : 0.0;
        case LimitLaw::Kind::gumbel: return gumbel_cdf(x, law.shift);
        case LimitLaw::Kind::normal: return normal_cdf(x);
        case LimitLaw::Kind::mixture: return mixture_cdf(law.coef, law.shift, x);
    }
    return 0.0;
}

std::vector<double> limit_sample(const LimitLaw& law, std::uint64_t seed, std::size_t m)
{
    if (m == 0)
    {
        throw DomainError("limit_sample requires m >= 1");
    }
    NormalStream rng(StreamId{seed, 0, 0});
    std::vector<double> out(m);
    for (auto& x : out)
    {
        switch (law.kind)
        {
            case LimitLaw::Kind::degenerate: x = law.point; break;
            case LimitLaw::Kind::gumbel: x = law.shift - std::log(-std::log(rng.uniform())); break;
            case LimitLaw::Kind::normal: x = rng(); break;
            case LimitLaw::Kind::mixture:
            {
                const double g = law.shift - std::log(-std::log(rng.uniform()));
                x = g + law.coef * rng();
                break;
            }
        }
    }
    return out;
}

double limit_quantile(const LimitLaw& law, double p)
{
    if (!(p > 0.0 && p < 1.0))
    {
        throw DomainError("quantile level must lie in (0, 1)");
    }
    if (law.kind == LimitLaw::Kind::degenerate)
    {
        return law.point;
    }
    double lo = -1.0;
    double hi = 1.0;
    while (limit_cdf(law, lo) >= p)
    {
        lo *= 2.0;
    }
    while (limit_cdf(law, hi) < p)
    {
        hi *= 2.0;
    }
    while (hi - lo > 1e-9)
    {
        const double mid = 0.5 * (lo + hi);
        (limit_cdf(law, mid) >= p ? hi : lo) = mid;
    }
    return hi;
}

NormalizerSet Recipe::evaluate(double n, const ModelSpec& model, const HorizonFamily& family,
                               const ConstantProvider& constants) const
{
    NormalizerSet out;
    out.kind = kind;
    switch (kind)
    {
        case NormalizerKind::identity: return out;
        case NormalizerKind::b_a: return seq_ab(n, model, family, scenario, constants);
        case NormalizerKind::d_e: return seq_de(n, x0, model, constants);
        case NormalizerKind::b_sigma0:
            out.center = seq_ab(n, model, family, scenario, constants).center;
            break;
        case NormalizerKind::d_sigma0: out.center = seq_de(n, x0, model, constants).center; break;
        case NormalizerKind::mu:
        {
            const double r = std::pow(horizon(family, n, model), model.H);
            out.center = r * mu_n(n, model, constants);
            out.scale = r / std::sqrt(2.0 * std::log(n));
            return out;
        }
    }
    out.scale = model.sigma0 * std::pow(horizon(family, n, model), model.H0);
    return out;
}

double lambda_hat_shift(const DriftSet& drift, double q1)
{
    if (drift.homogeneous() || q1 == 0.0)
    {
        return 0.0;
    }
    if (!std::isfinite(q1))
    {
        return std::log(drift.proportions.front());
    }
    double w = drift.proportions.front();
    for (std::size_t j = 1; j < drift.size(); ++j)
    {
        w += drift.proportions[j] * std::exp(-(drift.values[j] - drift.c()) * q1);
    }
    return std::log(w);
}

Prediction predict_limit(const ModelSpec& model, const HorizonFamily& family)
{
    const ScenarioLabel s = classify_S(family, model);
    return predict_limit(model, family, s, classify_subcase(family, model, s));
}

Prediction predict_limit(const ModelSpec& model, const HorizonFamily& family, const ScenarioLabel& s,
                         const SubcaseLabel& sub)
{
    (void)family;
    Prediction p;
    p.recipe.scenario = s;
    p.recipe.subcase = sub;
    const bool long_horizon = s.scenario == Scenario::S4 || s.scenario == Scenario::S5;
    p.recipe.x0 = s.scenario == Scenario::S5 ? kInf : s.x0.value_or(0.0);

    if (s.scenario == Scenario::S1)
    {
        p.recipe.kind = NormalizerKind::identity;
        p.law = LimitLaw::degenerate(s.kappa0.value());
        return p;
    }

    const double log_p1 = std::log(model.drift.proportions.front());
    // Gumbel shift outside S2 is log p1; under S2 it is the Lambda-hat shift.
    double shift = log_p1;
    if (s.scenario == Scenario::S2 && !model.drift.homogeneous())
    {
        const bool gumbel_branch = sub.theorem_case != "b.i";
        if (gumbel_branch && !sub.q1)
        {
            throw ClassificationError("inhomogeneous S2 limit needs lim T_n^{beta-H} sqrt(2 log n)");
        }
        shift = sub.q1 ? lambda_hat_shift(model.drift, *sub.q1) : 0.0;
    }

    const NormalizerKind gumbel_kind = long_horizon ? NormalizerKind::d_e : NormalizerKind::b_a;
    const NormalizerKind normal_kind = long_horizon ? NormalizerKind::d_sigma0 : NormalizerKind::b_sigma0;

    const std::string& c = sub.theorem_case;
    if (c == "iid" || c.ends_with(".ii"))
    {
        p.recipe.kind = gumbel_kind;
        p.law = LimitLaw::gumbel(shift);
    }
    else if (c.ends_with(".i"))
    {
        p.recipe.kind = normal_kind;
        p.law = LimitLaw::normal();
    }
    else if (c.ends_with(".iii"))
    {
        p.recipe.kind = gumbel_kind;
        const double coef = long_horizon ? model.sigma0 * model.c() * model.beta / model.H
                                         : model.sigma0 / sub.q0.value();
        p.law = LimitLaw::mixture(coef, shift);
    }
    else
    {
        throw ClassificationError("no limit law for sub-case '" + c + "'");
    }
    return p;
}

}  // namespace gpmax
