#include "gpmax/horizons.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "gpmax/errors.hpp"

namespace gpmax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kExactTol = 1e-12;

bool nearly_equal(double a, double b, double tol = kExactTol)
{
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

double sqrt2log(double n)
{
    return std::sqrt(2.0 * std::log(n));
}

}  // namespace

HorizonFamily HorizonFamily::power_log(double gamma, double lambda)
{
    HorizonFamily f;
    f.kind = FamilyKind::power_log;
    f.gamma = gamma;
    f.lambda = lambda;
    return f;
}

HorizonFamily HorizonFamily::constant_horizon(double T)
{
    HorizonFamily f;
    f.kind = FamilyKind::constant;
    f.T = T;
    return f;
}

HorizonFamily HorizonFamily::explicit_sequence(Sequence seq)
{
    HorizonFamily f;
    f.kind = FamilyKind::explicit_seq;
    f.sequence = std::move(seq);
    return f;
}

HorizonFamily HorizonFamily::explicit_table(std::vector<std::pair<double, double>> table)
{
    HorizonFamily f;
    f.kind = FamilyKind::explicit_seq;
    std::sort(table.begin(), table.end());
    f.table = std::move(table);
    return f;
}

HorizonFamily HorizonFamily::s4_calibrated(double x0, Sequence epsilon)
{
    HorizonFamily f;
    f.kind = FamilyKind::s4_calibrated;
    f.x0 = x0;
    f.epsilon = std::move(epsilon);
    return f;
}

std::string to_string(FamilyKind k)
{
    switch (k)
    {
        case FamilyKind::power_log: return "power-log";
        case FamilyKind::constant: return "constant";
        case FamilyKind::explicit_seq: return "explicit";
        case FamilyKind::s4_calibrated: return "s4-calibrated";
    }
    return "unknown";
}

std::string to_string(Scenario s)
{
    static const char* names[] = {"S1", "S2", "S3", "S4", "S5"};
    return names[static_cast<int>(s)];
}

void validate_family(const HorizonFamily& f)
{
    switch (f.kind)
    {
        case FamilyKind::power_log:
            if (!(f.lambda > 0.0 && std::isfinite(f.lambda) && std::isfinite(f.gamma)))
            {
                throw DomainError("power-log family requires lambda > 0 and finite gamma");
            }
            break;
        case FamilyKind::constant:
            if (!(f.T > 0.0 && std::isfinite(f.T)))
            {
                throw DomainError("constant family requires T > 0");
            }
            break;
        case FamilyKind::explicit_seq:
            if (!f.sequence)
            {
                if (f.table.size() < 2)
                {
                    throw DomainError("explicit family needs an accessor or at least two (n, T) rows");
                }
                for (std::size_t i = 0; i < f.table.size(); ++i)
                {
                    const auto [n, t] = f.table[i];
                    if (!(n > 1.0 && t > 0.0 && std::isfinite(n) && std::isfinite(t)))
                    {
                        throw DomainError("explicit table rows need n > 1 and T > 0");
                    }
                    if (i > 0 && !(n > f.table[i - 1].first))
                    {
                        throw DomainError("explicit table n values must be distinct");
                    }
                }
            }
            break;
        case FamilyKind::s4_calibrated:
            if (!std::isfinite(f.x0))
            {
                throw DomainError("s4-calibrated family requires a finite x0");
            }
            break;
    }
}

double horizon(const HorizonFamily& f, double n, const ModelSpec& model)
{
    if (f.kind != FamilyKind::constant && !(n >= 2.0))
    {
        throw DomainError("horizon requires n >= 2");
    }
    return horizon_log(f, std::log(n), model);
}

double horizon_log(const HorizonFamily& f, double log_n, const ModelSpec& model)
{
    validate_family(f);
    if (f.kind == FamilyKind::constant)
    {
        return f.T;
    }
    if (!(log_n >= std::log(2.0)))
    {
        throw DomainError("horizon requires n >= 2");
    }
    const double L = log_n;
    const double n = std::exp(L);
    double t = 0.0;
    switch (f.kind)
    {
        case FamilyKind::power_log: t = std::pow(f.lambda * std::sqrt(2.0 * L), f.gamma); break;
        case FamilyKind::explicit_seq:
            if (f.sequence)
            {
                t = f.sequence(n);
            }
            else
            {
                // log-log interpolation, extrapolated from the end segments
                const auto& tab = f.table;
                auto hi = std::upper_bound(tab.begin(), tab.end(), std::make_pair(n, kInf));
                if (hi == tab.begin()) ++hi;
                if (hi == tab.end()) --hi;
                const auto lo = hi - 1;
                const double w = (L - std::log(lo->first)) / (std::log(hi->first) - std::log(lo->first));
                t = std::exp(std::log(lo->second) + w * (std::log(hi->second) - std::log(lo->second)));
            }
            break;
        case FamilyKind::s4_calibrated:
        {
            const ModelConstants k = model_constants(model);
            const double bh = model.beta - model.H;
            t = std::pow(std::pow(k.ttilde0, model.beta) * std::sqrt(2.0 * L), 1.0 / bh) +
                std::sqrt(k.A / k.B) * f.x0 * std::pow(2.0 * k.A * k.A * L, (model.H + 1.0 - model.beta) / (2.0 * bh));
            if (f.epsilon)
            {
                t += f.epsilon(n);
            }
            break;
        }
        case FamilyKind::constant: break;
    }
    if (!(t > 0.0 && std::isfinite(t)))
    {
        std::ostringstream os;
        os << "horizon evaluated to a non-positive or non-finite value " << t << " at n=" << n;
        throw DomainError(os.str());
    }
    return t;
}

namespace {

constexpr std::array<double, 4> kProbeN{1e3, 1e6, 1e9, 1e12};
constexpr double kSettleTol = 0.01;
constexpr double kDivergeSlope = 0.05;

// Numerical limit of g(n) along the probe points; 0, finite or +inf.
template <class G>
double probe_limit(G&& g, const char* what)
{
    std::array<double, 4> v{};
    std::array<double, 4> x{};
    for (std::size_t i = 0; i < 4; ++i)
    {
        v[i] = g(kProbeN[i]);
        x[i] = std::log(sqrt2log(kProbeN[i]));
    }
    std::ostringstream diag;
    diag << what << " at n=1e3,1e6,1e9,1e12: " << v[0] << ", " << v[1] << ", " << v[2] << ", " << v[3];
    for (double z : v)
    {
        if (!std::isfinite(z))
        {
            throw ClassificationError("explicit horizon: non-finite diagnostic; " + diag.str());
        }
    }
    const bool positive = std::all_of(v.begin(), v.end(), [](double z) { return z > 0.0; });
    if (positive)
    {
        const double last = std::abs(v[3] / v[2] - 1.0);
        const double prev = std::abs(v[2] / v[1] - 1.0);
        if (last <= kSettleTol && last <= prev + kExactTol)
        {
            return v[3];
        }
        const double e1 = (std::log(v[2]) - std::log(v[1])) / (x[2] - x[1]);
        const double e2 = (std::log(v[3]) - std::log(v[2])) / (x[3] - x[2]);
        if (e1 > kDivergeSlope && e2 > kDivergeSlope)
        {
            return kInf;
        }
        if (e1 < -kDivergeSlope && e2 < -kDivergeSlope)
        {
            return 0.0;
        }
    }
    throw ClassificationError("explicit horizon: diagnostic does not stabilize; " + diag.str());
}

// Signed variant used for deviations that may go to -inf.
template <class G>
double probe_signed_limit(G&& g, const char* what)
{
    std::array<double, 4> v{};
    for (std::size_t i = 0; i < 4; ++i)
    {
        v[i] = g(kProbeN[i]);
    }
    std::ostringstream diag;
    diag << what << " at n=1e3,1e6,1e9,1e12: " << v[0] << ", " << v[1] << ", " << v[2] << ", " << v[3];
    const double scale = std::max(1.0, std::abs(v[3]));
    const double last = std::abs(v[3] - v[2]) / scale;
    const double prev = std::abs(v[2] - v[1]) / scale;
    if (last <= kSettleTol && last <= prev + kExactTol)
    {
        return v[3];
    }
    const bool up = v[1] < v[2] && v[2] < v[3] && v[3] > 0.0;
    const bool down = v[1] > v[2] && v[2] > v[3] && v[3] < 0.0;
    if ((up || down) && std::abs(v[3]) > 10.0 && std::abs(v[3]) > 1.5 * std::abs(v[1]))
    {
        return up ? kInf : -kInf;
    }
    throw ClassificationError("explicit horizon: deviation does not stabilize; " + diag.str());
}

double analytic_limit(double gamma, double lambda, double p, double q)
{
    const double e = gamma * p + q;
    if (nearly_equal(e, 0.0, kExactTol * std::max({1.0, std::abs(gamma * p), std::abs(q)})))
    {
        return std::pow(lambda, gamma * p);
    }
    return e < 0.0 ? 0.0 : kInf;
}

}  // namespace

double family_limit(const HorizonFamily& f, const ModelSpec& model, double p, double q)
{
    validate_family(f);
    switch (f.kind)
    {
        case FamilyKind::power_log: return analytic_limit(f.gamma, f.lambda, p, q);
        case FamilyKind::constant:
            if (q == 0.0)
            {
                return std::pow(f.T, p);
            }
            return q < 0.0 ? 0.0 : kInf;
        case FamilyKind::s4_calibrated:
        {
            const ModelConstants k = model_constants(model);
            return analytic_limit(1.0 / (model.beta - model.H), std::pow(k.ttilde0, model.beta), p, q);
        }
        case FamilyKind::explicit_seq:
            return probe_limit(
                [&](double n) { return std::pow(horizon(f, n, model), p) * std::pow(sqrt2log(n), q); },
                "T_n^p (2 log n)^(q/2)");
    }
    return 0.0;
}

ScenarioLabel classify_S(const HorizonFamily& f, const ModelSpec& model)
{
    validate_model(model);
    validate_family(f);
    const double H = model.H;
    const double beta = model.beta;
    const ModelConstants k = model_constants(model);
    ScenarioLabel out;

    const double l1 = family_limit(f, model, H, 1.0);
    if (std::isfinite(l1))
    {
        out.scenario = Scenario::S1;
        out.kappa0 = l1;
        return out;
    }
    if (f.kind == FamilyKind::s4_calibrated)
    {
        out.scenario = Scenario::S4;
        out.x0 = f.x0;
        return out;
    }

    // Explicit families: the ratio below converges to ttilde0 only at rate
    // (log n)^{-1/2} on the S4 boundary, so the deviation is probed first.
    std::optional<double> deviation;
    if (f.kind == FamilyKind::explicit_seq)
    {
        const double bh = beta - H;
        try
        {
            deviation = probe_signed_limit(
                [&](double n) {
                    const double L = std::log(n);
                    const double lead = std::pow(std::pow(k.ttilde0, beta) * std::sqrt(2.0 * L), 1.0 / bh);
                    const double unit =
                        std::sqrt(k.A / k.B) * std::pow(2.0 * k.A * k.A * L, (H + 1.0 - beta) / (2.0 * bh));
                    return (horizon(f, n, model) - lead) / unit;
                },
                "S4 deviation");
        }
        catch (const ClassificationError&)
        {
        }
        if (deviation && *deviation != -kInf)
        {
            out.scenario = std::isfinite(*deviation) ? Scenario::S4 : Scenario::S5;
            out.x0 = *deviation;
            return out;
        }
    }

    const double l2 = family_limit(f, model, 1.0 - H / beta, -1.0 / beta);
    if (l2 == 0.0)
    {
        out.scenario = Scenario::S2;
        return out;
    }
    if (!std::isfinite(l2))
    {
        out.scenario = Scenario::S5;
        out.x0 = kInf;
        return out;
    }
    const bool at_boundary = f.kind == FamilyKind::power_log ? nearly_equal(f.lambda, std::pow(k.ttilde0, beta))
                                                             : std::abs(l2 / k.ttilde0 - 1.0) <= kSettleTol;
    if (at_boundary)
    {
        if (f.kind == FamilyKind::explicit_seq)
        {
            throw ClassificationError("explicit horizon: limit equals ttilde0 but the deviation does not converge");
        }
        out.scenario = Scenario::S4;
        out.x0 = 0.0;
        return out;
    }
    if (l2 < k.ttilde0)
    {
        out.scenario = Scenario::S3;
        out.stilde0 = l2;
        return out;
    }
    out.scenario = Scenario::S5;
    out.x0 = kInf;
    return out;
}

SubcaseLabel classify_subcase(const HorizonFamily& f, const ModelSpec& model, const ScenarioLabel& s)
{
    validate_model(model);
    SubcaseLabel out;
    out.inhomogeneous = !model.drift.homogeneous();
    try
    {
        out.q1 = family_limit(f, model, model.beta - model.H, 1.0);
    }
    catch (const ClassificationError&)
    {
        out.q1.reset();
    }

    if (s.scenario == Scenario::S1)
    {
        out.theorem_case = "a";
        return out;
    }
    if (model.sigma0 == 0.0)
    {
        out.theorem_case = "iid";
        return out;
    }

    const double gap = 2.0 * model.H - model.H0 - model.beta;  // sign selects i / ii / iii
    auto by_gap = [&](const std::string& prefix) {
        if (nearly_equal(gap, 0.0))
        {
            return prefix + ".iii";
        }
        return prefix + (gap < 0.0 ? ".i" : ".ii");
    };

    switch (s.scenario)
    {
        case Scenario::S2:
        {
            const double q0 = family_limit(f, model, model.H - model.H0, -1.0);
            if (q0 == 0.0)
            {
                out.theorem_case = "b.i";
            }
            else if (!std::isfinite(q0))
            {
                out.theorem_case = "b.ii";
            }
            else
            {
                out.theorem_case = "b.iii";
                out.q0 = q0;
            }
            break;
        }
        case Scenario::S3:
            out.theorem_case = by_gap(out.inhomogeneous ? "c" : "b");
            if (out.theorem_case.ends_with(".iii"))
            {
                out.q0 = std::pow(*s.stilde0, model.beta);
            }
            break;
        case Scenario::S4:
        case Scenario::S5: out.theorem_case = by_gap(out.inhomogeneous ? "d" : "c"); break;
        case Scenario::S1: break;
    }
    return out;
}

double TuFamily::at(double u, const ModelSpec& model) const
{
    const double ib = 1.0 / model.beta;
    switch (kind)
    {
        case Kind::constant: return value;
        case Kind::scaled: return value * std::pow(u, ib);
        case Kind::deviation:
        {
            const ModelConstants k = model_constants(model);
            return k.t0 * std::pow(u, ib) + value * std::sqrt(k.A / k.B) * std::pow(u, model.H * ib + ib - 1.0);
        }
        case Kind::power: return value * std::pow(u, rho);
    }
    return value;
}

DLabel classify_D(const TuFamily& f, const ModelSpec& model)
{
    validate_model(model);
    const ModelConstants k = model_constants(model);
    const double ib = 1.0 / model.beta;

    auto scaled = [&](double s) {
        if (!(s > 0.0 && std::isfinite(s)))
        {
            throw DomainError("scaled horizon requires s > 0");
        }
        if (nearly_equal(s, k.t0))
        {
            return DLabel{DRegime::D3, 0.0, 0.0};
        }
        if (s < k.t0)
        {
            return DLabel{DRegime::D2, s, 0.0};
        }
        return DLabel{DRegime::D3, 0.0, kInf};
    };

    switch (f.kind)
    {
        case TuFamily::Kind::constant:
            if (!(f.value > 0.0 && std::isfinite(f.value)))
            {
                throw DomainError("constant horizon requires T > 0");
            }
            return DLabel{DRegime::D1, 0.0, 0.0};
        case TuFamily::Kind::scaled: return scaled(f.value);
        case TuFamily::Kind::deviation:
            if (std::isnan(f.value) || f.value == -kInf)
            {
                throw RegimeError("D3 deviation must lie in (-inf, inf]");
            }
            return DLabel{DRegime::D3, 0.0, f.value};
        case TuFamily::Kind::power:
            if (!(f.value > 0.0 && std::isfinite(f.rho)))
            {
                throw DomainError("power horizon requires kappa > 0 and finite rho");
            }
            if (nearly_equal(f.rho, ib))
            {
                return scaled(f.value);
            }
            if (f.rho < ib)
            {
                return DLabel{DRegime::D1, 0.0, 0.0};
            }
            return DLabel{DRegime::D3, 0.0, kInf};
    }
    return {};
}

double psi_finite(double u, const TuFamily& f, const ModelSpec& model, const ConstantProvider& constants)
{
    return psi_finite(u, f.at(u, model), model, classify_D(f, model), constants);
}

}  // namespace gpmax
