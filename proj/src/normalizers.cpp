#include "gpmax/normalizers.hpp"

#include <cmath>
#include <limits>

#include "gpmax/errors.hpp"

namespace gpmax {

namespace {

using LD = long double;

const double kLog3 = std::log(3.0);

void require_log_n(double L)
{
    if (!(L >= kLog3) || !std::isfinite(L))
    {
        throw DomainError("normalizing sequences require finite n >= 3");
    }
}

double log_of(double n)
{
    if (!(n >= 3.0) || !std::isfinite(n))
    {
        throw DomainError("normalizing sequences require finite n >= 3");
    }
    return std::log(n);
}

struct Lead
{
    LD TH;   // T_n^H
    LD y;    // sqrt(2 log n)
    LD cTb;  // c T_n^beta
};

Lead lead_terms(double L, const ModelSpec& model, const HorizonFamily& family)
{
    const LD T = horizon_log(family, L, model);
    return {std::pow(T, static_cast<LD>(model.H)), std::sqrt(2.0L * L),
            static_cast<LD>(model.c()) * std::pow(T, static_cast<LD>(model.beta))};
}

// b_n for a given stilde0; the two leading terms are combined before the correction.
double b_n(double L, const ModelSpec& model, const HorizonFamily& family, double stilde0,
           const ConstantProvider& constants)
{
    const Lead t = lead_terms(L, model, family);
    const LD w = t.TH * t.y - t.cTb;
    if (!(w > 0.0L))
    {
        throw DomainError("b_n: T_n^H sqrt(2 log n) - c T_n^beta must be positive");
    }
    const LD logf =
        std::log(static_cast<LD>(f_n_log(static_cast<double>(w), L, model, family, stilde0, {}, constants)));
    return static_cast<double>(w + t.TH * logf / t.y);
}

}  // namespace

std::string to_string(NormalizerKind k)
{
    switch (k)
    {
        case NormalizerKind::identity: return "identity";
        case NormalizerKind::b_a: return "b_n,a_n";
        case NormalizerKind::b_sigma0: return "b_n,sigma0*T_n^H0";
        case NormalizerKind::d_e: return "d_n,e_n";
        case NormalizerKind::d_sigma0: return "d_n,sigma0*T_n^H0";
        case NormalizerKind::mu: return "mu_n";
    }
    return "unknown";
}

double f_n(double w, double n, const ModelSpec& model, const HorizonFamily& family, double stilde0,
           std::optional<double> drift, const ConstantProvider& constants)
{
    if (!(n >= 2.0))
    {
        throw DomainError("f_n requires n >= 2");
    }
    return f_n_log(w, std::log(n), model, family, stilde0, drift, constants);
}

double f_n_log(double w, double log_n, const ModelSpec& model, const HorizonFamily& family, double stilde0,
               std::optional<double> drift, const ConstantProvider& constants)
{
    if (!(w > 0.0))
    {
        throw DomainError("f_n requires w > 0");
    }
    const LD T = horizon_log(family, log_n, model);
    const LD cj = drift ? *drift : model.c();
    const LD v = (static_cast<LD>(w) + cj * std::pow(T, static_cast<LD>(model.beta))) /
                 std::pow(T, static_cast<LD>(model.H));
    const double c0 = model.c() * std::pow(stilde0, model.beta);
    return static_cast<double>(capital_D(static_cast<double>(v), c0, model, constants) / v);
}

NormalizerSet seq_ab_log(double L, const ModelSpec& model, const HorizonFamily& family, const ScenarioLabel& label,
                         const ConstantProvider& constants)
{
    if (label.scenario != Scenario::S2 && label.scenario != Scenario::S3)
    {
        throw ScenarioMismatch("(b_n, a_n) are defined under S2 and S3, got " + to_string(label.scenario));
    }
    require_log_n(L);
    const double stilde0 = label.scenario == Scenario::S3 ? label.stilde0.value() : 0.0;
    const Lead t = lead_terms(L, model, family);
    NormalizerSet out;
    out.kind = NormalizerKind::b_a;
    out.center = b_n(L, model, family, stilde0, constants);
    out.scale = static_cast<double>(t.TH / t.y);
    return out;
}

NormalizerSet seq_ab(double n, const ModelSpec& model, const HorizonFamily& family, const ScenarioLabel& label,
                     const ConstantProvider& constants)
{
    if (label.scenario != Scenario::S2 && label.scenario != Scenario::S3)
    {
        throw ScenarioMismatch("(b_n, a_n) are defined under S2 and S3, got " + to_string(label.scenario));
    }
    return seq_ab_log(log_of(n), model, family, label, constants);
}

NormalizerSet seq_ab(double n, const ModelSpec& model, const HorizonFamily& family,
                     const ConstantProvider& constants)
{
    return seq_ab(n, model, family, classify_S(family, model), constants);
}

NormalizerSet seq_de_log(double L, double x0, const ModelSpec& model, const ConstantProvider& constants)
{
    require_log_n(L);
    if (std::isnan(x0) || x0 == -std::numeric_limits<double>::infinity())
    {
        throw DomainError("d_n(x0) requires x0 in (-inf, inf]");
    }
    const ModelConstants k = model_constants(model);
    const LD tau = k.tau;
    const LD u = std::pow(2.0L * k.A * k.A * L, 1.0L / tau);
    const LD logR = std::log(static_cast<LD>(big_R(static_cast<double>(u), model, constants)));
    const LD logPhi = std::isinf(x0) ? 0.0L : std::log(static_cast<LD>(normal_cdf(x0)));
    NormalizerSet out;
    out.kind = NormalizerKind::d_e;
    out.center = static_cast<double>(u + u * (logR + logPhi) / (tau * L));
    out.scale = static_cast<double>(u / (tau * L));
    return out;
}

NormalizerSet seq_de(double n, double x0, const ModelSpec& model, const ConstantProvider& constants)
{
    return seq_de_log(log_of(n), x0, model, constants);
}

NormalizerSet seq_de(double n, const ModelSpec& model, const ScenarioLabel& label, const ConstantProvider& constants)
{
    if (label.scenario != Scenario::S4 && label.scenario != Scenario::S5)
    {
        throw ScenarioMismatch("(d_n, e_n) are defined under S4 and S5, got " + to_string(label.scenario));
    }
    const double x0 = label.scenario == Scenario::S5 ? std::numeric_limits<double>::infinity() : label.x0.value();
    return seq_de(n, x0, model, constants);
}

double mu_n_log(double L, const ModelSpec& model, const ConstantProvider& constants)
{
    require_log_n(L);
    const LD y = std::sqrt(2.0L * L);
    const LD pref = capital_D(static_cast<double>(y), 0.0, model, constants) / y;
    return static_cast<double>(y + std::log(pref) / y);
}

double mu_n(double n, const ModelSpec& model, const ConstantProvider& constants)
{
    return mu_n_log(log_of(n), model, constants);
}

SmoothTransition smooth_transition(double n, const ModelSpec& model, const HorizonFamily& family,
                                   const ConstantProvider& constants)
{
    const ScenarioLabel label = classify_S(family, model);
    if (label.scenario != Scenario::S4)
    {
        throw ScenarioMismatch("smooth transition requires an S4 family, got " + to_string(label.scenario));
    }
    const double L = log_of(n);
    const NormalizerSet de = seq_de(n, model, label, constants);
    const Lead t = lead_terms(L, model, family);
    const double b = static_cast<double>(t.TH * t.y - t.cTb);
    const double a = static_cast<double>(t.TH / t.y);
    return {a / de.scale, (b - de.center) / de.center};
}

}  // namespace gpmax
