#pragma once

#include <optional>
#include <string>

#include "gpmax/asymptotics.hpp"
#include "gpmax/horizons.hpp"
#include "gpmax/model.hpp"

namespace gpmax {

enum class NormalizerKind
{
    identity,  // S1: M_n itself
    b_a,       // (b_n, a_n)
    b_sigma0,  // (b_n, sigma0 T_n^{H0})
    d_e,       // (d_n(x0), e_n)
    d_sigma0,  // (d_n(x0), sigma0 T_n^{H0})
    mu         // (T_n^H mu_n, T_n^H / sqrt(2 log n)), unit-horizon maxima
};

std::string to_string(NormalizerKind k);

struct NormalizerSet
{
    double center = 0;
    double scale = 1;
    NormalizerKind kind = NormalizerKind::identity;
};

/*!
 * f_n(w) = D_{c stilde0^beta}(v) / v with v = (w + c' T_n^beta) / T_n^H.
 * c' is `drift` when given (inhomogeneous variant), otherwise the smallest drift.
 */
double f_n(double w, double n, const ModelSpec& model, const HorizonFamily& family, double stilde0 = 0.0,
           std::optional<double> drift = std::nullopt,
           const ConstantProvider& constants = ConstantProvider::global());

//! f_n given log n.
double f_n_log(double w, double log_n, const ModelSpec& model, const HorizonFamily& family, double stilde0 = 0.0,
               std::optional<double> drift = std::nullopt,
               const ConstantProvider& constants = ConstantProvider::global());

//! (b_n, a_n) under S2/S3. Throws ScenarioMismatch otherwise, requires n >= 3.
NormalizerSet seq_ab(double n, const ModelSpec& model, const HorizonFamily& family, const ScenarioLabel& label,
                     const ConstantProvider& constants = ConstantProvider::global());
NormalizerSet seq_ab(double n, const ModelSpec& model, const HorizonFamily& family,
                     const ConstantProvider& constants = ConstantProvider::global());
NormalizerSet seq_ab_log(double log_n, const ModelSpec& model, const HorizonFamily& family, const ScenarioLabel& label,
                         const ConstantProvider& constants = ConstantProvider::global());

//! (d_n(x0), e_n); x0 = +inf gives d_n(inf). Requires n >= 3 and x0 > -inf.
NormalizerSet seq_de(double n, double x0, const ModelSpec& model,
                     const ConstantProvider& constants = ConstantProvider::global());
NormalizerSet seq_de_log(double log_n, double x0, const ModelSpec& model,
                         const ConstantProvider& constants = ConstantProvider::global());
//! Same, taking x0 from an S4/S5 label. Throws ScenarioMismatch otherwise.
NormalizerSet seq_de(double n, const ModelSpec& model, const ScenarioLabel& label,
                     const ConstantProvider& constants = ConstantProvider::global());

//! mu_n = y + log(D_0(y) / y) / y with y = sqrt(2 log n).
double mu_n(double n, const ModelSpec& model, const ConstantProvider& constants = ConstantProvider::global());
double mu_n_log(double log_n, const ModelSpec& model, const ConstantProvider& constants = ConstantProvider::global());

struct SmoothTransition
{
    double ratio_ae = 0;
    double reldiff_bd = 0;
};

/*!
 * a_n / e_n and (b_n - d_n(x0)) / d_n(x0) along an S4 family, with b_n taken
 * as its leading term T_n^H sqrt(2 log n) - c T_n^beta (the prefactor D_{c0}
 * degenerates at stilde0 = ttilde0).
 */
SmoothTransition smooth_transition(double n, const ModelSpec& model, const HorizonFamily& family,
                                   const ConstantProvider& constants = ConstantProvider::global());

}  // namespace gpmax
