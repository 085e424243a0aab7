#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gpmax/asymptotics.hpp"
#include "gpmax/model.hpp"

namespace gpmax {

//! n -> T_n for explicit families, or n -> epsilon(n) for s4-calibrated ones.
using Sequence = std::function<double(double)>;

enum class FamilyKind
{
    power_log,      // T_n = (lambda sqrt(2 log n))^gamma
    constant,       // T_n = T
    explicit_seq,   // user accessor or tabulated (n, T_n) pairs
    s4_calibrated   // leading S4 horizon plus x0 deviation plus epsilon(n)
};

struct HorizonFamily
{
    FamilyKind kind = FamilyKind::constant;
    double gamma = 0.0;
    double lambda = 1.0;
    double T = 1.0;
    Sequence sequence;
    //! Table backing an explicit family; interpolated log-log in (n, T).
    std::vector<std::pair<double, double>> table;
    double x0 = 0.0;
    Sequence epsilon;

    static HorizonFamily power_log(double gamma, double lambda);
    static HorizonFamily constant_horizon(double T);
    static HorizonFamily explicit_sequence(Sequence seq);
    static HorizonFamily explicit_table(std::vector<std::pair<double, double>> table);
    static HorizonFamily s4_calibrated(double x0, Sequence epsilon = {});
};

std::string to_string(FamilyKind k);

//! Throws DomainError on invalid parameters (lambda <= 0, T <= 0, bad table).
void validate_family(const HorizonFamily& f);

//! T_n. Families that depend on log n require n >= 2.
double horizon(const HorizonFamily& f, double n, const ModelSpec& model);
//! T_n given log n, for n beyond the double range. Explicit families still see exp(log_n).
double horizon_log(const HorizonFamily& f, double log_n, const ModelSpec& model);

enum class Scenario
{
    S1,
    S2,
    S3,
    S4,
    S5
};

std::string to_string(Scenario s);

struct ScenarioLabel
{
    Scenario scenario = Scenario::S2;
    std::optional<double> kappa0;   // S1
    std::optional<double> stilde0;  // S3
    std::optional<double> x0;       // S4, S5 (+inf)
};

//! Throws ClassificationError for explicit sequences whose diagnostics do not settle.
ScenarioLabel classify_S(const HorizonFamily& f, const ModelSpec& model);

/*!
 * Theorem sub-case. Homogeneous: a, b.i-b.iii, c.i-c.iii. Inhomogeneous: a,
 * b.*, c.*, d.*. With sigma0 = 0 the common process is absent and the label
 * is "iid" (limits of the independent maxima).
 */
struct SubcaseLabel
{
    std::string theorem_case;
    bool inhomogeneous = false;
    std::optional<double> q0;
    //! lim T_n^{beta-H} sqrt(2 log n); 0, finite or +inf. Reported whenever it exists.
    std::optional<double> q1;
};

SubcaseLabel classify_subcase(const HorizonFamily& f, const ModelSpec& model, const ScenarioLabel& s);
inline SubcaseLabel classify_subcase(const HorizonFamily& f, const ModelSpec& model)
{
    return classify_subcase(f, model, classify_S(f, model));
}

//! Threshold-dependent horizon T_u.
struct TuFamily
{
    enum class Kind
    {
        constant,   // T_u = T
        scaled,     // T_u = s u^{1/beta}
        deviation,  // T_u = t0 u^{1/beta} + x A^{1/2} B^{-1/2} u^{H/beta+1/beta-1}
        power       // T_u = kappa u^rho
    };
    Kind kind = Kind::constant;
    double value = 1.0;  // T, s, x or kappa
    double rho = 0.0;

    double at(double u, const ModelSpec& model) const;
};

DLabel classify_D(const TuFamily& f, const ModelSpec& model);

//! psi_finite with the regime inferred from the family.
double psi_finite(double u, const TuFamily& f, const ModelSpec& model,
                  const ConstantProvider& constants = ConstantProvider::global());

//! Limit of T_n^p (sqrt(2 log n))^q along the family: 0, a positive value, or +inf.
double family_limit(const HorizonFamily& f, const ModelSpec& model, double p, double q);

}  // namespace gpmax
