#include "gpmax/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gpmax/errors.hpp"

namespace gpmax {

namespace {
constexpr double kProportionTol = 1e-9;
}

ModelSpec validate_model(const ModelSpec& spec)
{
    std::vector<std::string> bad;
    auto finite = [](double x) { return std::isfinite(x); };

    if (!(finite(spec.H) && spec.H > 0.0 && spec.H < 1.0))
    {
        bad.emplace_back("H must lie in (0,1)");
    }
    if (!(finite(spec.H0) && spec.H0 > 0.0 && spec.H0 < 1.0))
    {
        bad.emplace_back("H0 must lie in (0,1)");
    }
    if (!(finite(spec.sigma0) && spec.sigma0 >= 0.0))
    {
        bad.emplace_back("sigma0 must be nonnegative");
    }
    if (!(finite(spec.beta) && spec.beta > std::max(spec.H, spec.H0)))
    {
        bad.emplace_back("beta must exceed max(H,H0)");
    }
    if (!(finite(spec.alpha) && spec.alpha > 0.0 && spec.alpha <= 2.0))
    {
        bad.emplace_back("alpha must lie in (0,2]");
    }
    if (!(finite(spec.kK) && spec.kK > 0.0))
    {
        bad.emplace_back("kK must be positive");
    }

    const auto& d = spec.drift;
    if (d.values.empty())
    {
        bad.emplace_back("drift values must be nonempty");
    }
    if (d.values.size() != d.proportions.size())
    {
        bad.emplace_back("drift values and proportions must have equal length");
    }
    for (std::size_t j = 0; j < d.values.size(); ++j)
    {
        if (!(finite(d.values[j]) && d.values[j] > 0.0))
        {
            bad.emplace_back("drift values must be positive");
            break;
        }
    }
    for (std::size_t j = 1; j < d.values.size(); ++j)
    {
        if (!(d.values[j] > d.values[j - 1]))
        {
            bad.emplace_back("drift values must be strictly increasing");
            break;
        }
    }
    for (double p : d.proportions)
    {
        if (!(finite(p) && p >= 0.0 && p <= 1.0))
        {
            bad.emplace_back("proportions must lie in [0,1]");
            break;
        }
    }
    if (!d.proportions.empty())
    {
        if (!(d.proportions.front() > 0.0))
        {
            bad.emplace_back("p1 must be positive");
        }
        const double sum = std::accumulate(d.proportions.begin(), d.proportions.end(), 0.0);
        if (!(std::abs(sum - 1.0) <= kProportionTol))
        {
            bad.emplace_back("proportions must sum to 1");
        }
    }

    if (!bad.empty())
    {
        throw ValidationError(std::move(bad));
    }
    return spec;
}

std::vector<std::size_t> allocate_counts(const DriftSet& drift, std::size_t n)
{
    if (n == 0)
    {
        throw DomainError("allocate_counts: n must be positive");
    }
    std::vector<std::size_t> m(drift.size(), 0);
    std::size_t rest = 0;
    for (std::size_t j = 1; j < drift.size(); ++j)
    {
        m[j] = static_cast<std::size_t>(std::llround(drift.proportions[j] * static_cast<double>(n)));
        rest += m[j];
    }
    // Keep at least one index in the first block.
    while (rest > n - 1)
    {
        auto it = std::max_element(m.begin() + 1, m.end());
        --*it;
        --rest;
    }
    m[0] = n - rest;
    return m;
}

LocalQ local_q(const ModelSpec& spec)
{
    // t / K(t)^2 = t^(1-alpha) / kK^2
    if (spec.alpha < 1.0)
    {
        return {QRegime::zero, 0.0};
    }
    if (spec.alpha > 1.0)
    {
        return {QRegime::infinite, std::numeric_limits<double>::infinity()};
    }
    return {QRegime::finite, 1.0 / (spec.kK * spec.kK)};
}

double k_function(const ModelSpec& spec, double t)
{
    return spec.kK * std::pow(t, spec.alpha / 2.0);
}

double k_inverse(const ModelSpec& spec, double y)
{
    if (!(y > 0.0))
    {
        throw DomainError("k_inverse: argument must be positive");
    }
    return std::pow(y / spec.kK, 2.0 / spec.alpha);
}

}  // namespace gpmax
