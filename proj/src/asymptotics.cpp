#include "gpmax/asymptotics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>
#include <vector>

#include "gpmax/errors.hpp"
#include "gpmax/gp_synthesis.hpp"
#include "gpmax/rng.hpp"

namespace gpmax {

double normal_cdf(double x)
{
    if (x == std::numeric_limits<double>::infinity())
    {
        return 1.0;
    }
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

ModelConstants model_constants(double H, double c, double beta)
{
    if (!(H > 0.0 && H < beta && c > 0.0 && std::isfinite(beta) && std::isfinite(c)))
    {
        throw DomainError("model_constants requires 0 < H < beta and c > 0");
    }
    const double base = H / (c * (beta - H));
    ModelConstants k;
    k.c = c;
    k.t0 = std::pow(base, 1.0 / beta);
    k.A = (beta - H) / beta * std::pow(base, H / beta);
    k.B = std::pow(base, -(H + 2.0) / beta) * H * beta;
    k.tau = 2.0 * (1.0 - H / beta);
    k.ttilde0 = std::pow(H / (c * beta), 1.0 / beta);
    return k;
}

// ---------------------------------------------------------------------------
// Pickands / Piterbarg estimators

namespace {

void check_alpha(double alpha)
{
    if (!(alpha > 0.0 && alpha <= 2.0))
    {
        throw DomainError("alpha must lie in (0,2]");
    }
}

constexpr std::size_t kMaxConstantPoints = (std::size_t{1} << 23) + 1;
constexpr double kMaxConstantWork = 5e11;
constexpr double kDirectPiterbargMin = 2.0;

std::size_t half_points(const ConstantParams& p)
{
    if (!(p.T > 0.0 && p.eta > 0.0 && std::isfinite(p.T) && std::isfinite(p.eta) && p.eta < p.T))
    {
        throw BudgetError("constant estimation needs 0 < eta < T");
    }
    if (p.batches < 2 || p.replicates < p.batches)
    {
        throw BudgetError("constant estimation needs replicates >= batches >= 2");
    }
    const double half = std::round(p.T / p.eta);
    const double points = 2.0 * half + 1.0;
    if (points > static_cast<double>(kMaxConstantPoints))
    {
        throw BudgetError("constant estimation grid too fine: 2T/eta exceeds 2^23");
    }
    if (points * static_cast<double>(p.replicates) > kMaxConstantWork)
    {
        throw BudgetError("constant estimation budget exceeded (replicates * grid points)");
    }
    return static_cast<std::size_t>(half);
}

class DamperKernel
{
  public:
    DamperKernel(double alpha, double d, double eta, std::size_t half)
        : alpha_(alpha), d_(d), eta_(eta), half_(half), points_(2 * half + 1)
    {
        while (leaves_ < points_)
        {
            leaves_ <<= 1;
        }
        penalty_.resize(points_);
        for (std::size_t j = 0; j < points_; ++j)
        {
            penalty_[j] = std::pow(static_cast<double>(j) * eta, alpha);
        }
    }

    std::size_t points() const { return points_; }

    //! Fills W on [-T, T] for one replicate stream.
    void path(const StreamId& id, std::vector<double>& w, std::vector<double>& scratch) const
    {
        w.resize(points_);
        NormalStream normals(id);
        if (alpha_ == 2.0)
        {
            // B_1(t) = t Z
            const double z = normals();
            for (std::size_t i = 0; i < points_; ++i)
            {
                const double t = time(i);
                w[i] = std::numbers::sqrt2 * t * z - t * t;
            }
            return;
        }
        scratch.resize(points_);
        const Grid g{eta_ * static_cast<double>(points_ - 1), points_ - 1};
        sample_fbm_into(alpha_ / 2.0, g, normals, scratch);
        const double mid = scratch[half_];
        for (std::size_t i = 0; i < points_; ++i)
        {
            w[i] = std::numbers::sqrt2 * (scratch[i] - mid) - penalty_[i > half_ ? i - half_ : half_ - i];
        }
    }

    //! sup_{u in [0, 2T]} sqrt(2) B(u) - u^alpha on the same grid, one-sided.
    double one_sided_sup(const StreamId& id, std::vector<double>& scratch) const
    {
        NormalStream normals(id);
        double best = 0.0;
        if (alpha_ == 2.0)
        {
            const double z = normals();
            for (std::size_t i = 1; i < points_; ++i)
            {
                const double t = static_cast<double>(i) * eta_;
                best = std::max(best, std::numbers::sqrt2 * t * z - t * t);
            }
            return best;
        }
        scratch.resize(points_);
        const Grid g{eta_ * static_cast<double>(points_ - 1), points_ - 1};
        sample_fbm_into(alpha_ / 2.0, g, normals, scratch);
        for (std::size_t i = 1; i < points_; ++i)
        {
            best = std::max(best, std::numbers::sqrt2 * scratch[i] - penalty_[i]);
        }
        return best;
    }

    //! max e^W / sum e^W  (an eta factor cancels against the Riemann sum).
    double pickands_ratio(const std::vector<double>& w) const
    {
        const double top = *std::max_element(w.begin(), w.end());
        double s = 0.0;
        for (double x : w)
        {
            s += std::exp(x - top);
        }
        return 1.0 / (eta_ * s);
    }

    /*!
     * sum_s [max_{r >= -s} e^{W(r) - d (r+s)^alpha} / sum_{r in [-s, T-s]} e^{W(r)}]
     * over grid shifts s = 0..T.
     */
    double piterbarg_ratio(const std::vector<double>& w, std::vector<double>& tree) const
    {
        const double top = *std::max_element(w.begin(), w.end());
        std::vector<double>& prefix = prefix_;
        prefix.resize(points_ + 1);
        prefix[0] = 0.0;
        for (std::size_t i = 0; i < points_; ++i)
        {
            prefix[i + 1] = prefix[i] + std::exp(w[i] - top);
        }
        auto window = [&](std::size_t lo) { return prefix[lo + half_ + 1] - prefix[lo]; };

        double total = 0.0;
        if (alpha_ == 1.0)
        {
            // M(lo) = max_{i>=lo} (W_i - d eta i) + d eta lo
            double suffix = -std::numeric_limits<double>::infinity();
            const double slope = d_ * eta_;
            for (std::size_t i = points_; i-- > 0;)
            {
                suffix = std::max(suffix, w[i] - slope * static_cast<double>(i));
                if (i <= half_)
                {
                    total += std::exp(suffix + slope * static_cast<double>(i) - top) / window(i);
                }
            }
            return total;
        }

        if (alpha_ > 1.0)
        {
            // Convex damping: the maximizing index is nondecreasing in lo.
            std::vector<double>& best = tree;
            best.assign(half_ + 1, 0.0);
            monotone_max(w, best, 0, half_, 0, points_ - 1);
            for (std::size_t lo = 0; lo <= half_; ++lo)
            {
                total += std::exp(best[lo] - top) / window(lo);
            }
            return total;
        }

        build_tree(w, tree);
        for (std::size_t lo = 0; lo <= half_; ++lo)
        {
            total += std::exp(damped_max(w, tree, lo) - top) / window(lo);
        }
        return total;
    }

  private:
    double time(std::size_t i) const
    {
        return (static_cast<double>(i) - static_cast<double>(half_)) * eta_;
    }

    void build_tree(const std::vector<double>& w, std::vector<double>& tree) const
    {
        tree.assign(2 * leaves_, -std::numeric_limits<double>::infinity());
        std::copy(w.begin(), w.end(), tree.begin() + static_cast<std::ptrdiff_t>(leaves_));
        for (std::size_t k = leaves_; k-- > 1;)
        {
            tree[k] = std::max(tree[2 * k], tree[2 * k + 1]);
        }
    }

    // best[lo] = max_{i >= lo} W_i - d penalty[i - lo] for lo in [lo_a, lo_b],
    // knowing the largest maximizer lies in [i_a, i_b].
    void monotone_max(const std::vector<double>& w, std::vector<double>& best, std::size_t lo_a, std::size_t lo_b,
                      std::size_t i_a, std::size_t i_b) const
    {
        while (lo_a <= lo_b)
        {
            const std::size_t mid = lo_a + (lo_b - lo_a) / 2;
            std::size_t arg = std::max(i_a, mid);
            double val = -std::numeric_limits<double>::infinity();
            for (std::size_t i = arg; i <= i_b; ++i)
            {
                const double v = w[i] - d_ * penalty_[i - mid];
                if (v >= val)
                {
                    val = v;
                    arg = i;
                }
            }
            best[mid] = val;
            if (mid > lo_a)
            {
                monotone_max(w, best, lo_a, mid - 1, i_a, arg);
            }
            lo_a = mid + 1;
            i_a = arg;
        }
    }

    // max_{i >= lo} W_i - d penalty[i - lo], branch and bound on the max-tree.
    double damped_max(const std::vector<double>& w, const std::vector<double>& tree, std::size_t lo) const
    {
        double best = std::max(w[lo], w[half_] - d_ * penalty_[half_ - lo]);
        struct Node
        {
            std::size_t k, first, last;
        };
        Node stack[64];
        int top = 0;
        stack[top++] = {1, 0, leaves_ - 1};
        while (top > 0)
        {
            const Node nd = stack[--top];
            if (nd.last < lo || nd.first >= points_)
            {
                continue;
            }
            const std::size_t from = std::max(nd.first, lo);
            if (tree[nd.k] - d_ * penalty_[from - lo] <= best)
            {
                continue;
            }
            if (nd.first == nd.last)
            {
                best = std::max(best, w[nd.first] - d_ * penalty_[nd.first - lo]);
                continue;
            }
            const std::size_t mid = nd.first + (nd.last - nd.first) / 2;
            // Left child first: smaller penalty, likely to raise the bound.
            stack[top++] = {2 * nd.k + 1, mid + 1, nd.last};
            stack[top++] = {2 * nd.k, nd.first, mid};
        }
        return best;
    }

    double alpha_;
    double d_;
    double eta_;
    std::size_t half_;
    std::size_t points_;
    std::size_t leaves_ = 1;
    static thread_local std::vector<double> prefix_;
    std::vector<double> penalty_;
};

thread_local std::vector<double> DamperKernel::prefix_;

template <class PerReplicate>
ConstantEstimate run_estimator(const ConstantParams& p, PerReplicate&& one)
{
    std::vector<double> values(p.replicates);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        std::vector<double> w, scratch, tree;
        for (std::size_t r = next++; r < p.replicates; r = next++)
        {
            values[r] = one(StreamId{p.seed, r, 0}, w, scratch, tree);
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(p.threads, static_cast<unsigned>(p.replicates)));
    if (threads == 1)
    {
        worker();
    }
    else
    {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
        {
            pool.emplace_back(worker);
        }
        for (auto& t : pool)
        {
            t.join();
        }
    }

    std::vector<double> means(p.batches);
    double total = 0.0;
    for (std::size_t b = 0; b < p.batches; ++b)
    {
        const std::size_t first = b * p.replicates / p.batches;
        const std::size_t last = (b + 1) * p.replicates / p.batches;
        double s = 0.0;
        for (std::size_t r = first; r < last; ++r)
        {
            s += values[r];
        }
        total += s;
        means[b] = s / static_cast<double>(last - first);
    }
    ConstantEstimate est;
    est.params = p;
    est.value = total / static_cast<double>(p.replicates);
    double ss = 0.0;
    for (double m : means)
    {
        ss += (m - est.value) * (m - est.value);
    }
    const double nb = static_cast<double>(p.batches);
    est.std_error = std::sqrt(ss / (nb - 1.0) / nb);
    return est;
}

}  // namespace

ConstantEstimate pickands_constant(double alpha, const ConstantParams& params)
{
    check_alpha(alpha);
    const std::size_t half = half_points(params);
    const DamperKernel kernel(alpha, 0.0, params.eta, half);
    auto est = run_estimator(params, [&](const StreamId& id, std::vector<double>& w, std::vector<double>& scratch,
                                     std::vector<double>&) {
        kernel.path(id, w, scratch);
        return kernel.pickands_ratio(w);
    });
    est.method = "normalized-sup";
    return est;
}

ConstantEstimate piterbarg_constant(double alpha, double d, const ConstantParams& params)
{
    check_alpha(alpha);
    if (!(d > 0.0 && std::isfinite(d)))
    {
        throw DomainError("piterbarg constant requires d > 0");
    }
    const std::size_t half = half_points(params);
    const DamperKernel kernel(alpha, d, params.eta, half);
    if (d >= kDirectPiterbargMin)
    {
        // With t = (1+d)^(-2/alpha) u the damped supremum is Y/(1+d), where
        // Y = sup_u sqrt(2) B(u) - u^alpha does not depend on d. Its tail is
        // about e^{-y}, so exp(Y/(1+d)) has finite variance once d > 1.
        auto est = run_estimator(params, [&](const StreamId& id, std::vector<double>&, std::vector<double>& scratch,
                                             std::vector<double>&) {
            return std::exp(kernel.one_sided_sup(id, scratch) / (1.0 + d));
        });
        est.method = "scaled-direct";
        return est;
    }
    auto est = run_estimator(params, [&](const StreamId& id, std::vector<double>& w, std::vector<double>& scratch,
                                         std::vector<double>& tree) {
        kernel.path(id, w, scratch);
        return kernel.piterbarg_ratio(w, tree);
    });
    est.method = "normalized-sup";
    return est;
}

std::optional<double> closed_form_pickands(double alpha)
{
    if (alpha == 1.0)
    {
        return 1.0;
    }
    if (alpha == 2.0)
    {
        return std::numbers::inv_sqrtpi;
    }
    return std::nullopt;
}

std::optional<double> closed_form_piterbarg(double alpha, double d)
{
    if (alpha == 1.0)
    {
        return 1.0 + 1.0 / d;
    }
    if (alpha == 2.0)
    {
        return 0.5 * (1.0 + std::sqrt(1.0 + 1.0 / d));
    }
    return std::nullopt;
}

double ConstantProvider::pickands(double alpha) const
{
    check_alpha(alpha);
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = pickands_.find(alpha); it != pickands_.end())
    {
        return it->second;
    }
    const auto closed = closed_form_pickands(alpha);
    const double v = closed ? *closed : pickands_constant(alpha, params_).value;
    pickands_.emplace(alpha, v);
    return v;
}

double ConstantProvider::piterbarg(double alpha, double d) const
{
    check_alpha(alpha);
    if (!(d > 0.0))
    {
        throw DomainError("piterbarg constant requires d > 0");
    }
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_pair(alpha, d);
    if (auto it = piterbarg_.find(key); it != piterbarg_.end())
    {
        return it->second;
    }
    const auto closed = closed_form_piterbarg(alpha, d);
    const double v = closed ? *closed : piterbarg_constant(alpha, d, params_).value;
    piterbarg_.emplace(key, v);
    return v;
}

void ConstantProvider::set_pickands(double alpha, double value)
{
    std::lock_guard<std::mutex> lock(mutex_);
    pickands_[alpha] = value;
}

void ConstantProvider::set_piterbarg(double alpha, double d, double value)
{
    std::lock_guard<std::mutex> lock(mutex_);
    piterbarg_[{alpha, d}] = value;
}

ConstantProvider& ConstantProvider::global()
{
    static ConstantProvider provider;
    return provider;
}

// ---------------------------------------------------------------------------
// Tail asymptotics

double capital_D(double y, double c0, const ModelSpec& model, const ConstantProvider& constants)
{
    if (!(y > 0.0))
    {
        throw DomainError("capital_D requires y > 0");
    }
    const double gap = model.H - c0 * model.beta;
    if (!(gap > 0.0) || c0 < 0.0)
    {
        throw DomainError("capital_D requires c0 >= 0 and H - c0*beta > 0");
    }
    const LocalQ q = local_q(model);
    static const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    switch (q.regime)
    {
        case QRegime::zero:
        {
            const double h = constants.pickands(model.alpha);
            return h / (std::pow(2.0, 1.0 / model.alpha) * gap) * inv_sqrt_2pi / (y * y * k_inverse(model, 1.0 / y));
        }
        case QRegime::finite: return constants.piterbarg(model.alpha, 2.0 * gap * q.value) * inv_sqrt_2pi;
        case QRegime::infinite: return inv_sqrt_2pi;
    }
    return inv_sqrt_2pi;
}

double big_R(double u, const ModelSpec& model, const ConstantProvider& constants)
{
    if (!(u > 0.0))
    {
        throw DomainError("big_R requires u > 0");
    }
    const ModelConstants k = model_constants(model);
    const double a = model.alpha;
    const double hb = model.H / model.beta;
    const double log_r = (1.5 - 2.0 / a) * std::log(k.A) + std::log(constants.pickands(a)) -
                         std::log(2.0) / a - 0.5 * std::log(k.B) - std::log(k.t0) + (2.0 * hb - 2.0) * std::log(u) -
                         std::log(k_inverse(model, std::pow(u, hb - 1.0)));
    return std::exp(log_r);
}

double psi_infinite(double u, const ModelSpec& model, const ConstantProvider& constants)
{
    const ModelConstants k = model_constants(model);
    return big_R(u, model, constants) * std::exp(-std::pow(u, k.tau) / (2.0 * k.A * k.A));
}

double psi_finite(double u, double Tu, const ModelSpec& model, const DLabel& regime,
                  const ConstantProvider& constants)
{
    if (!(u > 0.0 && Tu > 0.0))
    {
        throw DomainError("psi_finite requires u > 0 and Tu > 0");
    }
    const ModelConstants k = model_constants(model);
    if (regime.regime == DRegime::D3)
    {
        if (std::isnan(regime.x) || regime.x == -std::numeric_limits<double>::infinity())
        {
            throw RegimeError("D3 requires x in (-inf, inf]");
        }
        return psi_infinite(u, model, constants) * normal_cdf(regime.x);
    }
    double s0 = 0.0;
    if (regime.regime == DRegime::D2)
    {
        s0 = regime.s0;
        if (!(s0 > 0.0 && s0 < k.t0))
        {
            throw RegimeError("D2 requires s0 in (0, t0)");
        }
    }
    const double c = model.c();
    const double csb = c * std::pow(s0, model.beta);
    const double c0 = csb / (1.0 + csb);
    const double v = (u + c * std::pow(Tu, model.beta)) / std::pow(Tu, model.H);
    return capital_D(v, c0, model, constants) / v * std::exp(-0.5 * v * v);
}

}  // namespace gpmax
