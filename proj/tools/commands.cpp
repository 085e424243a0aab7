#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "cli.hpp"
#include "gpmax/errors.hpp"
#include "gpmax/gp_synthesis.hpp"
#include "gpmax/normalizers.hpp"
#include "gpmax/version.hpp"

namespace gpmax::cli {

namespace {

std::string cell(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string cell(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
    {
        return s;
    }
    std::string q = "\"";
    for (char ch : s)
    {
        q += ch;
        if (ch == '"') q += '"';
    }
    return q + "\"";
}

std::string cell(std::size_t v) { return std::to_string(v); }

class Table
{
  public:
    Table(const std::string& command, const json& config, std::vector<std::string> header,
          const std::vector<std::string>& comments = {})
    {
        out_ << "# gpmax-csv v1 " << command << "\n";
        out_ << "# version: " << kVersion << "\n";
        out_ << "# config: " << config.dump() << "\n";
        for (const auto& c : comments) out_ << "# " << c << "\n";
        row(header);
    }

    template <class... Ts>
    void add(const Ts&... v)
    {
        row({cell(v)...});
    }

    std::string str() const { return out_.str(); }

  private:
    void row(const std::vector<std::string>& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i)
        {
            out_ << (i ? "," : "") << cells[i];
        }
        out_ << "\n";
    }

    std::ostringstream out_;
};

json num(double v)
{
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return nullptr;
    return v;
}

json opt(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

json scenario_json(const ScenarioLabel& s, const SubcaseLabel& sub)
{
    return {{"scenario", to_string(s.scenario)},
            {"subcase", sub.theorem_case},
            {"kappa0", opt(s.kappa0)},
            {"stilde0", opt(s.stilde0)},
            {"x0", opt(s.x0)},
            {"inhomogeneous", sub.inhomogeneous},
            {"q0", opt(sub.q0)},
            {"q1", opt(sub.q1)}};
}

json prediction_json(const Prediction& p)
{
    return {{"recipe",
             {{"kind", to_string(p.recipe.kind)},
              {"scenario", to_string(p.recipe.scenario.scenario)},
              {"subcase", p.recipe.subcase.theorem_case},
              {"x0", num(p.recipe.x0)}}},
            {"law", law_to_json(p.law)},
            {"law_text", to_string(p.law)}};
}

json estimate_json(const ConstantEstimate& e, std::optional<double> closed)
{
    return {{"value", e.value}, {"std_error", e.std_error}, {"method", e.method}, {"closed_form", opt(closed)}};
}

std::size_t as_index(double v, const char* what)
{
    if (!(v >= 1 && v == std::floor(v) && v < 1e15))
    {
        throw DomainError(std::string(what) + " entries must be positive integers");
    }
    return static_cast<std::size_t>(v);
}

double mean(const std::vector<double>& v)
{
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stdev(const std::vector<double>& v)
{
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

SimConfig sim_config(const RunConfig& cfg)
{
    SimConfig s;
    s.model = cfg.model;
    s.family = cfg.family;
    s.n = cfg.n;
    s.replicas = cfg.replicas;
    s.grid_m = cfg.grid_m;
    s.seed = cfg.seed;
    s.threads = cfg.threads;
    s.normalize_at = cfg.normalize_at;
    s.synthesis = cfg.synthesis;
    return s;
}

std::vector<double> read_sample(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ConfigError("sample: cannot open '" + path + "'");
    }
    std::vector<double> out;
    std::string line;
    std::ptrdiff_t column = -1;
    while (std::getline(in, line))
    {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        if (column < 0)
        {
            const auto it = std::find(cells.begin(), cells.end(), "normalized");
            if (it != cells.end())
            {
                column = it - cells.begin();
                continue;
            }
            column = 0;
        }
        if (static_cast<std::size_t>(column) >= cells.size())
        {
            throw ConfigError("sample: short row in '" + path + "'");
        }
        try
        {
            out.push_back(std::stod(cells[column]));
        }
        catch (const std::exception&)
        {
            if (out.empty()) continue;  // a header without a "normalized" column
            throw ConfigError("sample: non-numeric value '" + cells[column] + "'");
        }
    }
    return out;
}

// Golden-table rendering: symbolic forms of the normalizer and the limit.

std::string center_text(const Recipe& r)
{
    switch (r.kind)
    {
        case NormalizerKind::identity: return "M_n";
        case NormalizerKind::b_a:
        case NormalizerKind::b_sigma0: return "b_n";
        case NormalizerKind::d_e:
        case NormalizerKind::d_sigma0:
            if (std::isinf(r.x0)) return "d_n(inf)";
            return r.x0 == 0 ? "d_n(0)" : "d_n(" + cell(r.x0) + ")";
        case NormalizerKind::mu: return "T_n^H mu_n";
    }
    return "";
}

std::string scale_text(NormalizerKind k)
{
    switch (k)
    {
        case NormalizerKind::identity: return "1";
        case NormalizerKind::b_a: return "a_n";
        case NormalizerKind::b_sigma0:
        case NormalizerKind::d_sigma0: return "sigma0 T_n^H0";
        case NormalizerKind::d_e: return "e_n";
        case NormalizerKind::mu: return "T_n^H/sqrt(2 log n)";
    }
    return "";
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

std::string limit_text(const LimitLaw& law, const ModelSpec& m, double lambda)
{
    std::string shift;
    if (law.shift != 0)
    {
        shift = close(law.shift, std::log(m.drift.proportions.front())) ? " + log p1" : " + " + cell(law.shift);
    }
    switch (law.kind)
    {
        case LimitLaw::Kind::degenerate:
            if (law.point == 0) return "0";
            return close(law.point, 1.0 / lambda) ? "lambda^-1" : cell(law.point);
        case LimitLaw::Kind::gumbel: return "Lambda" + shift;
        case LimitLaw::Kind::normal: return "N";
        case LimitLaw::Kind::mixture:
        {
            const std::string coef = close(law.coef, m.sigma0 / lambda) ? "sigma0 lambda^-1" : cell(law.coef);
            return "Lambda" + shift + " + " + coef + " N";
        }
    }
    return "";
}

struct ExampleRow
{
    double gamma;
    double lambda;
    const char* range;
};

struct Example
{
    ModelSpec model;
    std::vector<ExampleRow> rows;
};

ModelSpec example_model(double H, double H0, DriftSet drift)
{
    ModelSpec m;
    m.H = H;
    m.H0 = H0;
    m.sigma0 = 0.5;
    m.beta = 1.0;
    m.drift = std::move(drift);
    return m;
}

Example example(const std::string& which)
{
    // beta > H0 > 2H; ttilde0^beta = 0.2.
    const std::vector<ExampleRow> first = {
        {-6.0, 2.0, "gamma < -1/H"},
        {-5.0, 2.0, "gamma = -1/H"},
        {-4.0, 2.0, "-1/H < gamma < -1/(H0-H)"},
        {-10.0 / 3.0, 2.0, "gamma = -1/(H0-H)"},
        {0.0, 2.0, "-1/(H0-H) < gamma < 1/(beta-H)"},
        {1.25, 0.1, "gamma = 1/(beta-H); lambda < ttilde0^beta"},
        {1.25, 0.2, "gamma = 1/(beta-H); lambda = ttilde0^beta"},
        {1.25, 0.5, "gamma = 1/(beta-H); lambda > ttilde0^beta"},
    };
    if (which == "3.1")
    {
        return {example_model(0.2, 0.5, {}), first};
    }
    if (which == "4.1a")
    {
        return {example_model(0.2, 0.5, {{1.0, 2.0}, {0.5, 0.5}}), first};
    }
    if (which == "4.1b")
    {
        // H0 < H < beta < 2H - H0; ttilde0^beta = 0.6.
        return {example_model(0.6, 0.1, {{1.0, 2.0}, {0.5, 0.5}}),
                {
                    {-3.0, 2.0, "gamma < -1/H"},
                    {-5.0 / 3.0, 2.0, "gamma = -1/H"},
                    {0.0, 2.0, "-1/H < gamma < 1/(H-H0)"},
                    {2.0, 2.0, "gamma = 1/(H-H0)"},
                    {2.2, 2.0, "1/(H-H0) < gamma < 1/(beta-H)"},
                    {2.5, 0.3, "gamma = 1/(beta-H); lambda < ttilde0^beta"},
                    {2.5, 0.6, "gamma = 1/(beta-H); lambda = ttilde0^beta"},
                    {2.5, 0.9, "gamma = 1/(beta-H); lambda > ttilde0^beta"},
                }};
    }
    throw ConfigError("which: expected 3.1, 4.1a or 4.1b");
}

void require_law_sample(const std::vector<double>& v)
{
    if (v.size() < 100)
    {
        throw DomainError("gof needs at least 100 sample points, got " + std::to_string(v.size()));
    }
}

}  // namespace

Artifact execute(const RunConfig& cfg, bool dump_path)
{
    const json config = config_to_json(cfg);
    Artifact art;
    art.summary = {{"tool", "gpmax"}, {"version", kVersion}, {"command", cfg.command}, {"config", config}};
    json& result = art.summary["result"];
    const ConstantProvider provider(cfg.constants);
    const std::string& cmd = cfg.command;

    if (cmd == "constants")
    {
        const auto k = model_constants(validate_model(cfg.model));
        result = {{"t0", k.t0}, {"A", k.A}, {"B", k.B}, {"tau", k.tau}, {"ttilde0", k.ttilde0}, {"c", k.c}};
        Table t(cmd, config, {"t0", "A", "B", "tau", "ttilde0", "c"});
        t.add(k.t0, k.A, k.B, k.tau, k.ttilde0, k.c);
        art.csv = t.str();
    }
    else if (cmd == "pickands" || cmd == "piterbarg")
    {
        const bool pk = cmd == "pickands";
        const auto est = pk ? pickands_constant(cfg.alpha, cfg.constants)
                            : piterbarg_constant(cfg.alpha, cfg.d, cfg.constants);
        const auto closed = pk ? closed_form_pickands(cfg.alpha) : closed_form_piterbarg(cfg.alpha, cfg.d);
        result = estimate_json(est, closed);
        result["alpha"] = cfg.alpha;
        if (!pk) result["d"] = cfg.d;
        Table t(cmd, config, {"alpha", "d", "value", "std_error", "method", "closed_form"});
        t.add(cfg.alpha, pk ? std::numeric_limits<double>::quiet_NaN() : cfg.d, est.value, est.std_error,
              est.method, closed.value_or(std::numeric_limits<double>::quiet_NaN()));
        art.csv = t.str();
    }
    else if (cmd == "psi")
    {
        const auto m = validate_model(cfg.model);
        result = json::array();
        Table t(cmd, config, {"u", "R", "psi_infinite", "psi_finite"});
        TuFamily tu;
        if (cfg.Tu) tu.value = *cfg.Tu;
        for (double u : cfg.u)
        {
            const double R = big_R(u, m, provider);
            const double inf = psi_infinite(u, m, provider);
            const double fin = cfg.Tu ? psi_finite(u, tu, m, provider) : std::numeric_limits<double>::quiet_NaN();
            result.push_back({{"u", u}, {"R", R}, {"psi_infinite", inf}, {"psi_finite", num(fin)}});
            t.add(u, R, inf, fin);
        }
        art.csv = t.str();
    }
    else if (cmd == "classify")
    {
        const auto m = validate_model(cfg.model);
        const auto s = classify_S(cfg.family, m);
        const auto sub = classify_subcase(cfg.family, m, s);
        result = scenario_json(s, sub);
        Table t(cmd, config, {"scenario", "subcase", "kappa0", "stilde0", "x0", "q0", "q1"});
        const double nan = std::numeric_limits<double>::quiet_NaN();
        t.add(to_string(s.scenario), sub.theorem_case, s.kappa0.value_or(nan), s.stilde0.value_or(nan),
              s.x0.value_or(nan), sub.q0.value_or(nan), sub.q1.value_or(nan));
        art.csv = t.str();
    }
    else if (cmd == "normalizers")
    {
        const auto m = validate_model(cfg.model);
        const auto p = predict_limit(m, cfg.family);
        result = {{"prediction", prediction_json(p)}, {"rows", json::array()}};
        Table t(cmd, config, {"n", "center", "scale", "kind"});
        for (double n : cfg.n_list)
        {
            const auto ns = p.recipe.evaluate(n, m, cfg.family, provider);
            result["rows"].push_back(
                {{"n", n}, {"center", num(ns.center)}, {"scale", num(ns.scale)}, {"kind", to_string(ns.kind)}});
            t.add(n, ns.center, ns.scale, to_string(ns.kind));
        }
        art.csv = t.str();
    }
    else if (cmd == "predict")
    {
        const auto m = validate_model(cfg.model);
        const auto p = predict_limit(m, cfg.family);
        result = prediction_json(p);
        Table t(cmd, config, {"scenario", "subcase", "normalizer", "x0", "law", "point", "shift", "coef"});
        t.add(to_string(p.recipe.scenario.scenario), p.recipe.subcase.theorem_case, to_string(p.recipe.kind),
              p.recipe.x0, to_string(p.law.kind), p.law.point, p.law.shift, p.law.coef);
        art.csv = t.str();
    }
    else if (cmd == "simulate" || cmd == "gof")
    {
        std::vector<double> sample;
        LimitLaw law;
        if (cmd == "gof" && cfg.sample)
        {
            sample = read_sample(*cfg.sample);
            if (!cfg.law)
            {
                law = predict_limit(validate_model(cfg.model), cfg.family).law;
            }
            else
            {
                law = *cfg.law;
            }
            result["source"] = *cfg.sample;
        }
        else
        {
            const auto sim = sim_config(cfg);
            const auto r = simulate_maxima(sim, provider);
            sample = r.normalized;
            law = cfg.law ? *cfg.law : r.prediction.law;
            result["horizon"] = num(r.horizon);
            result["normalizer"] = {{"kind", to_string(r.recipe_used.kind)},
                                    {"center", num(r.recipe_used.center)},
                                    {"scale", num(r.recipe_used.scale)}};
            result["prediction"] = prediction_json(r.prediction);
            result["raw"] = {{"mean", mean(r.raw)}, {"sd", stdev(r.raw)}};
            result["normalized_stats"] = {{"mean", mean(r.normalized)}, {"sd", stdev(r.normalized)}};
            result["streams"] = "replica r uses StreamId{seed, r, component}; component 0 is the common process";
            if (cmd == "simulate")
            {
                Table t(cmd, config, {"replica", "raw", "normalized", "raw_half_mesh", "normalized_half_mesh"});
                for (std::size_t i = 0; i < r.raw.size(); ++i)
                {
                    t.add(i, r.raw[i], r.normalized[i], r.raw_half_mesh[i], r.normalized_half_mesh[i]);
                }
                art.csv = t.str();
            }
            if (dump_path)
            {
                const Grid grid{r.horizon, cfg.grid_m};
                const auto path = sample_fbm(cfg.model.H, grid, StreamId{cfg.seed, 0, 1}, cfg.synthesis);
                std::ostringstream os;
                os << "# gpmax-csv v1 path\n# version: " << kVersion << "\n# config: " << config.dump()
                   << "\n# X_1 of replica 0, method " << to_string(path.method) << "\nt,value\n";
                for (std::size_t j = 0; j < path.values.size(); ++j)
                {
                    os << cell(grid.time(j)) << "," << cell(path.values[j]) << "\n";
                }
                art.path_csv = os.str();
            }
        }
        result["seed"] = cfg.seed;
        result["law"] = law_to_json(law);
        if (sample.size() >= 100)
        {
            const auto g = gof(sample, law);
            result["gof"] = {{"ks", g.ks}, {"ad", num(g.ad)}, {"sample_size", g.sample_size},
                             {"ks_band_95", ks_band(g.sample_size)}};
            if (cmd == "gof")
            {
                Table t(cmd, config, {"sample_size", "ks", "ad", "ks_band_95", "law"});
                t.add(g.sample_size, g.ks, g.ad, ks_band(g.sample_size), to_string(law));
                art.csv = t.str();
            }
        }
        else if (cmd == "gof")
        {
            require_law_sample(sample);
        }
        else
        {
            result["gof"] = nullptr;
        }
    }
    else if (cmd == "sweep")
    {
        const auto m = validate_model(cfg.model);
        std::vector<std::size_t> ns;
        for (double n : cfg.n_list) ns.push_back(as_index(n, "n_list"));
        const auto rows = convergence_sweep(m, cfg.family, ns, cfg.replicas, cfg.grid_m, cfg.seed, cfg.threads,
                                            provider);
        result = {{"seed", cfg.seed}, {"rows", json::array()}};
        Table t(cmd, config, {"n", "ks", "ad", "center", "scale"});
        for (const auto& r : rows)
        {
            result["rows"].push_back(
                {{"n", r.n}, {"ks", r.ks}, {"ad", num(r.ad)}, {"center", num(r.center)}, {"scale", num(r.scale)}});
            t.add(r.n, r.ks, r.ad, r.center, r.scale);
        }
        art.csv = t.str();
    }
    else if (cmd == "reproduce-example")
    {
        const auto ex = example(cfg.which);
        const auto k = model_constants(ex.model);
        json model = config_to_json([&] {
                         RunConfig c;
                         c.model = ex.model;
                         return c;
                     }())["model"];
        result = {{"which", cfg.which}, {"model", model}, {"ttilde0_beta", std::pow(k.ttilde0, ex.model.beta)},
                  {"rows", json::array()}};
        Table t(cmd, config,
                {"case", "gamma", "lambda", "range", "scenario", "subcase", "normalizer", "center", "scale", "limit",
                 "point", "shift", "coef"},
                {"model: " + model.dump()});
        for (std::size_t i = 0; i < ex.rows.size(); ++i)
        {
            const auto& row = ex.rows[i];
            const auto f = HorizonFamily::power_log(row.gamma, row.lambda);
            const auto p = predict_limit(ex.model, f);
            const std::string limit = limit_text(p.law, ex.model, row.lambda);
            result["rows"].push_back({{"case", i + 1},
                                      {"gamma", row.gamma},
                                      {"lambda", row.lambda},
                                      {"range", row.range},
                                      {"scenario", to_string(p.recipe.scenario.scenario)},
                                      {"subcase", p.recipe.subcase.theorem_case},
                                      {"normalizer", to_string(p.recipe.kind)},
                                      {"center", center_text(p.recipe)},
                                      {"scale", scale_text(p.recipe.kind)},
                                      {"limit", limit},
                                      {"law", law_to_json(p.law)}});
            t.add(i + 1, row.gamma, row.lambda, std::string(row.range), to_string(p.recipe.scenario.scenario),
                  p.recipe.subcase.theorem_case, to_string(p.recipe.kind), center_text(p.recipe),
                  scale_text(p.recipe.kind), limit, p.law.point, p.law.shift, p.law.coef);
        }
        art.csv = t.str();
    }
    else if (cmd == "limit-cdf")
    {
        if (!cfg.law)
        {
            throw ConfigError("limit-cdf needs a law (--law or \"law\")");
        }
        result = {{"law", law_to_json(*cfg.law)}, {"rows", json::array()}};
        Table t(cmd, config, {"x", "cdf"});
        for (double x : cfg.x)
        {
            const double F = limit_cdf(*cfg.law, x);
            result["rows"].push_back({{"x", num(x)}, {"cdf", F}});
            t.add(x, F);
        }
        art.csv = t.str();
    }
    else
    {
        throw ConfigError("no command given; use one of the subcommands or set \"command\" in the config");
    }
    return art;
}

}  // namespace gpmax::cli
