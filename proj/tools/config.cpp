#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "cli.hpp"
#include "gpmax/errors.hpp"

namespace gpmax::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

json num(double v)
{
    if (std::isinf(v))
    {
        return v > 0 ? "inf" : "-inf";
    }
    return v;
}

json opt_num(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

json num_list(const std::vector<double>& v)
{
    json out = json::array();
    for (double x : v)
    {
        out.push_back(num(x));
    }
    return out;
}

double as_num(const json& j, const std::string& where)
{
    if (j.is_number())
    {
        return j.get<double>();
    }
    if (j.is_string())
    {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "+inf")
        {
            return kInf;
        }
        if (s == "-inf")
        {
            return -kInf;
        }
    }
    throw ConfigError(where + ": expected a number");
}

std::uint64_t as_count(const json& j, const std::string& where)
{
    if (j.is_number_unsigned())
    {
        return j.get<std::uint64_t>();
    }
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0)
    {
        return static_cast<std::uint64_t>(j.get<std::int64_t>());
    }
    if (j.is_number_float())
    {
        const double v = j.get<double>();
        if (v >= 0 && v == std::floor(v) && v < 1.8e19)
        {
            return static_cast<std::uint64_t>(v);
        }
    }
    throw ConfigError(where + ": expected a non-negative integer");
}

std::vector<double> as_list(const json& j, const std::string& where)
{
    if (!j.is_array())
    {
        throw ConfigError(where + ": expected an array");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        out.push_back(as_num(j[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
}

bool as_bool(const json& j, const std::string& where)
{
    if (!j.is_boolean())
    {
        throw ConfigError(where + ": expected true or false");
    }
    return j.get<bool>();
}

std::string as_string(const json& j, const std::string& where)
{
    if (!j.is_string())
    {
        throw ConfigError(where + ": expected a string");
    }
    return j.get<std::string>();
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!obj.is_object())
    {
        throw ConfigError(where + ": expected an object");
    }
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : obj.items())
    {
        if (!ok.count(item.key()))
        {
            throw ConfigError(where + ": unknown key '" + item.key() + "'");
        }
    }
}

bool present(const json& obj, const char* key) { return obj.contains(key) && !obj.at(key).is_null(); }

ModelSpec model_from_json(const json& j)
{
    check_keys(j, "model", {"H", "H0", "sigma0", "beta", "alpha", "kK", "drift"});
    ModelSpec m;
    m.sigma0 = 1.0;
    if (present(j, "H")) m.H = as_num(j["H"], "model.H");
    if (present(j, "H0")) m.H0 = as_num(j["H0"], "model.H0");
    if (present(j, "sigma0")) m.sigma0 = as_num(j["sigma0"], "model.sigma0");
    if (present(j, "beta")) m.beta = as_num(j["beta"], "model.beta");
    if (present(j, "alpha")) m.alpha = as_num(j["alpha"], "model.alpha");
    if (present(j, "kK")) m.kK = as_num(j["kK"], "model.kK");
    if (present(j, "drift"))
    {
        const auto& d = j["drift"];
        check_keys(d, "model.drift", {"values", "proportions"});
        if (present(d, "values")) m.drift.values = as_list(d["values"], "model.drift.values");
        if (present(d, "proportions"))
        {
            m.drift.proportions = as_list(d["proportions"], "model.drift.proportions");
        }
        else if (m.drift.values.size() == 1)
        {
            m.drift.proportions = {1.0};
        }
    }
    return m;
}

json model_to_json(const ModelSpec& m)
{
    return {{"H", num(m.H)},
            {"H0", num(m.H0)},
            {"sigma0", num(m.sigma0)},
            {"beta", num(m.beta)},
            {"alpha", num(m.alpha)},
            {"kK", num(m.kK)},
            {"drift", {{"values", num_list(m.drift.values)}, {"proportions", num_list(m.drift.proportions)}}}};
}

HorizonFamily family_from_json(const json& j)
{
    check_keys(j, "family", {"kind", "gamma", "lambda", "T", "table", "x0"});
    const std::string kind = present(j, "kind") ? as_string(j["kind"], "family.kind") : "constant";
    if (kind == "power-log")
    {
        return HorizonFamily::power_log(present(j, "gamma") ? as_num(j["gamma"], "family.gamma") : 0.0,
                                        present(j, "lambda") ? as_num(j["lambda"], "family.lambda") : 1.0);
    }
    if (kind == "constant")
    {
        return HorizonFamily::constant_horizon(present(j, "T") ? as_num(j["T"], "family.T") : 1.0);
    }
    if (kind == "explicit")
    {
        if (!present(j, "table") || !j["table"].is_array())
        {
            throw ConfigError("family.table: explicit families need a [[n, T_n], ...] table");
        }
        std::vector<std::pair<double, double>> table;
        for (const auto& row : j["table"])
        {
            const auto v = as_list(row, "family.table");
            if (v.size() != 2)
            {
                throw ConfigError("family.table: each row is [n, T_n]");
            }
            table.emplace_back(v[0], v[1]);
        }
        return HorizonFamily::explicit_table(std::move(table));
    }
    if (kind == "s4-calibrated")
    {
        return HorizonFamily::s4_calibrated(present(j, "x0") ? as_num(j["x0"], "family.x0") : 0.0);
    }
    throw ConfigError("family.kind: unknown kind '" + kind + "'");
}

json family_to_json(const HorizonFamily& f)
{
    switch (f.kind)
    {
        case FamilyKind::power_log:
            return {{"kind", "power-log"}, {"gamma", num(f.gamma)}, {"lambda", num(f.lambda)}};
        case FamilyKind::constant: return {{"kind", "constant"}, {"T", num(f.T)}};
        case FamilyKind::explicit_seq:
        {
            if (f.table.empty())
            {
                throw ConfigError("family: sequence-valued families cannot be serialized");
            }
            json rows = json::array();
            for (const auto& [n, T] : f.table)
            {
                rows.push_back({num(n), num(T)});
            }
            return {{"kind", "explicit"}, {"table", rows}};
        }
        case FamilyKind::s4_calibrated:
            if (f.epsilon)
            {
                throw ConfigError("family: a custom epsilon sequence cannot be serialized");
            }
            return {{"kind", "s4-calibrated"}, {"x0", num(f.x0)}};
    }
    return nullptr;
}

}  // namespace

json law_to_json(const LimitLaw& law)
{
    json j{{"kind", to_string(law.kind)}};
    switch (law.kind)
    {
        case LimitLaw::Kind::degenerate: j["point"] = num(law.point); break;
        case LimitLaw::Kind::gumbel: j["shift"] = num(law.shift); break;
        case LimitLaw::Kind::normal: break;
        case LimitLaw::Kind::mixture:
            j["shift"] = num(law.shift);
            j["coef"] = num(law.coef);
            break;
    }
    return j;
}

LimitLaw law_from_json(const json& j)
{
    check_keys(j, "law", {"kind", "point", "shift", "coef"});
    const std::string kind = present(j, "kind") ? as_string(j["kind"], "law.kind") : "";
    const double point = present(j, "point") ? as_num(j["point"], "law.point") : 0.0;
    const double shift = present(j, "shift") ? as_num(j["shift"], "law.shift") : 0.0;
    const double coef = present(j, "coef") ? as_num(j["coef"], "law.coef") : 1.0;
    if (kind == "degenerate") return LimitLaw::degenerate(point);
    if (kind == "gumbel") return LimitLaw::gumbel(shift);
    if (kind == "normal") return LimitLaw::normal();
    if (kind == "gumbel-normal-mixture" || kind == "mixture")
    {
        if (!(coef > 0))
        {
            throw ConfigError("law.coef: must be > 0");
        }
        return LimitLaw::mixture(coef, shift);
    }
    throw ConfigError("law.kind: expected degenerate, gumbel, normal or mixture");
}

RunConfig config_from_json(const json& input)
{
    const json& doc = (input.is_object() && input.contains("config") && input["config"].is_object())
                          ? input["config"]
                          : input;
    check_keys(doc, "config",
               {"command", "seed", "threads", "model", "family", "sim", "constants", "alpha", "d", "u", "Tu",
                "n_list", "law", "x", "which", "sample", "format"});
    RunConfig cfg;
    if (present(doc, "command"))
    {
        cfg.command = as_string(doc["command"], "command");
        if (std::find(kCommands.begin(), kCommands.end(), cfg.command) == kCommands.end())
        {
            throw ConfigError("command: unknown command '" + cfg.command + "'");
        }
    }
    if (present(doc, "seed")) cfg.seed = as_count(doc["seed"], "seed");
    if (present(doc, "threads")) cfg.threads = static_cast<unsigned>(as_count(doc["threads"], "threads"));
    if (present(doc, "model")) cfg.model = model_from_json(doc["model"]);
    if (present(doc, "family")) cfg.family = family_from_json(doc["family"]);
    if (present(doc, "sim"))
    {
        const auto& s = doc["sim"];
        check_keys(s, "sim", {"n", "replicas", "grid_m", "normalize_at", "force_cholesky", "reverse_blocks"});
        if (present(s, "n")) cfg.n = as_count(s["n"], "sim.n");
        if (present(s, "replicas")) cfg.replicas = as_count(s["replicas"], "sim.replicas");
        if (present(s, "grid_m")) cfg.grid_m = as_count(s["grid_m"], "sim.grid_m");
        if (present(s, "normalize_at")) cfg.normalize_at = as_num(s["normalize_at"], "sim.normalize_at");
        if (present(s, "force_cholesky"))
        {
            cfg.synthesis.force_cholesky = as_bool(s["force_cholesky"], "sim.force_cholesky");
        }
        if (present(s, "reverse_blocks"))
        {
            cfg.synthesis.reverse_blocks = as_bool(s["reverse_blocks"], "sim.reverse_blocks");
        }
    }
    if (present(doc, "constants"))
    {
        const auto& c = doc["constants"];
        check_keys(c, "constants", {"T", "eta", "replicates", "batches"});
        if (present(c, "T")) cfg.constants.T = as_num(c["T"], "constants.T");
        if (present(c, "eta")) cfg.constants.eta = as_num(c["eta"], "constants.eta");
        if (present(c, "replicates")) cfg.constants.replicates = as_count(c["replicates"], "constants.replicates");
        if (present(c, "batches")) cfg.constants.batches = as_count(c["batches"], "constants.batches");
    }
    cfg.constants.seed = cfg.seed;
    cfg.constants.threads = cfg.threads;
    if (present(doc, "alpha")) cfg.alpha = as_num(doc["alpha"], "alpha");
    if (present(doc, "d")) cfg.d = as_num(doc["d"], "d");
    if (present(doc, "u")) cfg.u = as_list(doc["u"], "u");
    if (present(doc, "Tu")) cfg.Tu = as_num(doc["Tu"], "Tu");
    if (present(doc, "n_list")) cfg.n_list = as_list(doc["n_list"], "n_list");
    if (present(doc, "law")) cfg.law = law_from_json(doc["law"]);
    if (present(doc, "x")) cfg.x = as_list(doc["x"], "x");
    if (present(doc, "which")) cfg.which = as_string(doc["which"], "which");
    if (present(doc, "sample")) cfg.sample = as_string(doc["sample"], "sample");
    if (present(doc, "format"))
    {
        cfg.format = as_string(doc["format"], "format");
        if (cfg.format != "json" && cfg.format != "csv")
        {
            throw ConfigError("format: expected csv or json");
        }
    }
    return cfg;
}

json config_to_json(const RunConfig& cfg)
{
    // threads is left out: it never changes an artifact.
    return {{"command", cfg.command},
            {"seed", cfg.seed},
            {"model", model_to_json(cfg.model)},
            {"family", family_to_json(cfg.family)},
            {"sim",
             {{"n", cfg.n},
              {"replicas", cfg.replicas},
              {"grid_m", cfg.grid_m},
              {"normalize_at", opt_num(cfg.normalize_at)},
              {"force_cholesky", cfg.synthesis.force_cholesky},
              {"reverse_blocks", cfg.synthesis.reverse_blocks}}},
            {"constants",
             {{"T", num(cfg.constants.T)},
              {"eta", num(cfg.constants.eta)},
              {"replicates", cfg.constants.replicates},
              {"batches", cfg.constants.batches}}},
            {"alpha", num(cfg.alpha)},
            {"d", num(cfg.d)},
            {"u", num_list(cfg.u)},
            {"Tu", opt_num(cfg.Tu)},
            {"n_list", num_list(cfg.n_list)},
            {"law", cfg.law ? law_to_json(*cfg.law) : json(nullptr)},
            {"x", num_list(cfg.x)},
            {"which", cfg.which},
            {"sample", cfg.sample ? json(*cfg.sample) : json(nullptr)},
            {"format", cfg.format}};
}

}  // namespace gpmax::cli
