#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "cli.hpp"
#include "gpmax/errors.hpp"
#include "gpmax/version.hpp"

namespace gpmax::cli {

namespace {

using Patch = std::function<void(json&)>;

class Flags
{
  public:
    explicit Flags(CLI::App* app) : app_(app) {}

    template <class T>
    void value(const std::string& name, const std::string& pointer, const std::string& help)
    {
        auto v = std::make_shared<std::optional<T>>();
        app_->add_option(name, *v, help);
        patches_.push_back([v, pointer](json& doc) {
            if (*v) doc[json::json_pointer(pointer)] = **v;
        });
    }

    void list(const std::string& name, const std::string& pointer, const std::string& help)
    {
        auto v = std::make_shared<std::vector<double>>();
        app_->add_option(name, *v, help)->delimiter(',');
        patches_.push_back([v, pointer](json& doc) {
            if (!v->empty()) doc[json::json_pointer(pointer)] = *v;
        });
    }

    void toggle(const std::string& name, const std::string& pointer, const std::string& help)
    {
        auto v = std::make_shared<bool>(false);
        app_->add_flag(name, *v, help);
        patches_.push_back([v, pointer](json& doc) {
            if (*v) doc[json::json_pointer(pointer)] = true;
        });
    }

    void apply(json& doc) const
    {
        for (const auto& p : patches_) p(doc);
    }

  private:
    CLI::App* app_;
    std::vector<Patch> patches_;
};

void model_flags(Flags& f)
{
    f.value<double>("--H", "/model/H", "self-similarity index of X_i");
    f.value<double>("--H0", "/model/H0", "self-similarity index of the common process X");
    f.value<double>("--sigma0", "/model/sigma0", "weight of the common process");
    f.value<double>("--beta", "/model/beta", "trend exponent");
    f.value<double>("--alpha", "/model/alpha", "local index of K(t) = kK t^(alpha/2)");
    f.value<double>("--kK", "/model/kK", "local scale of K");
    f.list("--drift", "/model/drift/values", "drift values c_1 < ... < c_k");
    f.list("--proportions", "/model/drift/proportions", "limiting proportions p_j");
}

void family_flags(Flags& f)
{
    f.value<std::string>("--family", "/family/kind", "power-log | constant | s4-calibrated | explicit");
    f.value<double>("--gamma", "/family/gamma", "power-log exponent");
    f.value<double>("--lambda", "/family/lambda", "power-log scale");
    f.value<double>("--horizon", "/family/T", "constant horizon T");
    f.value<double>("--x0", "/family/x0", "S4 deviation of the calibrated family");
}

void constant_flags(Flags& f)
{
    f.value<double>("--mc-T", "/constants/T", "truncation of the constant estimators");
    f.value<double>("--eta", "/constants/eta", "grid step of the constant estimators");
    f.value<std::uint64_t>("--replicates", "/constants/replicates", "replicates of the constant estimators");
    f.value<std::uint64_t>("--batches", "/constants/batches", "batches for the standard error");
}

void sim_flags(Flags& f, bool n_is_list)
{
    if (n_is_list)
    {
        f.list("--n", "/n_list", "sample sizes");
    }
    else
    {
        f.value<std::uint64_t>("--n", "/sim/n", "number of component processes");
        f.value<double>("--normalize-at", "/sim/normalize_at", "index at which the normalizers are evaluated");
    }
    f.value<std::uint64_t>("--replicas", "/sim/replicas", "Monte Carlo replicas");
    f.value<std::uint64_t>("--grid-m", "/sim/grid_m", "grid intervals on [0, T_n] (power of two)");
    f.toggle("--force-cholesky", "/sim/force_cholesky", "dense Cholesky synthesis");
    f.toggle("--reverse-blocks", "/sim/reverse_blocks", "assign drift blocks from the largest drift down");
}

void law_flags(Flags& f)
{
    f.value<std::string>("--law", "/law/kind", "degenerate | gumbel | normal | mixture");
    f.value<double>("--shift", "/law/shift", "Gumbel shift");
    f.value<double>("--coef", "/law/coef", "mixture Normal coefficient");
    f.value<double>("--point", "/law/point", "degenerate point");
}

//! "lo:hi:count" or a comma list.
std::vector<double> parse_grid(const std::string& spec)
{
    std::vector<double> out;
    try
    {
        if (spec.find(':') != std::string::npos)
        {
            std::stringstream ss(spec);
            std::string a, b, c;
            std::getline(ss, a, ':');
            std::getline(ss, b, ':');
            std::getline(ss, c, ':');
            const double lo = std::stod(a), hi = std::stod(b);
            const int count = std::stoi(c);
            if (count < 1) throw ConfigError("grid: count must be >= 1");
            for (int i = 0; i < count; ++i)
            {
                out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
            }
            return out;
        }
        std::stringstream ss(spec);
        for (std::string item; std::getline(ss, item, ',');) out.push_back(std::stod(item));
    }
    catch (const std::invalid_argument&)
    {
        throw ConfigError("grid: expected lo:hi:count or a comma list, got '" + spec + "'");
    }
    catch (const std::out_of_range&)
    {
        throw ConfigError("grid: value out of range in '" + spec + "'");
    }
    return out;
}

json error_record(const std::string& type, const std::string& message, int code)
{
    return {{"tool", "gpmax"}, {"version", kVersion}, {"error", {{"type", type}, {"message", message}, {"exit_code", code}}}};
}

std::string domain_type(const DomainError& e)
{
    if (dynamic_cast<const ClassificationError*>(&e)) return "ClassificationError";
    if (dynamic_cast<const RegimeError*>(&e)) return "RegimeError";
    if (dynamic_cast<const ScenarioMismatch*>(&e)) return "ScenarioMismatch";
    return "DomainError";
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text))
    {
        throw ConfigError("cannot write '" + path + "'");
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Maxima of suprema of dependent self-similar Gaussian processes with trend", "gpmax"};
    app.require_subcommand(0, 1);
    app.set_version_flag("--version", kVersion);

    std::string config_path, out_prefix, grid_spec, dump_path;
    Flags global(&app);
    app.add_option("--config", config_path, "JSON config, or a summary emitted earlier");
    global.value<std::uint64_t>("--seed", "/seed", "master seed");
    global.value<std::uint64_t>("--threads", "/threads", "worker threads (results do not depend on it)");
    global.value<std::string>("--format", "/format", "csv | json (stdout artifact)");
    app.add_option("--out", out_prefix, "write <prefix>.json and, when tabular, <prefix>.csv");

    std::vector<std::unique_ptr<Flags>> flag_sets;
    auto sub = [&](const std::string& name, const std::string& help) {
        CLI::App* s = app.add_subcommand(name, help);
        s->fallthrough();
        flag_sets.push_back(std::make_unique<Flags>(s));
        return std::pair{s, flag_sets.back().get()};
    };

    {
        auto [s, f] = sub("constants", "t0, A, B, tau and ttilde0 of the model");
        model_flags(*f);
    }
    {
        auto [s, f] = sub("pickands", "Monte Carlo Pickands constant H_alpha");
        f->value<double>("--alpha", "/alpha", "index in (0, 2]");
        constant_flags(*f);
    }
    {
        auto [s, f] = sub("piterbarg", "Monte Carlo Piterbarg constant P_alpha^d");
        f->value<double>("--alpha", "/alpha", "index in (0, 2]");
        f->value<double>("--d", "/d", "drift weight d > 0");
        constant_flags(*f);
    }
    {
        auto [s, f] = sub("psi", "tail asymptotics R(u), psi_inf(u) and psi_T(u)");
        model_flags(*f);
        constant_flags(*f);
        f->list("--u", "/u", "thresholds");
        f->value<double>("--Tu", "/Tu", "constant finite horizon");
    }
    for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
             {"classify", "scenario and theorem sub-case of a horizon family"},
             {"predict", "normalizing recipe and limit law"}})
    {
        auto [s, f] = sub(name, help);
        model_flags(*f);
        family_flags(*f);
    }
    {
        auto [s, f] = sub("normalizers", "normalizing sequences at the given n");
        model_flags(*f);
        family_flags(*f);
        constant_flags(*f);
        f->list("--n", "/n_list", "sample sizes");
    }
    {
        auto [s, f] = sub("simulate", "Monte Carlo maxima, one CSV row per replica");
        model_flags(*f);
        family_flags(*f);
        constant_flags(*f);
        sim_flags(*f, false);
        law_flags(*f);
        s->add_option("--dump-path", dump_path, "write X_1 of replica 0 as t,value CSV");
    }
    {
        auto [s, f] = sub("gof", "KS and Anderson-Darling against the predicted (or given) law");
        model_flags(*f);
        family_flags(*f);
        constant_flags(*f);
        sim_flags(*f, false);
        law_flags(*f);
        f->value<std::string>("--sample", "/sample", "CSV sample to test instead of simulating");
    }
    {
        auto [s, f] = sub("sweep", "goodness of fit along a list of n");
        model_flags(*f);
        family_flags(*f);
        constant_flags(*f);
        sim_flags(*f, true);
    }
    {
        auto [s, f] = sub("reproduce-example", "golden case tables of the power-log examples");
        f->value<std::string>("--which", "/which", "3.1 | 4.1a | 4.1b");
    }
    {
        auto [s, f] = sub("limit-cdf", "CDF of a limit law on a grid");
        law_flags(*f);
        s->add_option("--grid", grid_spec, "lo:hi:count or a comma list");
    }

    std::vector<const char*> argv{"gpmax"};
    for (const auto& a : args) argv.push_back(a.c_str());

    try
    {
        try
        {
            app.parse(static_cast<int>(argv.size()), argv.data());
        }
        catch (const CLI::CallForHelp& e)
        {
            return app.exit(e, out, err);
        }
        catch (const CLI::CallForAllHelp& e)
        {
            return app.exit(e, out, err);
        }
        catch (const CLI::CallForVersion& e)
        {
            return app.exit(e, out, err);
        }
        catch (const CLI::ParseError& e)
        {
            throw ConfigError(e.what());
        }

        json doc = json::object();
        if (!config_path.empty())
        {
            std::ifstream in(config_path);
            if (!in)
            {
                throw ConfigError("cannot open config '" + config_path + "'");
            }
            try
            {
                doc = json::parse(in);
            }
            catch (const json::parse_error& e)
            {
                throw ConfigError(std::string("config is not valid JSON: ") + e.what());
            }
            if (doc.is_object() && doc.contains("config") && doc["config"].is_object())
            {
                doc = json(doc["config"]);
            }
        }
        if (!doc.is_object())
        {
            throw ConfigError("config must be a JSON object");
        }
        for (const auto* s : app.get_subcommands())
        {
            doc["command"] = s->get_name();
        }
        global.apply(doc);
        for (const auto& f : flag_sets) f->apply(doc);
        if (!grid_spec.empty()) doc["x"] = parse_grid(grid_spec);

        const RunConfig cfg = config_from_json(doc);
        const Artifact art = execute(cfg, !dump_path.empty());
        const std::string summary = art.summary.dump(2) + "\n";
        if (out_prefix.empty())
        {
            out << ((cfg.format == "csv" && art.csv) ? *art.csv : summary);
        }
        else
        {
            write_file(out_prefix + ".json", summary);
            if (art.csv) write_file(out_prefix + ".csv", *art.csv);
        }
        if (art.path_csv) write_file(dump_path, *art.path_csv);
        return 0;
    }
    catch (const ConfigError& e)
    {
        err << error_record("ConfigError", e.what(), 2).dump() << "\n";
        return 2;
    }
    catch (const ValidationError& e)
    {
        auto rec = error_record("ValidationError", e.what(), 3);
        rec["error"]["violations"] = e.violations();
        err << rec.dump() << "\n";
        return 3;
    }
    catch (const DomainError& e)
    {
        err << error_record(domain_type(e), e.what(), 3).dump() << "\n";
        return 3;
    }
    catch (const BudgetError& e)
    {
        err << error_record("BudgetError", e.what(), 4).dump() << "\n";
        return 4;
    }
    catch (const std::exception& e)
    {
        err << error_record("InternalError", e.what(), 1).dump() << "\n";
        return 1;
    }
}

}  // namespace gpmax::cli
