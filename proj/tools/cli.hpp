#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gpmax/asymptotics.hpp"
#include "gpmax/horizons.hpp"
#include "gpmax/limit_laws.hpp"
#include "gpmax/mc_engine.hpp"
#include "gpmax/model.hpp"

namespace gpmax::cli {

using nlohmann::json;

inline const std::vector<std::string> kCommands = {
    "constants", "pickands", "piterbarg", "psi",      "classify",          "normalizers",
    "predict",   "simulate", "gof",       "sweep",    "reproduce-example", "limit-cdf"};

//! Fully resolved invocation; every field has a default.
struct RunConfig
{
    std::string command;
    std::uint64_t seed = 20240101;
    unsigned threads = 1;
    //! The CLI default model has sigma0 = 1 (the dependent model).
    ModelSpec model = [] {
        ModelSpec m;
        m.sigma0 = 1.0;
        return m;
    }();
    HorizonFamily family;
    // Simulation (simulate, gof, sweep)
    std::size_t n = 1000;
    std::size_t replicas = 2000;
    std::size_t grid_m = 4096;
    std::optional<double> normalize_at;
    SynthesisOptions synthesis;
    // pickands, piterbarg and the provider behind every asymptotic formula
    ConstantParams constants;
    double alpha = 1.0;
    double d = 1.0;
    // psi
    std::vector<double> u{2.0, 4.0, 6.0, 8.0};
    std::optional<double> Tu;
    // normalizers, sweep
    std::vector<double> n_list{1e3, 1e6, 1e9};
    // limit-cdf, gof
    std::optional<LimitLaw> law;
    std::vector<double> x{-2.0, -1.0, 0.0, 1.0, 2.0};
    // reproduce-example
    std::string which = "3.1";
    std::optional<std::string> sample;

    std::string format = "json";
};

//! Accepts a bare config or a previously emitted summary (its "config" member).
//! Throws ConfigError on unknown keys or wrong types.
RunConfig config_from_json(const json& doc);
json config_to_json(const RunConfig& cfg);

json law_to_json(const LimitLaw& law);
LimitLaw law_from_json(const json& j);

struct Artifact
{
    json summary;
    std::optional<std::string> csv;
    //! Optional (t, value) dump of one synthesized path.
    std::optional<std::string> path_csv;
};

Artifact execute(const RunConfig& cfg, bool dump_path = false);

//! Whole command line. Returns the exit status: 0, 2 config, 3 domain, 4 budget.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gpmax::cli
