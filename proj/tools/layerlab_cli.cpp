// SPDX-License-Identifier: Apache-2.0
// layerlab command-line front end.
//
// Exit codes: 0 success, 2 analysis reports unstable/fail, 64 usage error,
// 65 data error (config or log), 66 input missing, 73 output unwritable.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "layerlab/architectures.hpp"
#include "layerlab/config.hpp"
#include "layerlab/error.hpp"
#include "layerlab/serialize.hpp"
#include "layerlab/session.hpp"
#include "layerlab/synthesis.hpp"

namespace fs = std::filesystem;
using namespace layerlab;

namespace {

enum Exit : int { ok = 0, fail = 2, usage = 64, data = 65, no_input = 66, cant_create = 73 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OutputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::string config;
    std::string out;
    std::string format = "json";
    std::optional<std::uint64_t> seed;
};

ExperimentConfig load(const Globals& g)
{
    if (g.config.empty()) throw UsageError("--config is required");
    if (!fs::exists(g.config)) throw InputError("config file '" + g.config + "' does not exist");
    ExperimentConfig cfg = load_experiment_config(g.config);
    if (g.seed) cfg.disturbance.seed = *g.seed;
    return cfg;
}

std::string out_dir(const Globals& g, const ExperimentConfig* cfg = nullptr)
{
    if (!g.out.empty()) return g.out;
    return cfg ? cfg->out_dir : std::string();
}

void write_file(const std::string& dir, const std::string& name, const std::string& content)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw OutputError("cannot create output directory '" + dir + "': " + ec.message());
    const fs::path p = fs::path(dir) / name;
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) throw OutputError("cannot write '" + p.string() + "'");
    os << content;
    os.flush();
    if (!os) throw OutputError("write failed for '" + p.string() + "'");
}

std::string dump(const Json& j)
{
    return j.dump(2) + "\n";
}

std::string edges_csv(const ArchitectureGraph& g)
{
    std::string s = "from,to,label,delay,rate,payload\n";
    for (const GraphEdge& e : g.edges) {
        s += e.from + "," + e.to + "," + (e.label == EdgeLabel::ifp ? "ifp" : "forward") + "," +
             std::to_string(e.delay) + "," + (e.rate ? std::to_string(*e.rate) : "") + "," + e.payload + "\n";
    }
    return s;
}

int cmd_simulate(const Globals& g)
{
    const ExperimentConfig cfg = load(g);
    Trajectory tr;
    Json extra = Json::object();
    switch (cfg.arch) {
    case ArchitectureTag::layered:
        tr = simulate_layered(cfg.plant, cfg.specs.low, cfg.specs.high, cfg.disturbance, cfg.mode);
        extra["mode"] = cfg.mode == LayeredMode::eq1 ? "eq1" : "arch1";
        break;
    case ArchitectureTag::arch2: tr = simulate_arch2(cfg.specs.arch2, cfg.disturbance, cfg.plant).traj; break;
    case ArchitectureTag::arch3: {
        const Arch3Result r = simulate_arch3(cfg.plant, cfg.specs.fast, cfg.specs.slow, cfg.disturbance);
        tr = r.traj;
        extra["ifp_messages"] = r.ifp_log.size();
        break;
    }
    }
    const ArchitectureGraph graph = architecture_graph(cfg.arch, cfg.specs);

    Json summary;
    summary["architecture"] = std::string(to_string(cfg.arch));
    summary["horizon"] = cfg.plant.horizon;
    summary["seed"] = cfg.disturbance.seed;
    summary["cost_linf"] = evaluate_cost(tr, CostNorm::linf);
    summary["cost_rms"] = evaluate_cost(tr, CostNorm::rms);
    summary["ifp_edge_count"] = graph.ifp_count();
    summary.update(extra);

    const std::string dir = out_dir(g, &cfg);
    if (!dir.empty()) {
        if (g.format == "csv")
            write_file(dir, "trajectory.csv", trajectory_csv(tr));
        else
            write_file(dir, "trajectory.json", dump(trajectory_json(tr)));
        write_file(dir, "summary.json", dump(summary));
    }
    std::cout << dump(summary);
    return ok;
}

int cmd_stability(const Globals& g, double a, double k, double q)
{
    if (!std::isfinite(a) || !std::isfinite(k)) throw UsageError("-a and -k must be finite");
    if (!(q > 0.0 && q < 1.0)) throw UsageError("-q must lie in (0, 1)");
    const StabilityReport r = stability_arch2(a, k, q);
    Json j = to_json(r);
    if (!g.out.empty()) write_file(g.out, "stability.json", dump(j));
    std::cout << dump(j);
    return r.stable ? ok : fail;
}

int cmd_sweep(const Globals& g)
{
    const ExperimentConfig cfg = load(g);
    if (!cfg.frontier) throw ConfigError("frontier: missing table");
    const SweepResult r = dess_sweep(*cfg.frontier, cfg.plant, cfg.sweep_eval);
    const std::string body = g.format == "csv" ? sweep_csv(r) : dump(to_json(r));
    const std::string dir = out_dir(g, &cfg);
    if (!dir.empty())
        write_file(dir, g.format == "csv" ? "sweep.csv" : "sweep.json", body);
    else
        std::cout << body;
    if (!r.best_diverse) {
        std::cerr << "layerlab: every allocation is unevaluated\n";
        return fail;
    }
    return ok;
}

int cmd_oracle(const Globals& g)
{
    const ExperimentConfig cfg = load(g);
    if (cfg.arch != ArchitectureTag::layered) throw ConfigError("oracle: requires a [layered] section");
    PlantConfig plant = cfg.plant;
    plant.horizon = cfg.oracle_horizon;
    const OracleResult r = minimax_oracle(plant, cfg.specs.low, cfg.oracle_horizon);

    const LayerSpec no_high{LayerName::high, 0, QuantizerSpec::none(), ControllerSpec::zero()};
    const double synthesized = worst_case_cost(plant, cfg.specs.low, no_high, Ensemble{true, false});

    std::string body;
    if (g.format == "csv") {
        body = oracle_csv(r);
    } else {
        Json j = to_json(r);
        j["synthesized_cost"] = synthesized;
        j["gap"] = synthesized - r.minimax_cost;
        body = dump(j);
    }
    const std::string dir = out_dir(g, &cfg);
    if (!dir.empty())
        write_file(dir, g.format == "csv" ? "oracle.csv" : "oracle.json", body);
    else
        std::cout << body;
    return ok;
}

int cmd_graph(const Globals& g)
{
    const ExperimentConfig cfg = load(g);
    const ArchitectureGraph graph = architecture_graph(cfg.arch, cfg.specs);
    validate_graph(graph);
    const std::string body = g.format == "csv" ? edges_csv(graph) : dump(to_json(graph));
    const std::string dir = out_dir(g, &cfg);
    if (!dir.empty()) {
        write_file(dir, g.format == "csv" ? "graph.csv" : "graph.json", body);
        write_file(dir, "graph.dot", to_dot(graph));
    } else {
        std::cout << body;
    }
    return ok;
}

int cmd_ingest(const Globals& g, const std::string& log_file)
{
    std::ifstream in(log_file, std::ios::binary);
    if (!in) throw InputError("session log '" + log_file + "' cannot be read");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError(std::string("session log is not valid JSON: ") + e.what());
    }
    const SessionLog log = parse_session_log(j);
    const SessionAnalysis a = analyze_session(log);
    Json out = to_json(a);
    if (!g.out.empty()) write_file(g.out, "analysis.json", dump(out));
    std::cout << dump(out);
    return ok;
}

int report(int code, const std::string& msg)
{
    std::cerr << "layerlab: error: " << msg << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"layerlab: layered control architecture workbench"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "TOML experiment file");
    app.add_option("--out", g.out, "output directory");
    app.add_option("--format", g.format, "table format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", g.seed, "override disturbance.seed");

    auto* sim = app.add_subcommand("simulate", "run one closed-loop simulation");
    auto* stab = app.add_subcommand("stability", "Architecture 2 stability report");
    double a = 1.0, k = 0.5, q = 0.5;
    stab->add_option("-a,--pole", a, "plant pole")->required();
    stab->add_option("-k,--gain", k, "estimator gain")->required();
    stab->add_option("-q,--density", q, "quantizer density in (0, 1)")->required();
    auto* sweep = app.add_subcommand("sweep", "diversity sweep over a frontier");
    auto* orc = app.add_subcommand("oracle", "exact minimax value of the low layer");
    auto* graph = app.add_subcommand("graph", "architecture graph with internal feedback pathways");
    auto* ingest = app.add_subcommand("ingest-session", "analyze a game session log");
    std::string log_file;
    ingest->add_option("log-file", log_file, "SessionLog JSON")->required();

    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        if (*sim) return cmd_simulate(g);
        if (*stab) return cmd_stability(g, a, k, q);
        if (*sweep) return cmd_sweep(g);
        if (*orc) return cmd_oracle(g);
        if (*graph) return cmd_graph(g);
        if (*ingest) return cmd_ingest(g, log_file);
    } catch (const UsageError& e) {
        return report(usage, e.what());
    } catch (const InputError& e) {
        return report(no_input, e.what());
    } catch (const OutputError& e) {
        return report(cant_create, e.what());
    } catch (const ValidationError& e) {
        std::string msg = e.what();
        if (e.index() >= 0) msg = "frame " + std::to_string(e.index()) + ": " + msg;
        return report(data, msg);
    } catch (const ConfigError& e) {
        return report(data, e.what());
    } catch (const DomainError& e) {
        return report(data, e.what());
    } catch (const ResourceError& e) {
        return report(fail, e.what());
    }
    return usage;
}
