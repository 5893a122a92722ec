// SPDX-License-Identifier: Apache-2.0
#include "layerlab/config.hpp"

#include <fstream>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "layerlab/error.hpp"

namespace layerlab {

namespace {

std::string join(std::string_view prefix, std::string_view key)
{
    return prefix.empty() ? std::string(key) : std::string(prefix) + "." + std::string(key);
}

const toml::table* sub_table(const toml::table& t, std::string_view key, std::string_view prefix)
{
    const toml::node* n = t.get(key);
    if (!n) return nullptr;
    if (!n->is_table()) throw ConfigError(join(prefix, key) + ": expected a table");
    return n->as_table();
}

double get_real(const toml::table& t, std::string_view key, std::string_view prefix, double fallback)
{
    const toml::node* n = t.get(key);
    if (!n) return fallback;
    if (auto v = n->value<double>()) return *v;
    throw ConfigError(join(prefix, key) + ": expected a number");
}

long long get_int(const toml::table& t, std::string_view key, std::string_view prefix, long long fallback)
{
    const toml::node* n = t.get(key);
    if (!n) return fallback;
    if (n->is_integer()) return n->as_integer()->get();
    throw ConfigError(join(prefix, key) + ": expected an integer");
}

std::string get_string(const toml::table& t, std::string_view key, std::string_view prefix, std::string fallback)
{
    const toml::node* n = t.get(key);
    if (!n) return fallback;
    if (auto v = n->value<std::string>()) return *v;
    throw ConfigError(join(prefix, key) + ": expected a string");
}

std::vector<double> get_reals(const toml::table& t, std::string_view key, std::string_view prefix)
{
    std::vector<double> out;
    const toml::node* n = t.get(key);
    if (!n) return out;
    const toml::array* arr = n->as_array();
    if (!arr) throw ConfigError(join(prefix, key) + ": expected an array of numbers");
    for (std::size_t i = 0; i < arr->size(); ++i) {
        auto v = arr->get(i)->value<double>();
        if (!v) throw ConfigError(join(prefix, key) + "[" + std::to_string(i) + "]: expected a number");
        out.push_back(*v);
    }
    return out;
}

QuantizerSpec parse_quantizer(const toml::table* t, std::string_view prefix)
{
    QuantizerSpec q;
    if (!t) return q;
    try {
        q.kind = parse_quantizer_kind(get_string(*t, "kind", prefix, "none"));
    } catch (const ConfigError& e) {
        throw ConfigError(join(prefix, "kind") + ": " + e.what());
    }
    q.R = static_cast<int>(get_int(*t, "R", prefix, 1));
    q.M = get_real(*t, "M", prefix, 0.0);
    q.q = get_real(*t, "q", prefix, 0.5);
    // M = 0 asks synthesis to tune the range; check everything else now.
    QuantizerSpec probe = q;
    if (probe.kind == QuantizerKind::uniform && probe.M == 0.0) probe.M = 1.0;
    try {
        probe.validate();
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        if (msg.rfind("quantizer.", 0) == 0) msg.erase(0, 10);
        throw ConfigError(join(prefix, msg));
    }
    return q;
}

LayerSpec parse_layer(const toml::table* t, std::string_view prefix, LayerName name, const PlantConfig& plant)
{
    if (!t) throw ConfigError(std::string(prefix) + ": missing table");
    const int T = static_cast<int>(get_int(*t, "T", prefix, 0));
    if (T < 0) throw ConfigError(join(prefix, "T") + ": must be >= 0");
    QuantizerSpec q = parse_quantizer(sub_table(*t, "quantizer", prefix), join(prefix, "quantizer"));
    const std::string kind = get_string(*t, "controller", prefix, "synthesized");

    if (kind == "synthesized") {
        if (name == LayerName::low) return synthesize_bump_layer(plant.a, T, q, plant.w_bound);
        if (q.kind == QuantizerKind::uniform && q.M == 0.0)
            q.M = trail_range(plant);
        return synthesize_trail_layer(plant.T_r, T, q);
    }
    if (q.kind == QuantizerKind::uniform && q.M == 0.0)
        throw ConfigError(join(prefix, "quantizer.M") + ": must be > 0 for non-synthesized layers");
    LayerSpec layer{name, T, q, ControllerSpec::zero()};
    if (kind == "zero") return layer;
    if (kind == "custom-linear") {
        layer.controller = ControllerSpec::custom_linear(get_reals(*t, "gains", prefix));
        return layer;
    }
    throw ConfigError(join(prefix, "controller") + ": unknown kind '" + kind + "'");
}

void load_disturbance_file(const std::filesystem::path& file, DisturbanceSpec& d)
{
    std::ifstream in(file);
    if (!in) throw ConfigError("disturbance.file: cannot open '" + file.string() + "'");
    std::string line;
    std::getline(in, line);
    if (line.rfind("v,r", 0) != 0) throw ConfigError("disturbance.file: header must be 'v,r'");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError("disturbance.file: malformed row '" + line + "'");
        d.v.push_back(std::stod(line.substr(0, comma)));
        d.r.push_back(std::stod(line.substr(comma + 1)));
    }
}

}  // namespace

QuantizerKind parse_quantizer_kind(std::string_view s)
{
    if (s == "none") return QuantizerKind::none;
    if (s == "uniform") return QuantizerKind::uniform;
    if (s == "logarithmic") return QuantizerKind::logarithmic;
    if (s == "dynamic-interval") return QuantizerKind::dynamic_interval;
    throw ConfigError("unknown quantizer kind '" + std::string(s) + "'");
}

ExperimentConfig parse_experiment_config(std::string_view text, const std::filesystem::path& base_dir)
{
    toml::table root;
    try {
        root = toml::parse(text);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << "TOML parse error at line " << e.source().begin.line << ": " << e.description();
        throw ConfigError(os.str());
    }

    ExperimentConfig cfg;
    const toml::table* plant = sub_table(root, "plant", "");
    if (!plant) throw ConfigError("plant: missing table");
    PlantConfig& p = cfg.plant;
    p.a = get_real(*plant, "a", "plant", 1.0);
    p.w_bound = get_real(*plant, "w_bound", "plant", 1.0);
    p.r_step_bound = get_real(*plant, "r_step_bound", "plant", 0.0);
    p.T_r = static_cast<int>(get_int(*plant, "T_r", "plant", 0));
    p.horizon = static_cast<int>(get_int(*plant, "horizon", "plant", 1));
    p.x0 = get_real(*plant, "x0", "plant", 0.0);
    p.validate();

    if (const toml::table* d = sub_table(root, "disturbance", "")) {
        const std::string kind = get_string(*d, "kind", "disturbance", "seeded-random");
        if (kind == "seeded-random")
            cfg.disturbance.kind = DisturbanceKind::seeded_random;
        else if (kind == "vertex-adversarial")
            cfg.disturbance.kind = DisturbanceKind::vertex_adversarial;
        else if (kind == "explicit")
            cfg.disturbance.kind = DisturbanceKind::explicit_;
        else
            throw ConfigError("disturbance.kind: unknown kind '" + kind + "'");
        const long long seed = get_int(*d, "seed", "disturbance", 0);
        if (seed < 0) throw ConfigError("disturbance.seed: must be >= 0");
        cfg.disturbance.seed = static_cast<std::uint64_t>(seed);
        cfg.disturbance.v = get_reals(*d, "v", "disturbance");
        cfg.disturbance.r = get_reals(*d, "r", "disturbance");
        const std::string file = get_string(*d, "file", "disturbance", "");
        if (!file.empty()) {
            std::filesystem::path fp(file);
            if (fp.is_relative()) fp = base_dir / fp;
            if (!std::filesystem::exists(fp)) throw ConfigError("disturbance.file: '" + fp.string() + "' does not exist");
            cfg.disturbance.v.clear();
            cfg.disturbance.r.clear();
            load_disturbance_file(fp, cfg.disturbance);
        }
        if (cfg.disturbance.kind == DisturbanceKind::explicit_) {
            if (cfg.disturbance.v.empty()) cfg.disturbance.v.assign(p.horizon, 0.0);
            if (cfg.disturbance.r.empty()) cfg.disturbance.r.assign(p.horizon, 0.0);
        }
    }

    const toml::table* layered = sub_table(root, "layered", "");
    const toml::table* arch2 = sub_table(root, "arch2", "");
    const toml::table* arch3 = sub_table(root, "arch3", "");
    const int sections = (layered != nullptr) + (arch2 != nullptr) + (arch3 != nullptr);
    if (sections != 1) throw ConfigError("exactly one of [layered], [arch2], [arch3] must be present");

    if (layered) {
        cfg.arch = ArchitectureTag::layered;
        const std::string mode = get_string(*layered, "mode", "layered", "eq1");
        if (mode == "eq1")
            cfg.mode = LayeredMode::eq1;
        else if (mode == "arch1")
            cfg.mode = LayeredMode::arch1;
        else
            throw ConfigError("layered.mode: expected 'eq1' or 'arch1'");
        cfg.specs.low = parse_layer(sub_table(*layered, "low", "layered"), "layered.low", LayerName::low, p);
        cfg.specs.high = parse_layer(sub_table(*layered, "high", "layered"), "layered.high", LayerName::high, p);
    } else if (arch2) {
        cfg.arch = ArchitectureTag::arch2;
        Arch2Params& a2 = cfg.specs.arch2;
        a2.a = get_real(*arch2, "a", "arch2", p.a);
        a2.k = get_real(*arch2, "k", "arch2", 0.5);
        a2.q = get_real(*arch2, "q", "arch2", 0.5);
        if (const toml::node* n = arch2->get("quantized")) {
            if (!n->is_boolean()) throw ConfigError("arch2.quantized: expected a boolean");
            a2.quantized = n->as_boolean()->get();
        }
        if (!(a2.q > 0.0 && a2.q < 1.0)) throw ConfigError("arch2.q: must lie in (0, 1)");
    } else {
        cfg.arch = ArchitectureTag::arch3;
        auto layer3 = [&](std::string_view key, LayerName name) {
            const std::string prefix = "arch3." + std::string(key);
            const toml::table* t = sub_table(*arch3, key, "arch3");
            if (!t) throw ConfigError(prefix + ": missing table");
            LayerSpec l{name, static_cast<int>(get_int(*t, "T", prefix, 0)),
                        parse_quantizer(sub_table(*t, "quantizer", prefix), prefix + ".quantizer"),
                        ControllerSpec::zero()};
            return l;
        };
        cfg.specs.fast = layer3("fast", LayerName::low);
        cfg.specs.slow = layer3("slow", LayerName::high);
        if (cfg.specs.fast.T >= cfg.specs.slow.T) throw ConfigError("arch3.fast.T: must be smaller than arch3.slow.T");
    }

    if (const toml::table* f = sub_table(root, "frontier", "")) {
        SatFrontier fr;
        const std::string model = get_string(*f, "model", "frontier", "linear");
        if (model == "linear")
            fr.model = FrontierModel::linear;
        else if (model == "multiplicative")
            fr.model = FrontierModel::multiplicative;
        else
            throw ConfigError("frontier.model: expected 'linear' or 'multiplicative'");
        fr.C = get_real(*f, "C", "frontier", fr.C);
        fr.lambda = get_real(*f, "lambda", "frontier", fr.lambda);
        fr.T_max = static_cast<int>(get_int(*f, "T_max", "frontier", fr.T_max));
        cfg.frontier = fr;
    }
    if (const toml::table* s = sub_table(root, "sweep", "")) {
        const std::string ev = get_string(*s, "eval", "sweep", "oracle");
        if (ev == "oracle")
            cfg.sweep_eval = SweepEval::oracle;
        else if (ev == "adversarial-sim")
            cfg.sweep_eval = SweepEval::adversarial_sim;
        else
            throw ConfigError("sweep.eval: expected 'oracle' or 'adversarial-sim'");
    }
    cfg.oracle_horizon = p.horizon;
    if (const toml::table* o = sub_table(root, "oracle", ""))
        cfg.oracle_horizon = static_cast<int>(get_int(*o, "horizon", "oracle", p.horizon));
    if (const toml::table* o = sub_table(root, "output", "")) cfg.out_dir = get_string(*o, "dir", "output", "");
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config file '" + path.string() + "' cannot be read");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config(ss.str(), path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace layerlab
