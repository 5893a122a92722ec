// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "layerlab/architectures.hpp"
#include "layerlab/error.hpp"

namespace layerlab {

ArchitectureTag parse_architecture_tag(std::string_view tag)
{
    if (tag == "layered") return ArchitectureTag::layered;
    if (tag == "arch2") return ArchitectureTag::arch2;
    if (tag == "arch3") return ArchitectureTag::arch3;
    throw ConfigError("unknown architecture tag '" + std::string(tag) + "'");
}

std::string_view to_string(ArchitectureTag tag)
{
    switch (tag) {
    case ArchitectureTag::layered: return "layered";
    case ArchitectureTag::arch2: return "arch2";
    case ArchitectureTag::arch3: return "arch3";
    }
    return "?";
}

const GraphNode& ArchitectureGraph::node(const std::string& id) const
{
    auto it = std::find_if(nodes.begin(), nodes.end(), [&](const GraphNode& n) { return n.id == id; });
    if (it == nodes.end()) throw ConfigError("graph has no node '" + id + "'");
    return *it;
}

std::size_t ArchitectureGraph::ifp_count() const
{
    return static_cast<std::size_t>(
        std::count_if(edges.begin(), edges.end(), [](const GraphEdge& e) { return e.label == EdgeLabel::ifp; }));
}

namespace {

// Stages along the conventional loop. Higher layers sit upstream of lower
// ones, so a low-to-high message runs against the loop.
constexpr int kSensor = 0;
constexpr int kEstimator = 1;
constexpr int kControllerHigh = 2;
constexpr int kControllerLow = 3;
constexpr int kActuator = 4;
constexpr int kPlant = 5;

std::optional<int> rate_of(const QuantizerSpec& q)
{
    switch (q.kind) {
    case QuantizerKind::uniform: return q.R;
    case QuantizerKind::dynamic_interval: return 2;
    default: return std::nullopt;
    }
}

}  // namespace

ArchitectureGraph architecture_graph(ArchitectureTag arch, const ArchitectureSpecs& s)
{
    using enum NodeRole;
    ArchitectureGraph g{arch, {}, {}};
    auto fwd = [&](std::string from, std::string to, int delay, std::optional<int> rate, std::string payload) {
        g.edges.push_back({std::move(from), std::move(to), EdgeLabel::forward, delay, rate, std::move(payload)});
    };
    auto back = [&](std::string from, std::string to, int delay, std::optional<int> rate, std::string payload) {
        g.edges.push_back({std::move(from), std::move(to), EdgeLabel::ifp, delay, rate, std::move(payload)});
    };

    switch (arch) {
    case ArchitectureTag::layered:
        g.nodes = {{"sensor_L", sensor, kSensor},          {"sensor_H", sensor, kSensor},
                   {"controller_H", controller, kControllerHigh}, {"controller_L", controller, kControllerLow},
                   {"actuator", actuator, kActuator},       {"plant", plant, kPlant}};
        fwd("plant", "sensor_L", 0, std::nullopt, "state x");
        fwd("sensor_L", "controller_L", s.low.T, rate_of(s.low.quantizer), "Q_L(x) delayed by T_L");
        fwd("sensor_H", "controller_H", s.high.T, rate_of(s.high.quantizer), "Q_H(r) delayed by T_H");
        fwd("controller_L", "actuator", 0, std::nullopt, "u_L");
        fwd("controller_H", "actuator", 0, std::nullopt, "u_H");
        fwd("actuator", "plant", 0, std::nullopt, "u = u_L + u_H");
        break;

    case ArchitectureTag::arch2:
        g.nodes = {{"sensor", sensor, kSensor},       {"estimator", estimator, kEstimator},
                   {"controller", controller, kControllerLow}, {"actuator", actuator, kActuator},
                   {"plant", plant, kPlant}};
        fwd("plant", "sensor", 0, std::nullopt, "state x");
        fwd("sensor", "estimator", 0, s.arch2.quantized ? std::optional<int>(2) : std::nullopt,
            "interval symbol {left, inside, right}");
        fwd("estimator", "controller", 0, std::nullopt, "quantized innovation x - x_hat");
        fwd("controller", "actuator", 0, std::nullopt, "u = k * innovation");
        fwd("actuator", "plant", 0, std::nullopt, "u");
        back("estimator", "sensor", 0, std::nullopt, "current estimate x_hat sets quantizer interval");
        break;

    case ArchitectureTag::arch3: {
        g.nodes = {{"sensor_fast", sensor, kSensor},
                   {"sensor_slow", sensor, kSensor},
                   {"controller_slow", controller, kControllerHigh},
                   {"controller_fast", controller, kControllerLow},
                   {"actuator", actuator, kActuator},
                   {"plant", plant, kPlant}};
        const bool interval = s.fast.quantizer.kind == QuantizerKind::dynamic_interval;
        if (interval) g.nodes.push_back({"estimator", estimator, kEstimator});
        fwd("plant", "sensor_fast", 0, std::nullopt, "state x");
        fwd("plant", "sensor_slow", 0, std::nullopt, "state x");
        fwd("sensor_fast", "controller_fast", s.fast.T, rate_of(s.fast.quantizer), "quantized innovation Q(w)");
        fwd("sensor_slow", "controller_slow", s.slow.T, std::nullopt, "exact state x");
        fwd("controller_fast", "actuator", 0, std::nullopt, "fast action");
        fwd("controller_slow", "actuator", 0, std::nullopt, "correction w - Q(w)");
        fwd("actuator", "plant", 0, std::nullopt, "u = fast + correction");
        back("controller_fast", "controller_slow", 0, rate_of(s.fast.quantizer),
            "quantized action taken for each innovation");
        back("actuator", "sensor_fast", 0, std::nullopt, "applied input u, needed to form the innovation");
        if (interval) {
            fwd("sensor_fast", "estimator", 0, 2, "interval symbol");
            back("estimator", "sensor_fast", 0, std::nullopt, "current estimate x_hat sets quantizer interval");
        }
        break;
    }
    }
    validate_graph(g);
    return g;
}

void validate_graph(const ArchitectureGraph& g)
{
    const auto plants =
        std::count_if(g.nodes.begin(), g.nodes.end(), [](const GraphNode& n) { return n.role == NodeRole::plant; });
    if (plants != 1) throw ConfigError("graph must contain exactly one plant");

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) index.emplace(g.nodes[i].id, i);

    std::vector<std::vector<std::size_t>> adj(g.nodes.size());
    for (const GraphEdge& e : g.edges) {
        const GraphNode& from = g.node(e.from);
        const GraphNode& to = g.node(e.to);
        const bool closes_loop = from.role == NodeRole::plant && to.role == NodeRole::sensor;
        if (e.label == EdgeLabel::ifp) {
            if (closes_loop || from.stage <= to.stage)
                throw ConfigError("IFP edge " + e.from + " -> " + e.to + " does not oppose the forward loop");
        } else if (!closes_loop && from.stage >= to.stage) {
            throw ConfigError("forward edge " + e.from + " -> " + e.to + " runs against the loop");
        }
        adj[index[e.from]].push_back(index[e.to]);
        adj[index[e.to]].push_back(index[e.from]);
    }

    std::vector<bool> seen(g.nodes.size(), false);
    std::function<void(std::size_t)> visit = [&](std::size_t i) {
        if (seen[i]) return;
        seen[i] = true;
        for (std::size_t j : adj[i]) visit(j);
    };
    visit(0);
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) throw ConfigError("graph is disconnected");
}

namespace {
const char* role_name(NodeRole r)
{
    switch (r) {
    case NodeRole::sensor: return "sensor";
    case NodeRole::estimator: return "estimator";
    case NodeRole::controller: return "controller";
    case NodeRole::actuator: return "actuator";
    case NodeRole::plant: return "plant";
    }
    return "?";
}
}  // namespace

std::string to_dot(const ArchitectureGraph& g)
{
    std::ostringstream os;
    os << "digraph \"" << to_string(g.arch) << "\" {\n  rankdir=LR;\n";
    for (const GraphNode& n : g.nodes)
        os << "  \"" << n.id << "\" [shape=" << (n.role == NodeRole::plant ? "box" : "ellipse") << ", label=\""
           << n.id << "\\n(" << role_name(n.role) << ")\"];\n";
    for (const GraphEdge& e : g.edges) {
        os << "  \"" << e.from << "\" -> \"" << e.to << "\" [label=\"" << e.payload << "\\nT=" << e.delay
           << ", R=" << (e.rate ? std::to_string(*e.rate) : std::string("inf")) << "\"";
        if (e.label == EdgeLabel::ifp) os << ", style=dashed, color=red";
        os << "];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace layerlab
