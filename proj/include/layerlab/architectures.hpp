// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "layerlab/components.hpp"
#include "layerlab/core_dynamics.hpp"

namespace layerlab {

enum class LayerName { low, high };

enum class ControllerKind { zero, custom_linear, synthesized };
enum class SynthesizedLaw { bump_predictor, trail_canceller };

struct ControllerSpec {
    ControllerKind kind = ControllerKind::zero;
    // custom-linear: u(t) = sum_i gains[i] * y(t - T - i), y the quantized sensed signal
    std::vector<double> gains;

    // Synthesized laws; only `synthesis.hpp` fills these in.
    SynthesizedLaw law = SynthesizedLaw::bump_predictor;
    double pole = 1.0;
    int delay = 0;
    int advance = 0;
    bool insufficient_warning = false;

    static ControllerSpec zero() { return {}; }
    static ControllerSpec custom_linear(std::vector<double> g)
    {
        ControllerSpec c;
        c.kind = ControllerKind::custom_linear;
        c.gains = std::move(g);
        return c;
    }
};

/// One control layer. The low layer senses x, the high layer senses r.
struct LayerSpec {
    LayerName name = LayerName::low;
    int T = 0;
    QuantizerSpec quantizer;
    ControllerSpec controller;
};

/// eq1: both layers quantize their sensed signal (u_L from Q_L(x), u_H from
/// Q_H(r)). arch1: the low layer quantizes its action instead, and the high
/// layer acts on the exact trail with delayed application.
enum class LayeredMode { eq1, arch1 };

Trajectory simulate_layered(const PlantConfig& cfg, const LayerSpec& low, const LayerSpec& high,
                            const Disturbances& dist, LayeredMode mode = LayeredMode::eq1);
Trajectory simulate_layered(const PlantConfig& cfg, const LayerSpec& low, const LayerSpec& high,
                            const DisturbanceSpec& dist, LayeredMode mode = LayeredMode::eq1);

struct Arch2Params {
    double a = 1.0;
    double k = 0.5;
    double q = 0.5;
    bool quantized = true;  // false: innovation passes through exactly

    void validate() const;
};

struct Arch2Result {
    Trajectory traj;
    Eigen::VectorXd x_hat;   // horizon+1 entries
    Eigen::VectorXd w_hat;   // diagnostic residual x - a*x_hat - k*(x - x_hat), horizon entries
    std::vector<IntervalSymbol> symbols;
};

/// x(t+1) = a x(t) + k Q(x(t) - x_hat(t)) + w(t), x_hat(t+1) = x(t). The
/// innovation is quantized with the dynamic-interval quantizer around x_hat.
/// Uses cfg for horizon, x0 and the trail advance; p.a overrides cfg.a.
Arch2Result simulate_arch2(const Arch2Params& p, const Disturbances& dist, const PlantConfig& cfg);
Arch2Result simulate_arch2(const Arch2Params& p, const DisturbanceSpec& dist, const PlantConfig& cfg);

/// Quantized action message sent from the fast controller to the slow one.
struct IfpMessage {
    int t_sent;            // step at which the fast layer acted
    int disturbance_step;  // j such that the message encodes w(j)
    double quantized;      // Q(w(j))
    double action;         // fast action applied at t_sent
};

struct Arch3Result {
    Trajectory traj;  // u_L = fast actions, u_H = slow corrections
    std::vector<IfpMessage> ifp_log;
};

/// Two forward paths on innovations w(j) = x(j+1) - a x(j) - u(j). The fast
/// layer acts on Q(w(j)) at delay fast.T; the slow layer receives w(j)
/// exactly at delay slow.T and, from the IFP log, cancels the quantization
/// error w(j) - Q(w(j)) of that earlier fast action. Controller fields of
/// the layer specs are unused. A uniform fast quantizer with M = 0 gets
/// M = w_bound + (horizon - 1) * r_step_bound.
Arch3Result simulate_arch3(const PlantConfig& cfg, const LayerSpec& fast, const LayerSpec& slow,
                           const Disturbances& dist);
Arch3Result simulate_arch3(const PlantConfig& cfg, const LayerSpec& fast, const LayerSpec& slow,
                           const DisturbanceSpec& dist);

// --- wiring graphs --------------------------------------------------------

enum class ArchitectureTag { layered, arch2, arch3 };
ArchitectureTag parse_architecture_tag(std::string_view tag);
std::string_view to_string(ArchitectureTag tag);

enum class NodeRole { sensor, estimator, controller, actuator, plant };
enum class EdgeLabel { forward, ifp };

struct GraphNode {
    std::string id;
    NodeRole role;
    int stage;  // position along sensor -> controller -> actuator -> plant
};

struct GraphEdge {
    std::string from, to;
    EdgeLabel label;
    int delay;
    std::optional<int> rate;  // bits per step; nullopt = unbounded
    std::string payload;
};

struct ArchitectureGraph {
    ArchitectureTag arch;
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;

    const GraphNode& node(const std::string& id) const;
    std::size_t ifp_count() const;
};

struct ArchitectureSpecs {
    LayerSpec low, high;
    Arch2Params arch2;
    LayerSpec fast, slow;
};

ArchitectureGraph architecture_graph(ArchitectureTag arch, const ArchitectureSpecs& specs);

/// Throws ConfigError if an IFP edge runs along the forward direction, a
/// forward edge runs backwards, the plant is not unique, or the graph is
/// disconnected.
void validate_graph(const ArchitectureGraph& g);

/// Graphviz DOT rendering; IFP edges are dashed.
std::string to_dot(const ArchitectureGraph& g);

}  // namespace layerlab
