// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "layerlab/architectures.hpp"
#include "layerlab/components.hpp"
#include "layerlab/core_dynamics.hpp"
#include "layerlab/serialize.hpp"

namespace layerlab {

/// Game configuration embedded in a session log.
struct SessionConfig {
    PlantConfig plant;
    std::uint64_t seed = 0;
    int T_L = 0;
    int T_H = 0;
    QuantizerSpec quantizer_L = QuantizerSpec::none();
    QuantizerSpec quantizer_H = QuantizerSpec::none();
    int input_delay = 0;
    CostNorm score_norm = CostNorm::linf;
};

/// One tick. `x` is the state at step t before the update; `u_player` the
/// command entered at t (applied `input_delay` steps later).
struct SessionFrame {
    int t = 0;
    double r = 0.0;
    double v = 0.0;
    double x = 0.0;
    double u_player = 0.0;
    std::int64_t wallclock_ms = 0;
};

struct SessionLog {
    int schema_version = 1;
    SessionConfig config;
    std::vector<SessionFrame> frames;
    double score = 0.0;
};

/// Schema check. Throws ValidationError carrying the first offending frame
/// index (or -1 for a header problem).
SessionLog parse_session_log(const Json& j);
Json to_json(const SessionLog& log);

/// Called once per tick with the frame being recorded (t, r, v, x filled in).
using PlayerPolicy = std::function<double(const SessionFrame&)>;

/// Plays a session as the game would.
SessionLog record_session(const SessionConfig& cfg, const PlayerPolicy& player);
SessionLog record_session(const SessionConfig& cfg, const std::vector<double>& u_player);

/// Low and high layers synthesized for a session configuration.
LayerSpec session_low_layer(const SessionConfig& cfg);
LayerSpec session_high_layer(const SessionConfig& cfg);

/// Synthesized layer commands evaluated on the logged signals:
/// index 0 is u_L(t) from x, index 1 is u_H(t) from r.
std::array<std::vector<double>, 2> predicted_layer_commands(const SessionLog& log);

struct SessionAnalysis {
    double score_recomputed = 0.0;
    double score_embedded = 0.0;
    double final_x = 0.0;
    double intercept = 0.0;
    double coef_L = 0.0;
    double coef_H = 0.0;
    double residual_rms = 0.0;
    int rank = 0;
    int frames = 0;
};

/// Replays (r, v) from the seed, checks frame consistency and the score,
/// then regresses u_player onto the predicted layer commands plus an
/// intercept. Throws ValidationError on any inconsistency.
SessionAnalysis analyze_session(const SessionLog& log);
Json to_json(const SessionAnalysis& a);

}  // namespace layerlab
