// SPDX-License-Identifier: Apache-2.0
#include "layerlab/session.hpp"

#include <cmath>
#include <deque>

#include <Eigen/Dense>

#include "layerlab/config.hpp"
#include "layerlab/controllers.hpp"
#include "layerlab/error.hpp"
#include "layerlab/synthesis.hpp"

namespace layerlab {

namespace {

constexpr double kScoreTol = 1e-6;
constexpr double kReplayTol = 1e-12;
constexpr double kStateTol = 1e-9;

template <class T>
T field(const Json& j, const char* key, const std::string& where, long index = -1)
{
    if (!j.is_object() || !j.contains(key)) throw ValidationError(where + ": missing field '" + key + "'", index);
    const Json& v = j.at(key);
    if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw ValidationError(where + "." + key + ": expected a number", index);
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ValidationError(where + "." + key + ": must be finite", index);
        return d;
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ValidationError(where + "." + key + ": expected an integer", index);
        return v.get<T>();
    } else {
        if (!v.is_string()) throw ValidationError(where + "." + key + ": expected a string", index);
        return v.get<T>();
    }
}

QuantizerSpec parse_quantizer(const Json& j, const std::string& where)
{
    QuantizerSpec q;
    if (j.is_null()) return q;
    try {
        q.kind = parse_quantizer_kind(field<std::string>(j, "kind", where));
    } catch (const ConfigError& e) {
        throw ValidationError(where + ".kind: " + e.what());
    }
    if (j.contains("R")) q.R = field<int>(j, "R", where);
    if (j.contains("M")) q.M = field<double>(j, "M", where);
    if (j.contains("q")) q.q = field<double>(j, "q", where);
    return q;
}

Json quantizer_json(const QuantizerSpec& q)
{
    Json j;
    j["kind"] = std::string(to_string(q.kind));
    j["R"] = q.R;
    j["M"] = q.M;
    j["q"] = q.q;
    return j;
}

Disturbances replay_disturbances(const SessionConfig& cfg)
{
    DisturbanceSpec d;
    d.kind = DisturbanceKind::seeded_random;
    d.seed = cfg.seed;
    return make_disturbances(d, cfg.plant);
}

// Score over x(1) .. x(horizon), given those states in order.
double score_of(double x0, const std::vector<double>& x_after, CostNorm norm)
{
    Eigen::VectorXd x(static_cast<Eigen::Index>(x_after.size()) + 1);
    x[0] = x0;
    for (std::size_t i = 0; i < x_after.size(); ++i) x[static_cast<Eigen::Index>(i) + 1] = x_after[i];
    return evaluate_cost(x, norm);
}

}  // namespace

LayerSpec session_low_layer(const SessionConfig& cfg)
{
    return synthesize_bump_layer(cfg.plant.a, cfg.T_L, cfg.quantizer_L, cfg.plant.w_bound);
}

LayerSpec session_high_layer(const SessionConfig& cfg)
{
    QuantizerSpec q = cfg.quantizer_H;
    if (q.kind == QuantizerKind::uniform && q.M == 0.0) q.M = trail_range(cfg.plant);
    return synthesize_trail_layer(cfg.plant.T_r, cfg.T_H, q);
}

SessionLog parse_session_log(const Json& j)
{
    if (!j.is_object()) throw ValidationError("session log: expected a JSON object");
    SessionLog log;
    log.schema_version = field<int>(j, "schema_version", "log");
    if (log.schema_version != 1)
        throw ValidationError("log.schema_version: unsupported version " + std::to_string(log.schema_version));

    if (!j.contains("config") || !j.at("config").is_object()) throw ValidationError("log: missing object 'config'");
    const Json& c = j.at("config");
    SessionConfig& cfg = log.config;
    cfg.plant.a = field<double>(c, "a", "config");
    cfg.plant.w_bound = field<double>(c, "w_bound", "config");
    cfg.plant.r_step_bound = field<double>(c, "r_step_bound", "config");
    cfg.plant.T_r = field<int>(c, "T_r", "config");
    cfg.plant.horizon = field<int>(c, "horizon", "config");
    cfg.plant.x0 = field<double>(c, "x0", "config");
    cfg.seed = field<std::uint64_t>(c, "seed", "config");
    cfg.T_L = field<int>(c, "T_L", "config");
    cfg.T_H = field<int>(c, "T_H", "config");
    cfg.quantizer_L = parse_quantizer(c.value("quantizer_L", Json()), "config.quantizer_L");
    cfg.quantizer_H = parse_quantizer(c.value("quantizer_H", Json()), "config.quantizer_H");
    cfg.input_delay = field<int>(c, "input_delay", "config");
    const std::string norm = field<std::string>(c, "score_norm", "config");
    if (norm == "linf")
        cfg.score_norm = CostNorm::linf;
    else if (norm == "rms")
        cfg.score_norm = CostNorm::rms;
    else
        throw ValidationError("config.score_norm: expected 'linf' or 'rms'");
    if (cfg.T_L < 0 || cfg.T_H < 0 || cfg.input_delay < 0)
        throw ValidationError("config: delays must be >= 0");
    try {
        cfg.plant.validate();
    } catch (const ConfigError& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }

    if (!j.contains("frames") || !j.at("frames").is_array()) throw ValidationError("log: missing array 'frames'");
    const Json& frames = j.at("frames");
    log.frames.reserve(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const long idx = static_cast<long>(i);
        const std::string where = "frames[" + std::to_string(i) + "]";
        const Json& f = frames[i];
        SessionFrame fr;
        fr.t = field<int>(f, "t", where, idx);
        fr.r = field<double>(f, "r", where, idx);
        fr.v = field<double>(f, "v", where, idx);
        fr.x = field<double>(f, "x", where, idx);
        fr.u_player = field<double>(f, "u_player", where, idx);
        fr.wallclock_ms = field<std::int64_t>(f, "wallclock_ms", where, idx);
        if (!log.frames.empty() && fr.t <= log.frames.back().t)
            throw ValidationError(where + ".t: frames must be strictly increasing in t", idx);
        if (fr.t != idx) throw ValidationError(where + ".t: expected " + std::to_string(i), idx);
        log.frames.push_back(fr);
    }
    if (static_cast<int>(log.frames.size()) != cfg.plant.horizon)
        throw ValidationError("log: frame count " + std::to_string(log.frames.size()) + " differs from horizon " +
                              std::to_string(cfg.plant.horizon));
    log.score = field<double>(j, "score", "log");
    return log;
}

Json to_json(const SessionLog& log)
{
    const SessionConfig& c = log.config;
    Json j;
    j["schema_version"] = log.schema_version;
    Json cfg;
    cfg["a"] = c.plant.a;
    cfg["w_bound"] = c.plant.w_bound;
    cfg["r_step_bound"] = c.plant.r_step_bound;
    cfg["T_r"] = c.plant.T_r;
    cfg["horizon"] = c.plant.horizon;
    cfg["x0"] = c.plant.x0;
    cfg["seed"] = c.seed;
    cfg["T_L"] = c.T_L;
    cfg["T_H"] = c.T_H;
    cfg["quantizer_L"] = quantizer_json(c.quantizer_L);
    cfg["quantizer_H"] = quantizer_json(c.quantizer_H);
    cfg["input_delay"] = c.input_delay;
    cfg["score_norm"] = c.score_norm == CostNorm::linf ? "linf" : "rms";
    j["config"] = cfg;
    Json frames = Json::array();
    for (const SessionFrame& f : log.frames)
        frames.push_back(
            {{"t", f.t}, {"r", f.r}, {"v", f.v}, {"x", f.x}, {"u_player", f.u_player}, {"wallclock_ms", f.wallclock_ms}});
    j["frames"] = frames;
    j["score"] = log.score;
    return j;
}

SessionLog record_session(const SessionConfig& cfg, const PlayerPolicy& player)
{
    cfg.plant.validate();
    const Disturbances d = replay_disturbances(cfg);
    const Eigen::VectorXd w = combine_disturbance(d, cfg.plant.T_r);

    SessionLog log;
    log.config = cfg;
    std::deque<double> pending(static_cast<std::size_t>(cfg.input_delay), 0.0);
    std::vector<double> x_after;
    double x = cfg.plant.x0;
    for (int t = 0; t < cfg.plant.horizon; ++t) {
        SessionFrame f;
        f.t = t;
        f.r = d.r[t];
        f.v = d.v[t];
        f.x = x;
        f.wallclock_ms = 20LL * t;
        f.u_player = player(f);
        pending.push_back(f.u_player);
        const double applied = pending.front();
        pending.pop_front();
        x = step(x, applied, w[t], cfg.plant.a);
        x_after.push_back(x);
        log.frames.push_back(f);
    }
    log.score = score_of(cfg.plant.x0, x_after, cfg.score_norm);
    return log;
}

SessionLog record_session(const SessionConfig& cfg, const std::vector<double>& u_player)
{
    if (static_cast<int>(u_player.size()) != cfg.plant.horizon)
        throw ValidationError("record_session: need one command per step");
    return record_session(cfg, [&](const SessionFrame& f) { return u_player[static_cast<std::size_t>(f.t)]; });
}

std::array<std::vector<double>, 2> predicted_layer_commands(const SessionLog& log)
{
    LayerRuntime low(session_low_layer(log.config), log.config.plant.x0);
    LayerRuntime high(session_high_layer(log.config), 0.0);
    std::array<std::vector<double>, 2> out;
    for (const SessionFrame& f : log.frames) {
        out[0].push_back(low.act(f.x));
        out[1].push_back(high.act(f.r));
    }
    return out;
}

SessionAnalysis analyze_session(const SessionLog& log)
{
    const SessionConfig& cfg = log.config;
    const int n = cfg.plant.horizon;
    const Disturbances d = replay_disturbances(cfg);
    for (int t = 0; t < n; ++t) {
        const SessionFrame& f = log.frames[static_cast<std::size_t>(t)];
        if (std::abs(f.r - d.r[t]) > kReplayTol || std::abs(f.v - d.v[t]) > kReplayTol)
            throw ValidationError("log inconsistent with declared seed", t);
    }

    const Eigen::VectorXd w = combine_disturbance(d, cfg.plant.T_r);
    std::vector<double> x_after;
    x_after.reserve(static_cast<std::size_t>(n));
    if (std::abs(log.frames.front().x - cfg.plant.x0) > kStateTol)
        throw ValidationError("frames[0].x: differs from config.x0", 0);
    for (int t = 0; t < n; ++t) {
        const SessionFrame& f = log.frames[static_cast<std::size_t>(t)];
        const int src = t - cfg.input_delay;
        const double applied = src >= 0 ? log.frames[static_cast<std::size_t>(src)].u_player : 0.0;
        const double next = step(f.x, applied, w[t], cfg.plant.a);
        if (t + 1 < n && std::abs(log.frames[static_cast<std::size_t>(t + 1)].x - next) > kStateTol)
            throw ValidationError("frames[" + std::to_string(t + 1) + "].x: inconsistent with plant dynamics", t + 1);
        x_after.push_back(next);
    }

    SessionAnalysis a;
    a.frames = n;
    a.final_x = x_after.back();
    a.score_embedded = log.score;
    a.score_recomputed = score_of(cfg.plant.x0, x_after, cfg.score_norm);
    if (std::abs(a.score_recomputed - a.score_embedded) > kScoreTol)
        throw ValidationError("log.score: embedded " + format_double(a.score_embedded) + " differs from recomputed " +
                              format_double(a.score_recomputed));

    const auto pred = predicted_layer_commands(log);
    Eigen::MatrixXd X(n, 3);
    Eigen::VectorXd y(n);
    for (int t = 0; t < n; ++t) {
        X(t, 0) = 1.0;
        X(t, 1) = pred[0][static_cast<std::size_t>(t)];
        X(t, 2) = pred[1][static_cast<std::size_t>(t)];
        y[t] = log.frames[static_cast<std::size_t>(t)].u_player;
    }
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(X);
    const Eigen::VectorXd beta = cod.solve(y);
    a.rank = static_cast<int>(cod.rank());
    a.intercept = beta[0];
    a.coef_L = beta[1];
    a.coef_H = beta[2];
    a.residual_rms = std::sqrt((y - X * beta).squaredNorm() / n);
    return a;
}

Json to_json(const SessionAnalysis& a)
{
    Json j;
    j["frames"] = a.frames;
    j["score_embedded"] = a.score_embedded;
    j["score_recomputed"] = a.score_recomputed;
    j["final_x"] = a.final_x;
    j["seed_replay"] = "consistent";
    j["regression"] = {{"intercept", a.intercept},
                       {"coef_L", a.coef_L},
                       {"coef_H", a.coef_H},
                       {"residual_rms", a.residual_rms},
                       {"rank", a.rank}};
    return j;
}

}  // namespace layerlab
