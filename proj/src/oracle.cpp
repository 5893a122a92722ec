// SPDX-License-Identifier: Apache-2.0
//
// Exhaustive minimax for the single-layer bump game.
//
// Everything lives on an integer lattice of step g: x0, w_bound, the
// quantizer boundaries and all actions. The controller's knowledge at step t
// is an interval J containing the newest observed state x(k), k = max(0, t-T),
// plus its own inputs u(k..t-1). The search answers "can the controller keep
// |x| <= c for the whole horizon?", memoised on (t, J, inputs), and the
// minimax value is the smallest such c.
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "layerlab/error.hpp"
#include "layerlab/synthesis.hpp"

namespace layerlab {

namespace {

using i64 = std::int64_t;

struct Interval {
    i64 lo, hi;
};

Interval scale(i64 a, Interval x)
{
    return a >= 0 ? Interval{a * x.lo, a * x.hi} : Interval{a * x.hi, a * x.lo};
}

struct KeyHash {
    std::size_t operator()(const std::vector<i64>& k) const noexcept
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (i64 v : k) {
            h ^= static_cast<std::uint64_t>(v);
            h *= 0x100000001b3ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

bool on_lattice(double value, double g)
{
    const double r = value / g;
    return std::abs(r - std::round(r)) <= 1e-9 * std::max(1.0, std::abs(r));
}

i64 to_lattice(double value, double g)
{
    return static_cast<i64>(std::llround(value / g));
}

class BumpGame {
public:
    int horizon = 0;
    int delay = 0;
    i64 pole = 1;
    i64 noise = 0;   // w_bound in lattice units
    i64 start = 0;   // x0 in lattice units
    bool quantized = false;
    std::vector<i64> boundaries;  // interior cell boundaries, ascending
    std::uint64_t max_nodes = 0;
    std::uint64_t nodes = 0;

    struct State {
        int t;
        Interval known;
        std::vector<i64> inputs;
    };

    State root() const { return {0, {start, start}, {}}; }

    bool feasible(const State& s, i64 bound)
    {
        if (bound != bound_) {
            memo_.clear();
            bound_ = bound;
        }
        return solve(s);
    }

    /// Actions that keep every reachable x(t+1) within the bound, centre first.
    std::vector<i64> candidate_actions(const State& s) const
    {
        const Interval p = scale(pole, belief(s));
        const i64 lo = -bound_ + noise - p.lo;
        const i64 hi = bound_ - noise - p.hi;
        std::vector<i64> out;
        if (lo > hi) return out;
        const i64 mid = lo + (hi - lo) / 2;
        out.push_back(mid);
        for (i64 d = 1; mid - d >= lo || mid + d <= hi; ++d) {
            if (mid + d <= hi) out.push_back(mid + d);
            if (mid - d >= lo) out.push_back(mid - d);
        }
        return out;
    }

    struct Branch {
        State next;
        double observation;  // observed value or cell index; NaN if nothing new was seen
    };

    std::vector<Branch> successors(const State& s, i64 u) const
    {
        State base{s.t + 1, s.known, s.inputs};
        base.inputs.push_back(u);
        const int k = std::max(0, s.t - delay);
        const int k_next = std::max(0, s.t + 1 - delay);
        if (k_next == k) return {{base, std::numeric_limits<double>::quiet_NaN()}};

        const Interval p = scale(pole, s.known);
        const Interval seen{p.lo + base.inputs.front() - noise, p.hi + base.inputs.front() + noise};
        base.inputs.erase(base.inputs.begin());

        std::vector<Branch> out;
        if (!quantized) {
            for (i64 x : {seen.lo, seen.hi}) {
                if (!out.empty() && x == seen.lo) break;
                State n = base;
                n.known = {x, x};
                out.push_back({std::move(n), static_cast<double>(x)});
            }
            return out;
        }
        const i64 inf = std::numeric_limits<i64>::max();
        for (std::size_t c = 0; c <= boundaries.size(); ++c) {
            const i64 lo = c == 0 ? -inf : boundaries[c - 1];
            const i64 hi = c == boundaries.size() ? inf : boundaries[c];
            const Interval part{std::max(lo, seen.lo), std::min(hi, seen.hi)};
            if (part.lo > part.hi) continue;
            State n = base;
            n.known = part;
            out.push_back({std::move(n), static_cast<double>(c)});
        }
        return out;
    }

private:
    std::unordered_map<std::vector<i64>, bool, KeyHash> memo_;
    i64 bound_ = -1;

    Interval belief(const State& s) const
    {
        Interval x = s.known;
        for (i64 u : s.inputs) {
            const Interval p = scale(pole, x);
            x = {p.lo + u - noise, p.hi + u + noise};
        }
        return x;
    }

    bool solve(const State& s)
    {
        std::vector<i64> key;
        key.reserve(s.inputs.size() + 3);
        key.push_back(s.t);
        key.push_back(s.known.lo);
        key.push_back(s.known.hi);
        key.insert(key.end(), s.inputs.begin(), s.inputs.end());
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;

        bool win = false;
        for (i64 u : candidate_actions(s)) {
            if (++nodes > max_nodes)
                throw ResourceError("minimax oracle exceeded " + std::to_string(max_nodes) + " nodes");
            if (s.t + 1 == horizon) {
                win = true;
                break;
            }
            bool all = true;
            for (const Branch& b : successors(s, u))
                if (!solve(b.next)) {
                    all = false;
                    break;
                }
            if (all) {
                win = true;
                break;
            }
        }
        memo_.emplace(std::move(key), win);
        return win;
    }
};

void extract_policy(BumpGame& game, const BumpGame::State& s, i64 bound, double g, std::vector<double>& history,
                    OracleResult& out, std::size_t cap)
{
    if (s.t == game.horizon) return;
    if (out.policy.size() >= cap) {
        out.policy_truncated = true;
        return;
    }
    for (i64 u : game.candidate_actions(s)) {
        const auto branches = s.t + 1 == game.horizon ? std::vector<BumpGame::Branch>{} : game.successors(s, u);
        bool all = true;
        for (const auto& b : branches)
            if (!game.feasible(b.next, bound)) {
                all = false;
                break;
            }
        if (!all) continue;
        out.policy.push_back({s.t, history, static_cast<double>(u) * g});
        for (const auto& b : branches) {
            const bool observed = !std::isnan(b.observation);
            if (observed) history.push_back(game.quantized ? b.observation : b.observation * g);
            extract_policy(game, b.next, bound, g, history, out, cap);
            if (observed) history.pop_back();
        }
        return;
    }
}

}  // namespace

OracleResult minimax_oracle(const PlantConfig& cfg, const LayerSpec& layer, int horizon, const OracleOptions& opts)
{
    cfg.validate();
    if (horizon < 1) throw ConfigError("oracle: horizon must be >= 1");
    if (horizon > opts.max_horizon)
        throw ResourceError("oracle: horizon " + std::to_string(horizon) + " exceeds budget " +
                            std::to_string(opts.max_horizon));
    if (layer.T < 0 || layer.T >= horizon) throw ConfigError("oracle: layer delay must lie in [0, horizon)");
    if (std::abs(cfg.a - std::round(cfg.a)) > 1e-12) throw ConfigError("oracle: plant pole must be an integer");

    const QuantizerSpec& q = layer.quantizer;
    q.validate();
    if (q.kind != QuantizerKind::none && q.kind != QuantizerKind::uniform)
        throw ConfigError("oracle: only uniform quantizers are supported");
    if (q.kind == QuantizerKind::uniform && q.cells() > static_cast<std::uint64_t>(opts.max_cells))
        throw ResourceError("oracle: quantizer has " + std::to_string(q.cells()) + " cells, budget is " +
                            std::to_string(opts.max_cells));

    const bool quantized = q.kind == QuantizerKind::uniform;
    const double cell = quantized ? 2.0 * q.M / static_cast<double>(q.cells()) : 0.0;
    double base = 1.0;
    if (cfg.w_bound > 0.0)
        base = cfg.w_bound;
    else if (cfg.x0 != 0.0)
        base = std::abs(cfg.x0);
    else if (quantized)
        base = cell;

    double g = 0.0;
    for (int L = 1; L <= 4096 && g == 0.0; ++L) {
        const double cand = base / L;
        if (on_lattice(cfg.w_bound, cand) && on_lattice(cfg.x0, cand) && (!quantized || on_lattice(cell, cand)))
            g = cand;
    }
    if (g == 0.0) throw ConfigError("oracle: x0, w_bound and quantizer cells share no common lattice");
    g /= std::max(1, opts.subdivision);

    BumpGame game;
    game.horizon = horizon;
    game.delay = layer.T;
    game.pole = static_cast<i64>(std::llround(cfg.a));
    game.noise = to_lattice(cfg.w_bound, g);
    game.start = to_lattice(cfg.x0, g);
    game.quantized = quantized;
    game.max_nodes = opts.max_nodes;
    if (quantized)
        for (std::uint64_t i = 1; i < q.cells(); ++i)
            game.boundaries.push_back(to_lattice(-q.M + static_cast<double>(i) * cell, g));

    const auto root = game.root();
    i64 hi = std::max<i64>(1, game.noise);
    while (!game.feasible(root, hi)) {
        if (hi > (i64{1} << 40)) throw ResourceError("oracle: no finite bound found");
        hi *= 2;
    }
    i64 lo = -1;  // known infeasible (or below range)
    if (hi > std::max<i64>(1, game.noise)) lo = hi / 2;
    while (hi - lo > 1) {
        const i64 mid = lo + (hi - lo) / 2;
        if (game.feasible(root, mid))
            hi = mid;
        else
            lo = mid;
    }

    OracleResult out;
    out.minimax_cost = static_cast<double>(hi) * g;
    out.lattice_step = g;
    out.horizon = horizon;
    std::vector<double> history;
    game.feasible(root, hi);
    extract_policy(game, root, hi, g, history, out, opts.max_policy_entries);
    out.nodes_expanded = game.nodes;
    return out;
}

}  // namespace layerlab
