// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <atomic>
#include <thread>
#include <future>
#include <tuple>

#include "layerlab/error.hpp"
#include "layerlab/synthesis.hpp"

namespace layerlab {

namespace {

Allocation evaluate_pair(FrontierPoint lo, FrontierPoint hi, const PlantConfig& cfg, SweepEval eval,
                         const OracleOptions& opts)
{
    Allocation a;
    a.low = lo;
    a.high = hi;
    try {
        a.high_range = trail_range(cfg);
        const LayerSpec high = synthesize_trail_layer(cfg.T_r, hi.T, QuantizerSpec::uniform(hi.R, a.high_range));
        a.trail_residual = trail_residual_bound(cfg, high);

        const double w_eff = cfg.w_bound + a.trail_residual;
        const LayerSpec low = synthesize_bump_layer(cfg.a, lo.T, QuantizerSpec::uniform(lo.R, 0.0), w_eff);
        a.low_range = low.quantizer.M;
        if (high.controller.insufficient_warning) a.note = "insufficient advance warning";

        if (eval == SweepEval::oracle) {
            PlantConfig game = cfg;
            game.w_bound = w_eff;
            a.cost = minimax_oracle(game, low, cfg.horizon, opts).minimax_cost;
        } else {
            a.cost = worst_case_cost(cfg, low, high);
        }
        a.evaluated = true;
    } catch (const ResourceError& e) {
        a.evaluated = false;
        a.note = e.what();
    } catch (const ConfigError& e) {
        a.evaluated = false;
        a.note = e.what();
    }
    return a;
}

bool better(const Allocation& x, const Allocation& y)
{
    if (x.cost != y.cost) return x.cost < y.cost;
    return std::tie(x.low.T, x.high.T, x.low.R, x.high.R) < std::tie(y.low.T, y.high.T, y.low.R, y.high.R);
}

}  // namespace

SweepResult dess_sweep(const SatFrontier& frontier, const PlantConfig& cfg, SweepEval eval, const OracleOptions& opts)
{
    cfg.validate();
    const auto pts = frontier_points(frontier);

    // Results land in fixed slots, so completion order cannot matter.
    const std::size_t total = pts.size() * pts.size();
    SweepResult res;
    res.eval = eval;
    res.allocations.resize(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++)
            res.allocations[i] = evaluate_pair(pts[i / pts.size()], pts[i % pts.size()], cfg, eval, opts);
    };
    const std::size_t n_workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, total);
    std::vector<std::future<void>> workers;
    for (std::size_t i = 0; i < n_workers; ++i) workers.push_back(std::async(std::launch::async, worker));
    for (auto& w : workers) w.get();

    for (const Allocation& a : res.allocations) {
        if (!a.evaluated) continue;
        if (!res.best_diverse || better(a, *res.best_diverse)) res.best_diverse = a;
        if (a.low == a.high && (!res.best_uniform || better(a, *res.best_uniform))) res.best_uniform = a;
    }
    if (res.best_diverse && res.best_uniform) res.dess_gain = res.best_uniform->cost - res.best_diverse->cost;
    return res;
}

}  // namespace layerlab
