// SPDX-License-Identifier: Apache-2.0
#include "layerlab/architectures.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "layerlab/controllers.hpp"
#include "layerlab/error.hpp"

namespace layerlab {

namespace {

void check_delay(const LayerSpec& layer, const PlantConfig& cfg, const char* which)
{
    if (layer.T < 0) throw ConfigError(std::string(which) + ".T must be >= 0");
    if (layer.T >= cfg.horizon)
        throw ConfigError(std::string(which) + ".T = " + std::to_string(layer.T) +
                          " must be smaller than horizon " + std::to_string(cfg.horizon));
}

void check_lengths(const Disturbances& d, const PlantConfig& cfg)
{
    if (d.v.size() != cfg.horizon || d.r.size() != cfg.horizon)
        throw ValidationError("disturbance length does not match horizon");
}

}  // namespace

Trajectory simulate_layered(const PlantConfig& cfg, const LayerSpec& low, const LayerSpec& high,
                            const Disturbances& dist, LayeredMode mode)
{
    cfg.validate();
    check_delay(low, cfg, "low");
    check_delay(high, cfg, "high");
    check_lengths(dist, cfg);

    LayerSpec high_eff = high;
    if (mode == LayeredMode::arch1) high_eff.quantizer = QuantizerSpec::none();

    LayerRuntime L(low, cfg.x0);
    LayerRuntime H(high_eff, 0.0);

    Trajectory tr = Trajectory::zeros(cfg.horizon);
    tr.v = dist.v;
    tr.r = dist.r;
    tr.w = combine_disturbance(dist, cfg.T_r);
    tr.x[0] = cfg.x0;
    for (int t = 0; t < cfg.horizon; ++t) {
        tr.u_L[t] = mode == LayeredMode::eq1 ? L.act(tr.x[t]) : L.act_quantized_action(tr.x[t]);
        tr.u_H[t] = H.act(tr.r[t]);
        tr.u[t] = tr.u_L[t] + tr.u_H[t];
        tr.x[t + 1] = step(tr.x[t], tr.u[t], tr.w[t], cfg.a);
    }
    return tr;
}

Trajectory simulate_layered(const PlantConfig& cfg, const LayerSpec& low, const LayerSpec& high,
                            const DisturbanceSpec& dist, LayeredMode mode)
{
    return simulate_layered(cfg, low, high, make_disturbances(dist, cfg), mode);
}

void Arch2Params::validate() const
{
    if (!std::isfinite(a) || !std::isfinite(k)) throw ConfigError("arch2: a and k must be finite");
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("arch2.q must lie in (0, 1)");
}

Arch2Result simulate_arch2(const Arch2Params& p, const Disturbances& dist, const PlantConfig& cfg)
{
    p.validate();
    cfg.validate();
    check_lengths(dist, cfg);

    const int n = cfg.horizon;
    Arch2Result res;
    res.traj = Trajectory::zeros(n);
    res.x_hat = Eigen::VectorXd::Zero(n + 1);
    res.w_hat = Eigen::VectorXd::Zero(n);
    res.symbols.reserve(static_cast<std::size_t>(n));

    Trajectory& tr = res.traj;
    tr.v = dist.v;
    tr.r = dist.r;
    tr.w = combine_disturbance(dist, cfg.T_r);
    tr.x[0] = cfg.x0;

    for (int t = 0; t < n; ++t) {
        const double x = tr.x[t];
        const double xh = res.x_hat[t];
        double innovation = x - xh;
        if (p.quantized) {
            const IntervalSample s = quantize_dynamic_interval(x, xh, p.q);
            res.symbols.push_back(s.symbol);
            innovation = s.value - xh;
        }
        res.w_hat[t] = x - p.a * xh - p.k * (x - xh);
        tr.u_L[t] = p.k * innovation;
        tr.u[t] = tr.u_L[t];
        tr.x[t + 1] = step(x, tr.u[t], tr.w[t], p.a);
        res.x_hat[t + 1] = x;
    }
    return res;
}

Arch2Result simulate_arch2(const Arch2Params& p, const DisturbanceSpec& dist, const PlantConfig& cfg)
{
    return simulate_arch2(p, make_disturbances(dist, cfg), cfg);
}

Arch3Result simulate_arch3(const PlantConfig& cfg, const LayerSpec& fast, const LayerSpec& slow,
                           const Disturbances& dist)
{
    cfg.validate();
    check_delay(fast, cfg, "fast");
    check_delay(slow, cfg, "slow");
    check_lengths(dist, cfg);
    if (fast.T >= slow.T) throw ConfigError("arch3: fast.T must be smaller than slow.T");
    if (slow.quantizer.kind != QuantizerKind::none) throw ConfigError("arch3: slow layer must be unquantized");

    QuantizerSpec qs = fast.quantizer;
    if (qs.kind == QuantizerKind::uniform && qs.M == 0.0)
        qs.M = cfg.w_bound + (cfg.horizon - 1) * cfg.r_step_bound;
    Quantizer Q(qs);

    const int n = cfg.horizon;
    const double a = cfg.a;
    const double gain_fast = std::pow(a, fast.T + 1);
    const double gain_slow = std::pow(a, slow.T + 1);

    Arch3Result res;
    Trajectory& tr = res.traj;
    tr = Trajectory::zeros(n);
    tr.v = dist.v;
    tr.r = dist.r;
    tr.w = combine_disturbance(dist, cfg.T_r);
    tr.x[0] = cfg.x0;

    // quantized[j] is Q(w(j)) as carried by the IFP message, 0 if none was sent.
    std::vector<double> quantized(static_cast<std::size_t>(n), 0.0);
    auto innovation = [&](int j) { return tr.x[j + 1] - a * tr.x[j] - tr.u[j]; };
    // Residue of the subtraction above when w(j) is exactly 0.
    auto rounding = [&](int j) {
        return 64.0 * std::numeric_limits<double>::epsilon() *
               (std::abs(tr.x[j + 1]) + std::abs(a * tr.x[j]) + std::abs(tr.u[j]));
    };

    for (int t = 0; t < n; ++t) {
        double u_fast = t == 0 ? -a * cfg.x0 : 0.0;
        const int jf = t - fast.T - 1;
        if (jf >= 0) {
            const double wj = innovation(jf);
            if (std::abs(wj) > rounding(jf)) {
                quantized[jf] = Q(wj);
                const double act = -gain_fast * quantized[jf];
                u_fast += act;
                res.ifp_log.push_back({t, jf, quantized[jf], act});
            }
        }

        double u_slow = 0.0;
        const int js = t - slow.T - 1;
        if (js >= 0) u_slow = -gain_slow * (innovation(js) - quantized[js]);

        tr.u_L[t] = u_fast;
        tr.u_H[t] = u_slow;
        tr.u[t] = u_fast + u_slow;
        tr.x[t + 1] = step(tr.x[t], tr.u[t], tr.w[t], a);
    }
    return res;
}

Arch3Result simulate_arch3(const PlantConfig& cfg, const LayerSpec& fast, const LayerSpec& slow,
                           const DisturbanceSpec& dist)
{
    return simulate_arch3(cfg, fast, slow, make_disturbances(dist, cfg));
}

}  // namespace layerlab
