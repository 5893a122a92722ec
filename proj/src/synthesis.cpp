// SPDX-License-Identifier: Apache-2.0
#include "layerlab/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "layerlab/controllers.hpp"
#include "layerlab/error.hpp"

namespace layerlab {

ControllerSpec synthesize_bump_controller(double a, int T_L, const QuantizerSpec&)
{
    if (T_L < 0) throw ConfigError("bump controller: T_L must be >= 0");
    ControllerSpec c;
    c.kind = ControllerKind::synthesized;
    c.law = SynthesizedLaw::bump_predictor;
    c.pole = a;
    c.delay = T_L;
    return c;
}

double tune_uniform_range(double a, int T, int R, double w_bound)
{
    double reach = 0.0;
    for (int j = 0; j <= T; ++j) reach += std::pow(std::abs(a), j);
    const double leak = std::pow(std::abs(a), T + 1) * std::ldexp(1.0, -R);
    if (leak >= 1.0) throw ConfigError("quantizer too coarse for this plant: |a|^(T+1) >= 2^R");
    const double M = w_bound * reach / (1.0 - leak);
    return M > 0.0 ? M : 1.0;
}

LayerSpec synthesize_bump_layer(double a, int T_L, QuantizerSpec quantizer, double w_bound)
{
    if (quantizer.kind == QuantizerKind::uniform && quantizer.M == 0.0)
        quantizer.M = tune_uniform_range(a, T_L, quantizer.R, w_bound);
    quantizer.validate();
    return {LayerName::low, T_L, quantizer, synthesize_bump_controller(a, T_L, quantizer)};
}

ControllerSpec synthesize_trail_controller(int T_r, int T_H, const QuantizerSpec&)
{
    if (T_r < 0 || T_H < 0) throw ConfigError("trail controller: delays must be >= 0");
    ControllerSpec c;
    c.kind = ControllerKind::synthesized;
    c.law = SynthesizedLaw::trail_canceller;
    c.delay = T_H;
    c.advance = T_r;
    c.insufficient_warning = T_H > T_r;
    return c;
}

LayerSpec synthesize_trail_layer(int T_r, int T_H, QuantizerSpec quantizer)
{
    quantizer.validate();
    return {LayerName::high, T_H, quantizer, synthesize_trail_controller(T_r, T_H, quantizer)};
}

double trail_range(const PlantConfig& cfg)
{
    const double span = cfg.r_step_bound * (cfg.horizon - 1);
    return span > 0.0 ? span : 1.0;
}

double trail_residual_bound(const PlantConfig& cfg, const LayerSpec& high)
{
    // Largest |r(t - T_r)| that reaches the plant within the horizon.
    const double reach = std::max(0, cfg.horizon - 1 - cfg.T_r) * cfg.r_step_bound;
    const ControllerSpec& c = high.controller;
    const bool cancels = c.kind == ControllerKind::synthesized && c.law == SynthesizedLaw::trail_canceller &&
                         !c.insufficient_warning;
    if (!cancels) return reach;
    switch (high.quantizer.kind) {
    case QuantizerKind::none: return 0.0;
    case QuantizerKind::uniform: {
        const double half_cell = high.quantizer.M * std::ldexp(1.0, -high.quantizer.R);
        return reach <= high.quantizer.M ? half_cell : reach - high.quantizer.M + half_cell;
    }
    case QuantizerKind::logarithmic: return high.quantizer.q * reach;
    case QuantizerKind::dynamic_interval: return 2.0 * reach;
    }
    return reach;
}

StabilityReport stability_arch2(double a, double k, double q)
{
    if (!(q > 0.0 && q < 1.0)) throw DomainError("stability_arch2: q must lie in (0, 1)");
    if (!std::isfinite(a) || !std::isfinite(k)) throw DomainError("stability_arch2: non-finite a or k");

    Eigen::Matrix2d closed_loop;
    closed_loop << a + k, -k, 1.0, 0.0;
    Eigen::EigenSolver<Eigen::Matrix2d> solver(closed_loop, false);
    Eigen::Vector2cd ev = solver.eigenvalues();
    if (ev[0].real() < ev[1].real() || (ev[0].real() == ev[1].real() && ev[0].imag() < ev[1].imag()))
        std::swap(ev[0], ev[1]);

    StabilityReport rep;
    rep.eigenvalues[0] = ev[0];
    rep.eigenvalues[1] = ev[1];
    rep.spectral_radius = std::max(std::abs(ev[0]), std::abs(ev[1]));
    rep.small_gain = std::abs(k * q);
    const bool spectrum_ok = rep.spectral_radius < 1.0 - 1e-10;
    rep.stable = spectrum_ok && rep.small_gain < 1.0;

    std::ostringstream notes;
    if (!spectrum_ok)
        notes << (std::abs(rep.spectral_radius - 1.0) <= 1e-10 ? "not strictly stable: unit eigenvalue persists"
                                                               : "unstable: spectral radius exceeds 1");
    else
        notes << "spectrum inside unit disk";
    if (rep.small_gain >= 1.0) notes << "; small-gain |kq| >= 1";

    // The alternative printed form (a+k) +- sqrt((a+k)^2 + 4k) < 2.
    const double s = a + k;
    const double disc = s * s + 4.0 * k;
    if (disc < 0.0) {
        notes << "; printed inequality undefined (complex root of (a+k)^2+4k)";
    } else {
        const bool printed = s + std::sqrt(disc) < 2.0 && s - std::sqrt(disc) < 2.0 && rep.small_gain < 1.0;
        notes << "; printed inequality " << (printed ? "holds" : "fails") << ", "
              << (printed == rep.stable ? "agrees" : "disagrees") << " with eigenvalue certificate";
    }
    rep.notes = notes.str();
    return rep;
}

double worst_case_cost(const PlantConfig& cfg, const LayerSpec& low, const LayerSpec& high, Ensemble ens,
                       std::uint64_t max_runs)
{
    cfg.validate();
    const int n = cfg.horizon;
    const bool vary_v = ens.bumps && cfg.w_bound > 0.0;
    const bool vary_r = ens.trail && cfg.r_step_bound > 0.0 && n > 1;
    const int v_bits = vary_v ? n : 0;
    const int r_bits = vary_r ? n - 1 : 0;
    if (v_bits + r_bits >= 63 || (std::uint64_t{1} << (v_bits + r_bits)) > max_runs)
        throw ResourceError("vertex ensemble of 2^" + std::to_string(v_bits + r_bits) + " runs exceeds budget");

    Disturbances d{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
    double worst = 0.0;
    for (std::uint64_t vm = 0; vm < (std::uint64_t{1} << v_bits); ++vm) {
        for (int t = 0; t < n; ++t)
            d.v[t] = vary_v ? ((vm >> t) & 1 ? cfg.w_bound : -cfg.w_bound) : 0.0;
        for (std::uint64_t rm = 0; rm < (std::uint64_t{1} << r_bits); ++rm) {
            for (int t = 1; t < n; ++t)
                d.r[t] = vary_r ? d.r[t - 1] + ((rm >> (t - 1)) & 1 ? cfg.r_step_bound : -cfg.r_step_bound) : 0.0;
            const Trajectory tr = simulate_layered(cfg, low, high, d);
            worst = std::max(worst, evaluate_cost(tr, CostNorm::linf));
        }
    }
    return worst;
}

SeparationReport layer_separation_check(const PlantConfig& cfg, const LayerSpec& low, const LayerSpec& high)
{
    SeparationReport rep;
    rep.joint_cost = worst_case_cost(cfg, low, high, {true, true});
    // r = 0: the high layer is idle.
    const LayerSpec idle{LayerName::high, 0, QuantizerSpec::none(), ControllerSpec::zero()};
    rep.low_solo_cost = worst_case_cost(cfg, low, idle, {true, false});
    rep.high_solo_cost = worst_case_cost(cfg, low, high, {false, true});
    rep.sum_of_solo_costs = rep.low_solo_cost + rep.high_solo_cost;
    rep.separable = std::abs(rep.joint_cost - rep.sum_of_solo_costs) <= 1e-9;
    return rep;
}

}  // namespace layerlab
