// SPDX-License-Identifier: Apache-2.0
#include "layerlab/core_dynamics.hpp"

#include <cmath>
#include <string>

#include "layerlab/error.hpp"

namespace layerlab {

void PlantConfig::validate() const
{
    if (!std::isfinite(a) || !std::isfinite(x0))
        throw ConfigError("plant: a and x0 must be finite");
    if (horizon < 1) throw ConfigError("plant.horizon must be >= 1");
    if (T_r < 0) throw ConfigError("plant.T_r must be >= 0");
    if (!(w_bound >= 0.0) || !std::isfinite(w_bound)) throw ConfigError("plant.w_bound must be >= 0");
    if (!(r_step_bound >= 0.0) || !std::isfinite(r_step_bound))
        throw ConfigError("plant.r_step_bound must be >= 0");
}

Trajectory Trajectory::zeros(int horizon)
{
    Trajectory t;
    t.x = Eigen::VectorXd::Zero(horizon + 1);
    t.u = t.u_L = t.u_H = t.w = t.v = t.r = Eigen::VectorXd::Zero(horizon);
    return t;
}

double step(double x, double u, double w, double a)
{
    if (!std::isfinite(x) || !std::isfinite(u) || !std::isfinite(w) || !std::isfinite(a))
        throw DomainError("step: non-finite input");
    return a * x + u + w;
}

std::uint64_t SplitMix64::next()
{
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SplitMix64::next_unit()
{
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

namespace {

void check_explicit(const std::vector<double>& seq, const char* name, int horizon)
{
    if (static_cast<int>(seq.size()) != horizon)
        throw ValidationError(std::string("disturbance.") + name + ": length " +
                              std::to_string(seq.size()) + " != horizon " + std::to_string(horizon));
    for (std::size_t i = 0; i < seq.size(); ++i)
        if (!std::isfinite(seq[i]))
            throw ValidationError(std::string("disturbance.") + name + "[" + std::to_string(i) +
                                      "] is not finite",
                                  static_cast<long>(i));
}

}  // namespace

Disturbances make_disturbances(const DisturbanceSpec& spec, const PlantConfig& cfg)
{
    cfg.validate();
    const int n = cfg.horizon;
    Disturbances d{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};

    if (spec.kind == DisturbanceKind::explicit_) {
        check_explicit(spec.v, "v", n);
        check_explicit(spec.r, "r", n);
        // Small slack for values written out in decimal.
        const double slack = 1e-12;
        for (int t = 0; t < n; ++t) {
            if (std::abs(spec.v[t]) > cfg.w_bound + slack)
                throw ValidationError("disturbance.v[" + std::to_string(t) + "] exceeds w_bound", t);
            if (t > 0 && std::abs(spec.r[t] - spec.r[t - 1]) > cfg.r_step_bound + slack)
                throw ValidationError("disturbance.r[" + std::to_string(t) + "] step exceeds r_step_bound", t);
            d.v[t] = spec.v[t];
            d.r[t] = spec.r[t];
        }
        return d;
    }

    SplitMix64 rng(spec.seed);
    const bool vertex = spec.kind == DisturbanceKind::vertex_adversarial;
    auto draw = [&](double bound) {
        const double u = rng.next_unit();
        if (vertex) return u < 0.5 ? -bound : bound;
        return bound * (2.0 * u - 1.0);
    };
    for (int t = 0; t < n; ++t) {
        d.v[t] = draw(cfg.w_bound);
        if (t > 0) d.r[t] = d.r[t - 1] + draw(cfg.r_step_bound);
    }
    return d;
}

Eigen::VectorXd combine_disturbance(const Disturbances& d, int T_r)
{
    const Eigen::Index n = d.v.size();
    Eigen::VectorXd w = d.v;
    for (Eigen::Index t = T_r; t < n; ++t) w[t] += d.r[t - T_r];
    return w;
}

double evaluate_cost(const Eigen::Ref<const Eigen::VectorXd>& x, CostNorm norm)
{
    if (x.size() < 2) throw ValidationError("evaluate_cost: trajectory has no steps");
    const auto tail = x.tail(x.size() - 1);
    if (norm == CostNorm::linf) return tail.cwiseAbs().maxCoeff();
    return std::sqrt(tail.squaredNorm() / static_cast<double>(tail.size()));
}

double evaluate_cost(const Trajectory& traj, CostNorm norm)
{
    return evaluate_cost(traj.x, norm);
}

double replay_error(const Trajectory& traj, double a)
{
    double worst = 0.0;
    for (int t = 0; t < traj.horizon(); ++t)
        worst = std::max(worst, std::abs(step(traj.x[t], traj.u[t], traj.w[t], a) - traj.x[t + 1]));
    return worst;
}

}  // namespace layerlab
