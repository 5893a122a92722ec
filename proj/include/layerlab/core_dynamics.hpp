// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace layerlab {

struct PlantConfig {
    double a = 1.0;             // plant pole
    double w_bound = 1.0;       // |v(t)| bound
    double r_step_bound = 0.0;  // |r(t+1) - r(t)| bound
    int T_r = 0;                // trail advance warning, steps
    int horizon = 1;
    double x0 = 0.0;

    void validate() const;
};

enum class DisturbanceKind { seeded_random, vertex_adversarial, explicit_ };

struct DisturbanceSpec {
    DisturbanceKind kind = DisturbanceKind::seeded_random;
    std::uint64_t seed = 0;
    std::vector<double> v;  // explicit only
    std::vector<double> r;  // explicit only
};

struct Disturbances {
    Eigen::VectorXd v;
    Eigen::VectorXd r;
};

/// Time-indexed record of one closed-loop run. `x` has horizon+1 entries
/// (x(0) .. x(horizon)); every other signal has horizon entries.
struct Trajectory {
    Eigen::VectorXd x, u, u_L, u_H, w, v, r;

    int horizon() const { return static_cast<int>(u.size()); }
    static Trajectory zeros(int horizon);
};

enum class CostNorm { linf, rms };

/// One plant update: a*x + u + w.
double step(double x, double u, double w, double a);

/// SplitMix64. The game client reimplements this generator bit-for-bit, so
/// the draw order in `make_disturbances` is part of the session-log contract.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    /// Uniform double in [0, 1) from the top 53 bits.
    double next_unit();

private:
    std::uint64_t state_;
};

/// Bump sequence v and trail r, each of length cfg.horizon.
///
/// seeded-random: per step t, draw v(t) = w_bound*(2u-1), then (for t >= 1)
/// r(t) = r(t-1) + r_step_bound*(2u'-1); r(0) = 0.
/// vertex-adversarial: same draw order, but each draw is mapped to a sign.
Disturbances make_disturbances(const DisturbanceSpec& spec, const PlantConfig& cfg);

/// w(t) = v(t) + r(t - T_r), with r taken as zero before t = 0.
Eigen::VectorXd combine_disturbance(const Disturbances& d, int T_r);

/// Cost over x(1) .. x(horizon); x(0) is excluded.
double evaluate_cost(const Eigen::Ref<const Eigen::VectorXd>& x, CostNorm norm);
double evaluate_cost(const Trajectory& traj, CostNorm norm);

/// Largest per-step mismatch when (u, w) are replayed through `step`.
double replay_error(const Trajectory& traj, double a);

}  // namespace layerlab
