// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "layerlab/architectures.hpp"
#include "layerlab/components.hpp"
#include "layerlab/core_dynamics.hpp"

namespace layerlab {

// --- layer controllers ----------------------------------------------------

/// Deadbeat predictor for the bump layer: x_hat(t) = a^T x~(t-T) plus the
/// layer's own last T outputs propagated through the plant, u_L(t) = -a x_hat(t).
ControllerSpec synthesize_bump_controller(double a, int T_L, const QuantizerSpec& quantizer);

/// Range M for a uniform R-bit quantizer that keeps the predictor loop out of
/// saturation: M = w_bound * sum_{j<=T} |a|^j / (1 - |a|^(T+1) 2^-R).
double tune_uniform_range(double a, int T, int R, double w_bound);

/// Bump layer with its quantizer range tuned when the spec leaves M = 0.
LayerSpec synthesize_bump_layer(double a, int T_L, QuantizerSpec quantizer, double w_bound);

/// u_H(t) = -Q_H(r(t - T_r)) when T_H <= T_r; otherwise the zero law with
/// `insufficient_warning` set.
ControllerSpec synthesize_trail_controller(int T_r, int T_H, const QuantizerSpec& quantizer);
LayerSpec synthesize_trail_layer(int T_r, int T_H, QuantizerSpec quantizer);

/// Reachable trail magnitude (horizon-1)*r_step_bound, or 1 when that is 0.
double trail_range(const PlantConfig& cfg);

/// Worst per-step residual r(t-T_r) + u_H(t) the trail layer can leave over
/// cfg.horizon steps of a trail starting at 0.
double trail_residual_bound(const PlantConfig& cfg, const LayerSpec& high);

// --- Architecture 2 stability ---------------------------------------------

struct StabilityReport {
    std::complex<double> eigenvalues[2];
    double spectral_radius;
    double small_gain;  // |k q|
    bool stable;
    std::string notes;
};

/// Spectrum of [[a+k, -k], [1, 0]] plus the small-gain test |k q| < 1.
/// A spectral radius within 1e-10 of 1 counts as not strictly stable.
StabilityReport stability_arch2(double a, double k, double q);

// --- exhaustive minimax ---------------------------------------------------

struct OracleOptions {
    std::uint64_t max_nodes = 10'000'000;
    int max_cells = 4;
    int max_horizon = 12;
    int subdivision = 1;            // extra refinement of the action lattice
    std::size_t max_policy_entries = 200'000;
};

struct PolicyEntry {
    int t;
    std::vector<double> observations;  // sensed values (exact) or cell indices (quantized)
    double action;
};

struct OracleResult {
    double minimax_cost;
    double lattice_step;
    int horizon;
    std::uint64_t nodes_expanded;
    std::vector<PolicyEntry> policy;
    bool policy_truncated = false;
};

/// Exact minimax value of the single-layer bump game over `horizon` steps.
///
/// The controller sees the layer's sensed signal with delay layer.T and
/// picks actions from a lattice; the adversary picks vertex disturbances
/// +-w_bound. With a quantizer the controller only learns the cell, and the
/// adversary may place the state anywhere in the reachable part of it
/// (interval, set-membership belief). Cost is max |x(t)|, t = 1..horizon.
///
/// Requires an integer plant pole and x0, w_bound and the quantizer cells on
/// a common lattice. Throws ResourceError when a budget is exceeded.
OracleResult minimax_oracle(const PlantConfig& cfg, const LayerSpec& layer, int horizon,
                            const OracleOptions& opts = {});

// --- worst-case evaluation on the vertex ensemble ---------------------------

struct Ensemble {
    bool bumps = true;   // v over {+-w_bound}^horizon, else v = 0
    bool trail = true;   // r walks with increments +-r_step_bound, else r = 0
};

/// Largest linf cost of the layered loop over the vertex ensemble.
double worst_case_cost(const PlantConfig& cfg, const LayerSpec& low, const LayerSpec& high,
                       Ensemble ens = {}, std::uint64_t max_runs = std::uint64_t{1} << 22);

struct SeparationReport {
    double joint_cost;
    double low_solo_cost;
    double high_solo_cost;
    double sum_of_solo_costs;
    bool separable;
};

/// joint: both layers on the full vertex ensemble. low solo: the low layer
/// alone, r = 0. high solo: both layers, v = 0.
SeparationReport layer_separation_check(const PlantConfig& cfg, const LayerSpec& low, const LayerSpec& high);

// --- diversity sweep --------------------------------------------------------

enum class SweepEval { oracle, adversarial_sim };

struct Allocation {
    FrontierPoint low;
    FrontierPoint high;
    double cost = 0.0;
    bool evaluated = false;
    double low_range = 0.0;    // tuned M of the low quantizer
    double high_range = 0.0;   // M of the high quantizer
    double trail_residual = 0.0;
    std::string note;
};

struct SweepResult {
    SweepEval eval;
    std::vector<Allocation> allocations;  // low-major, frontier order
    std::optional<Allocation> best_diverse;
    std::optional<Allocation> best_uniform;
    std::optional<double> dess_gain;
};

/// Every (low, high) pair of frontier points: synthesize both layers and
/// evaluate the joint worst-case cost. The high quantizer spans the trail's
/// reachable range (horizon-1)*r_step_bound; the low quantizer is tuned for
/// w_bound plus the trail layer's residual. Pairs are evaluated concurrently.
SweepResult dess_sweep(const SatFrontier& frontier, const PlantConfig& cfg, SweepEval eval,
                       const OracleOptions& opts = {});

}  // namespace layerlab
