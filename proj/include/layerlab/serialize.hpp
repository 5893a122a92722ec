// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include <json.hpp>

#include "layerlab/architectures.hpp"
#include "layerlab/synthesis.hpp"

namespace layerlab {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal, '.' separator regardless of locale.
std::string format_double(double v);

/// Columns: t,x,u,u_L,u_H,w,v,r. The last row (t = horizon) carries x only.
std::string trajectory_csv(const Trajectory& tr);
Json trajectory_json(const Trajectory& tr);

Json to_json(const StabilityReport& r);
Json to_json(const OracleResult& r);
Json to_json(const SweepResult& r);
Json to_json(const ArchitectureGraph& g);
Json to_json(const SeparationReport& r);

/// Columns: minimax_cost,lattice_step,horizon,nodes_expanded,policy_entries,policy_truncated
std::string oracle_csv(const OracleResult& r);
/// Columns: T_L,R_L,T_H,R_H,cost,status,low_range,high_range,trail_residual,note
std::string sweep_csv(const SweepResult& r);

std::string_view to_string(QuantizerKind k);
std::string_view to_string(SweepEval e);

}  // namespace layerlab
