// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "layerlab/architectures.hpp"
#include "layerlab/components.hpp"
#include "layerlab/core_dynamics.hpp"
#include "layerlab/synthesis.hpp"

namespace layerlab {

/// A TOML experiment file. Exactly one of [layered], [arch2], [arch3] must be
/// present; [frontier], [sweep], [oracle] and [output] are optional.
struct ExperimentConfig {
    PlantConfig plant;
    DisturbanceSpec disturbance;
    ArchitectureTag arch = ArchitectureTag::layered;
    LayeredMode mode = LayeredMode::eq1;
    ArchitectureSpecs specs;
    std::optional<SatFrontier> frontier;
    SweepEval sweep_eval = SweepEval::oracle;
    int oracle_horizon = 0;
    std::string out_dir;
};

/// `base_dir` resolves relative file references (disturbance.file).
ExperimentConfig parse_experiment_config(std::string_view toml_text,
                                         const std::filesystem::path& base_dir = ".");
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

QuantizerKind parse_quantizer_kind(std::string_view s);

}  // namespace layerlab
