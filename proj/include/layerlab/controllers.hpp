// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "layerlab/architectures.hpp"

namespace layerlab {

/// Runtime of one layer: delay line, quantizer, and control law.
///
/// Call `act(raw)` once per step with the layer's raw sensed signal at that
/// step. Samples older than the start of the run do not exist; the bump
/// predictor then uses the known initial state instead.
class LayerRuntime {
public:
    LayerRuntime(const LayerSpec& spec, double x0 = 0.0);

    /// Control output at the current step.
    double act(double raw);

    /// Same as `act` but the quantizer is applied to the action rather than
    /// to the measurement.
    double act_quantized_action(double raw);

    const std::vector<double>& samples() const { return samples_; }
    const std::vector<double>& outputs() const { return outputs_; }

private:
    double law();

    LayerSpec spec_;
    double x0_;
    DelayLine delay_;
    Quantizer quantizer_;
    std::vector<double> samples_;   // samples_[s] = sensed value of time s
    std::vector<double> outputs_;
    int t_ = 0;
};

}  // namespace layerlab
