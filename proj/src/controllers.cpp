// SPDX-License-Identifier: Apache-2.0
#include "layerlab/controllers.hpp"

#include <cmath>
#include <limits>

namespace layerlab {

namespace {
constexpr double kNoSample = std::numeric_limits<double>::quiet_NaN();
}

LayerRuntime::LayerRuntime(const LayerSpec& spec, double x0)
    : spec_(spec), x0_(x0), delay_(spec.T, kNoSample), quantizer_(spec.quantizer)
{
}

double LayerRuntime::act(double raw)
{
    const double d = delay_.push(raw);
    if (!std::isnan(d)) samples_.push_back(quantizer_(d));
    const double u = law();
    outputs_.push_back(u);
    ++t_;
    return u;
}

double LayerRuntime::act_quantized_action(double raw)
{
    const double d = delay_.push(raw);
    if (!std::isnan(d)) samples_.push_back(d);
    double u = law();
    if (spec_.quantizer.kind != QuantizerKind::none) u = quantizer_(u);
    outputs_.push_back(u);
    ++t_;
    return u;
}

double LayerRuntime::law()
{
    const ControllerSpec& c = spec_.controller;
    const int t = t_;
    switch (c.kind) {
    case ControllerKind::zero: return 0.0;

    case ControllerKind::custom_linear: {
        double u = 0.0;
        const int newest = t - spec_.T;
        for (std::size_t i = 0; i < c.gains.size(); ++i) {
            const int s = newest - static_cast<int>(i);
            if (s >= 0 && s < static_cast<int>(samples_.size())) u += c.gains[i] * samples_[s];
        }
        return u;
    }

    case ControllerKind::synthesized:
        if (c.law == SynthesizedLaw::trail_canceller) {
            if (c.insufficient_warning) return 0.0;
            // The trail sample that enters the plant now, r(t - T_r).
            const int s = t - c.advance;
            return (s >= 0 && s < static_cast<int>(samples_.size())) ? -samples_[s] : 0.0;
        }
        {
            // Certainty-equivalent predictor: propagate the newest sample
            // through the known past outputs, then cancel a * x_hat(t).
            int k = t - spec_.T;
            double x_hat;
            if (k < 0) {
                k = 0;
                x_hat = x0_;
            } else {
                x_hat = samples_[k];
            }
            for (int j = k; j < t; ++j) x_hat = c.pole * x_hat + outputs_[j];
            return -c.pole * x_hat;
        }
    }
    return 0.0;
}

}  // namespace layerlab
