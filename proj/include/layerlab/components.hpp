// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <deque>
#include <utility>
#include <vector>

namespace layerlab {

enum class QuantizerKind { none, uniform, logarithmic, dynamic_interval };

struct QuantizerSpec {
    QuantizerKind kind = QuantizerKind::none;
    int R = 1;        // bits per step (uniform)
    double M = 0.0;   // saturation range (uniform); 0 asks synthesis to tune it
    double q = 0.5;   // relative error density (logarithmic, dynamic-interval)

    static QuantizerSpec none() { return {}; }
    static QuantizerSpec uniform(int bits, double range) { return {QuantizerKind::uniform, bits, range, 0.5}; }
    static QuantizerSpec logarithmic(double density) { return {QuantizerKind::logarithmic, 1, 0.0, density}; }
    static QuantizerSpec dynamic_interval(double density)
    {
        return {QuantizerKind::dynamic_interval, 1, 0.0, density};
    }

    /// Number of distinct output cells; 0 when unbounded.
    std::uint64_t cells() const;
    void validate() const;
};

struct UniformSample {
    std::uint64_t code;
    double value;
    bool saturated;
};

/// Mid-rise uniform quantizer over [-M, M] with 2^R cells. Out-of-range
/// inputs clamp to the extreme cell and report `saturated`.
UniformSample quantize_uniform(double x, int R, double M);

/// Nearest level of the grid {+-rho^i}, rho = (1-q)/(1+q); ties go to the
/// larger magnitude. Relative error never exceeds q.
double quantize_log(double x, double q);

enum class IntervalSymbol : std::uint8_t { left = 0, inside = 1, right = 2 };

struct IntervalSample {
    IntervalSymbol symbol;
    double value;
};

/// Two-bit quantizer around an estimate: reports whether x lies left of,
/// inside, or right of [x_hat - q|x_hat|, x_hat + q|x_hat|].
IntervalSample quantize_dynamic_interval(double x, double x_hat, double q);

/// Stateful quantizer built from a spec. The dynamic-interval variant uses
/// its previous output as the estimate.
class Quantizer {
public:
    explicit Quantizer(QuantizerSpec spec);
    double operator()(double x);
    const QuantizerSpec& spec() const { return spec_; }

private:
    QuantizerSpec spec_;
    double estimate_ = 0.0;
};

/// Output at step t is the input at step t - T; the first T outputs are `fill`.
class DelayLine {
public:
    explicit DelayLine(int T, double fill = 0.0);
    double push(double x);
    int delay() const { return T_; }

private:
    int T_;
    std::deque<double> buffer_;
};

enum class FrontierModel { linear, multiplicative };

/// Speed-accuracy tradeoff: slower components carry more bits per step.
///   linear:          R(T) = floor(C - lambda * (T_max - T))
///   multiplicative:  R(T) = floor(C / (T_max - T + 1))
struct SatFrontier {
    FrontierModel model = FrontierModel::linear;
    double C = 6.0;
    double lambda = 2.0;
    int T_max = 2;
};

struct FrontierPoint {
    int T;
    int R;
    friend bool operator==(const FrontierPoint&, const FrontierPoint&) = default;
};

/// Feasible (T, R) pairs with R >= 1, ascending in T.
std::vector<FrontierPoint> frontier_points(const SatFrontier& f);

}  // namespace layerlab
