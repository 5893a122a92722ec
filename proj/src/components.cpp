// SPDX-License-Identifier: Apache-2.0
#include "layerlab/components.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "layerlab/error.hpp"

namespace layerlab {

std::uint64_t QuantizerSpec::cells() const
{
    switch (kind) {
    case QuantizerKind::uniform: return std::uint64_t{1} << R;
    case QuantizerKind::dynamic_interval: return 3;
    default: return 0;
    }
}

void QuantizerSpec::validate() const
{
    switch (kind) {
    case QuantizerKind::none: return;
    case QuantizerKind::uniform:
        if (R < 1) throw ConfigError("quantizer.R must be >= 1");
        if (R >= 52) throw ConfigError("quantizer.R must be < 52");
        if (!(M > 0.0) || !std::isfinite(M)) throw ConfigError("quantizer.M must be > 0");
        return;
    case QuantizerKind::logarithmic:
    case QuantizerKind::dynamic_interval:
        if (!(q > 0.0 && q < 1.0)) throw ConfigError("quantizer.q must lie in (0, 1)");
        return;
    }
}

UniformSample quantize_uniform(double x, int R, double M)
{
    if (R < 1 || R >= 52) throw DomainError("quantize_uniform: R must be in [1, 51]");
    if (!(M > 0.0) || !std::isfinite(M)) throw DomainError("quantize_uniform: M must be > 0");
    if (std::isnan(x)) throw DomainError("quantize_uniform: NaN input");

    const std::uint64_t n = std::uint64_t{1} << R;
    const double width = 2.0 * M / static_cast<double>(n);
    const bool saturated = std::abs(x) > M;

    std::uint64_t code = 0;
    const double pos = std::floor((x + M) / width);
    if (pos >= static_cast<double>(n - 1))
        code = n - 1;
    else if (pos > 0.0)
        code = static_cast<std::uint64_t>(pos);
    return {code, -M + (static_cast<double>(code) + 0.5) * width, saturated};
}

double quantize_log(double x, double q)
{
    if (!(q > 0.0 && q < 1.0)) throw DomainError("quantize_log: q must lie in (0, 1)");
    if (x == 0.0) return 0.0;
    if (!std::isfinite(x)) throw DomainError("quantize_log: non-finite input");

    const double rho = (1.0 - q) / (1.0 + q);
    const double m = std::abs(x);
    const double guess = std::round(std::log(m) / std::log(rho));

    // Nearest of the neighbouring levels; scanning from larger to smaller
    // magnitude with strict < keeps ties on the larger level.
    double best = 0.0;
    double best_err = std::numeric_limits<double>::infinity();
    for (double i = guess - 2.0; i <= guess + 2.0; i += 1.0) {
        const double level = std::pow(rho, i);
        const double err = std::abs(level - m);
        if (err < best_err) {
            best = level;
            best_err = err;
        }
    }
    return std::copysign(best, x);
}

IntervalSample quantize_dynamic_interval(double x, double x_hat, double q)
{
    if (!(q > 0.0 && q < 1.0)) throw DomainError("quantize_dynamic_interval: q must lie in (0, 1)");
    const double half = q * std::abs(x_hat);
    const double lower = x_hat - half;
    const double upper = x_hat + half;
    if (x < lower) return {IntervalSymbol::left, lower};
    if (x > upper) return {IntervalSymbol::right, upper};
    return {IntervalSymbol::inside, x_hat};
}

Quantizer::Quantizer(QuantizerSpec spec) : spec_(spec)
{
    spec_.validate();
}

double Quantizer::operator()(double x)
{
    switch (spec_.kind) {
    case QuantizerKind::none: return x;
    case QuantizerKind::uniform: return quantize_uniform(x, spec_.R, spec_.M).value;
    case QuantizerKind::logarithmic: return quantize_log(x, spec_.q);
    case QuantizerKind::dynamic_interval:
        estimate_ = quantize_dynamic_interval(x, estimate_, spec_.q).value;
        return estimate_;
    }
    return x;
}

DelayLine::DelayLine(int T, double fill) : T_(T)
{
    if (T < 0) throw ConfigError("delay must be >= 0");
    buffer_.assign(static_cast<std::size_t>(T), fill);
}

double DelayLine::push(double x)
{
    if (T_ == 0) return x;
    buffer_.push_back(x);
    const double out = buffer_.front();
    buffer_.pop_front();
    return out;
}

std::vector<FrontierPoint> frontier_points(const SatFrontier& f)
{
    if (!(f.C > 0.0)) throw ConfigError("frontier.C must be > 0");
    if (f.model == FrontierModel::linear && !(f.lambda > 0.0))
        throw ConfigError("frontier.lambda must be > 0");
    if (f.T_max < 0) throw ConfigError("frontier.T_max must be >= 0");

    std::vector<FrontierPoint> pts;
    for (int T = 0; T <= f.T_max; ++T) {
        const int slack = f.T_max - T;
        const double raw = f.model == FrontierModel::linear ? f.C - f.lambda * slack
                                                             : f.C / static_cast<double>(slack + 1);
        const double R = std::floor(raw + 1e-12);
        if (R >= 1.0) pts.push_back({T, static_cast<int>(std::min(R, 51.0))});
    }
    if (pts.empty()) throw ConfigError("frontier has no point with R >= 1");
    return pts;
}

}  // namespace layerlab
