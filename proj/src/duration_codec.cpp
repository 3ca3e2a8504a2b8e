#include "songtuple/duration_codec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "songtuple/errors.hpp"

namespace songtuple {

namespace {

double warp(double x, const CodecConfig& cfg) { return std::log(x + cfg.epsilon); }

}  // namespace

void CodecConfig::validate() const {
    if (!(x_min + epsilon > 0.0)) throw InvalidConfig("x_min + epsilon must be positive");
    if (!(x_max > x_min)) throw InvalidConfig("x_max must exceed x_min");
    if (bins < 2) throw InvalidConfig("bins must be at least 2");
}

int encode_duration(double seconds, const CodecConfig& cfg) {
    if (!std::isfinite(seconds)) throw InvalidDuration("duration is not finite");
    cfg.validate();
    const double x = std::clamp(seconds, cfg.x_min, cfg.x_max);
    const double lo = warp(cfg.x_min, cfg);
    const double hi = warp(cfg.x_max, cfg);
    const double position = (warp(x, cfg) - lo) / (hi - lo) * (cfg.bins - 1);
    // round half up
    const int bin = static_cast<int>(std::floor(position + 0.5));
    return std::clamp(bin, 0, cfg.bins - 1);
}

double decode_duration(int bin, const CodecConfig& cfg) {
    cfg.validate();
    if (bin < 0 || bin > cfg.bins - 1) {
        throw InvalidBin("bin " + std::to_string(bin) + " outside [0, " + std::to_string(cfg.bins - 1) + "]");
    }
    const double lo = warp(cfg.x_min, cfg);
    const double hi = warp(cfg.x_max, cfg);
    return std::exp((hi - lo) / (cfg.bins - 1) * bin + lo) - cfg.epsilon;
}

double bin_width_at(int bin, const CodecConfig& cfg) {
    if (bin < 0 || bin > cfg.bins - 2) {
        throw InvalidBin("bin width undefined at " + std::to_string(bin));
    }
    return decode_duration(bin + 1, cfg) - decode_duration(bin, cfg);
}

}  // namespace songtuple
