#pragma once

namespace songtuple {

/// Logarithmic duration quantizer. Durations in seconds, clipped to [x_min, x_max]
/// and mapped through log(x + epsilon) onto `bins` evenly spaced indices.
struct CodecConfig {
    double x_min = -0.3;
    double x_max = 6.0;
    int bins = 512;
    double epsilon = 1.0;

    /// Throws InvalidConfig if x_min + epsilon <= 0, x_max <= x_min or bins < 2.
    void validate() const;
};

inline constexpr CodecConfig kDefaultCodec{};

/// Throws InvalidDuration for non-finite input.
int encode_duration(double seconds, const CodecConfig& cfg = kDefaultCodec);

/// Throws InvalidBin outside [0, bins - 1].
double decode_duration(int bin, const CodecConfig& cfg = kDefaultCodec);

/// decode(bin + 1) - decode(bin). Throws InvalidBin outside [0, bins - 2].
double bin_width_at(int bin, const CodecConfig& cfg = kDefaultCodec);

}  // namespace songtuple
