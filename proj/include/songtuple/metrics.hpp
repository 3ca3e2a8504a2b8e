#pragma once

#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "songtuple/song_model.hpp"

namespace songtuple {

/// Grid units per second used by calibration: one unit is 1/16 s.
inline constexpr double kGridUnitsPerSecond = 16.0;

struct GridNote {
    int pitch = 0;
    int note_units = 1;  ///< >= 1
    int rest_units = 0;  ///< >= 0

    friend bool operator==(const GridNote&, const GridNote&) = default;
};

struct MelodyEvalPair {
    std::vector<MelodyTriplet> generated;
    std::vector<MelodyTriplet> reference;
};

struct CalibratedPair {
    std::vector<MelodyTriplet> generated;  ///< pitch-shifted and time-rescaled
    std::vector<MelodyTriplet> reference;
    std::vector<GridNote> generated_grid;
    std::vector<GridNote> reference_grid;
    int pitch_offset = 0;
    double time_ratio = 1.0;
};

/// Shifts the generated pitches by round(mean ref pitch - mean gen pitch),
/// rescales generated note and rest durations by mean ref / mean gen note
/// duration, then quantizes both melodies to 1/16-second units.
/// Throws EmptyInput if either melody is empty or a melody has no positive duration.
CalibratedPair calibrate(const MelodyEvalPair& pair);

std::vector<GridNote> quantize_to_grid(std::span<const MelodyTriplet> melody);

/// Histogram intersection of the value frequencies, in percent [0, 100].
/// Throws EmptyInput on an empty list.
double distribution_similarity(std::span<const int> a, std::span<const int> b);

double pitch_distribution_similarity(const CalibratedPair& pair);
double duration_distribution_similarity(const CalibratedPair& pair);

/// DTW with |a_i - b_j| local cost, divided by the length of the optimal
/// warping path. Throws EmptyInput on empty series.
double dtw_mean_abs(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Pitch sampled once per grid unit of each note (rests add no samples).
Eigen::VectorXd pitch_series(std::span<const GridNote> melody);

/// DTW distance between the mean-centred pitch series of both melodies.
double melody_distance(const CalibratedPair& pair);

/// Bigram F1 between two texts. English tokens are lower-cased whitespace
/// words; Chinese tokens are single characters. 0 when either side has fewer
/// than two tokens.
double rouge2(std::string_view candidate, std::string_view reference, Language language);

/// Throws DimensionMismatch or ZeroVector.
double cosine_similarity(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// One vector per line of comma-separated decimals. Throws IoError, or
/// DimensionMismatch when rows disagree in length.
std::vector<Eigen::VectorXd> read_embeddings(const std::filesystem::path& path);
std::vector<Eigen::VectorXd> parse_embeddings(std::string_view text);

}  // namespace songtuple
