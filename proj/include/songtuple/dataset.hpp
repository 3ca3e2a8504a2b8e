#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "songtuple/errors.hpp"
#include "songtuple/rng.hpp"
#include "songtuple/song_model.hpp"

namespace songtuple {

// ---------------------------------------------------------------------------
// Pretraining samples

struct PretrainSample {
    SongEntry entry;
    std::string source_id;
    std::size_t line_offset = 0;
    int shift = 0;         ///< semitones applied by augmentation
    bool flagged = false;  ///< chunk outside 5..10 lines (short song or merged tail)
};

inline constexpr std::size_t kMinChunkLines = 5;
inline constexpr std::size_t kMaxChunkLines = 10;

/// Consecutive chunks of 5..10 lines with seeded lengths. A tail shorter than 5
/// lines joins the previous chunk; a song shorter than 5 lines is one flagged chunk.
std::vector<PretrainSample> chunk_song(const SongEntry& entry, std::uint64_t seed, const std::string& source_id = "");

struct Augmentation {
    std::vector<PretrainSample> variants;  ///< shifts -4..+4 in ascending order, minus dropped ones
    std::vector<int> dropped_shifts;
};

inline constexpr int kMaxShift = 4;

/// Transposed copies for every shift in [-4, 4]. Shifts that push a pitch out of
/// the vocabulary are dropped and reported. Throws InvalidParams for PureLyric.
Augmentation augment_melody(const PretrainSample& sample);

// ---------------------------------------------------------------------------
// Corpus mixing

enum class CorpusKind { Lyric, Melody, Paired };

struct MixRatio {
    int lyric = 1;
    int melody = 1;
    int paired = 1;
};

struct MixSlot {
    CorpusKind kind;
    std::size_t index;  ///< into that kind's sample list
    friend bool operator==(const MixSlot&, const MixSlot&) = default;
};

/// Round-robin emission: each round takes `ratio.lyric` lyric, `ratio.melody`
/// melody and `ratio.paired` paired samples, in that order. Every kind is drawn
/// from a seeded shuffle and reshuffled when exhausted; rounds continue until
/// the longest corpus (relative to its ratio share) has been emitted once.
/// Throws EmptyCorpus if any size is zero, InvalidParams for a ratio part < 1.
std::vector<MixSlot> mix_schedule(std::array<std::size_t, 3> sizes, std::uint64_t seed, MixRatio ratio = {});

template <typename T>
std::vector<T> mix_corpora(const std::vector<T>& lyric, const std::vector<T>& melody, const std::vector<T>& paired,
                           std::uint64_t seed, MixRatio ratio = {}) {
    const std::array<const std::vector<T>*, 3> sets = {&lyric, &melody, &paired};
    std::vector<T> out;
    for (const MixSlot& slot : mix_schedule({lyric.size(), melody.size(), paired.size()}, seed, ratio)) {
        out.push_back((*sets[static_cast<std::size_t>(slot.kind)])[slot.index]);
    }
    return out;
}

/// Splits a bare triplet list into PureMelody lines: a line ends after a rest of
/// at least `break_rest_seconds` or once it holds `max_notes_per_line` notes.
/// Throws EmptyInput or PitchOutOfVocabulary.
SongEntry melody_entry_from_triplets(std::span<const MelodyTriplet> triplets, double break_rest_seconds = 1.0,
                                     std::size_t max_notes_per_line = 16);

// ---------------------------------------------------------------------------
// Instruction QA pairs

enum class QATask { LyricToMelody, MelodyToLyric, Continuation, TextToSong };

std::optional<QATask> parse_task(std::string_view name) noexcept;

/// Instruction text per task; "{n}" and "{summary}" are substituted.
struct TemplateSet {
    std::string lyric_to_melody = "Please generate an appropriate melody for the provided lyrics.";
    std::string melody_to_lyric = "Please write appropriate lyrics for the provided melody.";
    std::string continuation = "Please continue the following song by {n} more lines.";
    std::string text_to_song = "Please compose a song with both lyrics and melody based on this description: {summary}";
};

struct QAParams {
    int extend_lines = 0;
    std::string summary;
};

struct QAPair {
    QATask task;
    std::string prompt;
    std::string answer;
};

SongEntry to_pure_lyric(const SongEntry& paired);
SongEntry to_pure_melody(const SongEntry& paired);

/// Prompt = instruction, newline, then the task's view of the song; answer =
/// the paired document (for Continuation, only its last `extend_lines` lines).
/// Throws InvalidParams.
QAPair render_qa(QATask task, const SongEntry& song, const QAParams& params, const TemplateSet& templates = {});

// ---------------------------------------------------------------------------
// Corpus statistics

struct CorpusStats {
    std::size_t songs = 0;
    std::size_t lines = 0;
    std::size_t words = 0;
    std::size_t unique_words = 0;
    double lines_per_song = 0.0;
    double words_per_line = 0.0;
};

struct CorpusStatsReport {
    CorpusStats english;
    CorpusStats chinese;
    CorpusStats total;
};

CorpusStatsReport corpus_stats(std::span<const SongEntry> corpus);

struct AttributeHistograms {
    static constexpr double kDurationMin = -0.3;
    static constexpr double kDurationMax = 6.0;
    static constexpr double kDurationStep = 0.1;
    static constexpr std::size_t kDurationBins = 63;
    static constexpr std::size_t kNotesPerWordBins = 8;  ///< 1..7, then 8+

    std::array<std::size_t, 120> pitch{};
    std::array<std::size_t, kNotesPerWordBins> notes_per_word{};
    std::array<std::size_t, kDurationBins> note_duration{};
    std::array<std::size_t, kDurationBins> rest_duration{};

    /// One lyric word and the notes sung on it.
    void add_word(std::span<const MelodyTriplet> notes);
    /// Every tuple of a Paired entry, durations decoded from their bins.
    void add_entry(const SongEntry& entry);

    static std::size_t duration_bin(double seconds);
};

/// Throws EmptyCorpus on an empty corpus, InvalidParams for non-Paired entries.
AttributeHistograms attribute_histograms(std::span<const SongEntry> corpus);

}  // namespace songtuple
