#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "songtuple/song_model.hpp"

namespace songtuple {

// ---------------------------------------------------------------------------
// Lyric cleaning

/// Rule-based lyric cleaning, applied line by line:
///  1. bracketed annotations and anything that is not a letter of the target
///     language (Latin letters/digits for English, Han for Chinese) are removed;
///     English keeps apostrophes between letters;
///  2. whitespace collapses to single spaces (English) or disappears (Chinese),
///     and lines left without target-language text are dropped;
///  3. a word repeated 4+ times in a row is cut to 3, and a line repeated 3+
///     times in a row is cut to 2.
/// Idempotent.
std::vector<std::string> clean_lyrics(std::string_view raw, Language language);

/// Words of one cleaned line: whitespace tokens (English) or single characters (Chinese).
std::vector<std::string> split_words(std::string_view line, Language language);

// ---------------------------------------------------------------------------
// Timed lyric lines and segment slicing

struct TimedLyricLine {
    std::string text;
    double start = 0.0;
    double end = 0.0;

    friend bool operator==(const TimedLyricLine&, const TimedLyricLine&) = default;
};

struct Segment {
    std::vector<TimedLyricLine> lines;

    double start() const { return lines.empty() ? 0.0 : lines.front().start; }
    double end() const { return lines.empty() ? 0.0 : lines.back().end; }
};

/// Reads "[mm:ss.cc] text" lines. Several leading stamps repeat the text at each
/// time; tags such as "[ar:...]" are skipped; a stamp with empty text only marks
/// where the previous line ends. Each line ends where the next stamp begins; the
/// final line lasts `last_line_seconds`. Result is sorted by start.
std::vector<TimedLyricLine> parse_lrc(std::string_view text, double last_line_seconds = 5.0);

/// Greedy grouping of whole lines: a segment closes once it spans at least
/// `target_seconds` or holds `max_lines` lines.
std::vector<Segment> slice_segments(std::span<const TimedLyricLine> lines, double target_seconds = 10.0,
                                    std::size_t max_lines = 3);

// ---------------------------------------------------------------------------
// Word-to-note alignment

/// Notes [first_note, last_note] (inclusive) sung on one word.
struct WordSpan {
    std::size_t word_index = 0;
    std::size_t first_note = 0;
    std::size_t last_note = 0;

    std::size_t note_count() const { return last_note - first_note + 1; }
    friend bool operator==(const WordSpan&, const WordSpan&) = default;
};

struct Alignment {
    std::vector<WordSpan> mapping;
    double cost = 0.0;
};

/// Intersection over union of two intervals; 0 when disjoint.
double interval_iou(const TimedInterval& a, const TimedInterval& b);

/// 1 - IoU.
double alignment_cost(const TimedInterval& word, const TimedInterval& note);

/// Monotonic segmentation of the notes into one contiguous, non-empty range per
/// word that minimizes the summed cost of every note against its word. Ties go
/// to extending the current word.
///
/// Throws EmptyInput for empty lists and FewerNotesThanWords.
Alignment align_words_to_notes(std::span<const TimedInterval> words, std::span<const TimedInterval> notes);

/// Empty iff `alignment` is total and monotonic for the given sizes.
std::vector<std::string> check_alignment(const Alignment& alignment, std::size_t word_count, std::size_t note_count);

/// One Paired tuple per word carrying its aligned notes, quantized. Notes are
/// labelled with a pitch name or MIDI number; rests run to the next note onset
/// (last rest 0). `word_lines[i]` is the line of word i (non-decreasing); when
/// empty every word goes on one line.
///
/// Throws InvalidAlignment, InvalidEntry (bad label or word), and codec errors.
SongEntry build_paired_entry(std::span<const TimedInterval> words, std::span<const TimedInterval> notes,
                             const Alignment& alignment, Language language,
                             std::span<const std::size_t> word_lines = {});

}  // namespace songtuple
