#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "songtuple/pitch_vocab.hpp"

namespace songtuple {

/// One melody note in seconds. Rest is the gap to the next onset and may be negative.
struct MelodyTriplet {
    int pitch = 60;
    double note_duration = 0.0;
    double rest_duration = 0.0;

    friend bool operator==(const MelodyTriplet&, const MelodyTriplet&) = default;
};

struct QuantizedNote {
    PitchToken pitch = PitchToken::from_midi(60);
    int duration_bin = 0;
    int rest_bin = 0;

    friend bool operator==(const QuantizedNote&, const QuantizedNote&) = default;
};

/// One "|"-separated unit: a lyric word, a note, or a word with its notes.
struct SongTuple {
    std::optional<std::string> word;
    std::vector<QuantizedNote> notes;

    friend bool operator==(const SongTuple&, const SongTuple&) = default;
};

using Line = std::vector<SongTuple>;

enum class EntryKind { PureLyric, PureMelody, Paired };
enum class Language { English, Chinese, Unspecified };

struct SongEntry {
    EntryKind kind = EntryKind::Paired;
    Language language = Language::Unspecified;
    std::vector<Line> lines;

    friend bool operator==(const SongEntry&, const SongEntry&) = default;
};

struct TimedInterval {
    std::string label;
    double onset = 0.0;
    double offset = 0.0;

    friend bool operator==(const TimedInterval&, const TimedInterval&) = default;
};

/// A note as read from a score: MIDI pitch with onset/offset seconds.
struct NoteEvent {
    int pitch = 60;
    double onset = 0.0;
    double offset = 0.0;
    std::string track_name;

    friend bool operator==(const NoteEvent&, const NoteEvent&) = default;
};

std::string_view to_string(EntryKind kind) noexcept;
std::string_view to_string(Language language) noexcept;
/// Accepts "en"/"english" and "zh"/"chinese" (case-sensitive short codes preferred).
std::optional<Language> parse_language(std::string_view text) noexcept;
std::optional<EntryKind> parse_entry_kind(std::string_view text) noexcept;
std::string_view language_code(Language language) noexcept;

/// True when `word` can appear inside tuple text: non-empty UTF-8 with no
/// whitespace, '|', ',', '⟨' or '⟩'.
bool is_valid_word(std::string_view word);

/// Empty iff the entry is well formed. Each message names the line, the tuple and the rule.
std::vector<std::string> validate_entry(const SongEntry& entry);

/// Shifts every pitch. Throws InvalidEntry for PureLyric input and OutOfRange
/// when a shifted pitch leaves the vocabulary.
SongEntry transpose(const SongEntry& entry, int semitones);

/// note_duration = offset_k - onset_k, rest_duration = onset_{k+1} - offset_k, final rest 0.
/// Throws EmptyInput for an empty list.
std::vector<MelodyTriplet> triplets_from_events(std::span<const NoteEvent> events);

/// Flattened note list of a melody-bearing entry, durations decoded to seconds.
std::vector<MelodyTriplet> melody_of(const SongEntry& entry);

/// Lyric words of each line.
std::vector<std::vector<std::string>> words_of(const SongEntry& entry);

}  // namespace songtuple
