#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace songtuple {

enum class PitchClass : std::uint8_t { C, Cs, D, Ds, E, F, Fs, G, Gs, A, As, B };

inline constexpr int kPitchTokenCount = 120;
inline constexpr int kDurationTokenCount = 512;
inline constexpr int kVocabSize = kDurationTokenCount + kPitchTokenCount;

/// One of the 120 pitch symbols: 12 pitch classes over octaves -1..8, MIDI 60 = C4.
class PitchToken {
public:
    /// Throws PitchOutOfVocabulary unless 0 <= midi <= 119.
    static PitchToken from_midi(int midi);
    /// Throws PitchOutOfVocabulary when the pair lies outside the vocabulary.
    static PitchToken from_parts(PitchClass pitch_class, int octave);

    PitchClass pitch_class() const noexcept { return static_cast<PitchClass>(midi_ % 12); }
    int octave() const noexcept { return midi_ / 12 - 1; }
    int midi() const noexcept { return midi_; }

    /// Plain name such as "C#4" or "C-1".
    std::string name() const;
    /// Vocabulary text such as "⟨C#4⟩".
    std::string text() const;

    friend auto operator<=>(const PitchToken&, const PitchToken&) = default;

private:
    explicit PitchToken(int midi) : midi_(static_cast<std::uint8_t>(midi)) {}
    std::uint8_t midi_ = 60;
};

PitchToken midi_to_token(int midi);
int token_to_midi(PitchToken token) noexcept;

std::string_view pitch_class_name(PitchClass pc) noexcept;

/// Parses "C4", "C#4", "Db4", "B-1" or a decimal MIDI number ("60").
/// Returns nullopt for anything else or for pitches outside the vocabulary.
std::optional<PitchToken> parse_pitch_name(std::string_view name);

/// Text of a duration-bin token, "⟨d_000⟩".."⟨d_511⟩". Throws InvalidBin out of range.
std::string duration_token_text(int bin);

struct DurationToken {
    int bin = 0;
    friend bool operator==(const DurationToken&, const DurationToken&) = default;
};

using VocabToken = std::variant<DurationToken, PitchToken>;

struct VocabEntry {
    std::string text;
    int id = 0;
};

/// The extended vocabulary: duration bins by ascending index, then pitches by ascending MIDI number.
class VocabTable {
public:
    /// The canonical 632-entry table. Built once, immutable.
    static const VocabTable& instance();

    const std::vector<VocabEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }

    std::optional<VocabToken> lookup(std::string_view text) const;
    std::optional<int> id_of(std::string_view text) const;

    static int id_of(PitchToken token) noexcept { return kDurationTokenCount + token.midi(); }
    static int id_of(DurationToken token) noexcept { return token.bin; }

private:
    VocabTable();

    std::vector<VocabEntry> entries_;
    std::unordered_map<std::string, int> by_text_;
};

/// TSV rendering, "token_text\ttoken_id\n" per entry in id order.
std::string vocab_tsv(const VocabTable& table);

/// Writes vocab_tsv(table) to path. Throws IoError.
void export_vocab(const VocabTable& table, const std::filesystem::path& path);

}  // namespace songtuple
