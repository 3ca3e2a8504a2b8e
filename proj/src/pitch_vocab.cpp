#include "songtuple/pitch_vocab.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>

#include "songtuple/errors.hpp"

namespace songtuple {

namespace {

constexpr std::array<std::string_view, 12> kClassNames = {"C",  "C#", "D",  "D#", "E",  "F",
                                                          "F#", "G",  "G#", "A",  "A#", "B"};

constexpr std::string_view kOpen = "⟨";
constexpr std::string_view kClose = "⟩";

}  // namespace

PitchToken PitchToken::from_midi(int midi) {
    if (midi < 0 || midi >= kPitchTokenCount) {
        throw PitchOutOfVocabulary("MIDI pitch " + std::to_string(midi) + " is outside the 120-token vocabulary");
    }
    return PitchToken(midi);
}

PitchToken PitchToken::from_parts(PitchClass pitch_class, int octave) {
    const int midi = (octave + 1) * 12 + static_cast<int>(pitch_class);
    if (octave < -1 || octave > 8) {
        throw PitchOutOfVocabulary("octave " + std::to_string(octave) + " is outside -1..8");
    }
    return from_midi(midi);
}

std::string PitchToken::name() const {
    std::string out(pitch_class_name(pitch_class()));
    out += std::to_string(octave());
    return out;
}

std::string PitchToken::text() const {
    std::string out(kOpen);
    out += name();
    out += kClose;
    return out;
}

PitchToken midi_to_token(int midi) { return PitchToken::from_midi(midi); }

int token_to_midi(PitchToken token) noexcept { return token.midi(); }

std::string_view pitch_class_name(PitchClass pc) noexcept { return kClassNames[static_cast<std::size_t>(pc)]; }

std::optional<PitchToken> parse_pitch_name(std::string_view name) {
    if (name.empty()) return std::nullopt;

    const auto parse_int = [](std::string_view s) -> std::optional<int> {
        int value = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
        return value;
    };

    if (name.front() >= '0' && name.front() <= '9') {
        auto midi = parse_int(name);
        if (!midi || *midi < 0 || *midi >= kPitchTokenCount) return std::nullopt;
        return PitchToken::from_midi(*midi);
    }

    static constexpr std::array<int, 7> kNatural = {9, 11, 0, 2, 4, 5, 7};  // A..G
    const char letter = name.front();
    if (letter < 'A' || letter > 'G') return std::nullopt;
    int semitone = kNatural[static_cast<std::size_t>(letter - 'A')];
    std::size_t pos = 1;
    if (pos < name.size() && (name[pos] == '#' || name[pos] == 'b')) {
        semitone += name[pos] == '#' ? 1 : -1;
        ++pos;
    }
    auto octave = parse_int(name.substr(pos));
    if (!octave) return std::nullopt;
    const int midi = (*octave + 1) * 12 + semitone;
    if (midi < 0 || midi >= kPitchTokenCount) return std::nullopt;
    return PitchToken::from_midi(midi);
}

std::string duration_token_text(int bin) {
    if (bin < 0 || bin >= kDurationTokenCount) {
        throw InvalidBin("duration bin " + std::to_string(bin) + " outside [0, 511]");
    }
    char digits[8];
    std::snprintf(digits, sizeof digits, "%03d", bin);
    std::string out(kOpen);
    out += "d_";
    out += digits;
    out += kClose;
    return out;
}

VocabTable::VocabTable() {
    entries_.reserve(kVocabSize);
    for (int bin = 0; bin < kDurationTokenCount; ++bin) {
        entries_.push_back({duration_token_text(bin), bin});
    }
    for (int midi = 0; midi < kPitchTokenCount; ++midi) {
        entries_.push_back({PitchToken::from_midi(midi).text(), kDurationTokenCount + midi});
    }
    by_text_.reserve(entries_.size());
    for (const auto& e : entries_) by_text_.emplace(e.text, e.id);
}

const VocabTable& VocabTable::instance() {
    static const VocabTable table;
    return table;
}

std::optional<int> VocabTable::id_of(std::string_view text) const {
    auto it = by_text_.find(std::string(text));
    if (it == by_text_.end()) return std::nullopt;
    return it->second;
}

std::optional<VocabToken> VocabTable::lookup(std::string_view text) const {
    auto id = id_of(text);
    if (!id) return std::nullopt;
    if (*id < kDurationTokenCount) return VocabToken{DurationToken{*id}};
    return VocabToken{PitchToken::from_midi(*id - kDurationTokenCount)};
}

std::string vocab_tsv(const VocabTable& table) {
    std::string out;
    for (const auto& e : table.entries()) {
        out += e.text;
        out += '\t';
        out += std::to_string(e.id);
        out += '\n';
    }
    return out;
}

void export_vocab(const VocabTable& table, const std::filesystem::path& path) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open " + path.string() + " for writing");
    const std::string body = vocab_tsv(table);
    file.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!file) throw IoError("write failed for " + path.string());
}

}  // namespace songtuple
