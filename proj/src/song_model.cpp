#include "songtuple/song_model.hpp"

#include "songtuple/duration_codec.hpp"
#include "songtuple/errors.hpp"
#include "songtuple/utf8.hpp"

namespace songtuple {

std::string_view to_string(EntryKind kind) noexcept {
    switch (kind) {
        case EntryKind::PureLyric: return "PureLyric";
        case EntryKind::PureMelody: return "PureMelody";
        case EntryKind::Paired: return "Paired";
    }
    return "?";
}

std::string_view to_string(Language language) noexcept {
    switch (language) {
        case Language::English: return "English";
        case Language::Chinese: return "Chinese";
        case Language::Unspecified: return "Unspecified";
    }
    return "?";
}

std::string_view language_code(Language language) noexcept {
    switch (language) {
        case Language::English: return "en";
        case Language::Chinese: return "zh";
        case Language::Unspecified: return "none";
    }
    return "none";
}

std::optional<Language> parse_language(std::string_view text) noexcept {
    if (text == "en" || text == "english" || text == "English") return Language::English;
    if (text == "zh" || text == "chinese" || text == "Chinese") return Language::Chinese;
    if (text == "none" || text == "unspecified" || text == "Unspecified") return Language::Unspecified;
    return std::nullopt;
}

std::optional<EntryKind> parse_entry_kind(std::string_view text) noexcept {
    if (text == "lyric" || text == "PureLyric") return EntryKind::PureLyric;
    if (text == "melody" || text == "PureMelody") return EntryKind::PureMelody;
    if (text == "paired" || text == "Paired") return EntryKind::Paired;
    return std::nullopt;
}

bool is_valid_word(std::string_view word) {
    if (word.empty()) return false;
    std::size_t pos = 0;
    while (pos < word.size()) {
        auto cp = utf8::decode(word, pos);
        if (!cp) return false;
        if (utf8::is_space(*cp) || *cp == U'|' || *cp == U',' || *cp == U'⟨' || *cp == U'⟩') return false;
        if (*cp < 0x20 || *cp == 0x7F) return false;
    }
    return true;
}

namespace {

std::string where(std::size_t line, std::size_t tuple) {
    return "line " + std::to_string(line) + " tuple " + std::to_string(tuple) + ": ";
}

bool bin_ok(int bin) { return bin >= 0 && bin < kDurationTokenCount; }

}  // namespace

std::vector<std::string> validate_entry(const SongEntry& entry) {
    std::vector<std::string> problems;
    const std::string kind(to_string(entry.kind));

    if (entry.lines.empty()) problems.push_back("entry: no lines");

    if (entry.kind == EntryKind::PureMelody && entry.language != Language::Unspecified) {
        problems.push_back("entry: PureMelody language must be Unspecified");
    }
    if (entry.kind != EntryKind::PureMelody && entry.language == Language::Unspecified) {
        problems.push_back("entry: " + kind + " language must be English or Chinese");
    }

    bool any_han_word = false;
    for (std::size_t li = 0; li < entry.lines.size(); ++li) {
        const Line& line = entry.lines[li];
        if (line.empty()) {
            problems.push_back("line " + std::to_string(li) + ": empty");
            continue;
        }
        for (std::size_t ti = 0; ti < line.size(); ++ti) {
            const SongTuple& t = line[ti];
            const bool has_word = t.word.has_value();
            switch (entry.kind) {
                case EntryKind::PureLyric:
                    if (!has_word) problems.push_back(where(li, ti) + "word required in PureLyric");
                    if (!t.notes.empty()) problems.push_back(where(li, ti) + "notes forbidden in PureLyric");
                    break;
                case EntryKind::PureMelody:
                    if (has_word) problems.push_back(where(li, ti) + "word forbidden in PureMelody");
                    if (t.notes.size() != 1) problems.push_back(where(li, ti) + "exactly one note required in PureMelody");
                    break;
                case EntryKind::Paired:
                    if (!has_word) problems.push_back(where(li, ti) + "word required in Paired");
                    if (t.notes.empty()) problems.push_back(where(li, ti) + "at least one note required in Paired");
                    break;
            }
            if (has_word) {
                const std::string& w = *t.word;
                if (!is_valid_word(w)) {
                    problems.push_back(where(li, ti) + "invalid word");
                } else if (utf8::contains_han(w)) {
                    any_han_word = true;
                    if (entry.language == Language::English) {
                        problems.push_back(where(li, ti) + "Han characters in English word");
                    } else if (entry.language == Language::Chinese && utf8::code_points(w).size() != 1) {
                        problems.push_back(where(li, ti) + "Chinese word must be a single character");
                    }
                }
            }
            for (std::size_t ni = 0; ni < t.notes.size(); ++ni) {
                if (!bin_ok(t.notes[ni].duration_bin)) {
                    problems.push_back(where(li, ti) + "note " + std::to_string(ni) + " duration bin out of range");
                }
                if (!bin_ok(t.notes[ni].rest_bin)) {
                    problems.push_back(where(li, ti) + "note " + std::to_string(ni) + " rest bin out of range");
                }
            }
        }
    }
    if (entry.language == Language::Chinese && !any_han_word && !entry.lines.empty()) {
        problems.push_back("entry: Chinese entry has no Han word");
    }
    return problems;
}

SongEntry transpose(const SongEntry& entry, int semitones) {
    if (entry.kind == EntryKind::PureLyric) throw InvalidEntry("cannot transpose a PureLyric entry");
    SongEntry out = entry;
    for (auto& line : out.lines) {
        for (auto& tuple : line) {
            for (auto& note : tuple.notes) {
                const int shifted = note.pitch.midi() + semitones;
                if (shifted < 0 || shifted >= kPitchTokenCount) {
                    throw OutOfRange(note.pitch.name() + " shifted by " + std::to_string(semitones) +
                                     " leaves the pitch vocabulary");
                }
                note.pitch = PitchToken::from_midi(shifted);
            }
        }
    }
    return out;
}

std::vector<MelodyTriplet> triplets_from_events(std::span<const NoteEvent> events) {
    if (events.empty()) throw EmptyInput("no note events");
    std::vector<MelodyTriplet> out;
    out.reserve(events.size());
    for (std::size_t k = 0; k < events.size(); ++k) {
        const NoteEvent& e = events[k];
        const double rest = k + 1 < events.size() ? events[k + 1].onset - e.offset : 0.0;
        out.push_back({e.pitch, e.offset - e.onset, rest});
    }
    return out;
}

std::vector<MelodyTriplet> melody_of(const SongEntry& entry) {
    std::vector<MelodyTriplet> out;
    for (const auto& line : entry.lines) {
        for (const auto& tuple : line) {
            for (const auto& n : tuple.notes) {
                out.push_back({n.pitch.midi(), decode_duration(n.duration_bin), decode_duration(n.rest_bin)});
            }
        }
    }
    return out;
}

std::vector<std::vector<std::string>> words_of(const SongEntry& entry) {
    std::vector<std::vector<std::string>> out;
    out.reserve(entry.lines.size());
    for (const auto& line : entry.lines) {
        auto& words = out.emplace_back();
        for (const auto& tuple : line) {
            if (tuple.word) words.push_back(*tuple.word);
        }
    }
    return out;
}

}  // namespace songtuple
