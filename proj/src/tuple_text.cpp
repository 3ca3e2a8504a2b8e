#include "songtuple/tuple_text.hpp"

#include <array>
#include <variant>

#include "songtuple/errors.hpp"
#include "songtuple/utf8.hpp"

namespace songtuple {

std::string_view header_for(EntryKind kind) noexcept {
    switch (kind) {
        case EntryKind::PureLyric: return kLyricHeader;
        case EntryKind::PureMelody: return kMelodyHeader;
        case EntryKind::Paired: return kPairedHeader;
    }
    return kPairedHeader;
}

std::string ordinal(int n) {
    static constexpr std::array<std::string_view, 20> kWords = {
        "first",       "second",     "third",     "fourth",     "fifth",     "sixth",     "seventh",
        "eighth",      "ninth",      "tenth",     "eleventh",   "twelfth",   "thirteenth", "fourteenth",
        "fifteenth",   "sixteenth",  "seventeenth", "eighteenth", "nineteenth", "twentieth"};
    if (n >= 1 && n <= 20) return std::string(kWords[static_cast<std::size_t>(n - 1)]);
    const int tens = n % 100;
    std::string_view suffix = "th";
    if (tens < 11 || tens > 13) {
        switch (n % 10) {
            case 1: suffix = "st"; break;
            case 2: suffix = "nd"; break;
            case 3: suffix = "rd"; break;
            default: break;
        }
    }
    return std::to_string(n) + std::string(suffix);
}

namespace {

std::string line_prompt(std::size_t index) { return "The " + ordinal(static_cast<int>(index + 1)) + " line: "; }

void append_note(std::string& out, const QuantizedNote& note) {
    out += note.pitch.text();
    out += ',';
    out += duration_token_text(note.duration_bin);
    out += ',';
    out += duration_token_text(note.rest_bin);
}

}  // namespace

std::string serialize_tuple(const SongTuple& tuple, EntryKind kind) {
    std::string out;
    if (kind != EntryKind::PureMelody && tuple.word) out += *tuple.word;
    if (kind == EntryKind::PureLyric) return out;
    for (const auto& note : tuple.notes) {
        if (!out.empty()) out += ',';
        append_note(out, note);
    }
    return out;
}

std::string serialize(const SongEntry& entry) {
    if (auto problems = validate_entry(entry); !problems.empty()) {
        throw InvalidEntry("cannot serialize invalid entry: " + problems.front());
    }
    std::string out(header_for(entry.kind));
    out += '\n';
    for (std::size_t li = 0; li < entry.lines.size(); ++li) {
        out += line_prompt(li);
        const Line& line = entry.lines[li];
        for (std::size_t ti = 0; ti < line.size(); ++ti) {
            if (ti > 0) out += '|';
            out += serialize_tuple(line[ti], entry.kind);
        }
        out += '\n';
    }
    return out;
}

namespace {

/// A slice of the input with its 1-based position.
struct Span {
    std::string_view text;
    std::size_t line = 1;
    std::size_t column = 1;
};

[[noreturn]] void fail(const Span& at, std::string reason) { throw ParseError(at.line, at.column, std::move(reason)); }

std::vector<Span> split(const Span& s, char sep) {
    std::vector<Span> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.text.size(); ++i) {
        if (i == s.text.size() || s.text[i] == sep) {
            parts.push_back({s.text.substr(start, i - start), s.line, s.column + start});
            start = i + 1;
        }
    }
    return parts;
}

VocabToken token_at(const Span& field) {
    auto token = VocabTable::instance().lookup(field.text);
    if (!token) fail(field, "unknown token '" + std::string(field.text) + "'");
    return *token;
}

PitchToken pitch_at(const Span& field) {
    auto token = token_at(field);
    if (auto* pitch = std::get_if<PitchToken>(&token)) return *pitch;
    fail(field, "expected pitch token, found '" + std::string(field.text) + "'");
}

int bin_at(const Span& field) {
    auto token = token_at(field);
    if (auto* d = std::get_if<DurationToken>(&token)) return d->bin;
    fail(field, "expected duration token, found '" + std::string(field.text) + "'");
}

std::string word_at(const Span& field) {
    if (!is_valid_word(field.text)) fail(field, "invalid word '" + std::string(field.text) + "'");
    if (utf8::contains_han(field.text) && utf8::code_points(field.text).size() != 1) {
        fail(field, "Chinese word must be a single character");
    }
    return std::string(field.text);
}

std::vector<QuantizedNote> notes_at(std::span<const Span> fields) {
    std::vector<QuantizedNote> notes;
    notes.reserve(fields.size() / 3);
    for (std::size_t i = 0; i + 2 < fields.size(); i += 3) {
        notes.push_back({pitch_at(fields[i]), bin_at(fields[i + 1]), bin_at(fields[i + 2])});
    }
    return notes;
}

SongTuple parse_tuple(const Span& tuple, EntryKind kind) {
    if (tuple.text.empty()) fail(tuple, "empty tuple");
    const auto fields = split(tuple, ',');
    SongTuple out;
    switch (kind) {
        case EntryKind::PureLyric:
            if (fields.size() != 1) fail(tuple, "arity: lyric tuple holds exactly one word");
            out.word = word_at(fields[0]);
            break;
        case EntryKind::PureMelody:
            if (fields.size() != 3) fail(tuple, "arity: melody tuple holds pitch, duration and rest");
            out.notes = notes_at(fields);
            break;
        case EntryKind::Paired:
            if (fields.size() < 4 || (fields.size() - 1) % 3 != 0) {
                fail(tuple, "arity: paired tuple holds a word followed by pitch, duration, rest triples");
            }
            out.word = word_at(fields[0]);
            out.notes = notes_at(std::span(fields).subspan(1));
            break;
    }
    return out;
}

void check_utf8(std::string_view text) {
    std::size_t pos = 0;
    std::size_t line = 1;
    std::size_t line_start = 0;
    while (pos < text.size()) {
        if (text[pos] == '\n') {
            ++line;
            line_start = pos + 1;
        }
        if (!utf8::decode(text, pos)) throw ParseError(line, pos - line_start + 1, "invalid UTF-8");
    }
}

}  // namespace

SongEntry parse(std::string_view text) {
    if (text.empty()) throw ParseError(1, 1, "empty document");
    check_utf8(text);

    std::vector<Span> rows = split(Span{text, 1, 1}, '\n');
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].line = i + 1;
        rows[i].column = 1;
    }
    // The document ends with '\n', so the final split piece must be empty.
    if (!rows.back().text.empty()) {
        fail({"", rows.back().line, rows.back().text.size() + 1}, "missing trailing newline");
    }
    rows.pop_back();

    SongEntry entry;
    const std::string_view header = rows.front().text;
    if (header == kLyricHeader) {
        entry.kind = EntryKind::PureLyric;
    } else if (header == kMelodyHeader) {
        entry.kind = EntryKind::PureMelody;
    } else if (header == kPairedHeader) {
        entry.kind = EntryKind::Paired;
    } else {
        fail(rows.front(), "unknown header");
    }
    if (rows.size() < 2) fail({"", 2, 1}, "document has no lines");

    bool has_words = false;
    bool has_han = false;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const Span& row = rows[i];
        const std::string prompt = line_prompt(i - 1);
        if (!row.text.starts_with(prompt)) fail(row, "expected line prompt '" + prompt + "'");
        const Span body{row.text.substr(prompt.size()), row.line, row.column + prompt.size()};
        if (body.text.empty()) fail(body, "empty line");

        Line& line = entry.lines.emplace_back();
        for (const Span& tuple : split(body, '|')) {
            line.push_back(parse_tuple(tuple, entry.kind));
            if (line.back().word) {
                has_words = true;
                has_han = has_han || utf8::contains_han(*line.back().word);
            }
        }
    }

    entry.language = has_han ? Language::Chinese : has_words ? Language::English : Language::Unspecified;
    if (auto problems = validate_entry(entry); !problems.empty()) {
        throw ParseError(1, 1, "invalid entry: " + problems.front());
    }
    return entry;
}

}  // namespace songtuple
