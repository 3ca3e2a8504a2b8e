#include "songtuple/align.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "songtuple/duration_codec.hpp"
#include "songtuple/errors.hpp"
#include "songtuple/utf8.hpp"

namespace songtuple {

namespace {

bool is_latin_letter(char32_t cp) {
    return (cp >= U'A' && cp <= U'Z') || (cp >= U'a' && cp <= U'z') ||
           (cp >= 0xC0 && cp <= 0x24F && cp != 0xD7 && cp != 0xF7);
}

bool is_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }

bool is_open_bracket(char32_t cp) { return cp == U'(' || cp == U'[' || cp == U'{' || cp == U'（' || cp == U'【'; }
bool is_close_bracket(char32_t cp) { return cp == U')' || cp == U']' || cp == U'}' || cp == U'）' || cp == U'】'; }

std::vector<char32_t> decode_lenient(std::string_view text) {
    std::vector<char32_t> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto cp = utf8::decode(text, pos);
        if (!cp) {
            ++pos;
            out.push_back(U' ');
            continue;
        }
        out.push_back(*cp);
    }
    return out;
}

/// Character-level pass: annotations, punctuation and foreign scripts become spaces.
std::vector<char32_t> keep_target_characters(std::string_view line, Language language) {
    std::vector<char32_t> kept;
    int depth = 0;
    for (char32_t cp : decode_lenient(line)) {
        if (is_open_bracket(cp)) {
            ++depth;
            kept.push_back(U' ');
            continue;
        }
        if (is_close_bracket(cp)) {
            depth = std::max(0, depth - 1);
            kept.push_back(U' ');
            continue;
        }
        if (depth > 0) continue;
        if (language == Language::Chinese) {
            kept.push_back(utf8::is_han(cp) ? cp : U' ');
        } else if (is_latin_letter(cp) || is_digit(cp)) {
            kept.push_back(cp);
        } else if (cp == U'\'' || cp == U'’') {
            kept.push_back(U'\'');
        } else {
            kept.push_back(U' ');
        }
    }
    if (language != Language::Chinese) {
        for (std::size_t i = 0; i < kept.size(); ++i) {
            if (kept[i] != U'\'') continue;
            const bool inner = i > 0 && i + 1 < kept.size() && is_latin_letter(kept[i - 1]) &&
                               is_latin_letter(kept[i + 1]);
            if (!inner) kept[i] = U' ';
        }
    }
    return kept;
}

template <typename T>
std::vector<T> cap_runs(const std::vector<T>& items, std::size_t keep_from, std::size_t keep) {
    std::vector<T> out;
    for (std::size_t i = 0; i < items.size();) {
        std::size_t j = i;
        while (j < items.size() && items[j] == items[i]) ++j;
        const std::size_t run = j - i;
        const std::size_t n = run >= keep_from ? keep : run;
        out.insert(out.end(), n, items[i]);
        i = j;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<std::string> split_words(std::string_view line, Language language) {
    std::vector<std::string> words;
    if (language == Language::Chinese) {
        std::size_t pos = 0;
        while (pos < line.size()) {
            const std::size_t start = pos;
            auto cp = utf8::decode(line, pos);
            if (!cp) {
                ++pos;
                continue;
            }
            if (!utf8::is_space(*cp)) words.emplace_back(line.substr(start, pos - start));
        }
        return words;
    }
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
        const std::size_t start = pos;
        while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
        if (pos > start) words.emplace_back(line.substr(start, pos - start));
    }
    return words;
}

std::vector<std::string> clean_lyrics(std::string_view raw, Language language) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= raw.size()) {
        std::size_t end = raw.find('\n', start);
        if (end == std::string_view::npos) end = raw.size();
        const std::string_view source = raw.substr(start, end - start);
        start = end + 1;

        std::string rebuilt;
        bool has_letter = false;
        for (char32_t cp : keep_target_characters(source, language)) {
            has_letter = has_letter || (language == Language::Chinese ? utf8::is_han(cp) : is_latin_letter(cp));
            utf8::append(rebuilt, cp);
        }
        if (!has_letter) continue;

        const auto words = cap_runs(split_words(rebuilt, language), 4, 3);
        std::string line;
        for (const auto& w : words) {
            if (!line.empty() && language != Language::Chinese) line += ' ';
            line += w;
        }
        if (!line.empty()) lines.push_back(std::move(line));
    }
    return cap_runs(lines, 3, 2);
}

namespace {

/// "mm:ss", "mm:ss.f", "mm:ss.cc", "mm:ss.mmm" or "mm:ss:cc".
std::optional<double> parse_stamp(std::string_view tag) {
    const auto colon = tag.find(':');
    if (colon == std::string_view::npos || colon == 0) return std::nullopt;
    int minutes = 0;
    auto [mp, mec] = std::from_chars(tag.data(), tag.data() + colon, minutes);
    if (mec != std::errc{} || mp != tag.data() + colon) return std::nullopt;

    std::string_view rest = tag.substr(colon + 1);
    const auto sep = rest.find_first_of(".:");
    std::string_view whole = rest.substr(0, sep);
    std::string_view frac = sep == std::string_view::npos ? std::string_view{} : rest.substr(sep + 1);
    if (whole.size() != 2 || frac.size() > 3 || (sep != std::string_view::npos && frac.empty())) return std::nullopt;
    int seconds = 0;
    auto [sp, sec] = std::from_chars(whole.data(), whole.data() + whole.size(), seconds);
    if (sec != std::errc{} || sp != whole.data() + whole.size() || seconds > 59) return std::nullopt;
    int digits = 0;
    double scale = 1.0;
    for (char c : frac) {
        if (c < '0' || c > '9') return std::nullopt;
        digits = digits * 10 + (c - '0');
        scale *= 10.0;
    }
    return minutes * 60.0 + seconds + digits / scale;
}

}  // namespace

std::vector<TimedLyricLine> parse_lrc(std::string_view text, double last_line_seconds) {
    struct Stamp {
        double time;
        std::string text;
    };
    std::vector<Stamp> stamps;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view row = trim(text.substr(start, end - start));
        start = end + 1;

        std::vector<double> times;
        while (row.starts_with('[')) {
            const auto close = row.find(']');
            if (close == std::string_view::npos) break;
            if (auto t = parse_stamp(row.substr(1, close - 1))) times.push_back(*t);
            row = trim(row.substr(close + 1));
        }
        for (double t : times) stamps.push_back({t, std::string(row)});
    }
    std::stable_sort(stamps.begin(), stamps.end(), [](const Stamp& a, const Stamp& b) { return a.time < b.time; });

    std::vector<TimedLyricLine> lines;
    for (std::size_t i = 0; i < stamps.size(); ++i) {
        if (stamps[i].text.empty()) continue;
        double end = stamps[i].time + last_line_seconds;
        for (std::size_t j = i + 1; j < stamps.size(); ++j) {
            if (stamps[j].time > stamps[i].time) {
                end = stamps[j].time;
                break;
            }
        }
        lines.push_back({stamps[i].text, stamps[i].time, end});
    }
    return lines;
}

std::vector<Segment> slice_segments(std::span<const TimedLyricLine> lines, double target_seconds,
                                    std::size_t max_lines) {
    std::vector<Segment> segments;
    Segment current;
    for (const auto& line : lines) {
        current.lines.push_back(line);
        if (current.end() - current.start() >= target_seconds || current.lines.size() >= max_lines) {
            segments.push_back(std::move(current));
            current = Segment{};
        }
    }
    if (!current.lines.empty()) segments.push_back(std::move(current));
    return segments;
}

double interval_iou(const TimedInterval& a, const TimedInterval& b) {
    const double overlap = std::min(a.offset, b.offset) - std::max(a.onset, b.onset);
    if (overlap <= 0.0) return 0.0;
    const double uni = std::max(a.offset, b.offset) - std::min(a.onset, b.onset);
    return uni > 0.0 ? overlap / uni : 0.0;
}

double alignment_cost(const TimedInterval& word, const TimedInterval& note) { return 1.0 - interval_iou(word, note); }

Alignment align_words_to_notes(std::span<const TimedInterval> words, std::span<const TimedInterval> notes) {
    if (words.empty() || notes.empty()) throw EmptyInput("alignment needs at least one word and one note");
    if (notes.size() < words.size()) {
        throw FewerNotesThanWords(std::to_string(words.size()) + " words but only " + std::to_string(notes.size()) +
                                  " notes");
    }
    const auto W = static_cast<Eigen::Index>(words.size());
    const auto N = static_cast<Eigen::Index>(notes.size());
    constexpr double kInf = std::numeric_limits<double>::infinity();

    // best(i, j): words 1..i cover notes 1..j, note j sung on word i.
    Eigen::MatrixXd best = Eigen::MatrixXd::Constant(W + 1, N + 1, kInf);
    best(0, 0) = 0.0;
    for (Eigen::Index j = 1; j <= N; ++j) {
        for (Eigen::Index i = 1; i <= std::min(j, W); ++i) {
            const double step = alignment_cost(words[static_cast<std::size_t>(i - 1)], notes[static_cast<std::size_t>(j - 1)]);
            best(i, j) = step + std::min(best(i, j - 1), best(i - 1, j - 1));
        }
    }

    Alignment out;
    out.cost = best(W, N);
    out.mapping.resize(words.size());
    Eigen::Index i = W;
    Eigen::Index j = N;
    out.mapping[static_cast<std::size_t>(i - 1)] = {static_cast<std::size_t>(i - 1), 0, static_cast<std::size_t>(j - 1)};
    while (j > 1) {
        const double extend = best(i, j - 1);
        const double advance = best(i - 1, j - 1);
        if (extend <= advance) {
            --j;
            continue;
        }
        out.mapping[static_cast<std::size_t>(i - 1)].first_note = static_cast<std::size_t>(j - 1);
        --i;
        --j;
        out.mapping[static_cast<std::size_t>(i - 1)] = {static_cast<std::size_t>(i - 1), 0,
                                                        static_cast<std::size_t>(j - 1)};
    }
    out.mapping.front().first_note = 0;
    return out;
}

std::vector<std::string> check_alignment(const Alignment& alignment, std::size_t word_count, std::size_t note_count) {
    std::vector<std::string> problems;
    if (alignment.mapping.size() != word_count) {
        problems.push_back("alignment has " + std::to_string(alignment.mapping.size()) + " ranges for " +
                           std::to_string(word_count) + " words");
        return problems;
    }
    std::size_t next = 0;
    for (std::size_t w = 0; w < alignment.mapping.size(); ++w) {
        const WordSpan& span = alignment.mapping[w];
        if (span.word_index != w) problems.push_back("range " + std::to_string(w) + " names word " + std::to_string(span.word_index));
        if (span.first_note != next) problems.push_back("word " + std::to_string(w) + " does not start at note " + std::to_string(next));
        if (span.last_note < span.first_note) problems.push_back("word " + std::to_string(w) + " has no notes");
        next = span.last_note + 1;
    }
    if (next != note_count) problems.push_back("alignment covers " + std::to_string(next) + " of " + std::to_string(note_count) + " notes");
    return problems;
}

SongEntry build_paired_entry(std::span<const TimedInterval> words, std::span<const TimedInterval> notes,
                             const Alignment& alignment, Language language, std::span<const std::size_t> word_lines) {
    if (auto problems = check_alignment(alignment, words.size(), notes.size()); !problems.empty()) {
        throw InvalidAlignment(problems.front());
    }
    if (!word_lines.empty() && word_lines.size() != words.size()) {
        throw InvalidAlignment("word line indices do not match the word count");
    }

    std::vector<QuantizedNote> quantized;
    quantized.reserve(notes.size());
    for (std::size_t k = 0; k < notes.size(); ++k) {
        auto pitch = parse_pitch_name(notes[k].label);
        if (!pitch) throw InvalidEntry("note " + std::to_string(k) + " has unusable pitch label '" + notes[k].label + "'");
        const double rest = k + 1 < notes.size() ? notes[k + 1].onset - notes[k].offset : 0.0;
        quantized.push_back({*pitch, encode_duration(notes[k].offset - notes[k].onset), encode_duration(rest)});
    }

    SongEntry entry;
    entry.kind = EntryKind::Paired;
    entry.language = language;
    for (std::size_t w = 0; w < words.size(); ++w) {
        const bool new_line = entry.lines.empty() || (!word_lines.empty() && word_lines[w] != word_lines[w - 1]);
        if (!word_lines.empty() && w > 0 && word_lines[w] < word_lines[w - 1]) {
            throw InvalidAlignment("word line indices must be non-decreasing");
        }
        if (new_line) entry.lines.emplace_back();
        const WordSpan& span = alignment.mapping[w];
        SongTuple tuple;
        tuple.word = words[w].label;
        tuple.notes.assign(quantized.begin() + static_cast<std::ptrdiff_t>(span.first_note),
                           quantized.begin() + static_cast<std::ptrdiff_t>(span.last_note + 1));
        entry.lines.back().push_back(std::move(tuple));
    }
    if (auto problems = validate_entry(entry); !problems.empty()) throw InvalidEntry(problems.front());
    return entry;
}

}  // namespace songtuple
