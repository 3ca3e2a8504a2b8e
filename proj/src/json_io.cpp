#include "songtuple/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "songtuple/errors.hpp"
#include "songtuple/tuple_text.hpp"

namespace songtuple {

namespace {

std::string_view kind_code(EntryKind kind) {
    switch (kind) {
        case EntryKind::PureLyric: return "lyric";
        case EntryKind::PureMelody: return "melody";
        case EntryKind::Paired: return "paired";
    }
    return "paired";
}

SongEntry checked(SongEntry entry) {
    if (auto problems = validate_entry(entry); !problems.empty()) throw InvalidEntry(problems.front());
    return entry;
}

}  // namespace

json entry_to_json(const SongEntry& entry) {
    json lines = json::array();
    for (const auto& line : entry.lines) {
        json tuples = json::array();
        for (const auto& t : line) {
            json tuple = json::object();
            if (t.word) tuple["word"] = *t.word;
            if (!t.notes.empty()) {
                json notes = json::array();
                for (const auto& n : t.notes) notes.push_back({n.pitch.name(), n.duration_bin, n.rest_bin});
                tuple["notes"] = std::move(notes);
            }
            tuples.push_back(std::move(tuple));
        }
        lines.push_back(std::move(tuples));
    }
    return {{"kind", kind_code(entry.kind)}, {"language", language_code(entry.language)}, {"lines", std::move(lines)}};
}

SongEntry entry_from_json(const json& j) {
    try {
        SongEntry entry;
        auto kind = parse_entry_kind(j.at("kind").get<std::string>());
        if (!kind) throw InvalidEntry("unknown kind '" + j.at("kind").get<std::string>() + "'");
        entry.kind = *kind;
        auto language = parse_language(j.value("language", std::string("none")));
        if (!language) throw InvalidEntry("unknown language");
        entry.language = *language;
        for (const auto& jl : j.at("lines")) {
            Line& line = entry.lines.emplace_back();
            for (const auto& jt : jl) {
                SongTuple tuple;
                if (jt.contains("word")) tuple.word = jt.at("word").get<std::string>();
                if (jt.contains("notes")) {
                    for (const auto& jn : jt.at("notes")) {
                        if (!jn.is_array() || jn.size() != 3) throw InvalidEntry("a note is [pitch, duration_bin, rest_bin]");
                        std::optional<PitchToken> pitch;
                        if (jn[0].is_number_integer()) {
                            pitch = parse_pitch_name(std::to_string(jn[0].get<int>()));
                        } else {
                            pitch = parse_pitch_name(jn[0].get<std::string>());
                        }
                        if (!pitch) throw InvalidEntry("unknown pitch " + jn[0].dump());
                        tuple.notes.push_back({*pitch, jn[1].get<int>(), jn[2].get<int>()});
                    }
                }
                line.push_back(std::move(tuple));
            }
        }
        return checked(std::move(entry));
    } catch (const json::exception& e) {
        throw InvalidEntry(std::string("entry JSON: ") + e.what());
    }
}

json triplets_to_json(std::span<const MelodyTriplet> triplets) {
    json out = json::array();
    for (const auto& t : triplets) out.push_back({t.pitch, t.note_duration, t.rest_duration});
    return out;
}

std::vector<MelodyTriplet> triplets_from_json(const json& j) {
    try {
        std::vector<MelodyTriplet> out;
        for (const auto& row : j) {
            if (!row.is_array() || row.size() != 3) throw InvalidEntry("a triplet is [pitch, note_duration, rest_duration]");
            out.push_back({row[0].get<int>(), row[1].get<double>(), row[2].get<double>()});
        }
        return out;
    } catch (const json::exception& e) {
        throw InvalidEntry(std::string("triplet JSON: ") + e.what());
    }
}

SongEntry entry_from_record(const json& record) {
    if (!record.is_object()) throw InvalidEntry("record is not a JSON object");
    SongEntry entry;
    if (record.contains("text")) {
        if (!record["text"].is_string()) throw InvalidEntry("\"text\" must be a string");
        entry = parse(record["text"].get<std::string>());
    } else if (record.contains("triplets")) {
        entry = melody_entry_from_triplets(triplets_from_json(record["triplets"]));
    } else if (record.contains("lines")) {
        return entry_from_json(record);
    } else {
        throw InvalidEntry("record has no \"text\", \"triplets\" or \"lines\"");
    }
    if (record.contains("language") && record["language"].is_string()) {
        auto language = parse_language(record["language"].get<std::string>());
        if (!language) throw InvalidEntry("unknown language");
        entry.language = *language;
    }
    return checked(std::move(entry));
}

json report_to_json(const ExtractionReport& report) {
    return {{"tracks_seen", report.tracks_seen},     {"tracks_selected", report.tracks_selected},
            {"fallback", report.fallback},           {"notes_emitted", report.notes_emitted},
            {"notes_dropped", report.notes_dropped}, {"drop_reasons", report.drop_reasons},
            {"pitch_min", report.pitch_min},         {"pitch_max", report.pitch_max}};
}

namespace {

json stats_json(const CorpusStats& s) {
    return {{"songs", s.songs},
            {"lines", s.lines},
            {"words", s.words},
            {"unique_words", s.unique_words},
            {"lines_per_song", s.lines_per_song},
            {"words_per_line", s.words_per_line}};
}

template <std::size_t N>
json counts_json(const std::array<std::size_t, N>& counts) {
    std::size_t total = 0;
    for (auto c : counts) total += c;
    json fractions = json::array();
    for (auto c : counts) fractions.push_back(total ? static_cast<double>(c) / total : 0.0);
    return {{"counts", counts}, {"fractions", fractions}, {"total", total}};
}

}  // namespace

json stats_to_json(const CorpusStatsReport& report) {
    return {{"english", stats_json(report.english)},
            {"chinese", stats_json(report.chinese)},
            {"total", stats_json(report.total)}};
}

json histograms_to_json(const AttributeHistograms& h) {
    json edges = json::array();
    for (std::size_t i = 0; i <= AttributeHistograms::kDurationBins; ++i) {
        // rounded to 0.1 s so the edges print as -0.3, -0.2, ...
        edges.push_back(std::round((AttributeHistograms::kDurationMin + i * AttributeHistograms::kDurationStep) * 10.0) / 10.0);
    }
    json pitch = counts_json(h.pitch);
    pitch["first_value"] = 0;
    json npw = counts_json(h.notes_per_word);
    npw["labels"] = {"1", "2", "3", "4", "5", "6", "7", "8+"};
    json nd = counts_json(h.note_duration);
    nd["edges"] = edges;
    json rd = counts_json(h.rest_duration);
    rd["edges"] = edges;
    return {{"pitch", pitch}, {"notes_per_word", npw}, {"note_duration", nd}, {"rest_duration", rd}};
}

TimedInterval interval_from_json(const json& j) {
    try {
        TimedInterval t;
        t.label = j.at("label").is_string() ? j.at("label").get<std::string>() : j.at("label").dump();
        t.onset = j.at("onset").get<double>();
        t.offset = j.at("offset").get<double>();
        if (!(t.offset > t.onset) || t.onset < 0.0) throw InvalidEntry("interval needs 0 <= onset < offset");
        return t;
    } catch (const json::exception& e) {
        throw InvalidEntry(std::string("interval JSON: ") + e.what());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

std::vector<JsonLine> parse_jsonl(std::string_view text) {
    std::vector<JsonLine> out;
    std::size_t start = 0;
    std::size_t number = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        try {
            out.push_back({number, json::parse(line)});
        } catch (const json::exception& e) {
            throw IoError("JSON-lines line " + std::to_string(number) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace songtuple
