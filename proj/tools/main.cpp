// songtuple: batch front end for the lyric/melody data pipeline.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli_support.hpp"
#include "songtuple/align.hpp"
#include "songtuple/dataset.hpp"
#include "songtuple/duration_codec.hpp"
#include "songtuple/json_io.hpp"
#include "songtuple/metrics.hpp"
#include "songtuple/midi_extract.hpp"
#include "songtuple/pitch_vocab.hpp"
#include "songtuple/tuple_text.hpp"
#include "songtuple/utf8.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace songtuple;
using namespace songtuple::cli;

namespace {

int finish(const Failures& failures) { return failures.count() == 0 ? 0 : 1; }

std::string shortest(double x) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

Language language_option(const std::string& code) {
    auto lang = parse_language(code);
    if (!lang || *lang == Language::Unspecified) throw InvalidParams("language must be en or zh");
    return *lang;
}

std::string documents(const std::vector<std::string>& docs) {
    std::string out;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (i) out += "\n";
        out += docs[i];
    }
    return out;
}

/// Splits blank-line separated documents, remembering the first line of each.
std::vector<std::pair<std::size_t, std::string>> split_documents(const std::string& text) {
    std::vector<std::pair<std::size_t, std::string>> docs;
    std::string current;
    std::size_t first = 0, number = 0, start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        const bool terminated = end != std::string::npos;
        if (!terminated) end = text.size();
        std::string line = text.substr(start, end - start);
        start = end + 1;
        ++number;
        if (line.empty()) {
            if (!current.empty()) docs.emplace_back(first, std::move(current));
            current.clear();
            continue;
        }
        if (current.empty()) first = number;
        current += line;
        if (terminated) current += "\n";
    }
    if (!current.empty()) docs.emplace_back(first, std::move(current));
    return docs;
}

// ---------------------------------------------------------------------------

struct ExtractOptions {
    std::vector<std::string> inputs;
    std::string out, report;
    unsigned jobs = 1;
};

int run_extract(const ExtractOptions& o, Failures& failures) {
    auto results = parallel_map<Extraction>(o.inputs.size(), o.jobs, [&](std::size_t i) {
        const std::string bytes = read_file(o.inputs[i]);
        return extract(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
    });
    std::vector<json> rows, reports;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (auto* err = std::get_if<std::string>(&results[i])) {
            failures.add(o.inputs[i], *err);
            continue;
        }
        const auto& ex = std::get<Extraction>(results[i]);
        rows.push_back({{"id", stem_of(o.inputs[i])}, {"source", o.inputs[i]}, {"triplets", triplets_to_json(ex.triplets)}});
        json r = report_to_json(ex.report);
        r["id"] = stem_of(o.inputs[i]);
        reports.push_back(std::move(r));
    }
    write_output(o.out, jsonl(rows));
    if (!o.report.empty()) write_output(o.report, jsonl(reports));
    return finish(failures);
}

// ---------------------------------------------------------------------------

struct SerializeOptions {
    std::string in, out;
};

int run_serialize(const SerializeOptions& o, Failures& failures) {
    std::vector<std::string> docs;
    for (const auto& rec : read_records(o.in, failures)) {
        try {
            docs.push_back(serialize(entry_from_record(rec.value)));
        } catch (const Error& e) {
            failures.add(rec.where, e.what());
        }
    }
    write_output(o.out, documents(docs));
    return finish(failures);
}

int run_parse(const SerializeOptions& o, Failures& failures) {
    const std::string name = o.in.empty() || o.in == "-" ? "<stdin>" : o.in;
    std::vector<json> rows;
    for (const auto& [first_line, doc] : split_documents(read_input(o.in))) {
        try {
            rows.push_back(entry_to_json(parse(doc)));
        } catch (const ParseError& e) {
            failures.add(name + ":" + std::to_string(first_line + e.line() - 1) + ":" + std::to_string(e.column()),
                         e.reason());
        }
    }
    write_output(o.out, jsonl(rows));
    return finish(failures);
}

// ---------------------------------------------------------------------------

struct CleanOptions {
    std::string in, out, lang, format = "lines";
};

int run_clean(const CleanOptions& o, Failures& failures) {
    if (o.format == "lines") {
        std::string out;
        for (const auto& line : clean_lyrics(read_input(o.in), language_option(o.lang))) out += line + "\n";
        write_output(o.out, out);
        return 0;
    }
    std::vector<json> rows;
    for (const auto& rec : read_records(o.in, failures)) {
        try {
            if (!rec.value.is_object() || !rec.value.contains("lyrics") || !rec.value["lyrics"].is_string()) {
                throw InvalidEntry("record needs a \"lyrics\" string");
            }
            const Language lang = language_option(rec.value.value("language", o.lang));
            SongEntry entry{EntryKind::PureLyric, lang, {}};
            for (const auto& line : clean_lyrics(rec.value["lyrics"].get<std::string>(), lang)) {
                Line& l = entry.lines.emplace_back();
                for (auto& w : split_words(line, lang)) l.push_back({std::move(w), {}});
            }
            if (entry.lines.empty()) throw EmptyInput("nothing left after cleaning");
            rows.push_back({{"id", rec.id()}, {"language", language_code(lang)}, {"text", serialize(entry)}});
        } catch (const Error& e) {
            failures.add(rec.where, e.what());
        }
    }
    write_output(o.out, jsonl(rows));
    return finish(failures);
}

// ---------------------------------------------------------------------------

struct SliceOptions {
    std::vector<std::string> inputs;
    std::string out, lang;
    double target_seconds = 10.0;
    std::size_t max_lines = 3;
    double last_line_seconds = 5.0;
};

json line_json(const TimedLyricLine& l) { return {{"text", l.text}, {"start", l.start}, {"end", l.end}}; }

int run_slice(const SliceOptions& o, Failures& failures) {
    const Language lang = language_option(o.lang);
    std::vector<json> rows;
    for (const auto& path : o.inputs) {
        try {
            std::vector<TimedLyricLine> lines;
            for (auto& line : parse_lrc(read_file(path), o.last_line_seconds)) {
                const auto cleaned = clean_lyrics(line.text, lang);
                if (cleaned.empty()) continue;
                line.text = cleaned.front();
                lines.push_back(std::move(line));
            }
            if (lines.empty()) throw EmptyInput("no lyric lines");
            const auto segments = slice_segments(lines, o.target_seconds, o.max_lines);
            for (std::size_t k = 0; k < segments.size(); ++k) {
                json jl = json::array();
                for (const auto& l : segments[k].lines) jl.push_back(line_json(l));
                rows.push_back({{"id", stem_of(path)},
                                {"segment", k},
                                {"start", segments[k].start()},
                                {"end", segments[k].end()},
                                {"lines", std::move(jl)}});
            }
        } catch (const Error& e) {
            failures.add(path, e.what());
        }
    }
    write_output(o.out, jsonl(rows));
    return finish(failures);
}

// ---------------------------------------------------------------------------

struct AlignOptions {
    std::string words, notes, segments, out, alignment, lang = "auto";
    unsigned jobs = 1;
};

struct TimedSegment {
    double start = 0.0;
    std::vector<double> line_starts;
};

/// Index of the last start <= t (0 when t precedes them all).
std::size_t locate(const std::vector<double>& starts, double t) {
    const auto it = std::upper_bound(starts.begin(), starts.end(), t);
    return it == starts.begin() ? 0 : static_cast<std::size_t>(it - starts.begin() - 1);
}

struct AlignedSegment {
    std::string id;
    SongEntry entry;
    Alignment alignment;
};

std::vector<AlignedSegment> align_song(const std::string& id, const json& words_rec, const json& notes_rec,
                                       const std::vector<TimedSegment>* segments, const std::string& lang_opt) {
    std::vector<TimedInterval> words, notes;
    std::vector<std::size_t> given_lines;
    for (const auto& w : words_rec.at("words")) {
        words.push_back(interval_from_json(w));
        if (w.contains("line")) given_lines.push_back(w["line"].get<std::size_t>());
    }
    for (const auto& n : notes_rec.at("notes")) notes.push_back(interval_from_json(n));
    const auto by_onset = [](const TimedInterval& a, const TimedInterval& b) { return a.onset < b.onset; };
    if (!std::is_sorted(words.begin(), words.end(), by_onset) || !std::is_sorted(notes.begin(), notes.end(), by_onset)) {
        throw InvalidEntry("words and notes must be sorted by onset");
    }

    Language lang;
    if (lang_opt != "auto") {
        lang = language_option(lang_opt);
    } else if (words_rec.contains("language")) {
        lang = language_option(words_rec["language"].get<std::string>());
    } else {
        lang = std::any_of(words.begin(), words.end(), [](const auto& w) { return utf8::contains_han(w.label); })
                   ? Language::Chinese
                   : Language::English;
    }
    for (auto& w : words) {
        const auto cleaned = clean_lyrics(w.label, lang);
        const auto split = cleaned.empty() ? std::vector<std::string>{} : split_words(cleaned.front(), lang);
        if (split.size() != 1) throw InvalidEntry("word label '" + w.label + "' is not a single word");
        w.label = split.front();
    }

    // groups of word and note indices, one per segment
    struct Group {
        std::vector<std::size_t> words, notes, lines;
    };
    std::vector<Group> groups;
    if (segments) {
        std::vector<double> starts;
        for (const auto& s : *segments) starts.push_back(s.start);
        groups.resize(segments->size());
        // midpoints, so aligner jitter at a boundary cannot move an item across it
        const auto mid = [](const TimedInterval& t) { return 0.5 * (t.onset + t.offset); };
        for (std::size_t i = 0; i < words.size(); ++i) {
            const std::size_t g = locate(starts, mid(words[i]));
            groups[g].words.push_back(i);
            groups[g].lines.push_back(locate((*segments)[g].line_starts, mid(words[i])));
        }
        for (std::size_t i = 0; i < notes.size(); ++i) groups[locate(starts, mid(notes[i]))].notes.push_back(i);
    } else {
        if (!given_lines.empty() && given_lines.size() != words.size()) {
            throw InvalidEntry("either every word or no word carries a \"line\"");
        }
        Group all;
        for (std::size_t i = 0; i < words.size(); ++i) all.words.push_back(i);
        for (std::size_t i = 0; i < notes.size(); ++i) all.notes.push_back(i);
        all.lines = given_lines;
        groups.push_back(std::move(all));
    }

    std::vector<AlignedSegment> out;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const Group& group = groups[g];
        if (group.words.empty() && group.notes.empty()) continue;
        const std::string seg_id = segments ? id + "#" + std::to_string(g) : id;
        std::vector<TimedInterval> w, n;
        for (auto i : group.words) w.push_back(words[i]);
        for (auto i : group.notes) n.push_back(notes[i]);
        try {
            AlignedSegment seg{seg_id, {}, align_words_to_notes(w, n)};
            seg.entry = build_paired_entry(w, n, seg.alignment, lang, group.lines);
            out.push_back(std::move(seg));
        } catch (const Error& e) {
            throw InvalidEntry("segment " + seg_id + ": " + e.what());
        }
    }
    return out;
}

int run_align(const AlignOptions& o, Failures& failures) {
    const auto word_recs = read_records(o.words, failures);
    std::map<std::string, json> notes_by_id;
    for (const auto& rec : read_records(o.notes, failures)) notes_by_id[rec.id()] = rec.value;
    std::map<std::string, std::vector<TimedSegment>> segments_by_id;
    if (!o.segments.empty()) {
        for (const auto& rec : read_records(o.segments, failures)) {
            try {
                TimedSegment seg;
                seg.start = rec.value.at("start").get<double>();
                for (const auto& l : rec.value.at("lines")) seg.line_starts.push_back(l.at("start").get<double>());
                segments_by_id[rec.id()].push_back(std::move(seg));
            } catch (const json::exception& e) {
                failures.add(rec.where, e.what());
            }
        }
    }

    auto results = parallel_map<std::vector<AlignedSegment>>(word_recs.size(), o.jobs, [&](std::size_t i) {
        const Record& rec = word_recs[i];
        const std::string id = rec.id();
        const auto notes = notes_by_id.find(id);
        if (notes == notes_by_id.end()) throw InvalidEntry("no notes record with id '" + id + "'");
        const std::vector<TimedSegment>* segs = nullptr;
        if (!o.segments.empty()) {
            const auto it = segments_by_id.find(id);
            if (it == segments_by_id.end()) throw InvalidEntry("no segments for id '" + id + "'");
            segs = &it->second;
        }
        return align_song(id, rec.value, notes->second, segs, o.lang);
    });

    std::vector<json> rows;
    std::string sidecar;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (auto* err = std::get_if<std::string>(&results[i])) {
            failures.add(word_recs[i].where, *err);
            continue;
        }
        for (const auto& seg : std::get<std::vector<AlignedSegment>>(results[i])) {
            rows.push_back({{"id", seg.id}, {"language", language_code(seg.entry.language)}, {"text", serialize(seg.entry)}});
            nlohmann::ordered_json mapping = nlohmann::ordered_json::object();
            for (const auto& span : seg.alignment.mapping) {
                mapping[std::to_string(span.word_index)] = {span.first_note, span.last_note};
            }
            nlohmann::ordered_json row = {{"id", seg.id}, {"cost", seg.alignment.cost}, {"alignment", std::move(mapping)}};
            sidecar += row.dump() + "\n";
        }
    }
    write_output(o.out, jsonl(rows));
    if (!o.alignment.empty()) write_output(o.alignment, sidecar);
    return finish(failures);
}

// ---------------------------------------------------------------------------

struct PretrainOptions {
    std::string lyrics, melody, paired, out, manifest;
    std::uint64_t seed = 0;
    MixRatio ratio;
};

MixRatio parse_ratio(const std::string& text) {
    MixRatio r;
    int* parts[3] = {&r.lyric, &r.melody, &r.paired};
    std::size_t start = 0;
    for (int k = 0; k < 3; ++k) {
        const std::size_t end = k < 2 ? text.find(':', start) : text.size();
        if (end == std::string::npos) throw InvalidParams("ratio must look like 1:1:1");
        const char* first = text.data() + start;
        const char* last = text.data() + end;
        const auto [ptr, ec] = std::from_chars(first, last, *parts[k]);
        if (ec != std::errc{} || ptr != last || *parts[k] < 1) throw InvalidParams("ratio must look like 1:1:1");
        start = end + 1;
    }
    return r;
}

std::vector<PretrainSample> load_samples(const std::string& path, CorpusKind kind, std::uint64_t seed, Failures& failures) {
    std::vector<PretrainSample> out;
    const auto recs = read_records(path, failures);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        try {
            const SongEntry entry = entry_from_record(recs[i].value);
            const std::uint64_t song_seed = derive_seed(derive_seed(seed, static_cast<std::uint64_t>(kind)), i);
            for (auto& chunk : chunk_song(entry, song_seed, recs[i].id())) {
                if (kind == CorpusKind::Lyric) {
                    out.push_back(std::move(chunk));
                    continue;
                }
                for (auto& v : augment_melody(chunk).variants) out.push_back(std::move(v));
            }
        } catch (const Error& e) {
            failures.add(recs[i].where, e.what());
        }
    }
    return out;
}

int run_pretrain(const PretrainOptions& o, Failures& failures) {
    const auto lyric = load_samples(o.lyrics, CorpusKind::Lyric, o.seed, failures);
    const auto melody = load_samples(o.melody, CorpusKind::Melody, o.seed, failures);
    const auto paired = load_samples(o.paired, CorpusKind::Paired, o.seed, failures);
    const std::array<const std::vector<PretrainSample>*, 3> sets = {&lyric, &melody, &paired};
    const char* kind_names[3] = {"lyric", "melody", "paired"};

    std::vector<std::string> docs;
    std::vector<json> manifest;
    for (const MixSlot& slot : mix_schedule({lyric.size(), melody.size(), paired.size()}, o.seed, o.ratio)) {
        const PretrainSample& s = (*sets[static_cast<std::size_t>(slot.kind)])[slot.index];
        docs.push_back(serialize(s.entry));
        manifest.push_back({{"kind", kind_names[static_cast<std::size_t>(slot.kind)]},
                            {"source", s.source_id},
                            {"line_offset", s.line_offset},
                            {"lines", s.entry.lines.size()},
                            {"shift", s.shift},
                            {"flagged", s.flagged}});
    }
    write_output(o.out, documents(docs));
    if (!o.manifest.empty()) write_output(o.manifest, jsonl(manifest));
    return finish(failures);
}

// ---------------------------------------------------------------------------

struct SftOptions {
    std::string in, out, task, summaries, templates;
    int extend_lines = 2;
};

TemplateSet load_templates(const std::string& path) {
    TemplateSet t;
    if (path.empty()) return t;
    const json j = json::parse(read_file(path));
    t.lyric_to_melody = j.value("l2m", t.lyric_to_melody);
    t.melody_to_lyric = j.value("m2l", t.melody_to_lyric);
    t.continuation = j.value("cont", t.continuation);
    t.text_to_song = j.value("t2s", t.text_to_song);
    return t;
}

int run_sft(const SftOptions& o, Failures& failures) {
    const QATask task = *parse_task(o.task);
    const TemplateSet templates = load_templates(o.templates);
    std::map<std::string, std::string> summaries;
    if (!o.summaries.empty()) {
        for (const auto& rec : read_records(o.summaries, failures)) {
            if (rec.value.is_object() && rec.value.contains("summary") && rec.value["summary"].is_string()) {
                summaries[rec.id()] = rec.value["summary"].get<std::string>();
            } else {
                failures.add(rec.where, "record needs a \"summary\" string");
            }
        }
    }
    std::vector<json> rows;
    for (const auto& rec : read_records(o.in, failures)) {
        try {
            QAParams params{o.extend_lines, {}};
            if (task == QATask::TextToSong) {
                const auto it = summaries.find(rec.id());
                if (it == summaries.end()) throw InvalidParams("no summary for id '" + rec.id() + "'");
                params.summary = it->second;
            }
            const QAPair qa = render_qa(task, entry_from_record(rec.value), params, templates);
            rows.push_back({{"id", rec.id()}, {"task", o.task}, {"prompt", qa.prompt}, {"answer", qa.answer}});
        } catch (const Error& e) {
            failures.add(rec.where, e.what());
        }
    }
    write_output(o.out, jsonl(rows));
    return finish(failures);
}

// ---------------------------------------------------------------------------

struct EvalOptions {
    std::string gen, ref, out, gen_embeddings, ref_embeddings, lang = "auto";
    unsigned jobs = 1;
};

struct EvalSong {
    std::vector<MelodyTriplet> melody;
    std::string lyrics;
    Language language = Language::Unspecified;
};

EvalSong eval_song(const json& record) {
    EvalSong s;
    if (record.is_object() && record.contains("triplets")) {
        s.melody = triplets_from_json(record["triplets"]);
        return s;
    }
    const SongEntry entry = entry_from_record(record);
    if (entry.kind != EntryKind::PureLyric) s.melody = melody_of(entry);
    s.language = entry.language;
    for (const auto& line : words_of(entry)) {
        for (const auto& w : line) {
            if (!s.lyrics.empty() && entry.language != Language::Chinese) s.lyrics += ' ';
            s.lyrics += w;
        }
    }
    return s;
}

json mean_or_null(const std::vector<double>& values) {
    if (values.empty()) return nullptr;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

int run_evaluate(const EvalOptions& o, Failures& failures) {
    const auto gen = read_records(o.gen, failures);
    const auto ref = read_records(o.ref, failures);

    // pair by id when every record has one, else by position
    const auto all_ids = [](const std::vector<Record>& recs) {
        return std::all_of(recs.begin(), recs.end(), [](const Record& r) { return r.value.is_object() && r.value.contains("id"); });
    };
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (all_ids(gen) && all_ids(ref)) {
        std::map<std::string, std::size_t> gen_index;
        for (std::size_t i = 0; i < gen.size(); ++i) gen_index[gen[i].id()] = i;
        for (std::size_t j = 0; j < ref.size(); ++j) {
            const auto it = gen_index.find(ref[j].id());
            if (it == gen_index.end()) {
                failures.add(ref[j].where, "no generated record with id '" + ref[j].id() + "'");
                continue;
            }
            pairs.emplace_back(it->second, j);
        }
    } else {
        if (gen.size() != ref.size()) {
            failures.add(o.gen, std::to_string(gen.size()) + " generated vs " + std::to_string(ref.size()) + " reference records");
        }
        for (std::size_t i = 0; i < std::min(gen.size(), ref.size()); ++i) pairs.emplace_back(i, i);
    }

    std::vector<Eigen::VectorXd> gen_emb, ref_emb;
    if (!o.gen_embeddings.empty() && !o.ref_embeddings.empty()) {
        gen_emb = read_embeddings(o.gen_embeddings);
        ref_emb = read_embeddings(o.ref_embeddings);
    }

    auto results = parallel_map<json>(pairs.size(), o.jobs, [&](std::size_t k) {
        const auto [gi, ri] = pairs[k];
        const EvalSong g = eval_song(gen[gi].value);
        const EvalSong r = eval_song(ref[ri].value);
        json row = {{"id", ref[ri].id()}};
        if (!g.melody.empty() && !r.melody.empty()) {
            const CalibratedPair c = calibrate({g.melody, r.melody});
            row["pd"] = pitch_distribution_similarity(c);
            row["dd"] = duration_distribution_similarity(c);
            row["md"] = melody_distance(c);
            row["pitch_offset"] = c.pitch_offset;
            row["time_ratio"] = c.time_ratio;
        }
        if (!g.lyrics.empty() && !r.lyrics.empty()) {
            const Language lang = o.lang != "auto" ? language_option(o.lang) : r.language;
            row["rouge2"] = rouge2(g.lyrics, r.lyrics, lang);
        }
        if (!gen_emb.empty()) {
            if (gi >= gen_emb.size() || ri >= ref_emb.size()) throw DimensionMismatch("embedding file has too few rows");
            row["cosine"] = cosine_similarity(gen_emb[gi], ref_emb[ri]);
        }
        return row;
    });

    std::map<std::string, std::vector<double>> columns;
    json songs = json::array();
    for (std::size_t k = 0; k < results.size(); ++k) {
        if (auto* err = std::get_if<std::string>(&results[k])) {
            failures.add(ref[pairs[k].second].where, *err);
            continue;
        }
        const json& row = std::get<json>(results[k]);
        for (const char* key : {"pd", "dd", "md", "rouge2", "cosine"}) {
            if (row.contains(key)) columns[key].push_back(row[key].get<double>());
        }
        songs.push_back(row);
    }
    json report = {{"pairs", songs.size()}};
    for (const char* key : {"pd", "dd", "md", "rouge2", "cosine"}) report[key] = mean_or_null(columns[key]);
    report["songs"] = std::move(songs);
    write_output(o.out, report.dump(2) + "\n");
    return finish(failures);
}

// ---------------------------------------------------------------------------

struct CorpusOptions {
    std::string in, out;
};

std::vector<SongEntry> load_entries(const std::string& path, Failures& failures) {
    std::vector<SongEntry> out;
    for (const auto& rec : read_records(path, failures)) {
        try {
            out.push_back(entry_from_record(rec.value));
        } catch (const Error& e) {
            failures.add(rec.where, e.what());
        }
    }
    return out;
}

int run_stats(const CorpusOptions& o, Failures& failures) {
    const auto entries = load_entries(o.in, failures);
    write_output(o.out, stats_to_json(corpus_stats(entries)).dump(2) + "\n");
    return finish(failures);
}

int run_histograms(const CorpusOptions& o, Failures& failures) {
    std::vector<SongEntry> paired;
    for (auto& e : load_entries(o.in, failures)) {
        if (e.kind == EntryKind::Paired) {
            paired.push_back(std::move(e));
        } else {
            failures.add(o.in, "skipping a " + std::string(to_string(e.kind)) + " entry");
        }
    }
    write_output(o.out, histograms_to_json(attribute_histograms(paired)).dump(2) + "\n");
    return finish(failures);
}

CLI::Validator ratio_check() {
    return CLI::Validator(
        [](std::string& text) -> std::string {
            try {
                parse_ratio(text);
                return {};
            } catch (const Error& e) {
                return e.what();
            }
        },
        "A:B:C");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"songtuple: lyric/melody tuple data pipeline"};
    app.require_subcommand(1);
    std::string error_log;
    app.add_option("--error-log", error_log, "Also write per-record failures to this file");
    Failures failures;
    std::function<int()> action;

    const auto job_opt = [](CLI::App* cmd, unsigned& jobs) {
        cmd->add_option("-j,--jobs", jobs, "Worker threads")->check(CLI::Range(1u, 256u));
    };

    ExtractOptions ex;
    auto* extract_cmd = app.add_subcommand("extract-midi", "MIDI files to melody triplets (JSON lines)");
    extract_cmd->add_option("inputs", ex.inputs, "MIDI files")->required()->check(CLI::ExistingFile);
    extract_cmd->add_option("-o,--out", ex.out, "Output JSON lines (default stdout)");
    extract_cmd->add_option("--report", ex.report, "Per-file extraction report (JSON lines)");
    job_opt(extract_cmd, ex.jobs);
    extract_cmd->callback([&] { action = [&] { return run_extract(ex, failures); }; });

    double seconds = 0.0;
    auto* enc_cmd = app.add_subcommand("encode-duration", "Seconds to duration bin");
    enc_cmd->add_option("seconds", seconds)->required();
    enc_cmd->callback([&] {
        action = [&] {
            std::cout << encode_duration(seconds) << "\n";
            return 0;
        };
    });

    int bin = 0;
    auto* dec_cmd = app.add_subcommand("decode-duration", "Duration bin to seconds");
    dec_cmd->add_option("bin", bin)->required();
    dec_cmd->callback([&] {
        action = [&] {
            std::cout << shortest(decode_duration(bin)) << "\n";
            return 0;
        };
    });

    std::string vocab_out;
    auto* vocab_cmd = app.add_subcommand("vocab", "Token vocabulary");
    vocab_cmd->require_subcommand(1);
    auto* vocab_export = vocab_cmd->add_subcommand("export", "Write the vocabulary as TSV (token, id)");
    vocab_export->add_option("-o,--out", vocab_out, "Output TSV (default stdout)");
    vocab_export->callback([&] {
        action = [&] {
            write_output(vocab_out, vocab_tsv(VocabTable::instance()));
            return 0;
        };
    });

    SerializeOptions ser;
    auto* ser_cmd = app.add_subcommand("serialize", "Entry JSON lines to tuple-text documents");
    ser_cmd->add_option("-i,--in", ser.in, "Input JSON lines (default stdin)");
    ser_cmd->add_option("-o,--out", ser.out, "Output documents, blank-line separated");
    ser_cmd->callback([&] { action = [&] { return run_serialize(ser, failures); }; });

    SerializeOptions par;
    auto* parse_cmd = app.add_subcommand("parse", "Tuple-text documents to entry JSON lines");
    parse_cmd->add_option("-i,--in", par.in, "Input documents, blank-line separated (default stdin)");
    parse_cmd->add_option("-o,--out", par.out, "Output JSON lines");
    parse_cmd->callback([&] { action = [&] { return run_parse(par, failures); }; });

    CleanOptions cl;
    auto* clean_cmd = app.add_subcommand("clean-lyrics", "Rule-based lyric cleaning");
    clean_cmd->add_option("--lang", cl.lang, "en or zh")->required()->check(CLI::IsMember({"en", "zh"}));
    clean_cmd->add_option("-i,--in", cl.in, "Raw text, or JSON lines {id, lyrics} with --format entries");
    clean_cmd->add_option("-o,--out", cl.out, "Output");
    clean_cmd->add_option("--format", cl.format, "lines: cleaned text; entries: pure-lyric records")
        ->check(CLI::IsMember({"lines", "entries"}));
    clean_cmd->callback([&] { action = [&] { return run_clean(cl, failures); }; });

    SliceOptions sl;
    auto* slice_cmd = app.add_subcommand("slice", "Timestamped lyrics (LRC) to segments");
    slice_cmd->add_option("inputs", sl.inputs, "LRC files")->required()->check(CLI::ExistingFile);
    slice_cmd->add_option("--lang", sl.lang, "en or zh")->required()->check(CLI::IsMember({"en", "zh"}));
    slice_cmd->add_option("--target-seconds", sl.target_seconds)->check(CLI::PositiveNumber);
    slice_cmd->add_option("--max-lines", sl.max_lines)->check(CLI::Range(std::size_t{1}, std::size_t{1000}));
    slice_cmd->add_option("--last-line-seconds", sl.last_line_seconds)->check(CLI::PositiveNumber);
    slice_cmd->add_option("-o,--out", sl.out, "Output JSON lines");
    slice_cmd->callback([&] { action = [&] { return run_slice(sl, failures); }; });

    AlignOptions al;
    auto* align_cmd = app.add_subcommand("align", "Word/note timings to paired tuple-text");
    align_cmd->add_option("--words", al.words, "JSON lines {id, words: [{label, onset, offset, line?}]}")
        ->required()
        ->check(CLI::ExistingFile);
    align_cmd->add_option("--notes", al.notes, "JSON lines {id, notes: [{label, onset, offset}]}")
        ->required()
        ->check(CLI::ExistingFile);
    align_cmd->add_option("--segments", al.segments, "Segments from slice; one paired entry per segment")
        ->check(CLI::ExistingFile);
    align_cmd->add_option("--lang", al.lang, "en, zh or auto")->check(CLI::IsMember({"en", "zh", "auto"}));
    align_cmd->add_option("-o,--out", al.out, "Paired records (JSON lines)");
    align_cmd->add_option("--alignment", al.alignment, "Alignment sidecar (JSON lines)");
    job_opt(align_cmd, al.jobs);
    align_cmd->callback([&] { action = [&] { return run_align(al, failures); }; });

    PretrainOptions pt;
    std::string ratio = "1:1:1";
    auto* pre_cmd = app.add_subcommand("build-pretrain", "Chunk, augment and mix the three corpora");
    pre_cmd->add_option("--lyrics", pt.lyrics, "Pure-lyric records")->required()->check(CLI::ExistingFile);
    pre_cmd->add_option("--melody", pt.melody, "Pure-melody records")->required()->check(CLI::ExistingFile);
    pre_cmd->add_option("--paired", pt.paired, "Paired records")->required()->check(CLI::ExistingFile);
    pre_cmd->add_option("--seed", pt.seed)->required();
    pre_cmd->add_option("--ratio", ratio, "Samples per round, lyric:melody:paired")->check(ratio_check());
    pre_cmd->add_option("-o,--out", pt.out, "Documents, blank-line separated");
    pre_cmd->add_option("--manifest", pt.manifest, "One JSON line per emitted document");
    pre_cmd->callback([&] {
        pt.ratio = parse_ratio(ratio);
        action = [&] { return run_pretrain(pt, failures); };
    });

    SftOptions sft;
    auto* sft_cmd = app.add_subcommand("build-sft", "Instruction QA pairs from paired songs");
    sft_cmd->add_option("--task", sft.task, "l2m, m2l, cont or t2s")->required()->check(CLI::IsMember({"l2m", "m2l", "cont", "t2s"}));
    sft_cmd->add_option("-i,--in", sft.in, "Paired records")->required();
    sft_cmd->add_option("--extend-lines", sft.extend_lines, "Lines to continue by (cont)")->check(CLI::PositiveNumber);
    sft_cmd->add_option("--summaries", sft.summaries, "JSON lines {id, summary} (t2s)")->check(CLI::ExistingFile);
    sft_cmd->add_option("--templates", sft.templates, "JSON object with l2m/m2l/cont/t2s instructions")->check(CLI::ExistingFile);
    sft_cmd->add_option("-o,--out", sft.out, "QA pairs (JSON lines)");
    sft_cmd->callback([&] {
        if (sft.task == "t2s" && sft.summaries.empty()) throw CLI::ValidationError("--summaries", "t2s needs --summaries");
        action = [&] { return run_sft(sft, failures); };
    });

    EvalOptions ev;
    auto* eval_cmd = app.add_subcommand("evaluate", "PD, DD, MD, ROUGE-2 and cosine similarity");
    eval_cmd->add_option("--gen", ev.gen, "Generated records")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--ref", ev.ref, "Reference records")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--gen-embeddings", ev.gen_embeddings, "One comma-separated vector per generated record")
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--ref-embeddings", ev.ref_embeddings, "One comma-separated vector per reference record")
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--lang", ev.lang, "Tokenization for ROUGE-2: en, zh or auto")->check(CLI::IsMember({"en", "zh", "auto"}));
    eval_cmd->add_option("-o,--out", ev.out, "Report JSON");
    job_opt(eval_cmd, ev.jobs);
    eval_cmd->callback([&] {
        if (ev.gen_embeddings.empty() != ev.ref_embeddings.empty()) {
            throw CLI::ValidationError("--gen-embeddings", "give both embedding files or neither");
        }
        action = [&] { return run_evaluate(ev, failures); };
    });

    CorpusOptions st;
    auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics per language");
    stats_cmd->add_option("-i,--in", st.in, "Records")->required();
    stats_cmd->add_option("-o,--out", st.out, "Stats JSON");
    stats_cmd->callback([&] { action = [&] { return run_stats(st, failures); }; });

    CorpusOptions hi;
    auto* hist_cmd = app.add_subcommand("histograms", "Music attribute histograms of a paired corpus");
    hist_cmd->add_option("-i,--in", hi.in, "Paired records")->required();
    hist_cmd->add_option("-o,--out", hi.out, "Histogram JSON");
    hist_cmd->callback([&] { action = [&] { return run_histograms(hi, failures); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n";
        const CLI::App* failed = &app;
        for (auto* sub : app.get_subcommands()) failed = sub;
        std::cerr << failed->help();
        return 2;
    }

    try {
        failures.open_log(error_log);
        return action();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
