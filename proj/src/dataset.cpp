#include "songtuple/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "songtuple/duration_codec.hpp"
#include "songtuple/tuple_text.hpp"

namespace songtuple {

std::vector<PretrainSample> chunk_song(const SongEntry& entry, std::uint64_t seed, const std::string& source_id) {
    std::vector<PretrainSample> out;
    const std::size_t total = entry.lines.size();
    if (total == 0) return out;

    const auto make = [&](std::size_t offset, std::size_t count) {
        PretrainSample s;
        s.entry.kind = entry.kind;
        s.entry.language = entry.language;
        s.entry.lines.assign(entry.lines.begin() + static_cast<std::ptrdiff_t>(offset),
                             entry.lines.begin() + static_cast<std::ptrdiff_t>(offset + count));
        s.source_id = source_id;
        s.line_offset = offset;
        s.flagged = count < kMinChunkLines || count > kMaxChunkLines;
        return s;
    };

    if (total < kMinChunkLines) {
        out.push_back(make(0, total));
        return out;
    }

    SeededRng rng(seed);
    std::vector<std::size_t> lengths;
    std::size_t remaining = total;
    while (remaining > 0) {
        const auto drawn = static_cast<std::size_t>(rng.between(kMinChunkLines, kMaxChunkLines));
        const std::size_t take = std::min(drawn, remaining);
        if (take < kMinChunkLines && !lengths.empty()) {
            lengths.back() += take;
        } else {
            lengths.push_back(take);
        }
        remaining -= take;
    }
    std::size_t offset = 0;
    for (std::size_t len : lengths) {
        out.push_back(make(offset, len));
        offset += len;
    }
    return out;
}

Augmentation augment_melody(const PretrainSample& sample) {
    if (sample.entry.kind == EntryKind::PureLyric) throw InvalidParams("pure lyrics carry no pitches to shift");
    Augmentation out;
    for (int shift = -kMaxShift; shift <= kMaxShift; ++shift) {
        try {
            PretrainSample variant = sample;
            variant.entry = transpose(sample.entry, shift);
            variant.shift = sample.shift + shift;
            out.variants.push_back(std::move(variant));
        } catch (const OutOfRange&) {
            out.dropped_shifts.push_back(shift);
        }
    }
    return out;
}

std::vector<MixSlot> mix_schedule(std::array<std::size_t, 3> sizes, std::uint64_t seed, MixRatio ratio) {
    const std::array<int, 3> share = {ratio.lyric, ratio.melody, ratio.paired};
    for (int s : share) {
        if (s < 1) throw InvalidParams("mixing ratio parts must be at least 1");
    }
    for (std::size_t n : sizes) {
        if (n == 0) throw EmptyCorpus("every corpus needs at least one sample");
    }

    std::size_t rounds = 0;
    for (std::size_t k = 0; k < 3; ++k) {
        const auto per_round = static_cast<std::size_t>(share[k]);
        rounds = std::max(rounds, (sizes[k] + per_round - 1) / per_round);
    }

    SeededRng rng(seed);
    std::array<std::vector<std::size_t>, 3> decks;
    std::array<std::size_t, 3> next{};
    for (std::size_t k = 0; k < 3; ++k) {
        decks[k].resize(sizes[k]);
        for (std::size_t i = 0; i < sizes[k]; ++i) decks[k][i] = i;
        rng.shuffle(decks[k]);
    }

    std::vector<MixSlot> out;
    out.reserve(rounds * static_cast<std::size_t>(share[0] + share[1] + share[2]));
    for (std::size_t r = 0; r < rounds; ++r) {
        for (std::size_t k = 0; k < 3; ++k) {
            for (int i = 0; i < share[k]; ++i) {
                if (next[k] == decks[k].size()) {
                    rng.shuffle(decks[k]);
                    next[k] = 0;
                }
                out.push_back({static_cast<CorpusKind>(k), decks[k][next[k]++]});
            }
        }
    }
    return out;
}

SongEntry melody_entry_from_triplets(std::span<const MelodyTriplet> triplets, double break_rest_seconds,
                                     std::size_t max_notes_per_line) {
    if (triplets.empty()) throw EmptyInput("no triplets");
    if (max_notes_per_line == 0) throw InvalidParams("lines must hold at least one note");
    SongEntry entry;
    entry.kind = EntryKind::PureMelody;
    entry.language = Language::Unspecified;
    entry.lines.emplace_back();
    for (std::size_t k = 0; k < triplets.size(); ++k) {
        const MelodyTriplet& t = triplets[k];
        SongTuple tuple;
        tuple.notes.push_back(
            {PitchToken::from_midi(t.pitch), encode_duration(t.note_duration), encode_duration(t.rest_duration)});
        entry.lines.back().push_back(std::move(tuple));
        const bool more = k + 1 < triplets.size();
        if (more && (t.rest_duration >= break_rest_seconds || entry.lines.back().size() >= max_notes_per_line)) {
            entry.lines.emplace_back();
        }
    }
    return entry;
}

std::optional<QATask> parse_task(std::string_view name) noexcept {
    if (name == "l2m") return QATask::LyricToMelody;
    if (name == "m2l") return QATask::MelodyToLyric;
    if (name == "cont") return QATask::Continuation;
    if (name == "t2s") return QATask::TextToSong;
    return std::nullopt;
}

SongEntry to_pure_lyric(const SongEntry& paired) {
    SongEntry out{EntryKind::PureLyric, paired.language, {}};
    for (const auto& line : paired.lines) {
        Line& projected = out.lines.emplace_back();
        for (const auto& tuple : line) projected.push_back({tuple.word, {}});
    }
    return out;
}

SongEntry to_pure_melody(const SongEntry& paired) {
    SongEntry out{EntryKind::PureMelody, Language::Unspecified, {}};
    for (const auto& line : paired.lines) {
        Line& projected = out.lines.emplace_back();
        for (const auto& tuple : line) {
            for (const auto& note : tuple.notes) projected.push_back({std::nullopt, {note}});
        }
    }
    return out;
}

namespace {

std::string substitute(std::string text, std::string_view key, std::string_view value) {
    for (std::size_t at = text.find(key); at != std::string::npos; at = text.find(key, at + value.size())) {
        text.replace(at, key.size(), value);
    }
    return text;
}

}  // namespace

QAPair render_qa(QATask task, const SongEntry& song, const QAParams& params, const TemplateSet& templates) {
    if (song.kind != EntryKind::Paired) throw InvalidParams("QA pairs are rendered from paired songs");
    if (auto problems = validate_entry(song); !problems.empty()) throw InvalidParams("invalid song: " + problems.front());

    QAPair qa{task, {}, {}};
    switch (task) {
        case QATask::LyricToMelody:
            qa.prompt = templates.lyric_to_melody + "\n" + serialize(to_pure_lyric(song));
            qa.answer = serialize(song);
            break;
        case QATask::MelodyToLyric:
            qa.prompt = templates.melody_to_lyric + "\n" + serialize(to_pure_melody(song));
            qa.answer = serialize(song);
            break;
        case QATask::Continuation: {
            const auto n = params.extend_lines;
            if (n < 1 || static_cast<std::size_t>(n) >= song.lines.size()) {
                throw InvalidParams("continuation needs 1 <= extend_lines < line count");
            }
            const auto split = song.lines.end() - n;
            SongEntry head{song.kind, song.language, {song.lines.begin(), split}};
            SongEntry tail{song.kind, song.language, {split, song.lines.end()}};
            // Either half may lose every Han word of a Chinese song.
            const auto fix_language = [](SongEntry& e) {
                if (e.language == Language::Chinese && !validate_entry(e).empty()) e.language = Language::English;
            };
            fix_language(head);
            fix_language(tail);
            qa.prompt = substitute(templates.continuation, "{n}", std::to_string(n)) + "\n" + serialize(head);
            qa.answer = serialize(tail);
            break;
        }
        case QATask::TextToSong:
            if (params.summary.empty()) throw InvalidParams("text-to-song needs a summary");
            qa.prompt = substitute(templates.text_to_song, "{summary}", params.summary);
            qa.answer = serialize(song);
            break;
    }
    return qa;
}

namespace {

struct StatsAccumulator {
    CorpusStats stats;
    std::set<std::string> vocabulary;

    void add(const SongEntry& entry) {
        ++stats.songs;
        stats.lines += entry.lines.size();
        for (const auto& words : words_of(entry)) {
            stats.words += words.size();
            vocabulary.insert(words.begin(), words.end());
        }
    }

    CorpusStats finish() {
        stats.unique_words = vocabulary.size();
        stats.lines_per_song = stats.songs ? static_cast<double>(stats.lines) / stats.songs : 0.0;
        stats.words_per_line = stats.lines ? static_cast<double>(stats.words) / stats.lines : 0.0;
        return stats;
    }
};

}  // namespace

CorpusStatsReport corpus_stats(std::span<const SongEntry> corpus) {
    StatsAccumulator english, chinese, total;
    for (const auto& entry : corpus) {
        total.add(entry);
        if (entry.language == Language::English) english.add(entry);
        if (entry.language == Language::Chinese) chinese.add(entry);
    }
    return {english.finish(), chinese.finish(), total.finish()};
}

std::size_t AttributeHistograms::duration_bin(double seconds) {
    const double position = (seconds - kDurationMin) / kDurationStep + 1e-9;
    if (position < 0.0) return 0;
    return std::min(static_cast<std::size_t>(std::floor(position)), kDurationBins - 1);
}

void AttributeHistograms::add_word(std::span<const MelodyTriplet> notes) {
    if (notes.empty()) return;
    ++notes_per_word[std::min(notes.size(), kNotesPerWordBins) - 1];
    for (const auto& n : notes) {
        if (n.pitch >= 0 && n.pitch < static_cast<int>(pitch.size())) ++pitch[static_cast<std::size_t>(n.pitch)];
        ++note_duration[duration_bin(n.note_duration)];
        ++rest_duration[duration_bin(n.rest_duration)];
    }
}

void AttributeHistograms::add_entry(const SongEntry& entry) {
    std::vector<MelodyTriplet> notes;
    for (const auto& line : entry.lines) {
        for (const auto& tuple : line) {
            notes.clear();
            for (const auto& n : tuple.notes) {
                notes.push_back({n.pitch.midi(), decode_duration(n.duration_bin), decode_duration(n.rest_bin)});
            }
            add_word(notes);
        }
    }
}

AttributeHistograms attribute_histograms(std::span<const SongEntry> corpus) {
    if (corpus.empty()) throw EmptyCorpus("no paired songs");
    AttributeHistograms h;
    for (const auto& entry : corpus) {
        if (entry.kind != EntryKind::Paired) throw InvalidParams("histograms are computed over paired songs");
        h.add_entry(entry);
    }
    return h;
}

}  // namespace songtuple
