#include "songtuple/midi_extract.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <deque>
#include <unordered_map>

#include "songtuple/errors.hpp"
#include "songtuple/utf8.hpp"

namespace songtuple {

namespace {

class ByteReader {
public:
    ByteReader(std::span<const std::uint8_t> bytes, std::size_t begin, std::size_t end)
        : bytes_(bytes), pos_(begin), end_(end) {}

    bool done() const { return pos_ >= end_; }
    std::size_t pos() const { return pos_; }

    std::uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }
    std::uint8_t peek() {
        need(1);
        return bytes_[pos_];
    }
    std::uint16_t u16() {
        need(2);
        const std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] << 8 | bytes_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = v << 8 | bytes_[pos_++];
        return v;
    }
    std::uint32_t vlq() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            const std::uint8_t b = u8();
            v = v << 7 | (b & 0x7F);
            if (!(b & 0x80)) return v;
        }
        throw MalformedMidi(pos_, "variable-length quantity longer than 4 bytes");
    }
    std::span<const std::uint8_t> take(std::size_t n) {
        need(n);
        auto out = bytes_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

private:
    void need(std::size_t n) const {
        if (pos_ > end_ || end_ - pos_ < n) throw MalformedMidi(pos_, "unexpected end of data");
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_;
    std::size_t end_;
};

struct RawNote {
    std::uint64_t on_tick = 0;
    std::uint64_t off_tick = 0;
    int pitch = 0;
    int channel = 0;
};

struct RawTrack {
    std::string name;
    bool named = false;
    std::vector<RawNote> notes;
};

struct TempoChange {
    std::uint64_t tick = 0;
    std::uint32_t micros_per_quarter = 500000;
};

std::string track_name_text(std::span<const std::uint8_t> data) {
    std::string raw(data.begin(), data.end());
    if (utf8::is_valid(raw)) return raw;
    std::string latin1;
    for (unsigned char c : raw) utf8::append(latin1, c);
    return latin1;
}

RawTrack read_track(ByteReader& r, std::vector<TempoChange>& tempo) {
    RawTrack track;
    std::unordered_map<int, std::deque<std::uint64_t>> open;
    std::uint64_t tick = 0;
    std::uint8_t running = 0;

    const auto note_off = [&](int channel, int pitch) {
        auto it = open.find(channel << 8 | pitch);
        if (it == open.end() || it->second.empty()) return;
        track.notes.push_back({it->second.front(), tick, pitch, channel});
        it->second.pop_front();
    };

    while (!r.done()) {
        tick += r.vlq();
        std::uint8_t status = r.peek();
        if (status & 0x80) {
            r.u8();
        } else {
            if (running == 0) throw MalformedMidi(r.pos(), "data byte without running status");
            status = running;
        }

        if (status == 0xFF) {
            running = 0;
            const std::uint8_t type = r.u8();
            const auto data = r.take(r.vlq());
            if (type == 0x2F) break;
            if (type == 0x03 && !track.named) {
                track.name = track_name_text(data);
                track.named = true;
            } else if (type == 0x51) {
                if (data.size() != 3) throw MalformedMidi(r.pos(), "tempo event must hold 3 bytes");
                const std::uint32_t micros = static_cast<std::uint32_t>(data[0] << 16 | data[1] << 8 | data[2]);
                if (micros == 0) throw MalformedMidi(r.pos(), "zero tempo");
                tempo.push_back({tick, micros});
            }
            continue;
        }
        if (status == 0xF0 || status == 0xF7) {
            running = 0;
            r.take(r.vlq());
            continue;
        }
        if (status >= 0xF0) throw MalformedMidi(r.pos(), "unexpected system message in track data");

        running = status;
        const int kind = status & 0xF0;
        const int channel = status & 0x0F;
        const std::uint8_t a = r.u8();
        if (a & 0x80) throw MalformedMidi(r.pos() - 1, "data byte has high bit set");
        if (kind == 0xC0 || kind == 0xD0) continue;
        const std::uint8_t b = r.u8();
        if (b & 0x80) throw MalformedMidi(r.pos() - 1, "data byte has high bit set");

        if (kind == 0x90 && b > 0) {
            open[channel << 8 | a].push_back(tick);
        } else if (kind == 0x80 || kind == 0x90) {
            note_off(channel, a);
        }
    }
    return track;
}

class TickClock {
public:
    TickClock(std::uint16_t division, std::vector<TempoChange> tempo) {
        if (division & 0x8000) {
            const int fps_code = -static_cast<std::int8_t>(division >> 8);
            const double fps = fps_code == 29 ? 29.97 : fps_code;
            const int ticks_per_frame = division & 0xFF;
            if (fps <= 0 || ticks_per_frame == 0) throw MalformedMidi(12, "invalid SMPTE division");
            smpte_seconds_per_tick_ = 1.0 / (fps * ticks_per_frame);
            return;
        }
        if (division == 0) throw MalformedMidi(12, "zero ticks per quarter note");
        ticks_per_quarter_ = division;
        std::stable_sort(tempo.begin(), tempo.end(), [](auto& x, auto& y) { return x.tick < y.tick; });
        segments_.push_back({0, 0.0, 500000});
        for (const auto& change : tempo) {
            Segment& last = segments_.back();
            const double at = last.seconds + seconds_over(change.tick - last.tick, last.micros);
            if (change.tick == last.tick) {
                last.micros = change.micros_per_quarter;
            } else {
                segments_.push_back({change.tick, at, change.micros_per_quarter});
            }
        }
    }

    double seconds(std::uint64_t tick) const {
        if (smpte_seconds_per_tick_ > 0) return static_cast<double>(tick) * smpte_seconds_per_tick_;
        auto it = std::upper_bound(segments_.begin(), segments_.end(), tick,
                                   [](std::uint64_t t, const Segment& s) { return t < s.tick; });
        const Segment& s = *std::prev(it);
        return s.seconds + seconds_over(tick - s.tick, s.micros);
    }

private:
    struct Segment {
        std::uint64_t tick;
        double seconds;
        std::uint32_t micros;
    };

    double seconds_over(std::uint64_t ticks, std::uint32_t micros) const {
        return static_cast<double>(ticks) * micros / (1e6 * ticks_per_quarter_);
    }

    double smpte_seconds_per_tick_ = 0.0;
    double ticks_per_quarter_ = 480.0;
    std::vector<Segment> segments_;
};

bool name_matches(const std::string& name) {
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return lower.find("melody") != std::string::npos || lower.find("vocal") != std::string::npos;
}

}  // namespace

std::vector<MidiTrack> parse_midi(std::span<const std::uint8_t> bytes) {
    ByteReader header(bytes, 0, bytes.size());
    const auto magic = header.take(4);
    if (!std::equal(magic.begin(), magic.end(), "MThd")) throw MalformedMidi(0, "missing MThd header");
    const std::uint32_t header_len = header.u32();
    if (header_len < 6) throw MalformedMidi(4, "header chunk shorter than 6 bytes");
    const std::uint16_t format = header.u16();
    const std::uint16_t track_count = header.u16();
    const std::uint16_t division = header.u16();
    header.take(header_len - 6);
    if (format > 1) throw UnsupportedMidi("MIDI format " + std::to_string(format) + " is not supported");

    std::vector<RawTrack> raw;
    std::vector<TempoChange> tempo;
    std::size_t pos = header.pos();
    while (raw.size() < track_count) {
        ByteReader chunk(bytes, pos, bytes.size());
        const auto id = chunk.take(4);
        const std::uint32_t len = chunk.u32();
        const std::size_t body = chunk.pos();
        if (bytes.size() - body < len) throw MalformedMidi(body, "chunk runs past end of file");
        pos = body + len;
        if (!std::equal(id.begin(), id.end(), "MTrk")) continue;
        ByteReader track_reader(bytes, body, body + len);
        raw.push_back(read_track(track_reader, tempo));
    }

    const TickClock clock(division, std::move(tempo));
    std::vector<MidiTrack> tracks;
    tracks.reserve(raw.size());
    for (auto& rt : raw) {
        MidiTrack t;
        t.name = std::move(rt.name);
        t.percussion = !rt.notes.empty() &&
                       std::all_of(rt.notes.begin(), rt.notes.end(), [](const RawNote& n) { return n.channel == 9; });
        t.notes.reserve(rt.notes.size());
        for (const auto& n : rt.notes) {
            t.notes.push_back({n.pitch, clock.seconds(n.on_tick), clock.seconds(n.off_tick), t.name});
        }
        std::stable_sort(t.notes.begin(), t.notes.end(), [](const NoteEvent& x, const NoteEvent& y) {
            return x.onset != y.onset ? x.onset < y.onset : x.pitch < y.pitch;
        });
        tracks.push_back(std::move(t));
    }
    return tracks;
}

TrackSelection select_melody_tracks(std::span<const MidiTrack> tracks) {
    TrackSelection sel;
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        if (!tracks[i].percussion && name_matches(tracks[i].name)) sel.indices.push_back(i);
    }
    if (!sel.indices.empty()) return sel;

    std::size_t best = tracks.size();
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        if (tracks[i].percussion || tracks[i].notes.empty()) continue;
        if (best == tracks.size() || tracks[i].notes.size() > tracks[best].notes.size()) best = i;
    }
    if (best == tracks.size()) throw NoTracks("no non-percussion track carries notes");
    sel.indices.push_back(best);
    sel.fallback = true;
    return sel;
}

Extraction extract(std::span<const std::uint8_t> bytes) {
    const auto tracks = parse_midi(bytes);
    const auto selection = select_melody_tracks(tracks);

    Extraction out;
    ExtractionReport& report = out.report;
    report.tracks_seen = tracks.size();
    report.fallback = selection.fallback;

    std::vector<NoteEvent> merged;
    for (std::size_t i : selection.indices) {
        report.tracks_selected.push_back(tracks[i].name);
        merged.insert(merged.end(), tracks[i].notes.begin(), tracks[i].notes.end());
    }
    std::stable_sort(merged.begin(), merged.end(), [](const NoteEvent& x, const NoteEvent& y) {
        return x.onset != y.onset ? x.onset < y.onset : x.pitch > y.pitch;
    });

    std::vector<NoteEvent> kept;
    kept.reserve(merged.size());
    for (const auto& note : merged) {
        if (!(note.offset > note.onset)) {
            ++report.drop_reasons["zero-length"];
            continue;
        }
        if (!kept.empty() && kept.back().onset == note.onset) {
            ++report.drop_reasons["simultaneous"];
            continue;
        }
        kept.push_back(note);
    }
    for (const auto& [reason, count] : report.drop_reasons) report.notes_dropped += count;
    report.notes_emitted = kept.size();
    if (kept.empty()) throw EmptyInput("selected tracks contain no usable notes");

    const auto [lo, hi] = std::minmax_element(kept.begin(), kept.end(),
                                              [](auto& x, auto& y) { return x.pitch < y.pitch; });
    report.pitch_min = lo->pitch;
    report.pitch_max = hi->pitch;
    out.triplets = triplets_from_events(kept);
    return out;
}

std::vector<std::uint8_t> write_midi(std::span<const MelodyTriplet> triplets, double bpm, int ticks_per_quarter,
                                     const std::string& track_name) {
    if (!(bpm > 0.0) || ticks_per_quarter <= 0 || ticks_per_quarter > 0x7FFF) {
        throw InvalidParams("bpm and ticks per quarter must be positive");
    }
    const double ticks_per_second = ticks_per_quarter * bpm / 60.0;
    const auto to_tick = [&](double seconds) {
        return static_cast<std::int64_t>(std::llround(seconds * ticks_per_second));
    };

    struct Ev {
        std::int64_t tick;
        bool on;
        int pitch;
        int channel;
    };
    std::vector<Ev> events;
    // latest offset per (channel, pitch), so sounding unisons never share a channel
    std::vector<std::array<std::int64_t, 128>> busy_until(16);
    for (auto& row : busy_until) row.fill(-1);
    double onset = 0.0;
    for (const auto& t : triplets) {
        if (t.pitch < 0 || t.pitch > 127) throw OutOfRange("MIDI pitch " + std::to_string(t.pitch));
        const std::int64_t on = to_tick(onset);
        const std::int64_t off = to_tick(onset + t.note_duration);
        if (on < 0) throw InvalidParams("note starts before time zero");
        int channel = 0;
        while (channel < 16 && (channel == 9 || busy_until[static_cast<std::size_t>(channel)][static_cast<std::size_t>(t.pitch)] > on)) {
            ++channel;
        }
        if (channel == 16) throw InvalidParams("more than 15 overlapping notes of one pitch");
        auto& until = busy_until[static_cast<std::size_t>(channel)][static_cast<std::size_t>(t.pitch)];
        until = std::max(until, off);
        events.push_back({on, true, t.pitch, channel});
        events.push_back({off, false, t.pitch, channel});
        onset += t.note_duration + t.rest_duration;
    }
    std::stable_sort(events.begin(), events.end(), [](const Ev& x, const Ev& y) {
        return x.tick != y.tick ? x.tick < y.tick : (!x.on && y.on);
    });

    std::vector<std::uint8_t> track;
    const auto put_vlq = [&](std::uint64_t v) {
        std::uint8_t buf[10];
        int n = 0;
        buf[n++] = v & 0x7F;
        while (v >>= 7) buf[n++] = static_cast<std::uint8_t>(0x80 | (v & 0x7F));
        while (n) track.push_back(buf[--n]);
    };
    put_vlq(0);
    track.insert(track.end(), {0xFF, 0x03});
    put_vlq(track_name.size());
    track.insert(track.end(), track_name.begin(), track_name.end());
    const auto micros = static_cast<std::uint32_t>(std::llround(60e6 / bpm));
    put_vlq(0);
    track.insert(track.end(), {0xFF, 0x51, 0x03, static_cast<std::uint8_t>(micros >> 16),
                               static_cast<std::uint8_t>(micros >> 8), static_cast<std::uint8_t>(micros)});
    std::int64_t last = 0;
    for (const auto& e : events) {
        put_vlq(static_cast<std::uint64_t>(e.tick - last));
        last = e.tick;
        track.push_back(static_cast<std::uint8_t>((e.on ? 0x90 : 0x80) | e.channel));
        track.push_back(static_cast<std::uint8_t>(e.pitch));
        track.push_back(e.on ? 100 : 0);
    }
    put_vlq(0);
    track.insert(track.end(), {0xFF, 0x2F, 0x00});

    std::vector<std::uint8_t> file = {'M', 'T', 'h', 'd', 0, 0, 0, 6, 0, 0, 0, 1};
    file.push_back(static_cast<std::uint8_t>(ticks_per_quarter >> 8));
    file.push_back(static_cast<std::uint8_t>(ticks_per_quarter));
    file.insert(file.end(), {'M', 'T', 'r', 'k'});
    const auto len = static_cast<std::uint32_t>(track.size());
    for (int shift = 24; shift >= 0; shift -= 8) file.push_back(static_cast<std::uint8_t>(len >> shift));
    file.insert(file.end(), track.begin(), track.end());
    return file;
}

}  // namespace songtuple
