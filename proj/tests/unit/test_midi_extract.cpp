#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "../support/generators.hpp"
#include "songtuple/errors.hpp"
#include "songtuple/midi_extract.hpp"

using namespace songtuple;
using Bytes = std::vector<std::uint8_t>;

namespace {

// Hand-assembled SMF pieces, independent of write_midi.
void vlq(Bytes& out, std::uint32_t v) {
    Bytes tmp{static_cast<std::uint8_t>(v & 0x7F)};
    while (v >>= 7) tmp.push_back(static_cast<std::uint8_t>(0x80 | (v & 0x7F)));
    out.insert(out.end(), tmp.rbegin(), tmp.rend());
}

struct TrackBuilder {
    Bytes data;
    TrackBuilder& name(const std::string& n) {
        vlq(data, 0);
        data.insert(data.end(), {0xFF, 0x03});
        vlq(data, static_cast<std::uint32_t>(n.size()));
        data.insert(data.end(), n.begin(), n.end());
        return *this;
    }
    TrackBuilder& tempo(std::uint32_t delta, std::uint32_t micros) {
        vlq(data, delta);
        data.insert(data.end(), {0xFF, 0x51, 0x03, static_cast<std::uint8_t>(micros >> 16),
                                 static_cast<std::uint8_t>(micros >> 8), static_cast<std::uint8_t>(micros)});
        return *this;
    }
    TrackBuilder& event(std::uint32_t delta, std::uint8_t status, std::uint8_t a, std::uint8_t b) {
        vlq(data, delta);
        data.insert(data.end(), {status, a, b});
        return *this;
    }
    TrackBuilder& running(std::uint32_t delta, std::uint8_t a, std::uint8_t b) {
        vlq(data, delta);
        data.insert(data.end(), {a, b});
        return *this;
    }
    Bytes chunk() const {
        Bytes body = data;
        body.insert(body.end(), {0x00, 0xFF, 0x2F, 0x00});
        Bytes out{'M', 'T', 'r', 'k'};
        const auto len = static_cast<std::uint32_t>(body.size());
        for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(len >> s));
        out.insert(out.end(), body.begin(), body.end());
        return out;
    }
};

Bytes smf(int format, std::uint16_t division, const std::vector<TrackBuilder>& tracks) {
    Bytes out{'M', 'T', 'h', 'd', 0, 0, 0, 6, 0, static_cast<std::uint8_t>(format), 0,
              static_cast<std::uint8_t>(tracks.size()), static_cast<std::uint8_t>(division >> 8),
              static_cast<std::uint8_t>(division)};
    for (const auto& t : tracks) {
        const Bytes c = t.chunk();
        out.insert(out.end(), c.begin(), c.end());
    }
    return out;
}

// n notes of pitch p, one beat each, back to back.
TrackBuilder scale_track(const std::string& name, int notes, std::uint8_t channel = 0, std::uint8_t pitch = 60) {
    TrackBuilder t;
    t.name(name);
    for (int i = 0; i < notes; ++i) {
        t.event(0, static_cast<std::uint8_t>(0x90 | channel), static_cast<std::uint8_t>(pitch + i), 90);
        t.event(480, static_cast<std::uint8_t>(0x80 | channel), static_cast<std::uint8_t>(pitch + i), 0);
    }
    return t;
}

}  // namespace

TEST_CASE("one beat at 60 bpm lasts one second") {
    TrackBuilder t;
    t.tempo(0, 1000000).event(0, 0x90, 60, 100).event(480, 0x80, 60, 0);
    const auto tracks = parse_midi(smf(0, 480, {t}));
    REQUIRE(tracks.size() == 1);
    REQUIRE(tracks[0].notes.size() == 1);
    CHECK(tracks[0].notes[0].pitch == 60);
    CHECK(tracks[0].notes[0].onset == 0.0);
    CHECK(tracks[0].notes[0].offset == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("default tempo is 120 bpm") {
    TrackBuilder t;
    t.event(0, 0x90, 60, 100).event(480, 0x80, 60, 0);
    CHECK(parse_midi(smf(0, 480, {t}))[0].notes[0].offset == doctest::Approx(0.5));
}

TEST_CASE("velocity zero note-on ends a note, running status included") {
    TrackBuilder t;
    t.tempo(0, 1000000).event(0, 0x90, 60, 100).running(480, 60, 0).running(0, 62, 80).running(240, 62, 0);
    const auto notes = parse_midi(smf(0, 480, {t}))[0].notes;
    REQUIRE(notes.size() == 2);
    CHECK(notes[0].offset == doctest::Approx(1.0));
    CHECK(notes[1].pitch == 62);
    CHECK(notes[1].onset == doctest::Approx(1.0));
    CHECK(notes[1].offset == doctest::Approx(1.5));
}

TEST_CASE("tempo changes in a conductor track apply to every track") {
    TrackBuilder conductor;
    conductor.tempo(0, 1000000).tempo(480, 500000);
    TrackBuilder melody;
    melody.name("Melody").event(0, 0x90, 60, 90).event(480, 0x80, 60, 0).event(0, 0x90, 62, 90).event(480, 0x80, 62, 0);
    const auto tracks = parse_midi(smf(1, 480, {conductor, melody}));
    REQUIRE(tracks[1].notes.size() == 2);
    CHECK(tracks[1].notes[1].onset == doctest::Approx(1.0));
    CHECK(tracks[1].notes[1].offset == doctest::Approx(1.5));
}

TEST_CASE("malformed and unsupported files") {
    const Bytes good = smf(0, 480, {scale_track("Melody", 2)});
    SUBCASE("truncated header") {
        for (std::size_t n : {0u, 3u, 8u, 13u}) {
            CHECK_THROWS_AS(parse_midi(Bytes(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(n))), MalformedMidi);
        }
    }
    SUBCASE("truncated track") {
        CHECK_THROWS_AS(parse_midi(Bytes(good.begin(), good.end() - 5)), MalformedMidi);
    }
    SUBCASE("wrong magic") {
        Bytes bad = good;
        bad[0] = 'X';
        try {
            parse_midi(bad);
            FAIL("expected MalformedMidi");
        } catch (const MalformedMidi& e) {
            CHECK(e.offset() == 0);
        }
    }
    SUBCASE("format 2") {
        Bytes f2 = good;
        f2[9] = 2;
        CHECK_THROWS_AS(parse_midi(f2), UnsupportedMidi);
    }
    SUBCASE("every truncation fails cleanly") {
        for (std::size_t n = 0; n < good.size(); ++n) {
            try {
                parse_midi(Bytes(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(n)));
            } catch (const Error&) {
            }
        }
    }
}

TEST_CASE("track selection") {
    const auto names = [](const std::vector<MidiTrack>& tracks, const TrackSelection& sel) {
        std::vector<std::string> out;
        for (auto i : sel.indices) out.push_back(tracks[i].name);
        return out;
    };
    SUBCASE("melody by name") {
        const auto tracks = parse_midi(smf(1, 480, {scale_track("Piano", 8), scale_track("Melody", 3)}));
        const auto sel = select_melody_tracks(tracks);
        CHECK(names(tracks, sel) == std::vector<std::string>{"Melody"});
        CHECK_FALSE(sel.fallback);
    }
    SUBCASE("case-insensitive vocal, drums ignored") {
        const auto tracks = parse_midi(smf(1, 480, {scale_track("VOCAL lead", 3), scale_track("drums", 9, 9, 36)}));
        CHECK(names(tracks, select_melody_tracks(tracks)) == std::vector<std::string>{"VOCAL lead"});
    }
    SUBCASE("fallback to the densest track") {
        const auto tracks = parse_midi(smf(1, 480, {scale_track("Piano", 4), scale_track("Bass", 7, 1, 30)}));
        const auto sel = select_melody_tracks(tracks);
        CHECK(names(tracks, sel) == std::vector<std::string>{"Bass"});
        CHECK(sel.fallback);
    }
    SUBCASE("percussion is never a fallback") {
        const auto tracks = parse_midi(smf(1, 480, {scale_track("Piano", 2), scale_track("Kit", 9, 9, 36)}));
        CHECK(tracks[1].percussion);
        CHECK(names(tracks, select_melody_tracks(tracks)) == std::vector<std::string>{"Piano"});
    }
    SUBCASE("no note-bearing tracks") {
        TrackBuilder empty;
        empty.name("Strings");
        const auto tracks = parse_midi(smf(1, 480, {empty, scale_track("Drums", 4, 9, 36)}));
        CHECK_THROWS_AS(select_melody_tracks(tracks), NoTracks);
    }
}

TEST_CASE("extract two notes with a rest") {
    TrackBuilder t;
    t.name("Melody").tempo(0, 1000000).event(0, 0x90, 60, 90).event(480, 0x80, 60, 0).event(240, 0x90, 62, 90).event(240, 0x80, 62, 0);
    const Extraction ex = extract(smf(0, 480, {t}));
    REQUIRE(ex.triplets.size() == 2);
    CHECK(ex.triplets[0].pitch == 60);
    CHECK(ex.triplets[0].note_duration == doctest::Approx(1.0));
    CHECK(ex.triplets[0].rest_duration == doctest::Approx(0.5));
    CHECK(ex.triplets[1].pitch == 62);
    CHECK(ex.triplets[1].note_duration == doctest::Approx(0.5));
    CHECK(ex.triplets[1].rest_duration == 0.0);
    CHECK(ex.report.tracks_seen == 1);
    CHECK(ex.report.notes_emitted == 2);
    CHECK(ex.report.notes_dropped == 0);
    CHECK(ex.report.pitch_min == 60);
    CHECK(ex.report.pitch_max == 62);
}

TEST_CASE("overlapping notes keep a negative rest") {
    TrackBuilder t;
    t.name("Melody").tempo(0, 1000000).event(0, 0x90, 60, 90).event(384, 0x90, 62, 90).event(96, 0x80, 60, 0).event(192, 0x80, 62, 0);
    const Extraction ex = extract(smf(0, 480, {t}));
    REQUIRE(ex.triplets.size() == 2);
    CHECK(ex.triplets[0].note_duration == doctest::Approx(1.0));
    CHECK(ex.triplets[0].rest_duration == doctest::Approx(-0.2));
    CHECK(ex.triplets[1].note_duration == doctest::Approx(0.6));
}

TEST_CASE("simultaneous and zero-length notes are dropped and counted") {
    TrackBuilder t;
    t.name("Melody").tempo(0, 1000000);
    t.event(0, 0x90, 60, 90).event(0, 0x90, 64, 90).event(0, 0x90, 67, 90);  // chord
    t.event(480, 0x80, 60, 0).event(0, 0x80, 64, 0).event(0, 0x80, 67, 0);
    t.event(0, 0x90, 70, 90).event(0, 0x80, 70, 0);  // zero length
    t.event(0, 0x90, 62, 90).event(480, 0x80, 62, 0);
    const Extraction ex = extract(smf(0, 480, {t}));
    REQUIRE(ex.triplets.size() == 2);
    CHECK(ex.triplets[0].pitch == 67);
    CHECK(ex.triplets[1].pitch == 62);
    CHECK(ex.report.drop_reasons.at("simultaneous") == 2);
    CHECK(ex.report.drop_reasons.at("zero-length") == 1);
    CHECK(ex.report.notes_emitted + ex.report.notes_dropped == 5);
}

TEST_CASE("an empty named track yields EmptyInput") {
    TrackBuilder melody;
    melody.name("Melody");
    CHECK_THROWS_AS(extract(smf(1, 480, {scale_track("Piano", 3), melody})), EmptyInput);
}

TEST_CASE("write then extract reproduces tick-aligned triplets") {
    testing::Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<MelodyTriplet> original;
        const int n = testing::uniform(rng, 1, 30);
        for (int i = 0; i < n; ++i) {
            const double dur = testing::uniform(rng, 1, 2000) / 960.0;
            // negative rest shorter than the note keeps onsets strictly increasing
            const int rest_ticks = testing::uniform(rng, -static_cast<int>(dur * 960) + 1, 960);
            original.push_back({testing::uniform(rng, 0, 127), dur, i + 1 == n ? 0.0 : rest_ticks / 960.0});
        }
        const Extraction ex = extract(write_midi(original));
        REQUIRE(ex.triplets.size() == original.size());
        for (std::size_t i = 0; i < original.size(); ++i) {
            CHECK(ex.triplets[i].pitch == original[i].pitch);
            CHECK(std::abs(ex.triplets[i].note_duration - original[i].note_duration) < 1e-6);
            CHECK(std::abs(ex.triplets[i].rest_duration - original[i].rest_duration) < 1e-6);
        }
        CHECK(ex.report.notes_emitted + ex.report.notes_dropped == original.size());
        CHECK(extract(write_midi(original)).triplets.size() == ex.triplets.size());
    }
}

TEST_CASE("write_midi rejects bad input") {
    std::vector<MelodyTriplet> bad{{128, 1.0, 0.0}};
    CHECK_THROWS_AS(write_midi(bad), OutOfRange);
    std::vector<MelodyTriplet> ok{{60, 1.0, 0.0}};
    CHECK_THROWS_AS(write_midi(ok, 0.0), InvalidParams);
}
