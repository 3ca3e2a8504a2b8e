#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "songtuple/song_model.hpp"

namespace songtuple {

struct MidiTrack {
    std::string name;
    std::vector<NoteEvent> notes;  ///< sorted by onset, then pitch; offset >= onset
    bool percussion = false;       ///< every note sits on channel 10
};

/// Standard MIDI File, format 0 or 1. Ticks are converted to seconds through the
/// merged tempo map of all tracks (default 120 bpm). Note-on with velocity 0 is a
/// note-off; offs close the earliest open note of the same channel and pitch.
///
/// Throws MalformedMidi or UnsupportedMidi.
std::vector<MidiTrack> parse_midi(std::span<const std::uint8_t> bytes);

struct TrackSelection {
    std::vector<std::size_t> indices;  ///< into the parsed track list, ascending
    bool fallback = false;             ///< no track name matched; densest track taken
};

/// Tracks whose name contains "melody" or "vocal" (any case), never percussion.
/// Without a match: the non-percussion track with the most notes.
/// Throws NoTracks when no non-percussion track carries notes and no name matches.
TrackSelection select_melody_tracks(std::span<const MidiTrack> tracks);

struct ExtractionReport {
    std::size_t tracks_seen = 0;
    std::vector<std::string> tracks_selected;
    bool fallback = false;
    std::size_t notes_emitted = 0;
    std::size_t notes_dropped = 0;
    std::map<std::string, std::size_t> drop_reasons;
    int pitch_min = 0;
    int pitch_max = 0;
};

struct Extraction {
    std::vector<MelodyTriplet> triplets;
    ExtractionReport report;
};

/// parse -> select -> merge by onset -> drop zero-length notes and all but the
/// highest of notes sharing an onset -> triplets. Throws EmptyInput if nothing survives.
Extraction extract(std::span<const std::uint8_t> bytes);

/// Builds a format-0 file playing the triplets back to back at a fixed tempo.
/// Times are rounded to the nearest tick. Overlapping notes of one pitch go to
/// separate channels so their note-offs stay unambiguous. Pitches outside
/// 0..127 throw OutOfRange.
std::vector<std::uint8_t> write_midi(std::span<const MelodyTriplet> triplets, double bpm = 60.0,
                                     int ticks_per_quarter = 960, const std::string& track_name = "Melody");

}  // namespace songtuple
