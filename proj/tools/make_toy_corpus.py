#!/usr/bin/env python3
"""Writes the bundled toy corpus under data/toy (seeded, so reruns are identical).

Per song: raw lyrics, LRC timestamps, word and note timings as a forced aligner
and transcriber would emit them, a MIDI file, and a perturbed "generated"
melody for evaluation.
"""

import json
import random
import struct
import sys
from pathlib import Path

EN_WORDS = (
    "morning light river stone open road we run under silver rain hold my hand "
    "every city sleeps tonight slow heart carry home the long summer wind calls "
    "your name again little paper boats drift far away from quiet harbor lamps"
).split()
ZH_CHARS = list("我你他爱心天月风花雨夜光梦星海山水云歌唱走来去在的是不有一生")
NAMES = "CDEFGAB"
STEPS = [0, 2, 4, 5, 7, 9, 11]

NOISE_EN = ["!", ",", "...", "?", ""]
NOISE_ZH = ["，", "。", "！", ""]


def pitch_name(midi):
    pc = midi % 12
    octave = midi // 12 - 1
    names = ["C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B"]
    return f"{names[pc]}{octave}"


def vlq(v):
    out = [v & 0x7F]
    v >>= 7
    while v:
        out.append(0x80 | (v & 0x7F))
        v >>= 7
    return bytes(reversed(out))


def track_chunk(events):
    body = b"".join(events) + b"\x00\xff\x2f\x00"
    return b"MTrk" + struct.pack(">I", len(body)) + body


def midi_file(notes, bpm, tpq, melody_name, extra_tracks):
    """notes: (pitch, onset_s, offset_s). Returns format-1 SMF bytes."""
    tps = tpq * bpm / 60.0
    micros = round(60_000_000 / bpm)
    conductor = [vlq(0) + b"\xff\x51\x03" + micros.to_bytes(3, "big")]

    def timed(ns, channel):
        evs = []
        for p, on, off in ns:
            evs.append((round(on * tps), 1, 0x90 | channel, p, 96))
            evs.append((round(off * tps), 0, 0x80 | channel, p, 0))
        evs.sort(key=lambda e: (e[0], e[1]))
        out, last = [], 0
        for tick, _, status, p, vel in evs:
            out.append(vlq(tick - last) + bytes([status, p, vel]))
            last = tick
        return out

    def named(name):
        raw = name.encode()
        return [vlq(0) + b"\xff\x03" + vlq(len(raw)) + raw]

    chunks = [track_chunk(conductor), track_chunk(named(melody_name) + timed(notes, 0))]
    for name, ns, channel in extra_tracks:
        chunks.append(track_chunk(named(name) + timed(ns, channel)))
    header = b"MThd" + struct.pack(">IHHH", 6, 1, len(chunks), tpq)
    return header + b"".join(chunks)


def lrc_stamp(t):
    cs = round(t * 100)
    return f"[{cs // 6000:02d}:{(cs // 100) % 60:02d}.{cs % 100:02d}]"


def make_song(rng, index, language):
    song_id = f"{'en' if language == 'en' else 'zh'}{index:02d}"
    tonic = rng.choice([55, 57, 60, 62])
    t = 0.5
    lines, words, notes = [], [], []
    degree = 2
    for line_no in range(rng.randint(6, 9)):
        line_words = []
        count = rng.randint(3, 6) if language == "en" else rng.randint(4, 7)
        line_start = t
        for _ in range(count):
            w = rng.choice(EN_WORDS) if language == "en" else rng.choice(ZH_CHARS)
            n_notes = 2 if rng.random() < 0.12 else 1
            w_on = t
            for _ in range(n_notes):
                degree = max(0, min(9, degree + rng.choice([-2, -1, -1, 0, 1, 1, 2])))
                pitch = tonic + STEPS[degree % 7] + 12 * (degree // 7)
                dur = rng.choice([0.25, 0.5, 0.5, 0.75, 1.0])
                notes.append({"label": pitch_name(pitch), "onset": round(t, 4), "offset": round(t + dur, 4)})
                t += dur + rng.choice([0.0, 0.0, 0.0, 0.125])
            w_off = notes[-1]["offset"]
            jitter = rng.choice([-0.03, 0.0, 0.02])
            words.append({"label": w, "onset": round(max(0.0, w_on + jitter), 4), "offset": round(w_off + jitter, 4)})
            line_words.append(w)
        lines.append((line_start, line_words))
        t += rng.choice([0.75, 1.0, 1.5])
    return song_id, lines, words, notes, t


def render_line(rng, words, language):
    if language == "en":
        text = " ".join(words)
        text = text[0].upper() + text[1:]
        return text + rng.choice(NOISE_EN)
    return "".join(words) + rng.choice(NOISE_ZH)


def main(out_dir):
    rng = random.Random(20240611)
    out = Path(out_dir)
    (out / "lrc").mkdir(parents=True, exist_ok=True)
    (out / "midi").mkdir(parents=True, exist_ok=True)
    lyrics_rows, word_rows, note_rows, generated_rows = [], [], [], []
    languages = ["en"] * 7 + ["zh"] * 3
    for i, language in enumerate(languages):
        song_id, lines, words, notes, end = make_song(rng, i, language)
        rendered = [render_line(rng, ws, language) for _, ws in lines]

        lrc = ["[ar:Toy Corpus]", f"[ti:{song_id}]"]
        for (start, _), text in zip(lines, rendered):
            lrc.append(lrc_stamp(start) + text)
        if i % 3 == 0:
            lrc.insert(3, lrc_stamp(lines[0][0] - 0.4) + "(Intro)")
        lrc.append(lrc_stamp(end))
        (out / "lrc" / f"{song_id}.lrc").write_text("\n".join(lrc) + "\n", encoding="utf-8")

        raw = list(rendered)
        raw.insert(0, "[Verse 1]")
        if language == "en":
            raw.insert(3, "Привет привет")
            raw.append("la la la la la la (x2)")
        else:
            raw.insert(2, "oh yeah")
            raw.append("啦 啦 啦 啦 啦")
        lyrics_rows.append({"id": song_id, "language": language, "lyrics": "\n".join(raw) + "\n"})
        word_rows.append({"id": song_id, "language": language, "words": words})
        note_rows.append({"id": song_id, "notes": notes})

        triplets = [(n["label"], n["onset"], n["offset"]) for n in notes]
        midi_notes = []
        for label, on, off in triplets:
            pc = NAMES.index(label[0])
            sharp = "#" in label
            octave = int(label[2:] if sharp else label[1:])
            midi_notes.append((12 * (octave + 1) + STEPS[pc] + (1 if sharp else 0), on, off))
        bass = [(p - 24, on, off) for p, on, off in midi_notes[::2]]
        drums = [(36, k * 0.5, k * 0.5 + 0.1) for k in range(int(end * 2))]
        melody_name = ["Melody", "Lead Vocal", "melody line"][i % 3]
        extra = [("Bass", bass, 1), ("Drums", drums, 9)]
        bpm = [60, 90, 120][i % 3]
        (out / "midi" / f"{song_id}.mid").write_bytes(midi_file(midi_notes, bpm, 480, melody_name, extra))

        gen = []
        for k, (p, on, off) in enumerate(midi_notes):
            nxt = midi_notes[k + 1][1] if k + 1 < len(midi_notes) else off
            shift = rng.choice([0, 0, 2, -2, 5])
            stretch = rng.choice([1.1, 1.1, 1.1, 1.6])
            gen.append([p + shift + 3, round((off - on) * stretch, 4), round((nxt - off) * stretch, 4)])
        generated_rows.append({"id": song_id, "triplets": gen})

    def dump(name, rows):
        text = "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows)
        (out / name).write_text(text, encoding="utf-8")

    dump("lyrics.jsonl", lyrics_rows)
    dump("words.jsonl", word_rows)
    dump("notes.jsonl", note_rows)
    dump("generated.jsonl", generated_rows)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/toy")
