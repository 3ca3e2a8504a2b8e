#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "songtuple/errors.hpp"
#include "songtuple/pitch_vocab.hpp"

using namespace songtuple;

TEST_CASE("MIDI 60 is middle C") {
    CHECK(midi_to_token(60).name() == "C4");
    CHECK(midi_to_token(60).text() == "⟨C4⟩");
    CHECK(token_to_midi(PitchToken::from_parts(PitchClass::C, 4)) == 60);
}

TEST_CASE("vocabulary boundaries") {
    CHECK(midi_to_token(0).name() == "C-1");
    CHECK(midi_to_token(119).name() == "B8");
    CHECK(token_to_midi(PitchToken::from_parts(PitchClass::A, 4)) == 69);
    CHECK(token_to_midi(PitchToken::from_parts(PitchClass::C, -1)) == 0);
    CHECK_THROWS_AS(midi_to_token(125), PitchOutOfVocabulary);
    CHECK_THROWS_AS(midi_to_token(120), PitchOutOfVocabulary);
    CHECK_THROWS_AS(midi_to_token(-1), PitchOutOfVocabulary);
    CHECK_THROWS_AS(PitchToken::from_parts(PitchClass::C, 9), PitchOutOfVocabulary);
}

TEST_CASE("token and MIDI number are inverse over the whole range") {
    for (int m = 0; m < 120; ++m) {
        const auto t = midi_to_token(m);
        CHECK(token_to_midi(t) == m);
        CHECK(static_cast<int>(t.pitch_class()) == m % 12);
        CHECK(t.octave() == m / 12 - 1);
        CHECK(parse_pitch_name(t.name()) == t);
    }
}

TEST_CASE("pitch names accept flats and numbers") {
    CHECK(parse_pitch_name("Db4")->midi() == 61);
    CHECK(parse_pitch_name("C#4")->midi() == 61);
    CHECK(parse_pitch_name("64")->midi() == 64);
    CHECK_FALSE(parse_pitch_name("H4"));
    CHECK_FALSE(parse_pitch_name("C"));
    CHECK_FALSE(parse_pitch_name("127"));
    CHECK_FALSE(parse_pitch_name("C9"));
    CHECK_FALSE(parse_pitch_name(""));
}

TEST_CASE("vocabulary table layout") {
    const auto& table = VocabTable::instance();
    REQUIRE(table.size() == 632);
    CHECK(table.entries()[0].text == "⟨d_000⟩");
    CHECK(table.entries()[511].text == "⟨d_511⟩");
    CHECK(table.entries()[512].text == "⟨C-1⟩");
    CHECK(table.entries()[631].text == "⟨B8⟩");
    std::set<std::string> texts;
    for (std::size_t i = 0; i < table.size(); ++i) {
        CHECK(table.entries()[i].id == static_cast<int>(i));
        texts.insert(table.entries()[i].text);
    }
    CHECK(texts.size() == 632);
    CHECK(table.id_of("⟨A4⟩") == 512 + 69);
    CHECK_FALSE(table.lookup("⟨d_512⟩"));
    CHECK_FALSE(table.lookup("d_001"));
}

TEST_CASE("exported vocabulary file") {
    const auto path = std::filesystem::temp_directory_path() / "songtuple_vocab_test.tsv";
    export_vocab(VocabTable::instance(), path);
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string body = buf.str();
    CHECK(body == vocab_tsv(VocabTable::instance()));
    std::vector<std::string> lines;
    std::istringstream ls(body);
    for (std::string l; std::getline(ls, l);) lines.push_back(l);
    REQUIRE(lines.size() == 632);
    CHECK(lines[0] == "⟨d_000⟩\t0");
    CHECK(lines[512] == "⟨C-1⟩\t512");
    CHECK(body.back() == '\n');

    export_vocab(VocabTable::instance(), path);
    std::ifstream again(path, std::ios::binary);
    std::stringstream buf2;
    buf2 << again.rdbuf();
    CHECK(buf2.str() == body);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(export_vocab(VocabTable::instance(), "/nonexistent-dir/x.tsv"), IoError);
}
