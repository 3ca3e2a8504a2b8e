#include <doctest.h>

#include <map>
#include <random>

#include "../support/generators.hpp"
#include "songtuple/duration_codec.hpp"
#include "songtuple/errors.hpp"
#include "songtuple/tuple_text.hpp"

using namespace songtuple;

namespace {

QuantizedNote note(int midi, int dur, int rest) { return {PitchToken::from_midi(midi), dur, rest}; }

std::string parse_reason(std::string_view text) {
    try {
        parse(text);
    } catch (const ParseError& e) {
        return e.reason();
    }
    return "";
}

}  // namespace

TEST_CASE("ordinals") {
    CHECK(ordinal(1) == "first");
    CHECK(ordinal(2) == "second");
    CHECK(ordinal(3) == "third");
    CHECK(ordinal(12) == "twelfth");
    CHECK(ordinal(20) == "twentieth");
    CHECK(ordinal(21) == "21st");
    CHECK(ordinal(22) == "22nd");
    CHECK(ordinal(23) == "23rd");
    CHECK(ordinal(24) == "24th");
    CHECK(ordinal(111) == "111th");
    CHECK(ordinal(112) == "112th");
    CHECK(ordinal(101) == "101st");
}

TEST_CASE("pure lyric document") {
    SongEntry e{EntryKind::PureLyric, Language::English, {{{"my", {}}, {"heart", {}}}}};
    CHECK(serialize(e) == "The following is the lyrics:\nThe first line: my|heart\n");
}

TEST_CASE("pure melody document uses codec bins") {
    // 0.5 s -> bin 169 and -0.3 s -> bin 0 by the high-precision oracle
    REQUIRE(encode_duration(0.5) == 169);
    REQUIRE(encode_duration(-0.3) == 0);
    SongEntry e{EntryKind::PureMelody, Language::Unspecified, {{{std::nullopt, {note(60, 169, 0)}}}}};
    CHECK(serialize(e) == "The following is the melody:\nThe first line: ⟨C4⟩,⟨d_169⟩,⟨d_000⟩\n");
}

TEST_CASE("paired tuple with several notes") {
    SongTuple t{"love", {note(60, 169, 0), note(62, 233, 0)}};
    CHECK(serialize_tuple(t, EntryKind::Paired) == "love,⟨C4⟩,⟨d_169⟩,⟨d_000⟩,⟨D4⟩,⟨d_233⟩,⟨d_000⟩");
    SongEntry e{EntryKind::Paired, Language::English, {{t, {"you", {note(64, 100, 5)}}}, {{"so", {note(65, 1, 2)}}}}};
    CHECK(serialize(e) ==
          "The following is a song with both lyrics and melody:\n"
          "The first line: love,⟨C4⟩,⟨d_169⟩,⟨d_000⟩,⟨D4⟩,⟨d_233⟩,⟨d_000⟩|you,⟨E4⟩,⟨d_100⟩,⟨d_005⟩\n"
          "The second line: so,⟨F4⟩,⟨d_001⟩,⟨d_002⟩\n");
    CHECK(parse(serialize(e)) == e);
}

TEST_CASE("serialize rejects invalid entries") {
    SongEntry e{EntryKind::Paired, Language::English, {{{"word", {}}}}};
    CHECK_THROWS_AS(serialize(e), InvalidEntry);
}

TEST_CASE("chinese documents infer their language") {
    SongEntry e{EntryKind::Paired, Language::Chinese, {{{"我", {note(60, 10, 0)}}, {"爱", {note(62, 20, 0)}}}}};
    const SongEntry back = parse(serialize(e));
    CHECK(back.language == Language::Chinese);
    CHECK(back == e);
}

TEST_CASE("parse errors carry reason and position") {
    const std::string head = "The following is the melody:\n";
    SUBCASE("missing rest bin") {
        try {
            parse(head + "The first line: ⟨C4⟩,⟨d_169⟩\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.reason().starts_with("arity"));
            CHECK(e.line() == 2);
            CHECK(e.column() == 17);
        }
    }
    SUBCASE("bin past the vocabulary") {
        try {
            parse(head + "The first line: ⟨C4⟩,⟨d_512⟩,⟨d_000⟩\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.reason().starts_with("unknown token"));
            CHECK(e.line() == 2);
            CHECK(e.column() == 17 + std::string("⟨C4⟩,").size());
        }
    }
    CHECK(parse_reason("") == "empty document");
    CHECK(parse_reason("The following is nothing:\n") == "unknown header");
    CHECK(parse_reason(head) == "document has no lines");
    CHECK(parse_reason(head + "The first line: ⟨C4⟩,⟨d_169⟩,⟨d_000⟩") == "missing trailing newline");
    CHECK(parse_reason(head + "The second line: ⟨C4⟩,⟨d_169⟩,⟨d_000⟩\n").starts_with("expected line prompt"));
    CHECK(parse_reason(head + "The first line: \n") == "empty line");
    CHECK(parse_reason(head + "The first line: ⟨C4⟩,⟨d_1⟩,⟨d_000⟩||⟨C4⟩,⟨d_1⟩,⟨d_000⟩\n").starts_with("unknown token"));
    CHECK(parse_reason(head + "The first line: ⟨d_001⟩,⟨d_001⟩,⟨d_000⟩\n").starts_with("expected pitch"));
    CHECK(parse_reason(head + "The first line: ⟨C4⟩,⟨C4⟩,⟨d_000⟩\n").starts_with("expected duration"));
    CHECK(parse_reason("The following is the lyrics:\nThe first line: a b\n").starts_with("invalid word"));
    CHECK(parse_reason("The following is the lyrics:\nThe first line: a||b\n") == "empty tuple");
    CHECK(parse_reason("The following is a song with both lyrics and melody:\nThe first line: love\n").starts_with("arity"));
    CHECK(parse_reason("The following is the lyrics:\nThe first line: 你好\n") == "Chinese word must be a single character");
    CHECK(parse_reason("The following is the lyrics:\nThe first line: a\xff\n") == "invalid UTF-8");
    CHECK(parse_reason("The following is the lyrics:\r\nThe first line: a\n") == "unknown header");
    CHECK(parse_reason("The following is the lyrics:\nThe first line: a\n\n") == "expected line prompt 'The second line: '");
}

TEST_CASE("round trip on random entries of every kind") {
    testing::Rng rng(42);
    for (int i = 0; i < 2000; ++i) {
        const SongEntry e = testing::random_entry(rng);
        REQUIRE(validate_entry(e).empty());
        const std::string text = serialize(e);
        const SongEntry back = parse(text);
        CHECK(back == e);
        CHECK(serialize(back) == text);
    }
}

TEST_CASE("serialize is injective on a sample") {
    testing::Rng rng(43);
    std::map<std::string, SongEntry> seen;
    for (int i = 0; i < 500; ++i) {
        const SongEntry e = testing::random_entry(rng);
        auto [it, inserted] = seen.emplace(serialize(e), e);
        if (!inserted) CHECK(it->second == e);
    }
}

TEST_CASE("parser survives arbitrary bytes") {
    testing::Rng rng(44);
    const std::string seed_doc = serialize(testing::random_entry(rng, EntryKind::Paired, Language::Chinese));
    for (int i = 0; i < 5000; ++i) {
        std::string input = seed_doc;
        const int edits = testing::uniform(rng, 1, 6);
        for (int k = 0; k < edits && !input.empty(); ++k) {
            const auto pos = static_cast<std::size_t>(testing::uniform(rng, 0, static_cast<int>(input.size()) - 1));
            switch (testing::uniform(rng, 0, 2)) {
                case 0: input[pos] = static_cast<char>(testing::uniform(rng, 0, 255)); break;
                case 1: input.erase(pos, 1); break;
                default: input.insert(pos, 1, "|,\n⟨"[testing::uniform(rng, 0, 3)]); break;
            }
        }
        try {
            const SongEntry e = parse(input);
            CHECK(validate_entry(e).empty());
        } catch (const ParseError&) {
        }
    }
}
