#pragma once

#include <string>
#include <string_view>

#include "songtuple/song_model.hpp"

namespace songtuple {

inline constexpr std::string_view kLyricHeader = "The following is the lyrics:";
inline constexpr std::string_view kMelodyHeader = "The following is the melody:";
inline constexpr std::string_view kPairedHeader = "The following is a song with both lyrics and melody:";

std::string_view header_for(EntryKind kind) noexcept;

/// "first".."twentieth", then "21st", "22nd", "111th", ...
std::string ordinal(int n);

/// Renders the LLM-facing document:
///
///     The following is a song with both lyrics and melody:
///     The first line: love,⟨C4⟩,⟨d_169⟩,⟨d_000⟩|you,⟨D4⟩,⟨d_233⟩,⟨d_000⟩
///
/// Throws InvalidEntry when validate_entry reports problems.
std::string serialize(const SongEntry& entry);

/// Renders a single tuple without validation.
std::string serialize_tuple(const SongTuple& tuple, EntryKind kind);

/// Inverse of serialize. The kind comes from the header; the language is
/// inferred from the words (Han -> Chinese, other words -> English, none ->
/// Unspecified). Throws ParseError on the first problem found.
SongEntry parse(std::string_view text);

}  // namespace songtuple
