#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace songtuple::utf8 {

/// Decodes one code point starting at `pos`. On success advances `pos`; on
/// malformed input returns nullopt and leaves `pos` unchanged.
std::optional<char32_t> decode(std::string_view text, std::size_t& pos);

void append(std::string& out, char32_t cp);

bool is_valid(std::string_view text);

/// Splits into code points, each re-encoded as its own string. Throws
/// std::invalid_argument on malformed UTF-8.
std::vector<std::string> code_points(std::string_view text);

/// CJK unified ideographs (base block, extension A, compatibility, extensions B+).
bool is_han(char32_t cp) noexcept;

bool contains_han(std::string_view text);

bool is_space(char32_t cp) noexcept;

}  // namespace songtuple::utf8
