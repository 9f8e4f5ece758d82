#pragma once

// UTF-8 and whitespace helpers shared by the parser, segmenter and scorer.

#include <cstddef>
#include <string>
#include <string_view>

namespace digestweaver::text {

/// Re-encodes arbitrary bytes as valid UTF-8, replacing every invalid
/// sequence with U+FFFD.
std::string to_valid_utf8(std::string_view bytes);

/// Number of code points in a valid UTF-8 string.
std::size_t length(std::string_view utf8);

/// Longest prefix holding at most `max_code_points` code points.
std::string_view prefix(std::string_view utf8, std::size_t max_code_points);

bool is_unicode_space(char32_t cp);

/// Collapses every run of Unicode whitespace to one ASCII space and trims
/// both ends.
std::string collapse_whitespace(std::string_view utf8);

std::string trim(std::string_view s);

void append_utf8(std::string& out, char32_t cp);

/// Escapes & < > " ' as entities.
std::string html_escape(std::string_view s);

std::string ascii_lower(std::string_view s);

}  // namespace digestweaver::text
