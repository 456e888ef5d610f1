#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace credence {

// Trim ASCII whitespace from both ends.
std::string trim(std::string_view s);

// Substitute each "{name}" placeholder with its value in a single pass over
// the template. Values are spliced verbatim and never re-scanned, so braces
// inside substituted text (or literal braces in the template that do not
// match a known placeholder) survive untouched.
std::string substitute(std::string_view tmpl,
                       const std::vector<std::pair<std::string, std::string>>& values);

// English number word for small counts ("one".."twelve"), digits otherwise.
std::string number_word(int n);

// FNV-1a 64-bit over bytes; stable across platforms and runs.
std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 14695981039346656037ULL);
std::uint64_t fnv1a_mix(std::uint64_t h, std::uint64_t v);

// Case-insensitive substring search.
bool contains_ci(std::string_view haystack, std::string_view needle);

// Case-insensitive search requiring non-alphanumeric characters (or the text
// boundary) on both sides of the match.
bool contains_word_ci(std::string_view haystack, std::string_view needle);

// Whitespace-delimited token count.
std::size_t word_count(std::string_view s);

// Lowercased copy (ASCII).
std::string to_lower(std::string_view s);

} // namespace credence
