#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace botdetect {

/// Mutually exclusive character classes used by the name featurizers.
/// Every code point maps to exactly one class, so per-class counts
/// partition the string length.
enum class CharClass {
  Uppercase,
  Lowercase,
  Digit,
  Emoji,
  Whitespace,
  OtherLetter,  // caseless scripts (CJK, Hebrew, ...)
  Punctuation,  // any remaining non-alphanumeric, non-space, non-emoji
};

/// Decodes UTF-8 into code points. Invalid byte sequences decode to
/// U+FFFD and decoding continues at the next byte.
std::vector<char32_t> utf8_decode(std::string_view text);

/// Encodes a single code point back to UTF-8 (used by serialization).
std::string utf8_encode(char32_t cp);

CharClass classify_char(char32_t cp);

bool is_whitespace(char32_t cp);
bool is_letter(char32_t cp);
bool is_digit(char32_t cp);
bool is_emoji(char32_t cp);

/// Lowercases cased letters covered by the classification tables
/// (ASCII, Latin-1/Extended-A, Greek, Cyrillic); other code points
/// pass through unchanged.
char32_t to_lower(char32_t cp);

}  // namespace botdetect
