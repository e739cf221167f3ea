#include "botdetect/unicode.hpp"

#include <algorithm>
#include <array>

namespace botdetect {

namespace {

struct Range {
  char32_t lo, hi;
};

bool in_ranges(char32_t cp, const Range* ranges, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (cp >= ranges[i].lo && cp <= ranges[i].hi) return true;
  }
  return false;
}

// Compact subset of the Unicode White_Space property.
constexpr Range kWhitespace[] = {
    {0x0009, 0x000D}, {0x0020, 0x0020}, {0x0085, 0x0085}, {0x00A0, 0x00A0},
    {0x1680, 0x1680}, {0x2000, 0x200A}, {0x2028, 0x2029}, {0x202F, 0x202F},
    {0x205F, 0x205F}, {0x3000, 0x3000},
};

// Uppercase letters: ASCII, Latin-1 (minus multiplication sign), Greek,
// Cyrillic. Latin Extended-A alternates case per code point and is handled
// separately.
constexpr Range kUppercase[] = {
    {U'A', U'Z'},     {0x00C0, 0x00D6}, {0x00D8, 0x00DE},
    {0x0391, 0x03A1}, {0x03A3, 0x03AB}, {0x0400, 0x042F},
};

constexpr Range kLowercase[] = {
    {U'a', U'z'},     {0x00DF, 0x00F6}, {0x00F8, 0x00FF},
    {0x03B1, 0x03C9}, {0x0430, 0x045F},
};

// Decimal digits: ASCII plus the most common decimal-digit blocks.
constexpr Range kDigits[] = {
    {U'0', U'9'},     {0x0660, 0x0669}, {0x06F0, 0x06F9},
    {0x0966, 0x096F}, {0x09E6, 0x09EF}, {0x0E50, 0x0E59},
    {0xFF10, 0xFF19},
};

// Emoji-presentation blocks: emoticons, pictographs, transport, symbols,
// flags, plus the handful of legacy symbols rendered as emoji.
constexpr Range kEmoji[] = {
    {0x231A, 0x231B}, {0x23E9, 0x23EC}, {0x23F0, 0x23F0}, {0x23F3, 0x23F3},
    {0x25FD, 0x25FE}, {0x2614, 0x2615}, {0x2648, 0x2653}, {0x267F, 0x267F},
    {0x2693, 0x2693}, {0x26A1, 0x26A1}, {0x26AA, 0x26AB}, {0x26BD, 0x26BE},
    {0x26C4, 0x26C5}, {0x26CE, 0x26CE}, {0x26D4, 0x26D4}, {0x26EA, 0x26EA},
    {0x26F2, 0x26F3}, {0x26F5, 0x26F5}, {0x26FA, 0x26FA}, {0x26FD, 0x26FD},
    {0x2705, 0x2705}, {0x270A, 0x270B}, {0x2728, 0x2728}, {0x274C, 0x274C},
    {0x274E, 0x274E}, {0x2753, 0x2755}, {0x2757, 0x2757}, {0x2795, 0x2797},
    {0x27B0, 0x27B0}, {0x27BF, 0x27BF}, {0x2B1B, 0x2B1C}, {0x2B50, 0x2B50},
    {0x2B55, 0x2B55}, {0x1F004, 0x1F004}, {0x1F0CF, 0x1F0CF},
    {0x1F18E, 0x1F18E}, {0x1F191, 0x1F19A}, {0x1F201, 0x1F201},
    {0x1F21A, 0x1F21A}, {0x1F22F, 0x1F22F}, {0x1F232, 0x1F236},
    {0x1F238, 0x1F23A}, {0x1F250, 0x1F251}, {0x1F300, 0x1F5FF},
    {0x1F600, 0x1F64F}, {0x1F680, 0x1F6FF}, {0x1F7E0, 0x1F7EB},
    {0x1F90C, 0x1F9FF}, {0x1FA70, 0x1FAFF},
};

// Caseless letter scripts treated as alphanumeric (never punctuation).
constexpr Range kOtherLetters[] = {
    {0x05D0, 0x05EA},  // Hebrew
    {0x0620, 0x064A},  // Arabic
    {0x0905, 0x0939},  // Devanagari
    {0x0E01, 0x0E2E},  // Thai
    {0x3041, 0x3096},  // Hiragana
    {0x30A1, 0x30FA},  // Katakana
    {0x4E00, 0x9FFF},  // CJK Unified
    {0xAC00, 0xD7A3},  // Hangul
};

bool latin_ext_a(char32_t cp) { return cp >= 0x0100 && cp <= 0x017F; }

// In Latin Extended-A the even code point of each pair is uppercase,
// with two irregular runs (0x0138..0x0149, 0x0178..0x017F).
bool latin_ext_a_upper(char32_t cp) {
  if (cp == 0x0138 || cp == 0x0149) return false;  // kra, apostrophe-n
  if (cp >= 0x0139 && cp <= 0x0148) return (cp % 2) == 1;
  if (cp == 0x0178 || cp == 0x0179 || cp == 0x017B || cp == 0x017D) return true;
  if (cp >= 0x0179) return false;
  return (cp % 2) == 0;
}

}  // namespace

std::vector<char32_t> utf8_decode(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  std::size_t i = 0;
  const auto n = text.size();
  while (i < n) {
    unsigned char b0 = static_cast<unsigned char>(text[i]);
    char32_t cp = 0xFFFD;
    std::size_t len = 1;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + len > n) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      unsigned char bk = static_cast<unsigned char>(text[i + k]);
      if ((bk & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (bk & 0x3F);
    }
    if (!ok || cp > 0x10FFFF || (len == 2 && cp < 0x80) ||
        (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000)) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string utf8_encode(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

bool is_whitespace(char32_t cp) {
  return in_ranges(cp, kWhitespace, std::size(kWhitespace));
}

bool is_digit(char32_t cp) { return in_ranges(cp, kDigits, std::size(kDigits)); }

bool is_emoji(char32_t cp) { return in_ranges(cp, kEmoji, std::size(kEmoji)); }

bool is_letter(char32_t cp) {
  if (in_ranges(cp, kUppercase, std::size(kUppercase))) return true;
  if (in_ranges(cp, kLowercase, std::size(kLowercase))) return true;
  if (latin_ext_a(cp)) return true;
  return in_ranges(cp, kOtherLetters, std::size(kOtherLetters));
}

CharClass classify_char(char32_t cp) {
  if (is_whitespace(cp)) return CharClass::Whitespace;
  if (is_emoji(cp)) return CharClass::Emoji;
  if (is_digit(cp)) return CharClass::Digit;
  if (in_ranges(cp, kUppercase, std::size(kUppercase))) return CharClass::Uppercase;
  if (in_ranges(cp, kLowercase, std::size(kLowercase))) return CharClass::Lowercase;
  if (latin_ext_a(cp)) {
    return latin_ext_a_upper(cp) ? CharClass::Uppercase : CharClass::Lowercase;
  }
  if (in_ranges(cp, kOtherLetters, std::size(kOtherLetters))) {
    return CharClass::OtherLetter;
  }
  return CharClass::Punctuation;
}

char32_t to_lower(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 32;
  if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 32;
  if (cp >= 0x0391 && cp <= 0x03AB && cp != 0x03A2) return cp + 32;
  if (cp >= 0x0410 && cp <= 0x042F) return cp + 32;
  if (cp >= 0x0400 && cp <= 0x040F) return cp + 80;
  if (latin_ext_a(cp) && classify_char(cp) == CharClass::Uppercase) {
    if (cp == 0x0178) return 0x00FF;
    if (cp >= 0x0139 && cp <= 0x0148) return cp + 1;
    return cp + 1;
  }
  return cp;
}

}  // namespace botdetect
