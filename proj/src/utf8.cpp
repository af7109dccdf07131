#include "stylemark/utf8.hpp"

namespace stylemark::utf8 {

namespace {

// Expected sequence length from the lead byte, 0 for an invalid lead.
int sequence_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if (lead >= 0xC2 && lead <= 0xDF) return 2;
  if (lead >= 0xE0 && lead <= 0xEF) return 3;
  if (lead >= 0xF0 && lead <= 0xF4) return 4;
  return 0;
}

bool is_cont(unsigned char b) { return (b & 0xC0) == 0x80; }

// Returns sequence length if well-formed at pos, else 0.
std::size_t well_formed(std::string_view s, std::size_t pos, char32_t* out) {
  const auto lead = static_cast<unsigned char>(s[pos]);
  const int len = sequence_length(lead);
  if (len == 0 || pos + len > s.size()) return 0;
  if (len == 1) {
    *out = lead;
    return 1;
  }
  const auto b1 = static_cast<unsigned char>(s[pos + 1]);
  if (!is_cont(b1)) return 0;
  // Overlong / surrogate / out-of-range exclusions on the second byte.
  if (lead == 0xE0 && b1 < 0xA0) return 0;
  if (lead == 0xED && b1 > 0x9F) return 0;
  if (lead == 0xF0 && b1 < 0x90) return 0;
  if (lead == 0xF4 && b1 > 0x8F) return 0;
  char32_t cp = lead & (0x7F >> len);
  for (int i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if (!is_cont(b)) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  *out = cp;
  return static_cast<std::size_t>(len);
}

}  // namespace

std::optional<std::size_t> first_invalid(std::string_view text) {
  std::size_t pos = 0;
  char32_t cp = 0;
  while (pos < text.size()) {
    const std::size_t n = well_formed(text, pos, &cp);
    if (n == 0) return pos;
    pos += n;
  }
  return std::nullopt;
}

Decoded decode(std::string_view text, std::size_t pos) {
  char32_t cp = 0;
  const std::size_t n = well_formed(text, pos, &cp);
  if (n == 0) return {U'�', 1};
  return {cp, n};
}

void append(std::string& out, char32_t cp) {
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
}

std::size_t count_scalars(std::string_view text) {
  std::size_t n = 0;
  for (std::size_t pos = 0; pos < text.size(); pos += decode(text, pos).length) ++n;
  return n;
}

bool is_letter(char32_t cp) {
  if ((cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z')) return true;
  if (cp < 0xC0) return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
  if (cp <= 0x24F) return cp != 0xD7 && cp != 0xF7;  // Latin-1 + Latin Extended-A/B
  if (cp >= 0x370 && cp <= 0x3FF) return cp != 0x37E && cp != 0x387;  // Greek
  if (cp >= 0x400 && cp <= 0x52F) return true;                         // Cyrillic
  if (cp >= 0x1E00 && cp <= 0x1EFF) return true;                       // Latin Extended Additional
  if (cp >= 0x3040 && cp <= 0x30FF) return true;                       // kana
  if (cp >= 0x3400 && cp <= 0x4DBF) return true;                       // CJK Extension A
  if (cp >= 0x4E00 && cp <= 0x9FFF) return true;                       // CJK Unified
  if (cp >= 0xAC00 && cp <= 0xD7AF) return true;                       // Hangul
  return false;
}

bool is_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }

bool is_space(char32_t cp) {
  switch (cp) {
    case U' ':
    case U'\t':
    case U'\n':
    case U'\r':
    case U'\v':
    case U'\f':
    case 0x85:
    case 0xA0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

char32_t to_lower(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 32;
  if ((cp >= 0xC0 && cp <= 0xDE) && cp != 0xD7) return cp + 32;
  if (cp >= 0x100 && cp <= 0x17F && cp != 0x130 && cp != 0x131 && cp != 0x138 && cp != 0x149 &&
      cp != 0x17F) {
    // Latin Extended-A alternates upper/lower, with a parity shift in 0x139..0x148 and 0x179..0x17E.
    const bool odd_upper = (cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E);
    const bool is_upper = odd_upper ? (cp % 2 == 1) : (cp % 2 == 0);
    if (cp == 0x178) return 0xFF;
    return is_upper ? cp + 1 : cp;
  }
  if (cp >= 0x391 && cp <= 0x3AB && cp != 0x3A2) return cp + 32;  // Greek capitals
  if (cp >= 0x410 && cp <= 0x42F) return cp + 32;                  // Cyrillic capitals
  if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
  return cp;
}

std::string to_lower(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t pos = 0; pos < text.size();) {
    const auto d = decode(text, pos);
    if (d.cp < 0x80) {
      out.push_back(static_cast<char>(to_lower(d.cp)));
    } else {
      append(out, to_lower(d.cp));
    }
    pos += d.length;
  }
  return out;
}

bool is_closing_quote(char32_t cp) {
  switch (cp) {
    case U'"':
    case U'\'':
    case U')':
    case U']':
    case U'’':
    case U'”':
    case U'»':
    case U'」':
    case U'』':
    case U'）':
    case U'】':
      return true;
    default:
      return false;
  }
}

bool is_sentence_terminator(char32_t cp) {
  switch (cp) {
    case U'.':
    case U'!':
    case U'?':
    case U'。':
    case U'！':
    case U'？':
    case U'…':
      return true;
    default:
      return false;
  }
}

}  // namespace stylemark::utf8
