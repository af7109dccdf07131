#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace stylemark::utf8 {

/// Byte offset of the first ill-formed sequence, or nullopt if `text` is valid UTF-8.
std::optional<std::size_t> first_invalid(std::string_view text);

struct Decoded {
  char32_t cp;
  std::size_t length;  // bytes consumed
};

/// Decodes the scalar starting at `pos`. Ill-formed input yields U+FFFD, length 1.
Decoded decode(std::string_view text, std::size_t pos);

void append(std::string& out, char32_t cp);

/// True if `pos` starts a scalar (is not a continuation byte).
inline bool is_boundary(std::string_view text, std::size_t pos) {
  return pos >= text.size() || (static_cast<unsigned char>(text[pos]) & 0xC0) != 0x80;
}

std::size_t count_scalars(std::string_view text);

bool is_letter(char32_t cp);
bool is_digit(char32_t cp);
bool is_space(char32_t cp);
char32_t to_lower(char32_t cp);
std::string to_lower(std::string_view text);

/// Apostrophe-like characters allowed inside a word: ' and U+2019.
inline bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == U'’'; }

/// Quote and bracket characters that may close a sentence after its terminator.
bool is_closing_quote(char32_t cp);

/// Sentence-final punctuation, ASCII or CJK full-width.
bool is_sentence_terminator(char32_t cp);

}  // namespace stylemark::utf8
