#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace stylemark {

enum class TokenKind { Word, Number, Punct };

/// A word, number or single punctuation character. `lower` is the case-folded
/// surface with typographic apostrophes folded to '.
struct Token {
  std::string surface;
  std::string lower;
  bool is_word = false;
  TokenKind kind = TokenKind::Punct;
  std::size_t letters = 0;  // letter scalars in the surface

  friend bool operator==(const Token&, const Token&) = default;
};

/// Words are maximal letter runs with internal apostrophes or hyphens
/// ("don't", "Feng-er"); digit runs become one number token; every other
/// non-space scalar is its own punctuation token.
std::vector<Token> tokenize(std::string_view text);

enum class SentenceKind { Simple, Complex };

struct Sentence {
  std::string text;
  std::vector<Token> tokens;
  std::optional<SentenceKind> kind;

  std::size_t word_count() const;
};

/// Splits at runs of . ! ? (and CJK/ellipsis terminators) followed by
/// whitespace or end of text, and at line breaks. Closing quotes stay with the
/// sentence they close; Mr./Mrs./Dr./St./vs./e.g./i.e. do not end a sentence,
/// nor does a Latin mark followed by a lowercase word.
/// Segments without any word are merged into a neighbouring sentence.
std::vector<Sentence> split_sentences(std::string_view text);

enum class PosTag { Noun, Verb, Adjective, Pronoun, Other };

std::string_view to_string(PosTag tag);

class PosTagger {
 public:
  virtual ~PosTagger() = default;
  /// Exactly one tag per input token.
  virtual std::vector<PosTag> tag(std::span<const Token> tokens) const = 0;
};

/// Deterministic tagger: fixed tags for closed-class words, an ambiguity table
/// of common open-class words resolved by the neighbouring words, and suffix
/// rules for everything else (unknown words default to Noun).
class LexiconTagger final : public PosTagger {
 public:
  struct Entry {
    PosTag fallback = PosTag::Noun;
    std::vector<PosTag> possible;
  };

  LexiconTagger(std::string_view closed_class_tsv, std::string_view open_class_tsv);

  static const LexiconTagger& builtin();

  std::vector<PosTag> tag(std::span<const Token> tokens) const override;

  /// True if the word may be a verb: listed as such, or unknown with a verbal suffix.
  bool can_be_verb(std::string_view lower) const;

 private:
  PosTag tag_one(std::span<const Token> tokens, std::size_t i) const;

  std::unordered_map<std::string, PosTag> closed_;
  std::unordered_map<std::string, Entry> open_;
};

std::vector<std::pair<Token, PosTag>> pos_tag(std::span<const Token> tokens);

/// Marks a sentence Complex when it carries a subordinating conjunction or
/// relative pronoun that introduces a clause, or a comma-delimited participle
/// clause. Prepositional uses ("before dawn"), determiner "that" and the
/// opening wh-word of a direct question do not count.
class SentenceClassifier {
 public:
  SentenceClassifier(std::vector<std::string> subordinators, const LexiconTagger& tagger);

  static const SentenceClassifier& builtin();

  SentenceKind classify(const Sentence& sentence) const;

 private:
  bool is_participle(const Token& token) const;

  std::unordered_set<std::string> subordinators_;
  const LexiconTagger* tagger_;
};

SentenceKind classify_sentence(const Sentence& sentence);

enum class LexiconKind { FunctionWords, TransitionWords, Pronouns, EmotionWords };

std::string_view to_string(LexiconKind kind);

/// Word list keyed by lowercase word. Labels are only used by emotion lexicons,
/// where a word with several labels stores them comma-joined.
struct Lexicon {
  LexiconKind kind = LexiconKind::FunctionWords;
  std::map<std::string, std::string> entries;

  bool contains(std::string_view word) const { return entries.find(std::string(word)) != entries.end(); }
};

/// Lines are `word`, `word<TAB>label`, or NRC-style `word<TAB>label<TAB>0|1`;
/// blank lines and `#` comments are ignored.
Lexicon parse_lexicon(std::string_view text, LexiconKind kind, std::string_view source = "<memory>");
Lexicon load_lexicon(const std::filesystem::path& path, LexiconKind kind);

/// Built-in function, transition and pronoun lists. Emotion words have no
/// default and throw UsageError.
Lexicon default_lexicon(LexiconKind kind);

/// Non-comment, non-blank lines of a one-word-per-line list, lowercased.
std::vector<std::string> parse_word_list(std::string_view text);

}  // namespace stylemark
