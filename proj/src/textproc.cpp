#include "stylemark/textproc.hpp"

#include <algorithm>
#include <array>

#include "stylemark/corpus.hpp"
#include "stylemark/embedded_data.hpp"
#include "stylemark/error.hpp"
#include "stylemark/utf8.hpp"

namespace stylemark {

namespace {

bool is_hyphen(char32_t cp) { return cp == U'-' || cp == U'‐'; }

std::string fold(std::string_view surface) {
  std::string out;
  out.reserve(surface.size());
  for (std::size_t pos = 0; pos < surface.size();) {
    const auto d = utf8::decode(surface, pos);
    utf8::append(out, utf8::is_apostrophe(d.cp) ? U'\'' : utf8::to_lower(d.cp));
    pos += d.length;
  }
  return out;
}

bool ends_with(std::string_view s, std::string_view suffix) { return s.ends_with(suffix); }

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Calls fn(line_number, line) for every non-blank, non-comment line.
template <typename Fn>
void for_each_data_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    ++line_no;
    const auto line = strip(text.substr(start, nl - start));
    if (!line.empty() && !line.starts_with('#')) fn(line_no, line);
    start = nl + 1;
  }
}

PosTag parse_tag(std::string_view text) {
  if (text == "Noun") return PosTag::Noun;
  if (text == "Verb") return PosTag::Verb;
  if (text == "Adjective") return PosTag::Adjective;
  if (text == "Pronoun") return PosTag::Pronoun;
  if (text == "Other") return PosTag::Other;
  throw DataError("unknown POS tag '" + std::string(text) + "'");
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto d = utf8::decode(text, pos);
    if (utf8::is_space(d.cp)) {
      pos += d.length;
      continue;
    }
    if (utf8::is_letter(d.cp)) {
      const std::size_t start = pos;
      std::size_t letters = 0;
      while (pos < text.size()) {
        const auto c = utf8::decode(text, pos);
        if (utf8::is_letter(c.cp)) {
          ++letters;
          pos += c.length;
          continue;
        }
        if ((utf8::is_apostrophe(c.cp) || is_hyphen(c.cp)) && pos + c.length < text.size() &&
            utf8::is_letter(utf8::decode(text, pos + c.length).cp)) {
          pos += c.length;
          continue;
        }
        break;
      }
      auto surface = std::string(text.substr(start, pos - start));
      auto lower = fold(surface);
      tokens.push_back({std::move(surface), std::move(lower), true, TokenKind::Word, letters});
      continue;
    }
    if (utf8::is_digit(d.cp)) {
      const std::size_t start = pos;
      while (pos < text.size()) {
        const char c = text[pos];
        if (c >= '0' && c <= '9') {
          ++pos;
        } else if ((c == '.' || c == ',') && pos + 1 < text.size() && text[pos + 1] >= '0' && text[pos + 1] <= '9') {
          ++pos;
        } else {
          break;
        }
      }
      auto surface = std::string(text.substr(start, pos - start));
      tokens.push_back({surface, surface, false, TokenKind::Number, 0});
      continue;
    }
    auto surface = std::string(text.substr(pos, d.length));
    tokens.push_back({surface, surface, false, TokenKind::Punct, 0});
    pos += d.length;
  }
  return tokens;
}

std::size_t Sentence::word_count() const {
  return static_cast<std::size_t>(std::count_if(tokens.begin(), tokens.end(), [](const Token& t) { return t.is_word; }));
}

namespace {

constexpr std::array<std::string_view, 12> kAbbreviations = {"mr", "mrs", "ms", "dr", "st", "vs",
                                                             "e.g", "i.e", "prof", "jr", "sr", "mt"};

bool is_opening_punct(char32_t cp) {
  return cp == U'"' || cp == U'\'' || cp == U'(' || cp == U'[' || cp == U'‘' || cp == U'“' || cp == U'«';
}

// True if the word ending right before `dot` is a known abbreviation.
bool abbreviation_before(std::string_view text, std::size_t dot) {
  std::size_t start = dot;
  while (start > 0) {
    std::size_t prev = start - 1;
    while (prev > 0 && !utf8::is_boundary(text, prev)) --prev;
    if (utf8::is_space(utf8::decode(text, prev).cp)) break;
    start = prev;
  }
  auto word = text.substr(start, dot - start);
  while (!word.empty()) {
    const auto d = utf8::decode(word, 0);
    if (!is_opening_punct(d.cp)) break;
    word.remove_prefix(d.length);
  }
  const auto lower = utf8::to_lower(word);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), lower) != kAbbreviations.end();
}

}  // namespace

std::vector<Sentence> split_sentences(std::string_view text) {
  std::vector<std::string_view> spans;
  std::size_t start = 0;
  std::size_t pos = 0;
  auto flush = [&](std::size_t end) {
    if (end > start) spans.push_back(text.substr(start, end - start));
    start = end;
  };
  while (pos < text.size()) {
    const auto d = utf8::decode(text, pos);
    if (d.cp == U'\n') {
      flush(pos);
      pos += d.length;
      start = pos;
      continue;
    }
    if (!utf8::is_sentence_terminator(d.cp)) {
      pos += d.length;
      continue;
    }
    const std::size_t first = pos;
    std::size_t q = pos;
    std::size_t run = 0;
    while (q < text.size()) {
      const auto t = utf8::decode(text, q);
      if (!utf8::is_sentence_terminator(t.cp)) break;
      q += t.length;
      ++run;
    }
    while (q < text.size()) {
      const auto c = utf8::decode(text, q);
      if (!utf8::is_closing_quote(c.cp)) break;
      q += c.length;
    }
    const bool at_break = q >= text.size() || utf8::is_space(utf8::decode(text, q).cp);
    const bool cjk = d.cp >= 0x80 && d.cp != U'…';
    const bool abbreviation = run == 1 && text[first] == '.' && abbreviation_before(text, first);
    // A lowercase word after the mark continues the sentence ("Why?" she asked.).
    std::size_t next = q;
    while (next < text.size() && (text[next] == ' ' || text[next] == '\t')) ++next;
    const bool continues = !cjk && next < text.size() && text[next] >= 'a' && text[next] <= 'z';
    if ((at_break || cjk) && !abbreviation && !continues) flush(q);
    pos = q;
  }
  flush(text.size());

  std::vector<Sentence> sentences;
  std::string pending;  // word-less text waiting to be attached
  for (auto span : spans) {
    auto tokens = tokenize(span);
    if (tokens.empty()) continue;
    const bool has_word = std::any_of(tokens.begin(), tokens.end(), [](const Token& t) { return t.is_word; });
    // Trim surrounding whitespace from the stored text.
    std::size_t b = 0;
    std::size_t e = span.size();
    while (b < e && utf8::is_space(utf8::decode(span, b).cp)) b += utf8::decode(span, b).length;
    while (e > b && (span[e - 1] == ' ' || span[e - 1] == '\t' || span[e - 1] == '\r')) --e;
    const auto trimmed = span.substr(b, e - b);
    if (!has_word) {
      if (!sentences.empty() && pending.empty()) {
        auto& last = sentences.back();
        last.text += ' ';
        last.text += trimmed;
        last.tokens.insert(last.tokens.end(), tokens.begin(), tokens.end());
      } else {
        if (!pending.empty()) pending += ' ';
        pending += trimmed;
      }
      continue;
    }
    Sentence s;
    if (!pending.empty()) {
      s.text = pending + ' ';
      s.tokens = tokenize(pending);
      pending.clear();
    }
    s.text += trimmed;
    s.tokens.insert(s.tokens.end(), tokens.begin(), tokens.end());
    sentences.push_back(std::move(s));
  }
  if (!pending.empty()) sentences.push_back({pending, tokenize(pending), std::nullopt});
  return sentences;
}

std::string_view to_string(PosTag tag) {
  switch (tag) {
    case PosTag::Noun:
      return "Noun";
    case PosTag::Verb:
      return "Verb";
    case PosTag::Adjective:
      return "Adjective";
    case PosTag::Pronoun:
      return "Pronoun";
    case PosTag::Other:
      return "Other";
  }
  return "Other";
}

LexiconTagger::LexiconTagger(std::string_view closed_class_tsv, std::string_view open_class_tsv) {
  for_each_data_line(closed_class_tsv, [&](std::size_t line_no, std::string_view line) {
    const auto fields = split_tabs(line);
    if (fields.size() != 2) throw DataError("closed-class table line " + std::to_string(line_no) + ": expected 2 fields");
    closed_.emplace(std::string(fields[0]), parse_tag(fields[1]));
  });
  for_each_data_line(open_class_tsv, [&](std::size_t line_no, std::string_view line) {
    const auto fields = split_tabs(line);
    if (fields.size() != 3) throw DataError("open-class table line " + std::to_string(line_no) + ": expected 3 fields");
    Entry entry{parse_tag(fields[1]), {}};
    std::string_view rest = fields[2];
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      entry.possible.push_back(parse_tag(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    open_.emplace(std::string(fields[0]), std::move(entry));
  });
}

const LexiconTagger& LexiconTagger::builtin() {
  static const LexiconTagger tagger(data::closed_class_tsv, data::pos_lexicon_tsv);
  return tagger;
}

namespace {

bool has_verbal_suffix(std::string_view w) {
  return (w.size() >= 5 && ends_with(w, "ing")) || (w.size() >= 4 && ends_with(w, "ed"));
}

bool contains(const std::vector<PosTag>& tags, PosTag tag) {
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

bool in(std::string_view word, std::initializer_list<std::string_view> set) {
  return std::find(set.begin(), set.end(), word) != set.end();
}

bool is_modal_or_to(std::string_view w) {
  return in(w, {"to", "will", "would", "shall", "should", "can", "could", "may", "might", "must", "do", "does",
                "did", "don't", "doesn't", "didn't", "won't", "can't", "cannot", "couldn't", "wouldn't",
                "shouldn't", "let"});
}

bool is_subject_pronoun(std::string_view w) {
  return in(w, {"i", "you", "he", "she", "it", "we", "they", "who"});
}

bool is_be(std::string_view w) {
  return in(w, {"be", "am", "is", "are", "was", "were", "been", "being", "isn't", "wasn't", "aren't", "weren't"});
}

bool is_have(std::string_view w) { return in(w, {"have", "has", "had", "having", "hasn't", "haven't", "hadn't"}); }

bool is_determiner(std::string_view w) {
  return in(w, {"the", "a", "an", "this", "that", "these", "those", "my", "your", "his", "her", "its", "our",
                "their", "each", "every", "some", "any", "no", "another", "thy"});
}

PosTag suffix_tag(std::string_view w) {
  if (w.size() > 4 && ends_with(w, "ly")) return PosTag::Other;
  for (auto s : {"tion", "sion", "ness", "ment", "ity", "ship", "hood", "ism", "ance", "ence", "dom"}) {
    if (w.size() > std::string_view(s).size() + 2 && ends_with(w, s)) return PosTag::Noun;
  }
  for (auto s : {"ize", "ise", "ify", "ate"}) {
    if (w.size() > 5 && ends_with(w, s)) return PosTag::Verb;
  }
  if (has_verbal_suffix(w)) return PosTag::Verb;
  for (auto s : {"ous", "ful", "ive", "able", "ible", "al", "ic", "less", "ish"}) {
    if (w.size() > std::string_view(s).size() + 2 && ends_with(w, s)) return PosTag::Adjective;
  }
  return PosTag::Noun;
}

}  // namespace

bool LexiconTagger::can_be_verb(std::string_view lower) const {
  const std::string key(lower);
  if (closed_.contains(key)) return false;
  if (auto it = open_.find(key); it != open_.end()) return contains(it->second.possible, PosTag::Verb);
  return suffix_tag(lower) == PosTag::Verb;
}

PosTag LexiconTagger::tag_one(std::span<const Token> tokens, std::size_t i) const {
  const Token& tok = tokens[i];
  if (!tok.is_word) return PosTag::Other;
  std::string word = tok.lower;
  if (auto it = closed_.find(word); it != closed_.end()) return it->second;
  if (const auto apos = word.find('\''); apos != std::string::npos && apos > 0) {
    // Clitics and possessives take the tag of their base: he's, Qin's, they'll.
    word.resize(apos);
    if (auto it = closed_.find(word); it != closed_.end()) return it->second;
  }

  const Token* prev = i > 0 && tokens[i - 1].is_word ? &tokens[i - 1] : nullptr;
  const Token* next = i + 1 < tokens.size() && tokens[i + 1].is_word ? &tokens[i + 1] : nullptr;
  const std::string_view p = prev ? std::string_view(prev->lower) : std::string_view{};

  auto it = open_.find(word);
  if (it == open_.end()) {
    if (prev && is_modal_or_to(p)) return PosTag::Verb;
    return suffix_tag(word);
  }
  const Entry& e = it->second;
  if (e.possible.size() <= 1 || !prev) return e.fallback;

  const bool verb = contains(e.possible, PosTag::Verb);
  const bool noun = contains(e.possible, PosTag::Noun);
  const bool adj = contains(e.possible, PosTag::Adjective);
  if (is_modal_or_to(p) || is_subject_pronoun(p)) return verb ? PosTag::Verb : e.fallback;
  if (is_be(p)) {
    if (verb && (has_verbal_suffix(word) || e.fallback == PosTag::Verb)) return PosTag::Verb;
    if (adj) return PosTag::Adjective;
    return e.fallback;
  }
  if (is_have(p)) return verb && (ends_with(word, "ed") || ends_with(word, "en") || e.fallback == PosTag::Verb)
                             ? PosTag::Verb
                             : e.fallback;
  if (is_determiner(p)) {
    bool next_nominal = false;
    if (next) {
      auto nit = open_.find(next->lower);
      next_nominal = nit == open_.end() ? !closed_.contains(next->lower) && suffix_tag(next->lower) == PosTag::Noun
                                        : contains(nit->second.possible, PosTag::Noun);
    }
    if (adj && next_nominal) return PosTag::Adjective;
    if (noun) return PosTag::Noun;
    if (adj) return PosTag::Adjective;
  }
  return e.fallback;
}

std::vector<PosTag> LexiconTagger::tag(std::span<const Token> tokens) const {
  std::vector<PosTag> tags;
  tags.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) tags.push_back(tag_one(tokens, i));
  return tags;
}

std::vector<std::pair<Token, PosTag>> pos_tag(std::span<const Token> tokens) {
  const auto tags = LexiconTagger::builtin().tag(tokens);
  std::vector<std::pair<Token, PosTag>> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) out.emplace_back(tokens[i], tags[i]);
  return out;
}

SentenceClassifier::SentenceClassifier(std::vector<std::string> subordinators, const LexiconTagger& tagger)
    : subordinators_(std::make_move_iterator(subordinators.begin()), std::make_move_iterator(subordinators.end())),
      tagger_(&tagger) {}

const SentenceClassifier& SentenceClassifier::builtin() {
  static const SentenceClassifier classifier(parse_word_list(data::subordinators_txt), LexiconTagger::builtin());
  return classifier;
}

bool SentenceClassifier::is_participle(const Token& token) const {
  return token.is_word && has_verbal_suffix(token.lower) && tagger_->can_be_verb(token.lower);
}

SentenceKind SentenceClassifier::classify(const Sentence& sentence) const {
  const auto& tokens = sentence.tokens;
  std::size_t first_word = tokens.size();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].is_word) {
      first_word = i;
      break;
    }
  }
  if (first_word == tokens.size()) return SentenceKind::Simple;

  const auto tags = tagger_->tag(tokens);
  const bool question = std::any_of(tokens.begin(), tokens.end(), [](const Token& t) { return t.surface == "?"; });
  // A finite verb before the next punctuation mark means a clause follows.
  const auto clause_follows = [&](std::size_t i) {
    for (std::size_t j = i + 1; j < tokens.size() && tokens[j].kind != TokenKind::Punct; ++j) {
      if (tags[j] == PosTag::Verb || is_be(tokens[j].lower) || is_have(tokens[j].lower) ||
          is_modal_or_to(tokens[j].lower)) {
        return true;
      }
    }
    return false;
  };
  for (std::size_t i = first_word; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (!t.is_word || !subordinators_.contains(t.lower)) continue;
    // Capitalised mid-sentence it is part of a title or name, not a clause marker.
    const bool capitalised = t.surface != t.lower;
    if (capitalised && i != first_word) continue;
    // Sentence-initial wh-word of a direct question.
    if (i == first_word && question && in(t.lower, {"who", "whom", "whose", "which", "when", "where", "whether"})) {
      continue;
    }
    // "that" before a noun or adjective is a determiner, unless it follows a noun ("the legend that people tell").
    if (t.lower == "that" && i + 1 < tokens.size() &&
        (tags[i + 1] == PosTag::Noun || tags[i + 1] == PosTag::Adjective) &&
        (i == first_word || tags[i - 1] != PosTag::Noun)) {
      continue;
    }
    // Words that double as prepositions need a clause after them.
    if (in(t.lower, {"after", "before", "since", "until", "till", "as", "while", "that"}) && !clause_follows(i)) {
      continue;
    }
    return SentenceKind::Complex;
  }

  const auto is_comma = [](const Token& t) { return t.surface == "," || t.surface == "，"; };
  if (is_participle(tokens[first_word]) &&
      std::any_of(tokens.begin() + static_cast<std::ptrdiff_t>(first_word) + 1, tokens.end(), is_comma)) {
    return SentenceKind::Complex;
  }
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (is_comma(tokens[i]) && is_participle(tokens[i + 1])) return SentenceKind::Complex;
  }
  return SentenceKind::Simple;
}

SentenceKind classify_sentence(const Sentence& sentence) { return SentenceClassifier::builtin().classify(sentence); }

std::string_view to_string(LexiconKind kind) {
  switch (kind) {
    case LexiconKind::FunctionWords:
      return "function_words";
    case LexiconKind::TransitionWords:
      return "transition_words";
    case LexiconKind::Pronouns:
      return "pronouns";
    case LexiconKind::EmotionWords:
      return "emotion_words";
  }
  return "function_words";
}

std::vector<std::string> parse_word_list(std::string_view text) {
  std::vector<std::string> words;
  for_each_data_line(text, [&](std::size_t, std::string_view line) { words.push_back(fold(line)); });
  return words;
}

Lexicon parse_lexicon(std::string_view text, LexiconKind kind, std::string_view source) {
  Lexicon lex{kind, {}};
  auto malformed = [&](std::size_t line_no, std::string_view why) {
    return DataError(std::string(source) + ":" + std::to_string(line_no) + ": malformed lexicon line (" +
                     std::string(why) + ")");
  };
  for_each_data_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto fields = split_tabs(line);
    if (fields.size() > 3) throw malformed(line_no, "too many fields");
    const auto word = fold(strip(fields[0]));
    if (word.empty()) throw malformed(line_no, "empty word");
    if (word.find_first_of(" \t") != std::string::npos) throw malformed(line_no, "word contains whitespace");
    if (utf8::first_invalid(word)) throw malformed(line_no, "invalid UTF-8");
    std::string label = fields.size() >= 2 ? std::string(strip(fields[1])) : std::string{};
    if (fields.size() == 3) {
      const auto flag = strip(fields[2]);
      if (flag != "0" && flag != "1") throw malformed(line_no, "association flag must be 0 or 1");
      if (flag == "0") return;
    }
    auto [it, inserted] = lex.entries.emplace(word, label);
    if (!inserted && !label.empty()) {
      auto& existing = it->second;
      const bool present = ("," + existing + ",").find("," + label + ",") != std::string::npos;
      if (existing.empty()) {
        existing = label;
      } else if (!present) {
        existing += "," + label;
      }
    }
  });
  if (lex.entries.empty()) throw DataError(std::string(source) + ": lexicon has no entries");
  return lex;
}

Lexicon load_lexicon(const std::filesystem::path& path, LexiconKind kind) {
  return parse_lexicon(read_file(path), kind, path.string());
}

Lexicon default_lexicon(LexiconKind kind) {
  switch (kind) {
    case LexiconKind::FunctionWords:
      return parse_lexicon(data::function_words_txt, kind, "builtin:function_words");
    case LexiconKind::TransitionWords:
      return parse_lexicon(data::transition_words_txt, kind, "builtin:transition_words");
    case LexiconKind::Pronouns:
      return parse_lexicon(data::pronouns_txt, kind, "builtin:pronouns");
    case LexiconKind::EmotionWords:
      break;
  }
  throw UsageError("no built-in emotion lexicon: supply one with an NRC-style word/label file");
}

}  // namespace stylemark
