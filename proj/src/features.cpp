#include "stylemark/features.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <numeric>
#include <ostream>
#include <set>
#include <thread>
#include <unordered_set>

#include "stylemark/csv.hpp"
#include "stylemark/embedded_data.hpp"
#include "stylemark/utf8.hpp"

namespace stylemark {

const std::vector<std::string>& common_bigrams() {
  static const auto list = parse_word_list(data::char_bigrams_txt);
  return list;
}

const std::vector<std::string>& common_trigrams() {
  static const auto list = parse_word_list(data::char_trigrams_txt);
  return list;
}

namespace {

double mean_of(const std::map<std::string, double>& m) {
  if (m.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [_, v] : m) sum += v;
  return sum / static_cast<double>(m.size());
}

std::size_t count_chars(std::string_view text) {
  std::size_t n = 0;
  for (std::size_t pos = 0; pos < text.size();) {
    const auto d = utf8::decode(text, pos);
    if (d.cp != U'\n' && d.cp != U'\r') ++n;
    pos += d.length;
  }
  return n;
}

std::map<std::string, double> ngram_ratios(const std::vector<Token>& tokens, const std::vector<std::string>& list,
                                           std::size_t n) {
  std::map<std::string, std::size_t> counts;
  for (const auto& item : list) counts.emplace(item, 0);
  std::size_t total = 0;
  std::string key;
  for (const auto& tok : tokens) {
    if (!tok.is_word || tok.lower.size() < n) continue;
    for (std::size_t i = 0; i + n <= tok.lower.size(); ++i) {
      key.assign(tok.lower, i, n);
      if (auto it = counts.find(key); it != counts.end()) {
        ++it->second;
        ++total;
      }
    }
  }
  std::map<std::string, double> ratios;
  for (const auto& [item, c] : counts) {
    ratios[item] = total ? static_cast<double>(c) / static_cast<double>(total) : 0.0;
  }
  return ratios;
}

void require_text(const TranslationDoc& doc) {
  if (doc.text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw DataError("empty document " + doc.id().str());
  }
}

}  // namespace

double LexicalVector::word_length_summary() const {
  return std::accumulate(word_length_dist.begin(), word_length_dist.end(), 0.0) /
         static_cast<double>(word_length_dist.size());
}
double LexicalVector::bigram_summary() const { return mean_of(bigram_ratios); }
double LexicalVector::trigram_summary() const { return mean_of(trigram_ratios); }

LexicalVector lexical_features(const TranslationDoc& doc) {
  require_text(doc);
  const auto tokens = tokenize(doc.text);
  LexicalVector v;
  v.char_count = count_chars(doc.text);
  std::unordered_set<std::string> unique;
  std::array<std::size_t, kMaxBinnedWordLength> bins{};
  for (const auto& tok : tokens) {
    if (!tok.is_word) continue;
    ++v.total_words;
    v.word_letters += tok.letters;
    unique.insert(tok.lower);
    if (tok.letters >= 1 && tok.letters <= kMaxBinnedWordLength) ++bins[tok.letters - 1];
  }
  if (v.total_words == 0) throw DataError("document " + doc.id().str() + " contains no words");
  const auto words = static_cast<double>(v.total_words);
  v.unique_words = unique.size();
  v.chars_per_word = static_cast<double>(v.word_letters) / words;
  v.vocab_richness = static_cast<double>(v.unique_words) / words;
  for (std::size_t k = 0; k < bins.size(); ++k) v.word_length_dist[k] = static_cast<double>(bins[k]) / words;
  v.bigram_ratios = ngram_ratios(tokens, common_bigrams(), 2);
  v.trigram_ratios = ngram_ratios(tokens, common_trigrams(), 3);
  return v;
}

SyntacticVector syntactic_features(const TranslationDoc& doc, const Lexicon& function_words,
                                   const Lexicon& transition_words, const SentenceClassifier& classifier) {
  require_text(doc);
  if (function_words.kind != LexiconKind::FunctionWords) throw UsageError("expected a function-word lexicon");
  if (transition_words.kind != LexiconKind::TransitionWords) throw UsageError("expected a transition-word lexicon");

  SyntacticVector v;
  const auto tokens = tokenize(doc.text);
  std::size_t total_words = 0;
  for (const auto& tok : tokens) {
    if (tok.kind == TokenKind::Punct) ++v.punct_count;
    if (!tok.is_word) continue;
    ++total_words;
    if (function_words.contains(tok.lower)) ++v.function_word_count;
    if (transition_words.contains(tok.lower)) ++v.transition_word_count;
  }
  for (const auto& sentence : split_sentences(doc.text)) {
    if (sentence.word_count() == 0) continue;
    ++v.sentence_count;
    if (classifier.classify(sentence) == SentenceKind::Complex) ++v.complex_count;
  }
  if (v.sentence_count == 0 || total_words == 0) {
    throw DataError("document " + doc.id().str() + " has no sentences");
  }
  const auto words = static_cast<double>(total_words);
  const auto sentences = static_cast<double>(v.sentence_count);
  v.sentence_length = words / sentences;
  v.punct_per_char = static_cast<double>(v.punct_count) / static_cast<double>(count_chars(doc.text));
  v.function_word_freq = static_cast<double>(v.function_word_count) / words;
  v.transition_word_freq = static_cast<double>(v.transition_word_count) / words;
  v.complex_pct = static_cast<double>(v.complex_count) / sentences;
  v.simple_pct = static_cast<double>(v.sentence_count - v.complex_count) / sentences;
  return v;
}

std::string_view to_string(ContentCategory category) {
  switch (category) {
    case ContentCategory::Words:
      return "words";
    case ContentCategory::WordBigrams:
      return "word_bigrams";
    case ContentCategory::WordTrigrams:
      return "word_trigrams";
    case ContentCategory::Pronouns:
      return "pronouns";
    case ContentCategory::Nouns:
      return "nouns";
    case ContentCategory::Verbs:
      return "verbs";
    case ContentCategory::Adjectives:
      return "adjectives";
    case ContentCategory::EmotionWords:
      return "emotion_words";
  }
  return "words";
}

ContentCategory parse_category(std::string_view text) {
  std::string key;
  for (char c : text) key.push_back(c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  for (auto category : kAllCategories) {
    if (to_string(category) == key) return category;
  }
  if (key == "emotions" || key == "emotion") return ContentCategory::EmotionWords;
  if (key == "bigrams") return ContentCategory::WordBigrams;
  if (key == "trigrams") return ContentCategory::WordTrigrams;
  throw UsageError("unknown content category '" + std::string(text) + "'");
}

namespace {

ContentCounts count_category(const std::vector<Sentence>& sentences, ContentCategory category,
                             const ContentLexicons& lexicons, const PosTagger& tagger) {
  ContentCounts cc{category, {}, 0, {}};
  auto add = [&](const std::string& item) {
    ++cc.counts[item];
    ++cc.total;
  };
  std::optional<PosTag> wanted;
  if (category == ContentCategory::Nouns) wanted = PosTag::Noun;
  if (category == ContentCategory::Verbs) wanted = PosTag::Verb;
  if (category == ContentCategory::Adjectives) wanted = PosTag::Adjective;

  for (const auto& sentence : sentences) {
    std::vector<const Token*> words;
    for (const auto& t : sentence.tokens) {
      if (t.is_word) words.push_back(&t);
    }
    switch (category) {
      case ContentCategory::Words:
        for (auto* w : words) add(w->lower);
        break;
      case ContentCategory::WordBigrams:
        for (std::size_t i = 0; i + 1 < words.size(); ++i) add(words[i]->lower + "_" + words[i + 1]->lower);
        break;
      case ContentCategory::WordTrigrams:
        for (std::size_t i = 0; i + 2 < words.size(); ++i) {
          add(words[i]->lower + "_" + words[i + 1]->lower + "_" + words[i + 2]->lower);
        }
        break;
      case ContentCategory::Pronouns:
        for (auto* w : words) {
          if (lexicons.pronouns->contains(w->lower)) add(w->lower);
        }
        break;
      case ContentCategory::EmotionWords:
        for (auto* w : words) {
          if (auto it = lexicons.emotion->entries.find(w->lower); it != lexicons.emotion->entries.end()) {
            add(w->lower);
            cc.labels.emplace(w->lower, it->second);
          }
        }
        break;
      case ContentCategory::Nouns:
      case ContentCategory::Verbs:
      case ContentCategory::Adjectives: {
        const auto tags = tagger.tag(sentence.tokens);
        for (std::size_t i = 0; i < tags.size(); ++i) {
          if (tags[i] == *wanted) add(sentence.tokens[i].lower);
        }
        break;
      }
    }
  }
  return cc;
}

void check_lexicons(ContentCategory category, const ContentLexicons& lexicons) {
  if (category == ContentCategory::Pronouns && !lexicons.pronouns) {
    throw UsageError("category pronouns requires a pronoun lexicon");
  }
  if (category == ContentCategory::EmotionWords && !lexicons.emotion) {
    throw UsageError("category emotion_words requires an emotion lexicon");
  }
}

}  // namespace

ContentCounts content_counts(const TranslationDoc& doc, ContentCategory category, const ContentLexicons& lexicons,
                             const PosTagger& tagger) {
  check_lexicons(category, lexicons);
  return count_category(split_sentences(doc.text), category, lexicons, tagger);
}

FeatureVector extract_features(const TranslationDoc& doc, const FeatureConfig& config) {
  FeatureVector fv;
  fv.doc_id = doc.id();
  fv.lexical = lexical_features(doc);
  fv.syntactic = syntactic_features(doc, config.function_words, config.transition_words, *config.classifier);

  const ContentLexicons lexicons{&config.pronouns, config.emotion ? &*config.emotion : nullptr};
  std::vector<ContentCategory> categories = config.categories;
  if (categories.empty()) {
    for (auto c : kAllCategories) {
      if (c != ContentCategory::EmotionWords || config.emotion) categories.push_back(c);
    }
  }
  const auto sentences = split_sentences(doc.text);
  for (auto category : categories) {
    check_lexicons(category, lexicons);
    fv.content.emplace(category, count_category(sentences, category, lexicons, *config.tagger));
  }
  return fv;
}

ExtractResult extract_all(std::span<const TranslationDoc> docs, const FeatureConfig& config) {
  std::vector<std::optional<FeatureVector>> slots(docs.size());
  std::vector<std::string> errors(docs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < docs.size(); i = next++) {
      try {
        slots[i] = extract_features(docs[i], config);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(docs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  ExtractResult result;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (slots[i]) {
      result.vectors.push_back(std::move(*slots[i]));
    } else {
      result.failures.push_back({docs[i].id(), errors[i]});
    }
  }
  return result;
}

namespace {

constexpr ScalarMetric kMetrics[] = {
    {"total_character_counts", "Total character counts", true,
     [](const FeatureVector& f) { return static_cast<double>(f.lexical.char_count); }},
    {"total_words", "Total words", true,
     [](const FeatureVector& f) { return static_cast<double>(f.lexical.total_words); }},
    {"average_character_per_word", "Average character per word", true,
     [](const FeatureVector& f) { return f.lexical.chars_per_word; }},
    {"vocabulary_richness", "Vocabulary richness", true, [](const FeatureVector& f) { return f.lexical.vocab_richness; }},
    {"word_length_frequencies", "Word length frequencies", true,
     [](const FeatureVector& f) { return f.lexical.word_length_summary(); }},
    {"common_bigram_frequencies", "Common bigram frequencies", true,
     [](const FeatureVector& f) { return f.lexical.bigram_summary(); }},
    {"common_trigram_frequencies", "Common trigram frequencies", true,
     [](const FeatureVector& f) { return f.lexical.trigram_summary(); }},
    {"sentence_length", "Sentence length", false, [](const FeatureVector& f) { return f.syntactic.sentence_length; }},
    {"function_words_frequencies", "Function words frequencies", false,
     [](const FeatureVector& f) { return f.syntactic.function_word_freq; }},
    {"transition_words_frequencies", "Transition words frequencies", false,
     [](const FeatureVector& f) { return f.syntactic.transition_word_freq; }},
    {"punctuation_character_frequencies", "Punctuation character frequencies", false,
     [](const FeatureVector& f) { return f.syntactic.punct_per_char; }},
    {"simple_sentence_percentage", "Simple sentence percentage", false,
     [](const FeatureVector& f) { return f.syntactic.simple_pct; }},
    {"complex_sentence_percentage", "Complex sentence percentage", false,
     [](const FeatureVector& f) { return f.syntactic.complex_pct; }},
};

// Raw columns written after the scalar summaries; parse_features_csv reads them back.
std::vector<std::string> raw_columns() {
  std::vector<std::string> cols = {"char_count",     "total_words",          "unique_words",
                                   "word_letters",   "sentence_count",       "complex_count",
                                   "punct_count",    "function_word_count",  "transition_word_count"};
  for (std::size_t k = 1; k <= kMaxBinnedWordLength; ++k) cols.push_back("wl_" + std::to_string(k));
  for (const auto& b : common_bigrams()) cols.push_back("bg_" + b);
  for (const auto& t : common_trigrams()) cols.push_back("tg_" + t);
  return cols;
}

double parse_double(const std::string& s, std::size_t row, const std::string& col) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw DataError("features row " + std::to_string(row) + ", column " + col + ": not a number '" + s + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& s, std::size_t row, const std::string& col) {
  std::size_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw DataError("row " + std::to_string(row) + ", column " + col + ": not a count '" + s + "'");
  }
  return v;
}

}  // namespace

std::span<const ScalarMetric> scalar_metrics() { return kMetrics; }

void write_features_csv(std::ostream& os, std::span<const FeatureVector> vectors) {
  csv::Row header = {"book_id", "variant"};
  for (const auto& m : kMetrics) header.emplace_back(m.key);
  const auto raw = raw_columns();
  header.insert(header.end(), raw.begin(), raw.end());
  os << csv::join(header) << '\n';
  for (const auto& fv : vectors) {
    csv::Row row = {fv.doc_id.book_id, std::string(to_string(fv.doc_id.variant))};
    for (const auto& m : kMetrics) row.push_back(csv::format_real(m.get(fv)));
    const auto& lx = fv.lexical;
    const auto& sx = fv.syntactic;
    for (auto n : {lx.char_count, lx.total_words, lx.unique_words, lx.word_letters, sx.sentence_count, sx.complex_count,
                   sx.punct_count, sx.function_word_count, sx.transition_word_count}) {
      row.push_back(std::to_string(n));
    }
    for (double d : lx.word_length_dist) row.push_back(csv::format_real(d));
    for (const auto& b : common_bigrams()) row.push_back(csv::format_real(lx.bigram_ratios.at(b)));
    for (const auto& t : common_trigrams()) row.push_back(csv::format_real(lx.trigram_ratios.at(t)));
    os << csv::join(row) << '\n';
  }
}

std::vector<FeatureVector> parse_features_csv(std::string_view text) {
  const auto rows = csv::parse(text);
  if (rows.empty()) throw DataError("features file has no header");
  const auto& header = rows[0];
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  auto need = [&](const std::string& name) {
    auto it = col.find(name);
    if (it == col.end()) throw DataError("features file lacks column '" + name + "'");
    return it->second;
  };
  const auto book_col = need("book_id");
  const auto variant_col = need("variant");

  std::vector<FeatureVector> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      throw DataError("features row " + std::to_string(r) + ": expected " + std::to_string(header.size()) +
                      " fields, got " + std::to_string(row.size()));
    }
    auto num = [&](const std::string& name) { return parse_double(row[need(name)], r, name); };
    auto cnt = [&](const std::string& name) { return parse_count(row[need(name)], r, name); };
    FeatureVector fv;
    fv.doc_id = {row[book_col], parse_variant(row[variant_col])};
    auto& lx = fv.lexical;
    auto& sx = fv.syntactic;
    lx.char_count = cnt("char_count");
    lx.total_words = cnt("total_words");
    lx.unique_words = cnt("unique_words");
    lx.word_letters = cnt("word_letters");
    lx.chars_per_word = num("average_character_per_word");
    lx.vocab_richness = num("vocabulary_richness");
    for (std::size_t k = 0; k < kMaxBinnedWordLength; ++k) lx.word_length_dist[k] = num("wl_" + std::to_string(k + 1));
    for (const auto& b : common_bigrams()) lx.bigram_ratios[b] = num("bg_" + b);
    for (const auto& t : common_trigrams()) lx.trigram_ratios[t] = num("tg_" + t);
    sx.sentence_count = cnt("sentence_count");
    sx.complex_count = cnt("complex_count");
    sx.punct_count = cnt("punct_count");
    sx.function_word_count = cnt("function_word_count");
    sx.transition_word_count = cnt("transition_word_count");
    sx.sentence_length = num("sentence_length");
    sx.punct_per_char = num("punctuation_character_frequencies");
    sx.function_word_freq = num("function_words_frequencies");
    sx.transition_word_freq = num("transition_words_frequencies");
    sx.simple_pct = num("simple_sentence_percentage");
    sx.complex_pct = num("complex_sentence_percentage");
    out.push_back(std::move(fv));
  }
  return out;
}

void write_content_csv(std::ostream& os, std::span<const FeatureVector> vectors, ContentCategory category) {
  os << "book_id,variant,item,count\n";
  for (const auto& fv : vectors) {
    auto it = fv.content.find(category);
    if (it == fv.content.end()) continue;
    const csv::Row prefix = {fv.doc_id.book_id, std::string(to_string(fv.doc_id.variant))};
    if (it->second.counts.empty()) {
      // Keep the document visible even when nothing matched.
      os << csv::join({prefix[0], prefix[1], "", "0"}) << '\n';
      continue;
    }
    for (const auto& [item, count] : it->second.counts) {
      os << csv::join({prefix[0], prefix[1], item, std::to_string(count)}) << '\n';
    }
  }
}

std::vector<std::pair<DocId, ContentCounts>> parse_content_csv(std::string_view text, ContentCategory category) {
  const auto rows = csv::parse(text);
  std::vector<std::pair<DocId, ContentCounts>> out;
  std::map<DocId, std::size_t> index;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (r == 0 && !row.empty() && row[0] == "book_id") continue;
    if (row.size() != 4) throw DataError("content row " + std::to_string(r) + ": expected 4 fields");
    DocId id{row[0], parse_variant(row[1])};
    auto [it, inserted] = index.emplace(id, out.size());
    if (inserted) out.push_back({id, ContentCounts{category, {}, 0, {}}});
    auto& cc = out[it->second].second;
    const auto count = parse_count(row[3], r, "count");
    if (row[2].empty()) continue;
    cc.counts[row[2]] += count;
    cc.total += count;
  }
  return out;
}

}  // namespace stylemark
