#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stylemark/corpus.hpp"
#include "stylemark/textproc.hpp"

namespace stylemark {

inline constexpr std::size_t kMaxBinnedWordLength = 15;

/// Character bigrams / trigrams whose within-word ratios are reported.
const std::vector<std::string>& common_bigrams();
const std::vector<std::string>& common_trigrams();

struct LexicalVector {
  std::size_t char_count = 0;   // scalars, line breaks excluded
  std::size_t total_words = 0;
  std::size_t unique_words = 0;
  std::size_t word_letters = 0;  // letters summed over word tokens
  double chars_per_word = 0.0;
  double vocab_richness = 0.0;
  /// Share of words with 1..15 letters; longer words are counted in totals only.
  std::array<double, kMaxBinnedWordLength> word_length_dist{};
  std::map<std::string, double> bigram_ratios;
  std::map<std::string, double> trigram_ratios;

  // Mean over components, a single-number summary for tabular comparison.
  double word_length_summary() const;
  double bigram_summary() const;
  double trigram_summary() const;

  friend bool operator==(const LexicalVector&, const LexicalVector&) = default;
};

struct SyntacticVector {
  std::size_t sentence_count = 0;
  std::size_t complex_count = 0;
  std::size_t punct_count = 0;
  std::size_t function_word_count = 0;
  std::size_t transition_word_count = 0;
  double sentence_length = 0.0;
  double punct_per_char = 0.0;
  double function_word_freq = 0.0;
  double transition_word_freq = 0.0;
  double simple_pct = 0.0;
  double complex_pct = 0.0;

  friend bool operator==(const SyntacticVector&, const SyntacticVector&) = default;
};

enum class ContentCategory { Words, WordBigrams, WordTrigrams, Pronouns, Nouns, Verbs, Adjectives, EmotionWords };

inline constexpr ContentCategory kAllCategories[] = {
    ContentCategory::Words,    ContentCategory::WordBigrams, ContentCategory::WordTrigrams,
    ContentCategory::Pronouns, ContentCategory::Nouns,       ContentCategory::Verbs,
    ContentCategory::Adjectives, ContentCategory::EmotionWords};

std::string_view to_string(ContentCategory category);  // "words", "word_bigrams", ...
ContentCategory parse_category(std::string_view text);

/// Frequency table of one content category in one document.
struct ContentCounts {
  ContentCategory category = ContentCategory::Words;
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  std::map<std::string, std::string> labels;  // emotion labels per item

  friend bool operator==(const ContentCounts&, const ContentCounts&) = default;
};

struct FeatureVector {
  DocId doc_id;
  LexicalVector lexical;
  SyntacticVector syntactic;
  std::map<ContentCategory, ContentCounts> content;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

LexicalVector lexical_features(const TranslationDoc& doc);

SyntacticVector syntactic_features(const TranslationDoc& doc, const Lexicon& function_words,
                                   const Lexicon& transition_words,
                                   const SentenceClassifier& classifier = SentenceClassifier::builtin());

struct ContentLexicons {
  const Lexicon* pronouns = nullptr;
  const Lexicon* emotion = nullptr;
};

ContentCounts content_counts(const TranslationDoc& doc, ContentCategory category, const ContentLexicons& lexicons,
                             const PosTagger& tagger = LexiconTagger::builtin());

struct FeatureConfig {
  Lexicon function_words = default_lexicon(LexiconKind::FunctionWords);
  Lexicon transition_words = default_lexicon(LexiconKind::TransitionWords);
  Lexicon pronouns = default_lexicon(LexiconKind::Pronouns);
  std::optional<Lexicon> emotion;
  const PosTagger* tagger = &LexiconTagger::builtin();
  const SentenceClassifier* classifier = &SentenceClassifier::builtin();
  /// Empty means every category whose lexicon is available.
  std::vector<ContentCategory> categories;
  unsigned threads = 1;
};

/// Every feature of one document; throws DataError on an empty document.
FeatureVector extract_features(const TranslationDoc& doc, const FeatureConfig& config);

struct ExtractFailure {
  DocId doc_id;
  std::string message;
};

struct ExtractResult {
  std::vector<FeatureVector> vectors;  // input order, failed docs omitted
  std::vector<ExtractFailure> failures;
};

ExtractResult extract_all(std::span<const TranslationDoc> docs, const FeatureConfig& config);

/// Lexical and syntactic scalars in report order.
struct ScalarMetric {
  std::string_view key;
  std::string_view label;
  bool lexical;
  double (*get)(const FeatureVector&);
};

std::span<const ScalarMetric> scalar_metrics();

/// Feature table: one row per document, stable header.
void write_features_csv(std::ostream& os, std::span<const FeatureVector> vectors);
std::vector<FeatureVector> parse_features_csv(std::string_view text);

/// Long-format content table: book_id,variant,item,count.
void write_content_csv(std::ostream& os, std::span<const FeatureVector> vectors, ContentCategory category);
std::vector<std::pair<DocId, ContentCounts>> parse_content_csv(std::string_view text, ContentCategory category);

}  // namespace stylemark
