#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "stylemark/error.hpp"
#include "stylemark/features.hpp"
#include "support.hpp"

using namespace stylemark;

namespace {

std::map<std::string, double> load_oracle() {
  std::map<std::string, double> out;
  std::istringstream in(test::slurp(test::source_dir() / "fixtures" / "english_200.oracle"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    out[line.substr(0, eq)] = std::stod(line.substr(eq + 1));
  }
  return out;
}

TranslationDoc fixture_doc() {
  return {"fx", VariantId::HT, test::slurp(test::source_dir() / "fixtures" / "english_200.txt")};
}

}  // namespace

TEST_SUITE("features") {
  TEST_CASE("fixture matches the independent oracle") {
    const auto o = load_oracle();
    REQUIRE(o.size() > 50);
    const auto fv = extract_features(fixture_doc(), FeatureConfig{});
    const auto& lx = fv.lexical;
    const auto& sx = fv.syntactic;
    const double tol = 1e-9;

    CHECK(lx.char_count == o.at("char_count"));
    CHECK(lx.total_words == o.at("total_words"));
    CHECK(lx.unique_words == o.at("unique_words"));
    CHECK(lx.word_letters == o.at("word_letters"));
    CHECK(lx.chars_per_word == doctest::Approx(o.at("chars_per_word")).epsilon(tol));
    CHECK(lx.vocab_richness == doctest::Approx(o.at("vocab_richness")).epsilon(tol));
    for (std::size_t k = 1; k <= kMaxBinnedWordLength; ++k) {
      CAPTURE(k);
      CHECK(std::abs(lx.word_length_dist[k - 1] - o.at("wl_" + std::to_string(k))) < tol);
    }
    CHECK(std::abs(lx.word_length_summary() - o.at("word_length_summary")) < tol);
    for (const auto& g : common_bigrams()) {
      CAPTURE(g);
      CHECK(std::abs(lx.bigram_ratios.at(g) - o.at("bg_" + g)) < tol);
    }
    for (const auto& g : common_trigrams()) {
      CAPTURE(g);
      CHECK(std::abs(lx.trigram_ratios.at(g) - o.at("tg_" + g)) < tol);
    }
    CHECK(std::abs(lx.bigram_summary() - o.at("bg_summary")) < tol);
    CHECK(std::abs(lx.trigram_summary() - o.at("tg_summary")) < tol);

    CHECK(sx.sentence_count == o.at("sentence_count"));
    CHECK(sx.complex_count == o.at("complex_count"));
    CHECK(sx.punct_count == o.at("punct_count"));
    CHECK(sx.function_word_count == o.at("function_word_count"));
    CHECK(sx.transition_word_count == o.at("transition_word_count"));
    CHECK(std::abs(sx.sentence_length - o.at("sentence_length")) < tol);
    CHECK(std::abs(sx.punct_per_char - o.at("punct_per_char")) < tol);
    CHECK(std::abs(sx.function_word_freq - o.at("function_word_freq")) < tol);
    CHECK(std::abs(sx.transition_word_freq - o.at("transition_word_freq")) < tol);
    CHECK(std::abs(sx.simple_pct - o.at("simple_pct")) < tol);
    CHECK(std::abs(sx.complex_pct - o.at("complex_pct")) < tol);
  }

  TEST_CASE("empty documents are rejected") {
    CHECK_THROWS_AS(extract_features({"e", VariantId::HT, ""}, FeatureConfig{}), DataError);
    CHECK_THROWS_AS(extract_features({"e", VariantId::HT, "... 42 !"}, FeatureConfig{}), DataError);
    const std::vector<TranslationDoc> docs{{"e", VariantId::HT, ""}, fixture_doc()};
    const auto r = extract_all(docs, FeatureConfig{});
    CHECK(r.vectors.size() == 1);
    REQUIRE(r.failures.size() == 1);
    CHECK(r.failures[0].doc_id.book_id == "e");
  }

  TEST_CASE("word n-grams stay within sentences") {
    const TranslationDoc doc{"b", VariantId::S2S, "Red fox runs. Blue bird sings."};
    const auto bi = content_counts(doc, ContentCategory::WordBigrams, {});
    CHECK(bi.total == 4);
    CHECK(bi.counts.count("runs_blue") == 0);
    CHECK(bi.counts.at("red_fox") == 1);
    const auto tri = content_counts(doc, ContentCategory::WordTrigrams, {});
    CHECK(tri.total == 2);
    CHECK_THROWS_AS(content_counts(doc, ContentCategory::Pronouns, {}), UsageError);
  }

  TEST_CASE("emotion words keep their labels") {
    const auto emo = parse_lexicon("fear\tfear\t1\nhappy\tjoy\t1\n", LexiconKind::EmotionWords);
    const TranslationDoc doc{"b", VariantId::HT, "Happy days. No fear, no fear."};
    const auto cc = content_counts(doc, ContentCategory::EmotionWords, {nullptr, &emo});
    CHECK(cc.counts.at("fear") == 2);
    CHECK(cc.labels.at("happy") == "joy");
  }

  TEST_CASE("feature and content tables round trip") {
    FeatureConfig cfg;
    const std::vector<TranslationDoc> docs{fixture_doc(), {"z", VariantId::CTX, "Another short text, with \"quotes\"."}};
    const auto r = extract_all(docs, cfg);
    REQUIRE(r.vectors.size() == 2);
    std::ostringstream os;
    write_features_csv(os, r.vectors);
    const auto back = parse_features_csv(os.str());
    REQUIRE(back.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(back[i].doc_id == r.vectors[i].doc_id);
      CHECK(back[i].lexical == r.vectors[i].lexical);
      CHECK(back[i].syntactic == r.vectors[i].syntactic);
    }
    std::ostringstream cs;
    write_content_csv(cs, r.vectors, ContentCategory::Nouns);
    const auto content = parse_content_csv(cs.str(), ContentCategory::Nouns);
    REQUIRE(content.size() == 2);
    CHECK(content[0].second == r.vectors[0].content.at(ContentCategory::Nouns));
    CHECK_THROWS_AS(parse_features_csv("book_id,variant\nx,HT\n"), DataError);
  }

  TEST_CASE("scalar metrics expose the report columns") {
    CHECK(scalar_metrics().size() >= 13);
    CHECK(parse_category("nouns") == ContentCategory::Nouns);
    CHECK_THROWS_AS(parse_category("adverbs"), UsageError);
  }
}
