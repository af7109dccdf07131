#pragma once

#include <string_view>

// Data files compiled into the library (see data/ and cmake/EmbedData.cmake).
namespace stylemark::data {

extern const std::string_view closed_class_tsv;
extern const std::string_view pos_lexicon_tsv;
extern const std::string_view function_words_txt;
extern const std::string_view transition_words_txt;
extern const std::string_view pronouns_txt;
extern const std::string_view subordinators_txt;
extern const std::string_view char_bigrams_txt;
extern const std::string_view char_trigrams_txt;

}  // namespace stylemark::data
