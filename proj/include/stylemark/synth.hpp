#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "stylemark/corpus.hpp"

namespace stylemark::synth {

/// Generated parallel corpus: pseudo-Chinese sources and English-like
/// translations whose nouns are pseudo-words drawn from a Zipf vocabulary
/// mixed with a per-book name list. All three variants of a book share one
/// distribution, except that Machine variants (S2S, CTX) may oversample a set
/// of marker nouns.
struct SynthConfig {
  std::size_t books = 25;
  std::size_t chunks_per_book = 3;
  std::size_t words_per_doc = 2400;
  std::size_t vocabulary = 3000;
  std::size_t book_vocabulary = 60;
  double book_share = 0.15;  // probability a noun comes from the book's own list
  double zipf_exponent = 1.0;
  std::size_t markers = 20;
  std::size_t first_marker_rank = 30;
  double marker_boost = 1.0;  // 1 = no style difference between Human and Machine
  std::uint64_t seed = 1;
};

/// Deterministic pseudo-word for an index ("badon", "kivut", ...).
std::string pseudo_word(std::size_t index);

/// The nouns oversampled in Machine variants.
std::vector<std::string> marker_words(const SynthConfig& config);

Corpus generate_corpus(const SynthConfig& config);

/// Random text mixing ASCII words, accented Latin, CJK, emoji, quotes,
/// sentence marks and line breaks, about `bytes` long. Sometimes includes
/// long runs without whitespace or sentence marks.
std::string random_text(std::mt19937_64& rng, std::size_t bytes);

/// Writes manifest.csv and one `<book_id>.chs_re.txt` per book under `dir`.
void write_sources(const Corpus& corpus, const std::filesystem::path& dir);

}  // namespace stylemark::synth
