#include "stylemark/synth.hpp"

#include <cmath>
#include <fstream>

#include "stylemark/csv.hpp"
#include "stylemark/utf8.hpp"

namespace stylemark::synth {

namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";
constexpr std::string_view kFinals = "nt";

constexpr std::string_view kDeterminers[] = {"the", "a", "this", "that", "his", "her", "their"};
constexpr std::string_view kVerbs[] = {"saw", "took", "found", "held", "kept", "met", "told", "made", "gave", "brought"};
constexpr std::string_view kPrepositions[] = {"in", "on", "under", "near", "beyond", "with", "from"};

template <std::size_t N>
std::string_view pick(std::mt19937_64& rng, const std::string_view (&items)[N]) {
  return items[std::uniform_int_distribution<std::size_t>(0, N - 1)(rng)];
}

std::string random_source(std::mt19937_64& rng, std::size_t bytes) {
  std::uniform_int_distribution<char32_t> han(0x4E00, 0x62FF);
  std::uniform_int_distribution<int> sentence_len(8, 30);
  std::uniform_int_distribution<int> mark(0, 9);
  std::string out;
  while (out.size() < bytes) {
    const int len = sentence_len(rng);
    for (int i = 0; i < len; ++i) utf8::append(out, han(rng));
    const int m = mark(rng);
    utf8::append(out, m < 7 ? U'。' : m < 8 ? U'！' : m < 9 ? U'？' : U'，');
    if (mark(rng) == 0) out += '\n';
  }
  return out;
}

class Sampler {
 public:
  Sampler(const SynthConfig& config, std::size_t book, bool machine)
      : book_share_(config.book_share), book_words_(config.book_vocabulary) {
    std::vector<double> weights(config.vocabulary);
    for (std::size_t r = 0; r < weights.size(); ++r) {
      weights[r] = 1.0 / std::pow(static_cast<double>(r + 1), config.zipf_exponent);
    }
    if (machine) {
      for (std::size_t m = 0; m < config.markers && config.first_marker_rank + m < weights.size(); ++m) {
        weights[config.first_marker_rank + m] *= config.marker_boost;
      }
    }
    global_ = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());
    for (std::size_t j = 0; j < config.book_vocabulary; ++j) {
      book_words_[j] = pseudo_word(config.vocabulary + book * config.book_vocabulary + j);
    }
  }

  std::string noun(std::mt19937_64& rng) {
    if (!book_words_.empty() && std::bernoulli_distribution(book_share_)(rng)) {
      return book_words_[std::uniform_int_distribution<std::size_t>(0, book_words_.size() - 1)(rng)];
    }
    return pseudo_word(global_(rng));
  }

 private:
  double book_share_;
  std::vector<std::string> book_words_;
  std::discrete_distribution<std::size_t> global_;
};

// One sentence built from a few fixed frames; returns the number of words added.
std::size_t sentence(std::mt19937_64& rng, Sampler& nouns, std::string& out) {
  std::vector<std::string> w;
  const auto np = [&] {
    w.emplace_back(pick(rng, kDeterminers));
    w.push_back(nouns.noun(rng));
  };
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0:
      np();
      w.emplace_back(pick(rng, kVerbs));
      np();
      break;
    case 1:
      np();
      w.emplace_back("of");
      np();
      w.emplace_back(pick(rng, kVerbs));
      w.emplace_back(pick(rng, kPrepositions));
      np();
      break;
    case 2:
      np();
      w.emplace_back(pick(rng, kVerbs));
      np();
      w.back() += ",";
      w.emplace_back("and");
      np();
      w.emplace_back(pick(rng, kVerbs));
      np();
      break;
    default:
      w.emplace_back(pick(rng, kPrepositions));
      np();
      w.back() += ",";
      np();
      w.emplace_back(pick(rng, kVerbs));
      np();
      break;
  }
  w.front()[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w.front()[0])));
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += w[i];
  }
  out += '.';
  return w.size();
}

std::string chunk_text(std::mt19937_64& rng, Sampler& nouns, std::size_t words) {
  std::string out;
  std::size_t written = 0;
  while (written < words) {
    if (!out.empty()) out += ' ';
    written += sentence(rng, nouns, out);
  }
  return out;
}

}  // namespace

std::string pseudo_word(std::size_t index) {
  const std::size_t syllables = kConsonants.size() * kVowels.size();
  std::string word;
  std::size_t rest = index / kFinals.size();
  const char final = kFinals[index % kFinals.size()];
  for (int i = 0; i < 2 || rest > 0; ++i) {
    const std::size_t s = rest % syllables;
    rest /= syllables;
    word += kConsonants[s / kVowels.size()];
    word += kVowels[s % kVowels.size()];
  }
  word += final;
  return word;
}

std::vector<std::string> marker_words(const SynthConfig& config) {
  std::vector<std::string> out;
  for (std::size_t m = 0; m < config.markers && config.first_marker_rank + m < config.vocabulary; ++m) {
    out.push_back(pseudo_word(config.first_marker_rank + m));
  }
  return out;
}

Corpus generate_corpus(const SynthConfig& config) {
  if (config.books == 0 || config.chunks_per_book == 0 || config.words_per_doc == 0 || config.vocabulary == 0) {
    throw UsageError("synthetic corpus sizes must be positive");
  }
  if (config.marker_boost <= 0) throw UsageError("marker boost must be positive");
  std::mt19937_64 rng(config.seed);
  constexpr Genre kGenres[] = {Genre::MysteriousFantasy, Genre::Fantasy, Genre::Hero, Genre::Romance, Genre::SciFi};

  Corpus corpus;
  corpus.metadata = make_metadata();
  for (std::size_t b = 0; b < config.books; ++b) {
    Book book;
    book.book_id = std::to_string(b + 1);
    book.title = "Synthetic Book " + book.book_id;
    book.genre = kGenres[b % std::size(kGenres)];
    book.source_text = random_source(rng, config.chunks_per_book * (kDefaultChunkBytes - 150));
    auto chunks = chunk_book(book, kDefaultChunkBytes, kDefaultMaxChunks);

    Sampler human(config, b, false);
    Sampler machine(config, b, true);
    const std::size_t per_chunk = (config.words_per_doc + chunks.size() - 1) / chunks.size();
    for (auto v : kAllVariants) {
      Sampler& nouns = v == VariantId::HT ? human : machine;
      for (auto& c : chunks) c.variants[v] = chunk_text(rng, nouns, per_chunk);
    }
    corpus.books.push_back(std::move(book));
    corpus.chunks.insert(corpus.chunks.end(), std::make_move_iterator(chunks.begin()),
                         std::make_move_iterator(chunks.end()));
  }
  validate(corpus);
  return corpus;
}

std::string random_text(std::mt19937_64& rng, std::size_t bytes) {
  static constexpr std::string_view kAscii[] = {"the", "quiet", "river", "said", "Mr.", "Li", "e.g.", "3.14", "don't"};
  static constexpr char32_t kWide[] = {U'é', U'ß', U'ø', U'Ж', U'λ', U'中', U'文', U'龍', U'の', U'한', U'😀', U'𝄞'};
  static constexpr char32_t kMarks[] = {U'.', U'!', U'?', U'。', U'！', U'？', U'…', U'"', U'”', U'」', U'’', U','};
  std::uniform_int_distribution<int> kind(0, 99);
  std::string out;
  const bool dense = kind(rng) < 20;  // long stretch without spaces or marks
  while (out.size() < bytes) {
    const int k = kind(rng);
    if (dense && k < 80) {
      utf8::append(out, kWide[std::uniform_int_distribution<std::size_t>(0, std::size(kWide) - 1)(rng)]);
    } else if (k < 40) {
      out += kAscii[std::uniform_int_distribution<std::size_t>(0, std::size(kAscii) - 1)(rng)];
    } else if (k < 70) {
      utf8::append(out, kWide[std::uniform_int_distribution<std::size_t>(0, std::size(kWide) - 1)(rng)]);
    } else if (k < 85) {
      out += ' ';
    } else if (k < 97) {
      utf8::append(out, kMarks[std::uniform_int_distribution<std::size_t>(0, std::size(kMarks) - 1)(rng)]);
    } else {
      out += k == 97 ? "\n" : k == 98 ? "\r\n" : "\t";
    }
  }
  return out;
}

void write_sources(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream manifest(dir / "manifest.csv", std::ios::binary);
  manifest << "book_id,title,genre\n";
  for (const auto& b : corpus.books) {
    manifest << csv::join({b.book_id, b.title, std::string(to_string(b.genre))}) << '\n';
    std::ofstream src(dir / (b.book_id + ".chs_re.txt"), std::ios::binary);
    src << b.source_text;
    if (!src) throw DataError("cannot write source for book " + b.book_id);
  }
  if (!manifest) throw DataError("cannot write " + (dir / "manifest.csv").string());
}

}  // namespace stylemark::synth
