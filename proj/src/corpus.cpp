#include "stylemark/corpus.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <set>
#include <sstream>

#include "stylemark/csv.hpp"
#include "stylemark/utf8.hpp"

namespace stylemark {

namespace {

std::string normalize_key(std::string_view text) {
  std::string key;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return key;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view genre_key(Genre genre) {
  switch (genre) {
    case Genre::MysteriousFantasy:
      return "MysteriousFantasy";
    case Genre::Fantasy:
      return "Fantasy";
    case Genre::Hero:
      return "Hero";
    case Genre::Romance:
      return "Romance";
    case Genre::SciFi:
      return "SciFi";
  }
  return "Fantasy";
}

}  // namespace

std::string_view to_string(Genre genre) {
  switch (genre) {
    case Genre::MysteriousFantasy:
      return "Mysterious Fantasy";
    case Genre::Fantasy:
      return "Fantasy";
    case Genre::Hero:
      return "Hero";
    case Genre::Romance:
      return "Romance";
    case Genre::SciFi:
      return "Science Fiction";
  }
  return "Fantasy";
}

Genre parse_genre(std::string_view text) {
  const std::string key = normalize_key(text);
  if (key == "mysteriousfantasy" || key == "mystery" || key == "mysterious") {
    return Genre::MysteriousFantasy;
  }
  if (key == "fantasy") return Genre::Fantasy;
  if (key == "hero") return Genre::Hero;
  if (key == "romance") return Genre::Romance;
  if (key == "scifi" || key == "sciencefiction") return Genre::SciFi;
  throw DataError("unknown genre '" + std::string(text) + "'");
}

std::string_view to_string(VariantId variant) {
  switch (variant) {
    case VariantId::HT:
      return "HT";
    case VariantId::S2S:
      return "S2S";
    case VariantId::CTX:
      return "CTX";
  }
  return "HT";
}

VariantId parse_variant(std::string_view text) {
  const std::string key = normalize_key(text);
  if (key == "ht") return VariantId::HT;
  if (key == "s2s") return VariantId::S2S;
  if (key == "ctx") return VariantId::CTX;
  throw DataError("unknown variant '" + std::string(text) + "' (expected HT, S2S or CTX)");
}

std::string DocId::str() const { return book_id + "/" + std::string(to_string(variant)); }

const Book* Corpus::find_book(std::string_view book_id) const {
  auto it = std::find_if(books.begin(), books.end(), [&](const Book& b) { return b.book_id == book_id; });
  return it == books.end() ? nullptr : &*it;
}

std::size_t Corpus::chunk_count(std::string_view book_id) const {
  return static_cast<std::size_t>(
      std::count_if(chunks.begin(), chunks.end(), [&](const ParallelChunk& c) { return c.book_id == book_id; }));
}

void validate(const Corpus& corpus) {
  std::set<std::string> ids;
  for (const auto& book : corpus.books) {
    if (!ids.insert(book.book_id).second) throw DataError("duplicate book_id '" + book.book_id + "'");
    if (book.source_text.empty()) throw DataError("book '" + book.book_id + "' has empty source text");
  }
  std::map<std::string, std::size_t> next_index;
  std::set<std::string> finished;
  std::string current;
  for (const auto& chunk : corpus.chunks) {
    if (!ids.contains(chunk.book_id)) throw DataError("chunk refers to unknown book '" + chunk.book_id + "'");
    if (chunk.book_id != current) {
      if (!current.empty()) finished.insert(current);
      if (finished.contains(chunk.book_id)) {
        throw DataError("chunks of book '" + chunk.book_id + "' are not contiguous");
      }
      current = chunk.book_id;
    }
    auto& expected = next_index[chunk.book_id];
    if (chunk.index != expected) {
      throw DataError("book '" + chunk.book_id + "': expected chunk index " + std::to_string(expected) +
                      ", found " + std::to_string(chunk.index));
    }
    ++expected;
  }
}

CorpusMetadata make_metadata() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) now = static_cast<std::time_t>(std::atoll(epoch));
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return {buf, STYLEMARK_VERSION};
}

std::vector<ManifestEntry> parse_manifest(std::string_view csv_text) {
  const auto rows = csv::parse(csv_text);
  std::vector<ManifestEntry> entries;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (i == 0 && !row.empty() && normalize_key(row[0]) == "bookid") continue;
    if (row.size() != 3) {
      throw DataError("manifest row " + std::to_string(i + 1) + ": expected 3 columns (book_id,title,genre), got " +
                      std::to_string(row.size()));
    }
    const auto id = trim(row[0]);
    if (id.empty()) throw DataError("manifest row " + std::to_string(i + 1) + ": empty book_id");
    entries.push_back({std::string(id), std::string(trim(row[1])), parse_genre(row[2])});
  }
  return entries;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_file(path));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw DataError("error reading '" + path.string() + "'");
  return ss.str();
}

namespace {

std::string describe(const std::vector<IngestIssue>& issues) {
  std::string msg = "failed to ingest " + std::to_string(issues.size()) + " book(s):";
  for (const auto& issue : issues) msg += "\n  " + issue.path.string() + ": " + issue.message;
  return msg;
}

}  // namespace

IngestError::IngestError(std::vector<IngestIssue> issues)
    : DataError(describe(issues)), issues_(std::move(issues)) {}

Corpus ingest_books(const std::filesystem::path& dir, std::span<const ManifestEntry> manifest) {
  std::set<std::string> seen;
  for (const auto& entry : manifest) {
    if (!seen.insert(entry.book_id).second) {
      throw DataError("duplicate book_id '" + entry.book_id + "' in manifest");
    }
  }

  Corpus corpus;
  corpus.metadata = make_metadata();
  std::vector<IngestIssue> issues;
  for (const auto& entry : manifest) {
    const auto path = dir / (entry.book_id + ".chs_re.txt");
    std::string text;
    try {
      text = read_file(path);
    } catch (const DataError&) {
      issues.push_back({entry.book_id, path, "missing or unreadable file"});
      continue;
    }
    if (text.starts_with("\xEF\xBB\xBF")) text.erase(0, 3);
    if (auto bad = utf8::first_invalid(text)) {
      issues.push_back({entry.book_id, path, "invalid UTF-8 at byte offset " + std::to_string(*bad)});
      continue;
    }
    if (text.empty()) {
      issues.push_back({entry.book_id, path, "empty source text"});
      continue;
    }
    corpus.books.push_back({entry.book_id, entry.title, entry.genre, std::move(text)});
  }
  if (!issues.empty()) throw IngestError(std::move(issues));
  return corpus;
}

namespace {

// Byte offset where the next chunk should end, given the chunk starts at `begin`.
std::size_t find_cut(std::string_view text, std::size_t begin, std::size_t budget) {
  const std::size_t n = text.size();
  if (n - begin <= budget) return n;
  const std::size_t limit = begin + budget;

  std::size_t sentence_cut = 0;
  std::size_t space_cut = 0;
  std::size_t char_cut = begin;
  std::size_t pos = begin;
  while (pos < limit) {
    const auto d = utf8::decode(text, pos);
    const std::size_t end = pos + d.length;
    if (end > limit) break;
    char_cut = end;
    if (utf8::is_space(d.cp)) space_cut = end;
    if (utf8::is_sentence_terminator(d.cp)) {
      std::size_t q = end;
      while (q < n) {
        const auto next = utf8::decode(text, q);
        if (!utf8::is_closing_quote(next.cp) || q + next.length > limit) break;
        q += next.length;
      }
      const bool ascii = d.cp < 0x80;
      const auto after = q < n ? utf8::decode(text, q).cp : U' ';
      if (!ascii || utf8::is_space(after)) {
        // Keep trailing whitespace with the sentence it ends.
        while (q < n) {
          const auto ws = utf8::decode(text, q);
          if (!utf8::is_space(ws.cp) || q + ws.length > limit) break;
          q += ws.length;
        }
        sentence_cut = q;
      }
    }
    pos = end;
  }
  if (sentence_cut > begin) return sentence_cut;
  if (space_cut > begin) return space_cut;
  return char_cut;
}

}  // namespace

std::vector<ParallelChunk> chunk_book(const Book& book, std::size_t chunk_bytes, std::size_t max_chunks) {
  if (chunk_bytes < kMinChunkBytes) {
    throw UsageError("chunk_bytes must be at least " + std::to_string(kMinChunkBytes));
  }
  std::vector<ParallelChunk> chunks;
  const std::string_view text = book.source_text;
  std::size_t begin = 0;
  while (begin < text.size() && chunks.size() < max_chunks) {
    const std::size_t cut = find_cut(text, begin, chunk_bytes);
    chunks.push_back({book.book_id, chunks.size(), std::string(text.substr(begin, cut - begin)), {}});
    begin = cut;
  }
  return chunks;
}

Corpus chunk_corpus(Corpus corpus, std::size_t chunk_bytes, std::size_t max_chunks) {
  corpus.chunks.clear();
  for (const auto& book : corpus.books) {
    auto chunks = chunk_book(book, chunk_bytes, max_chunks);
    std::move(chunks.begin(), chunks.end(), std::back_inserter(corpus.chunks));
  }
  return corpus;
}

Corpus attach_variant(Corpus corpus, std::string_view book_id, VariantId variant,
                      std::span<const std::string> texts) {
  if (!corpus.find_book(book_id)) throw DataError("unknown book_id '" + std::string(book_id) + "'");
  const std::size_t expected = corpus.chunk_count(book_id);
  if (texts.size() != expected) {
    throw DataError("book '" + std::string(book_id) + "' variant " + std::string(to_string(variant)) +
                    ": expected " + std::to_string(expected) + ", got " + std::to_string(texts.size()));
  }
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (auto bad = utf8::first_invalid(texts[i])) {
      throw DataError("book '" + std::string(book_id) + "' chunk " + std::to_string(i) +
                      ": invalid UTF-8 at byte offset " + std::to_string(*bad));
    }
  }
  bool overwrote = false;
  for (auto& chunk : corpus.chunks) {
    if (chunk.book_id != book_id) continue;
    auto [it, inserted] = chunk.variants.insert_or_assign(variant, texts[chunk.index]);
    overwrote = overwrote || !inserted;
  }
  if (overwrote) {
    spdlog::warn("book '{}': overwriting existing {} variant", book_id, to_string(variant));
  }
  return corpus;
}

AssembleResult assemble_docs(const Corpus& corpus) {
  AssembleResult result;
  for (const auto& book : corpus.books) {
    std::vector<const ParallelChunk*> chunks;
    for (const auto& chunk : corpus.chunks) {
      if (chunk.book_id == book.book_id) chunks.push_back(&chunk);
    }
    std::sort(chunks.begin(), chunks.end(), [](auto* a, auto* b) { return a->index < b->index; });
    if (chunks.empty()) continue;
    for (VariantId variant : kAllVariants) {
      const auto present = static_cast<std::size_t>(std::count_if(
          chunks.begin(), chunks.end(), [&](auto* c) { return c->variants.contains(variant); }));
      if (present == 0) continue;
      if (present < chunks.size()) {
        result.excluded.push_back({book.book_id, variant, present, chunks.size()});
        continue;
      }
      TranslationDoc doc{book.book_id, variant, {}};
      for (std::size_t i = 0; i < chunks.size(); ++i) {
        if (i) doc.text.push_back('\n');
        doc.text += chunks[i]->variants.at(variant);
      }
      result.docs.push_back(std::move(doc));
    }
  }
  return result;
}

void write_corpus(std::ostream& os, const Corpus& corpus) {
  using nlohmann::json;
  os << kCorpusHeader << '\n';
  os << json{{"type", "meta"}, {"created", corpus.metadata.created}, {"tool_version", corpus.metadata.tool_version}}
            .dump()
     << '\n';
  for (const auto& book : corpus.books) {
    os << json{{"type", "book"},
               {"book_id", book.book_id},
               {"title", book.title},
               {"genre", genre_key(book.genre)},
               {"source_text", book.source_text}}
              .dump()
       << '\n';
  }
  for (const auto& chunk : corpus.chunks) {
    json variants = json::object();
    for (const auto& [id, text] : chunk.variants) variants[std::string(to_string(id))] = text;
    os << json{{"type", "chunk"},
               {"book_id", chunk.book_id},
               {"index", chunk.index},
               {"source", chunk.source},
               {"variants", variants}}
              .dump()
       << '\n';
  }
  os << json{{"type", "end"}, {"books", corpus.books.size()}, {"chunks", corpus.chunks.size()}}.dump() << '\n';
}

Corpus read_corpus(std::istream& is) {
  using nlohmann::json;
  std::string line;
  bool got = false;
  while ((got = static_cast<bool>(std::getline(is, line))) && line.starts_with('#')) {
  }
  if (!got) throw DataError("corpus file is empty");
  if (line != kCorpusHeader) {
    if (line.starts_with("stylemark-corpus ")) {
      throw DataError("unsupported corpus version '" + line.substr(17) + "' (this build reads v1)");
    }
    throw DataError("not a stylemark corpus file (bad header)");
  }

  Corpus corpus;
  bool have_meta = false;
  bool have_end = false;
  std::size_t record = 0;
  while (std::getline(is, line)) {
    ++record;
    if (have_end) throw DataError("corpus record " + std::to_string(record) + ": data after end record");
    json j;
    try {
      j = json::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (type == "meta") {
        corpus.metadata = {j.at("created").get<std::string>(), j.at("tool_version").get<std::string>()};
        have_meta = true;
      } else if (type == "book") {
        corpus.books.push_back({j.at("book_id").get<std::string>(), j.at("title").get<std::string>(),
                                parse_genre(j.at("genre").get<std::string>()),
                                j.at("source_text").get<std::string>()});
      } else if (type == "chunk") {
        ParallelChunk chunk{j.at("book_id").get<std::string>(), j.at("index").get<std::size_t>(),
                            j.at("source").get<std::string>(), {}};
        for (const auto& [key, value] : j.at("variants").items()) {
          chunk.variants.emplace(parse_variant(key), value.get<std::string>());
        }
        corpus.chunks.push_back(std::move(chunk));
      } else if (type == "end") {
        if (j.at("books").get<std::size_t>() != corpus.books.size() ||
            j.at("chunks").get<std::size_t>() != corpus.chunks.size()) {
          throw DataError("record counts do not match end record");
        }
        have_end = true;
      } else {
        throw DataError("unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw DataError("corpus record " + std::to_string(record) + ": parse error: " + e.what());
    } catch (const DataError& e) {
      throw DataError("corpus record " + std::to_string(record) + ": " + e.what());
    }
  }
  if (!have_meta) throw DataError("corpus record 1: missing meta record");
  if (!have_end) {
    throw DataError("corpus truncated after record " + std::to_string(record) + ": missing end record");
  }
  validate(corpus);
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_corpus(out, corpus);
  if (!out) throw DataError("error writing '" + path.string() + "'");
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return read_corpus(in);
}

}  // namespace stylemark
