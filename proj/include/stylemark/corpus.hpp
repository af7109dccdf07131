#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stylemark/error.hpp"

namespace stylemark {

inline constexpr std::size_t kDefaultChunkBytes = 3072;
inline constexpr std::size_t kDefaultMaxChunks = 100;
inline constexpr std::size_t kMinChunkBytes = 64;

enum class Genre { MysteriousFantasy, Fantasy, Hero, Romance, SciFi };

/// Display name as used in prompts ("Mysterious Fantasy", "Science Fiction", ...).
std::string_view to_string(Genre genre);
/// Accepts display names, enum spellings and common short forms ("Sci-Fi", "Mystery").
Genre parse_genre(std::string_view text);

enum class VariantId { HT, S2S, CTX };

inline constexpr VariantId kAllVariants[] = {VariantId::HT, VariantId::S2S, VariantId::CTX};

std::string_view to_string(VariantId variant);
VariantId parse_variant(std::string_view text);

struct Book {
  std::string book_id;
  std::string title;
  Genre genre = Genre::Fantasy;
  std::string source_text;

  friend bool operator==(const Book&, const Book&) = default;
};

struct ParallelChunk {
  std::string book_id;
  std::size_t index = 0;
  std::string source;
  std::map<VariantId, std::string> variants;

  friend bool operator==(const ParallelChunk&, const ParallelChunk&) = default;
};

/// Identifies one translation of one book.
struct DocId {
  std::string book_id;
  VariantId variant = VariantId::HT;

  std::string str() const;  // "<book_id>/<variant>"
  friend auto operator<=>(const DocId&, const DocId&) = default;
};

struct TranslationDoc {
  std::string book_id;
  VariantId variant = VariantId::HT;
  std::string text;

  DocId id() const { return {book_id, variant}; }
  friend bool operator==(const TranslationDoc&, const TranslationDoc&) = default;
};

struct CorpusMetadata {
  std::string created;  // ISO-8601 UTC
  std::string tool_version;

  friend bool operator==(const CorpusMetadata&, const CorpusMetadata&) = default;
};

/// Books plus their aligned chunks. Chunks are grouped per book, contiguous and
/// indexed from 0. Treat as an immutable value: operations return new corpora.
struct Corpus {
  std::vector<Book> books;
  std::vector<ParallelChunk> chunks;
  CorpusMetadata metadata;

  const Book* find_book(std::string_view book_id) const;
  std::size_t chunk_count(std::string_view book_id) const;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

/// Throws DataError describing the first broken invariant.
void validate(const Corpus& corpus);

CorpusMetadata make_metadata();

struct ManifestEntry {
  std::string book_id;
  std::string title;
  Genre genre = Genre::Fantasy;
};

/// Manifest CSV with header `book_id,title,genre`.
std::vector<ManifestEntry> parse_manifest(std::string_view csv_text);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

/// One failed manifest row during ingestion.
struct IngestIssue {
  std::string book_id;
  std::filesystem::path path;
  std::string message;
};

class IngestError : public DataError {
 public:
  explicit IngestError(std::vector<IngestIssue> issues);
  const std::vector<IngestIssue>& issues() const { return issues_; }

 private:
  std::vector<IngestIssue> issues_;
};

/// Reads `<book_id>.chs_re.txt` for every manifest row. All unreadable files are
/// collected into a single IngestError; duplicate ids are rejected up front.
Corpus ingest_books(const std::filesystem::path& dir, std::span<const ManifestEntry> manifest);

/// Splits the head of a book into at most `max_chunks` segments of at most
/// `chunk_bytes` bytes. Cuts prefer the end of a sentence, then whitespace, then
/// any scalar boundary. The concatenated chunks equal a prefix of the source.
std::vector<ParallelChunk> chunk_book(const Book& book, std::size_t chunk_bytes = kDefaultChunkBytes,
                                      std::size_t max_chunks = kDefaultMaxChunks);

/// Replaces all chunks of `corpus` by chunking every book.
Corpus chunk_corpus(Corpus corpus, std::size_t chunk_bytes = kDefaultChunkBytes,
                    std::size_t max_chunks = kDefaultMaxChunks);

/// Sets `variant` on every chunk of `book_id`; texts[i] goes to chunk i.
Corpus attach_variant(Corpus corpus, std::string_view book_id, VariantId variant,
                      std::span<const std::string> texts);

struct PartialVariant {
  std::string book_id;
  VariantId variant = VariantId::HT;
  std::size_t present = 0;
  std::size_t expected = 0;
};

struct AssembleResult {
  std::vector<TranslationDoc> docs;
  std::vector<PartialVariant> excluded;
};

/// One doc per (book, variant) where every chunk carries the variant; chunk
/// texts are joined with a single newline. Order: books in corpus order, then HT, S2S, CTX.
AssembleResult assemble_docs(const Corpus& corpus);

inline constexpr std::string_view kCorpusHeader = "stylemark-corpus v1";

/// Leading `#` comment lines are skipped on read.
void write_corpus(std::ostream& os, const Corpus& corpus);
Corpus read_corpus(std::istream& is);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_corpus(const std::filesystem::path& path);

/// Reads a whole file; throws DataError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace stylemark
