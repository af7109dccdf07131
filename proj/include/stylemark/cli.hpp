#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stylemark/attribution.hpp"
#include "stylemark/csv.hpp"
#include "stylemark/features.hpp"
#include "stylemark/mt_client.hpp"

namespace stylemark::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kEndpoint = 3 };

/// 1 usage, 2 data, 3 endpoint; anything unexpected counts as a data error.
int exit_code_for(const std::exception& e);

struct RunConfig {
  std::filesystem::path corpus;
  std::filesystem::path out_dir = ".";
  std::optional<std::filesystem::path> function_words;
  std::optional<std::filesystem::path> transition_words;
  std::optional<std::filesystem::path> pronouns;
  std::optional<std::filesystem::path> emotion_lexicon;
  mt::EndpointConfig endpoint;
  std::string purpose{mt::kDefaultPurpose};
  std::string audience{mt::kDefaultAudience};
  std::size_t chunk_bytes = kDefaultChunkBytes;
  std::size_t max_chunks = kDefaultMaxChunks;
  std::vector<std::size_t> sweep = {100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
  attribution::LogRegHyper hyper;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string digest;  // empty when no config file was used

  /// Throws UsageError if a referenced path does not exist.
  void validate() const;
  csv::Header header() const { return {seed, digest}; }
};

using EnvLookup = std::function<std::optional<std::string>(std::string_view)>;

/// Flat `key = value` lines; `#` starts a comment line. `${NAME}` in a value is
/// replaced by the environment variable NAME, which must be set.
std::map<std::string, std::string> parse_config(std::string_view text, const EnvLookup& env);

/// Applies known keys to `config`; unknown keys are a UsageError. The digest is
/// taken over the sorted, interpolated entries.
void apply_config(RunConfig& config, const std::map<std::string, std::string>& entries);

RunConfig load_config(const std::filesystem::path& path, const EnvLookup& env);

/// "100:1000:100" (start:stop:step, inclusive) or "100,200,500".
std::vector<std::size_t> parse_sweep(std::string_view text);

struct IngestOptions {
  std::filesystem::path manifest, dir, out;
};
void cmd_ingest(const RunConfig& config, const IngestOptions& opt);

struct AttachOptions {
  std::filesystem::path corpus, out;
  std::vector<std::filesystem::path> records;
  std::optional<VariantId> variant;  // default: taken from each record's mode
};
void cmd_attach(const RunConfig& config, const AttachOptions& opt);

struct TranslateOptions {
  std::filesystem::path corpus, out_dir;
  mt::Mode mode = mt::Mode::S2S;
  bool resume = false;
  bool mock = false;
  std::vector<std::string> books;  // empty = all
};
/// Record file path for one book and mode under `out_dir`.
std::filesystem::path record_path(const std::filesystem::path& out_dir, std::string_view book_id, mt::Mode mode);
void cmd_translate(const RunConfig& config, const TranslateOptions& opt, mt::Endpoint* endpoint = nullptr);

struct ExtractOptions {
  std::filesystem::path corpus, out_dir;
  std::vector<ContentCategory> categories;  // empty = all available
};
void cmd_extract(const RunConfig& config, const ExtractOptions& opt);

struct AnovaOptions {
  std::filesystem::path features, out;
  std::optional<std::filesystem::path> table;
};
void cmd_anova(const RunConfig& config, const AnovaOptions& opt);

struct AttributeOptions {
  std::filesystem::path features;  // content CSV, or the directory written by extract
  std::filesystem::path out;
  std::optional<std::filesystem::path> svg;
  ContentCategory category = ContentCategory::Nouns;
};
attribution::AccuracyCurve cmd_attribute(const RunConfig& config, const AttributeOptions& opt);

struct ReportOptions {
  std::filesystem::path inputs, out;
};
void cmd_report(const RunConfig& config, const ReportOptions& opt);

struct SynthOptions {
  std::filesystem::path out_dir;
  std::size_t books = 25;
  std::size_t words = 2400;
  std::size_t markers = 20;
  double boost = 1.0;
};
void cmd_synth(const RunConfig& config, const SynthOptions& opt);

/// Parses arguments, runs one subcommand, and maps errors to exit codes.
int run(int argc, const char* const* argv);

}  // namespace stylemark::cli
