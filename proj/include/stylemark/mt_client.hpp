#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stylemark/error.hpp"

namespace stylemark::mt {

enum class Mode { S2S, CTX };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

inline constexpr std::string_view kDefaultPurpose = "translate the text in literary style";
inline constexpr std::string_view kDefaultAudience = "adolescents and young readers in their early 20s";

struct PromptSpec {
  Mode mode = Mode::S2S;
  std::string genre;
  std::string purpose{kDefaultPurpose};
  std::string audience{kDefaultAudience};
};

struct ContextPair {
  std::string prev_source;
  std::string prev_target;
};

/// The instruction paragraph with genre, purpose and audience filled in.
/// "Chinse" is kept as in the original template wording.
std::string render_instruction(const PromptSpec& spec);

/// Instruction followed by the source, and for CTX by the previous source and
/// translation. Chunk 0 of a CTX run has no context section.
std::string render_prompt(const PromptSpec& spec, std::string_view chunk_source,
                          const std::optional<ContextPair>& context, std::size_t chunk_index = 0);

struct EndpointConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model_name = "gpt-4";
  std::string api_key_env = "OPENAI_API_KEY";
  int max_retries = 3;
  int requests_per_minute = 60;
  std::chrono::milliseconds timeout{120'000};
  double temperature = 0.0;
  std::size_t max_prompt_tokens = 8192;
  std::chrono::milliseconds backoff_initial{1000};
  std::chrono::milliseconds backoff_max{60'000};

  void validate() const;
};

/// Rough prompt size at 4 bytes per token.
std::size_t estimate_tokens(std::string_view text);

/// One chat-completion call. Implementations throw EndpointError.
class Endpoint {
 public:
  virtual ~Endpoint() = default;
  virtual std::string complete(const std::string& prompt) = 0;
};

/// Chat-completion POST to `<base_url>/chat/completions` with a bearer token
/// taken from the environment variable named in the config.
class HttpEndpoint : public Endpoint {
 public:
  explicit HttpEndpoint(EndpointConfig config);
  std::string complete(const std::string& prompt) override;

  /// Request body for `prompt`, exposed for inspection.
  std::string request_body(const std::string& prompt) const;

 private:
  EndpointConfig config_;
  std::string api_key_;
};

/// Maps an HTTP status to an error kind: 401/403 auth, 408/429/5xx transient.
EndpointError::Kind classify_status(int status);

/// Extracts choices[0].message.content from a chat-completion response.
std::string parse_completion(std::string_view body);

/// Offline endpoint answering from a script keyed by the FNV-1a hash of the
/// prompt. Unscripted prompts get a deterministic output derived from the
/// prompt unless strict mode is on. Thread-safe.
class MockEndpoint : public Endpoint {
 public:
  explicit MockEndpoint(std::map<std::uint64_t, std::string> script = {}, bool strict = false);

  std::string complete(const std::string& prompt) override;

  /// The n-th request (1-based, counted over the endpoint's lifetime) fails.
  void fail_request(std::size_t n, EndpointError::Kind kind);
  /// Every request from the n-th on fails.
  void fail_from(std::size_t n, EndpointError::Kind kind);

  std::vector<std::string> requests() const;
  std::size_t request_count() const;

  /// Output used for unscripted prompts.
  static std::string default_output(std::string_view prompt);

 private:
  mutable std::mutex mutex_;
  std::map<std::uint64_t, std::string> script_;
  bool strict_;
  std::map<std::size_t, EndpointError::Kind> failures_;
  std::optional<std::pair<std::size_t, EndpointError::Kind>> fail_from_;
  std::vector<std::string> log_;
};

/// Clock and sleep hooks so retries and rate limiting can be tested without waiting.
struct Timing {
  std::function<std::chrono::steady_clock::time_point()> now = [] { return std::chrono::steady_clock::now(); };
  std::function<void(std::chrono::milliseconds)> sleep;  // empty = std::this_thread::sleep_for
};

/// Spaces requests evenly so at most `per_minute` start in any minute.
class RateLimiter {
 public:
  RateLimiter(int per_minute, Timing timing = {});
  void acquire();

 private:
  std::mutex mutex_;
  std::chrono::steady_clock::duration interval_;
  std::chrono::steady_clock::time_point next_{};
  Timing timing_;
};

struct TranslationRecord {
  std::string book_id;
  std::size_t chunk_index = 0;
  Mode mode = Mode::S2S;
  std::string prompt;
  std::string output;
  double latency_ms = 0.0;
  int attempts = 0;

  friend bool operator==(const TranslationRecord&, const TranslationRecord&) = default;
};

std::string to_json_line(const TranslationRecord& record);
TranslationRecord parse_record(std::string_view line);

/// Records from an append-only record file. A malformed final line (an
/// interrupted write) is skipped with a warning; later duplicates of a chunk are ignored.
std::vector<TranslationRecord> read_records(const std::filesystem::path& path);

/// Appends records one line at a time, flushing after each. Thread-safe.
class RecordWriter {
 public:
  explicit RecordWriter(const std::filesystem::path& path);
  ~RecordWriter();
  RecordWriter(const RecordWriter&) = delete;
  RecordWriter& operator=(const RecordWriter&) = delete;
  void append(const TranslationRecord& record);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Raised when a book's run stops; completed records were already handed out.
class TranslationHalted : public EndpointError {
 public:
  TranslationHalted(EndpointError::Kind kind, const std::string& what, std::string resume_token,
                    std::size_t failed_chunk);
  const std::string& resume_token() const { return resume_token_; }
  std::size_t failed_chunk() const { return failed_chunk_; }

 private:
  std::string resume_token_;
  std::size_t failed_chunk_;
};

class Translator {
 public:
  Translator(Endpoint& endpoint, EndpointConfig config, Timing timing = {});

  /// Renders, sends, and retries transient failures with exponential backoff.
  TranslationRecord translate_chunk(const PromptSpec& spec, std::string_view book_id, std::size_t chunk_index,
                                    std::string_view source, const std::optional<ContextPair>& context);

  /// Translates every chunk not already in `completed`. S2S chunks run on up
  /// to `threads` workers; CTX chunks run in order, each carrying the previous
  /// source and output. `on_record` sees each new record as it completes.
  /// Returns all records ordered by chunk index.
  std::vector<TranslationRecord> translate_book(
      const PromptSpec& spec, std::string_view book_id, const std::vector<std::string>& chunks,
      std::vector<TranslationRecord> completed = {},
      const std::function<void(const TranslationRecord&)>& on_record = {}, unsigned threads = 1);

 private:
  void sleep(std::chrono::milliseconds d);

  Endpoint& endpoint_;
  EndpointConfig config_;
  Timing timing_;
  RateLimiter limiter_;
};

}  // namespace stylemark::mt
