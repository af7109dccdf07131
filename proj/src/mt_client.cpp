#include "stylemark/mt_client.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <nlohmann/json.hpp>
#include <thread>

#include "stylemark/csv.hpp"
#include "stylemark/utf8.hpp"

namespace stylemark::mt {

std::string_view to_string(Mode mode) { return mode == Mode::S2S ? "S2S" : "CTX"; }

Mode parse_mode(std::string_view text) {
  std::string key;
  for (char c : text) key.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (key == "S2S") return Mode::S2S;
  if (key == "CTX") return Mode::CTX;
  throw UsageError("unknown translation mode '" + std::string(text) + "' (expected S2S or CTX)");
}

std::string render_instruction(const PromptSpec& spec) {
  if (spec.genre.empty()) throw UsageError("prompt genre must not be empty");
  std::string out = "Translate the text from Chinse to English by ";
  out += spec.mode == Mode::S2S ? "translating sentence-by-sentence"
                                : "considering the most previously translated text as context when translating the "
                                  "current text";
  out += ". Purpose of translation: " + spec.purpose;
  out += ". Target audience: " + spec.audience;
  out += ". Genre of the text: recently released online popular Chinese novel about '" + spec.genre + "'.";
  return out;
}

std::string render_prompt(const PromptSpec& spec, std::string_view chunk_source,
                          const std::optional<ContextPair>& context, std::size_t chunk_index) {
  std::string out = render_instruction(spec);
  if (spec.mode == Mode::S2S) {
    if (context) throw UsageError("S2S prompts take no context");
    out += "\n\n";
    out += chunk_source;
    return out;
  }
  if (context) {
    if (context->prev_source.empty() || context->prev_target.empty()) {
      throw UsageError("context pair must have non-empty source and translation");
    }
    out += "\n\nPrevious source text:\n" + context->prev_source;
    out += "\n\nPrevious translation:\n" + context->prev_target;
  } else if (chunk_index > 0) {
    throw UsageError("CTX prompt for chunk " + std::to_string(chunk_index) + " needs the previous chunk as context");
  }
  out += "\n\nCurrent source text:\n";
  out += chunk_source;
  return out;
}

void EndpointConfig::validate() const {
  if (max_retries < 0) throw UsageError("max_retries must be >= 0");
  if (requests_per_minute < 1) throw UsageError("requests_per_minute must be >= 1");
  if (timeout.count() <= 0) throw UsageError("timeout must be positive");
  if (max_prompt_tokens == 0) throw UsageError("max_prompt_tokens must be positive");
  if (base_url.empty()) throw UsageError("endpoint base_url is empty");
  if (model_name.empty()) throw UsageError("endpoint model name is empty");
}

std::size_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

EndpointError::Kind classify_status(int status) {
  if (status == 401 || status == 403) return EndpointError::Kind::Auth;
  if (status == 408 || status == 409 || status == 429 || status >= 500) return EndpointError::Kind::Transient;
  return EndpointError::Kind::Permanent;
}

std::string parse_completion(std::string_view body) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    std::string text = content.get<std::string>();
    if (text.empty()) throw EndpointError(EndpointError::Kind::Transient, "endpoint returned an empty completion");
    return text;
  } catch (const json::exception& e) {
    throw EndpointError(EndpointError::Kind::Permanent, std::string("malformed completion response: ") + e.what());
  }
}

MockEndpoint::MockEndpoint(std::map<std::uint64_t, std::string> script, bool strict)
    : script_(std::move(script)), strict_(strict) {}

std::string MockEndpoint::default_output(std::string_view prompt) {
  return "Mock translation " + csv::fnv1a_hex(prompt) + ".";
}

std::string MockEndpoint::complete(const std::string& prompt) {
  std::lock_guard lock(mutex_);
  log_.push_back(prompt);
  const std::size_t n = log_.size();
  if (auto it = failures_.find(n); it != failures_.end()) {
    throw EndpointError(it->second, "injected failure on request " + std::to_string(n));
  }
  if (fail_from_ && n >= fail_from_->first) {
    throw EndpointError(fail_from_->second, "injected failure on request " + std::to_string(n));
  }
  if (auto it = script_.find(csv::fnv1a(prompt)); it != script_.end()) return it->second;
  if (strict_) throw EndpointError(EndpointError::Kind::Permanent, "no scripted output for prompt " + csv::fnv1a_hex(prompt));
  return default_output(prompt);
}

void MockEndpoint::fail_request(std::size_t n, EndpointError::Kind kind) {
  std::lock_guard lock(mutex_);
  failures_[n] = kind;
}

void MockEndpoint::fail_from(std::size_t n, EndpointError::Kind kind) {
  std::lock_guard lock(mutex_);
  fail_from_ = std::pair{n, kind};
}

std::vector<std::string> MockEndpoint::requests() const {
  std::lock_guard lock(mutex_);
  return log_;
}

std::size_t MockEndpoint::request_count() const {
  std::lock_guard lock(mutex_);
  return log_.size();
}

RateLimiter::RateLimiter(int per_minute, Timing timing)
    : interval_(std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::minutes(1)) /
                std::max(per_minute, 1)),
      timing_(std::move(timing)) {}

void RateLimiter::acquire() {
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mutex_);
    const auto now = timing_.now();
    slot = std::max(now, next_);
    next_ = slot + interval_;
  }
  const auto wait = std::chrono::ceil<std::chrono::milliseconds>(slot - timing_.now());
  if (wait.count() > 0) {
    if (timing_.sleep) {
      timing_.sleep(wait);
    } else {
      std::this_thread::sleep_for(wait);
    }
  }
}

std::string to_json_line(const TranslationRecord& r) {
  return nlohmann::json{{"book_id", r.book_id},
                        {"chunk_index", r.chunk_index},
                        {"mode", to_string(r.mode)},
                        {"prompt", r.prompt},
                        {"output", r.output},
                        {"latency_ms", r.latency_ms},
                        {"attempts", r.attempts}}
      .dump();
}

TranslationRecord parse_record(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    TranslationRecord r;
    r.book_id = j.at("book_id").get<std::string>();
    r.chunk_index = j.at("chunk_index").get<std::size_t>();
    r.mode = parse_mode(j.at("mode").get<std::string>());
    r.prompt = j.at("prompt").get<std::string>();
    r.output = j.at("output").get<std::string>();
    r.latency_ms = j.value("latency_ms", 0.0);
    r.attempts = j.value("attempts", 1);
    if (r.output.empty()) throw DataError("record has empty output");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed translation record: ") + e.what());
  }
}

std::vector<TranslationRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && !line.starts_with('#')) lines.push_back(std::move(line));
  }
  std::vector<TranslationRecord> records;
  std::map<std::pair<std::string, std::size_t>, std::size_t> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    TranslationRecord r;
    try {
      r = parse_record(lines[i]);
    } catch (const DataError& e) {
      if (i + 1 == lines.size()) {
        spdlog::warn("{}: ignoring incomplete final record ({})", path.string(), e.what());
        break;
      }
      throw DataError(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
    }
    if (!seen.emplace(std::pair{r.book_id, r.chunk_index}, i).second) {
      spdlog::warn("{}:{}: duplicate record for {} chunk {} ignored", path.string(), i + 1, r.book_id, r.chunk_index);
      continue;
    }
    records.push_back(std::move(r));
  }
  return records;
}

struct RecordWriter::Impl {
  std::mutex mutex;
  std::ofstream out;
};

RecordWriter::RecordWriter(const std::filesystem::path& path) : impl_(std::make_unique<Impl>()) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  impl_->out.open(path, std::ios::binary | std::ios::app);
  if (!impl_->out) throw DataError("cannot open " + path.string() + " for appending");
}

RecordWriter::~RecordWriter() = default;

void RecordWriter::append(const TranslationRecord& record) {
  std::lock_guard lock(impl_->mutex);
  impl_->out << to_json_line(record) << '\n';
  impl_->out.flush();
  if (!impl_->out) throw DataError("failed writing translation record");
}

TranslationHalted::TranslationHalted(EndpointError::Kind kind, const std::string& what, std::string resume_token,
                                     std::size_t failed_chunk)
    : EndpointError(kind, what), resume_token_(std::move(resume_token)), failed_chunk_(failed_chunk) {}

Translator::Translator(Endpoint& endpoint, EndpointConfig config, Timing timing)
    : endpoint_(endpoint), config_(std::move(config)), timing_(timing), limiter_(config_.requests_per_minute, timing) {
  config_.validate();
}

void Translator::sleep(std::chrono::milliseconds d) {
  if (timing_.sleep) {
    timing_.sleep(d);
  } else {
    std::this_thread::sleep_for(d);
  }
}

TranslationRecord Translator::translate_chunk(const PromptSpec& spec, std::string_view book_id,
                                              std::size_t chunk_index, std::string_view source,
                                              const std::optional<ContextPair>& context) {
  TranslationRecord record;
  record.book_id = std::string(book_id);
  record.chunk_index = chunk_index;
  record.mode = spec.mode;
  record.prompt = render_prompt(spec, source, context, chunk_index);
  const std::size_t tokens = estimate_tokens(record.prompt);
  if (tokens > config_.max_prompt_tokens) {
    throw EndpointError(EndpointError::Kind::Permanent,
                        "prompt for " + record.book_id + " chunk " + std::to_string(chunk_index) + " is about " +
                            std::to_string(tokens) + " tokens, over the limit of " +
                            std::to_string(config_.max_prompt_tokens));
  }

  auto backoff = config_.backoff_initial;
  for (int attempt = 1;; ++attempt) {
    limiter_.acquire();
    const auto start = timing_.now();
    try {
      record.output = endpoint_.complete(record.prompt);
      if (record.output.empty()) throw EndpointError(EndpointError::Kind::Transient, "empty completion");
      record.latency_ms = std::chrono::duration<double, std::milli>(timing_.now() - start).count();
      record.attempts = attempt;
      return record;
    } catch (const EndpointError& e) {
      if (!e.transient()) throw;
      if (attempt > config_.max_retries) {
        throw EndpointError(EndpointError::Kind::Transient,
                            "giving up after " + std::to_string(attempt) + " attempts: " + e.what());
      }
      spdlog::warn("{} chunk {} attempt {} failed: {}; retrying in {} ms", record.book_id, chunk_index, attempt,
                   e.what(), backoff.count());
      sleep(backoff);
      backoff = std::min(backoff * 2, config_.backoff_max);
    }
  }
}

std::vector<TranslationRecord> Translator::translate_book(
    const PromptSpec& spec, std::string_view book_id, const std::vector<std::string>& chunks,
    std::vector<TranslationRecord> completed, const std::function<void(const TranslationRecord&)>& on_record,
    unsigned threads) {
  std::vector<std::optional<TranslationRecord>> slots(chunks.size());
  for (auto& r : completed) {
    if (r.book_id != book_id || r.mode != spec.mode) continue;
    if (r.chunk_index >= chunks.size()) {
      throw DataError("record for " + r.book_id + " chunk " + std::to_string(r.chunk_index) + " beyond the " +
                      std::to_string(chunks.size()) + " chunks of the book");
    }
    if (!slots[r.chunk_index]) slots[r.chunk_index] = std::move(r);
  }
  const auto token = [&](std::size_t i) {
    return std::string(book_id) + ":" + std::string(to_string(spec.mode)) + ":" + std::to_string(i);
  };
  const auto halt = [&](std::size_t i, const Error& e) -> TranslationHalted {
    const auto* ee = dynamic_cast<const EndpointError*>(&e);
    const auto kind = ee ? ee->kind() : EndpointError::Kind::Permanent;
    return TranslationHalted(kind, std::string(book_id) + " chunk " + std::to_string(i) + ": " + e.what() +
                                       " (resume with " + token(i) + ")",
                             token(i), i);
  };
  std::mutex emit_mutex;
  const auto emit = [&](const TranslationRecord& r) {
    if (!on_record) return;
    std::lock_guard lock(emit_mutex);
    on_record(r);
  };

  if (spec.mode == Mode::CTX) {
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      if (slots[i]) continue;
      std::optional<ContextPair> context;
      if (i > 0) context = ContextPair{chunks[i - 1], slots[i - 1]->output};
      try {
        slots[i] = translate_chunk(spec, book_id, i, chunks[i], context);
      } catch (const Error& e) {
        throw halt(i, e);
      }
      emit(*slots[i]);
    }
  } else {
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      if (!slots[i]) pending.push_back(i);
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::mutex fail_mutex;
    std::optional<std::size_t> failed;
    std::optional<TranslationHalted> failure;
    auto worker = [&] {
      while (!stop) {
        const std::size_t k = next++;
        if (k >= pending.size()) return;
        const std::size_t i = pending[k];
        try {
          auto r = translate_chunk(spec, book_id, i, chunks[i], std::nullopt);
          emit(r);
          slots[i] = std::move(r);
        } catch (const Error& e) {
          std::lock_guard lock(fail_mutex);
          stop = true;
          if (!failed || i < *failed) {
            failed = i;
            failure.emplace(halt(i, e));
          }
        }
      }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(pending.size(), 1))));
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) throw *failure;
  }

  std::vector<TranslationRecord> out;
  out.reserve(chunks.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace stylemark::mt
