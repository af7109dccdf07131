#include "stylemark/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "stylemark/stats.hpp"
#include "stylemark/synth.hpp"

namespace stylemark::cli {

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    T out{};
    if constexpr (std::is_floating_point_v<T>) {
      out = static_cast<T>(std::stod(value, &used));
    } else {
      if (value.starts_with('-')) throw std::invalid_argument("negative");
      out = static_cast<T>(std::stoull(value, &used));
    }
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return out;
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': bad number '" + value + "'");
  }
}

// SVG output carries the provenance line as an XML comment.
void write_output(const std::filesystem::path& path, const RunConfig& config,
                  const std::function<void(std::ostream&)>& body, bool xml = false) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  if (xml) {
    std::ostringstream line;
    csv::write_header(line, config.header());
    out << "<!-- " << line.str().substr(2, line.str().size() - 3) << " -->\n";
  } else {
    csv::write_header(out, config.header());
  }
  body(out);
  out.flush();
  if (!out) throw DataError("error writing " + path.string());
  spdlog::info("wrote {}", path.string());
}

std::string content_file_name(ContentCategory c) { return "content_" + std::string(to_string(c)) + ".csv"; }

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const EndpointError*>(&e)) return kEndpoint;
  if (dynamic_cast<const UsageError*>(&e)) return kUsage;
  return kData;
}

void RunConfig::validate() const {
  for (const auto* p : {&function_words, &transition_words, &pronouns, &emotion_lexicon}) {
    if (*p && !std::filesystem::exists(**p)) throw UsageError("lexicon file not found: " + (*p)->string());
  }
  if (!corpus.empty() && !std::filesystem::exists(corpus)) throw UsageError("corpus not found: " + corpus.string());
  if (chunk_bytes < kMinChunkBytes) throw UsageError("chunk_bytes must be at least " + std::to_string(kMinChunkBytes));
  if (max_chunks == 0) throw UsageError("max_chunks must be positive");
  if (sweep.empty()) throw UsageError("sweep list is empty");
  if (threads == 0) throw UsageError("threads must be positive");
  endpoint.validate();
}

std::map<std::string, std::string> parse_config(std::string_view text, const EnvLookup& env) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.starts_with('#')) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    std::string raw = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw UsageError("config line " + std::to_string(line_no) + ": empty key");
    std::string value;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '$' && i + 1 < raw.size() && raw[i + 1] == '{') {
        const auto close = raw.find('}', i + 2);
        if (close == std::string::npos) {
          throw UsageError("config line " + std::to_string(line_no) + ": unterminated ${");
        }
        const std::string name = raw.substr(i + 2, close - i - 2);
        const auto v = env(name);
        if (!v) {
          throw UsageError("config line " + std::to_string(line_no) + ": environment variable " + name + " is not set");
        }
        value += *v;
        i = close;
      } else {
        value += raw[i];
      }
    }
    if (!out.emplace(key, value).second) {
      throw UsageError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return out;
}

void apply_config(RunConfig& c, const std::map<std::string, std::string>& entries) {
  std::string canonical;
  for (const auto& [key, value] : entries) {
    canonical += key + "=" + value + "\n";
    if (key == "corpus") {
      c.corpus = value;
    } else if (key == "out_dir") {
      c.out_dir = value;
    } else if (key == "function_words") {
      c.function_words = value;
    } else if (key == "transition_words") {
      c.transition_words = value;
    } else if (key == "pronouns") {
      c.pronouns = value;
    } else if (key == "emotion_lexicon") {
      c.emotion_lexicon = value;
    } else if (key == "chunk_bytes") {
      c.chunk_bytes = parse_number<std::size_t>(key, value);
    } else if (key == "max_chunks") {
      c.max_chunks = parse_number<std::size_t>(key, value);
    } else if (key == "sweep") {
      c.sweep = parse_sweep(value);
    } else if (key == "l2_lambda") {
      c.hyper.l2_lambda = parse_number<double>(key, value);
    } else if (key == "learning_rate") {
      c.hyper.learning_rate = parse_number<double>(key, value);
    } else if (key == "max_epochs") {
      c.hyper.max_epochs = parse_number<int>(key, value);
    } else if (key == "tolerance") {
      c.hyper.tolerance = parse_number<double>(key, value);
    } else if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "threads") {
      c.threads = parse_number<unsigned>(key, value);
    } else if (key == "prompt.purpose") {
      c.purpose = value;
    } else if (key == "prompt.audience") {
      c.audience = value;
    } else if (key == "endpoint.base_url") {
      c.endpoint.base_url = value;
    } else if (key == "endpoint.model") {
      c.endpoint.model_name = value;
    } else if (key == "endpoint.api_key_env") {
      c.endpoint.api_key_env = value;
    } else if (key == "endpoint.max_retries") {
      c.endpoint.max_retries = parse_number<int>(key, value);
    } else if (key == "endpoint.requests_per_minute") {
      c.endpoint.requests_per_minute = parse_number<int>(key, value);
    } else if (key == "endpoint.timeout_s") {
      c.endpoint.timeout = std::chrono::milliseconds(
          static_cast<std::int64_t>(parse_number<double>(key, value) * 1000.0));
    } else if (key == "endpoint.temperature") {
      c.endpoint.temperature = parse_number<double>(key, value);
    } else if (key == "endpoint.max_prompt_tokens") {
      c.endpoint.max_prompt_tokens = parse_number<std::size_t>(key, value);
    } else {
      throw UsageError("unknown config key '" + key + "'");
    }
  }
  c.digest = csv::fnv1a_hex(canonical);
}

RunConfig load_config(const std::filesystem::path& path, const EnvLookup& env) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig config;
  apply_config(config, parse_config(ss.str(), env));
  return config;
}

std::vector<std::size_t> parse_sweep(std::string_view text) {
  const auto num = [&](std::string_view s) { return parse_number<std::size_t>("sweep", trim(s)); };
  std::vector<std::size_t> out;
  if (text.find(':') != std::string_view::npos) {
    const auto a = text.find(':');
    const auto b = text.find(':', a + 1);
    if (b == std::string_view::npos) throw UsageError("sweep must be start:stop:step");
    const std::size_t start = num(text.substr(0, a));
    const std::size_t stop = num(text.substr(a + 1, b - a - 1));
    const std::size_t step = num(text.substr(b + 1));
    if (start == 0 || step == 0 || stop < start) throw UsageError("sweep needs 0 < start <= stop and step > 0");
    for (std::size_t n = start; n <= stop; n += step) out.push_back(n);
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto comma = text.find(',', pos);
      const auto part = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
      const std::size_t n = num(part);
      if (n == 0) throw UsageError("sweep sizes must be positive");
      out.push_back(n);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  if (out.empty()) throw UsageError("sweep list is empty");
  return out;
}

void cmd_ingest(const RunConfig& config, const IngestOptions& opt) {
  const auto manifest = read_manifest(opt.manifest);
  auto corpus = chunk_corpus(ingest_books(opt.dir, manifest), config.chunk_bytes, config.max_chunks);
  write_output(opt.out, config, [&](std::ostream& os) { write_corpus(os, corpus); });
  std::cout << "ingested " << corpus.books.size() << " books, " << corpus.chunks.size() << " chunks\n";
}

void cmd_attach(const RunConfig& config, const AttachOptions& opt) {
  auto corpus = load_corpus(opt.corpus);
  // (book, variant) -> chunk index -> text
  std::map<std::pair<std::string, VariantId>, std::map<std::size_t, std::string>> texts;
  for (const auto& path : opt.records) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
      ++line_no;
      if (line.empty() || line.starts_with('#')) continue;
      const auto where = path.string() + ":" + std::to_string(line_no) + ": ";
      try {
        const auto j = nlohmann::json::parse(line);
        const auto book = j.at("book_id").get<std::string>();
        const auto index = j.at("chunk_index").get<std::size_t>();
        std::optional<VariantId> variant = opt.variant;
        if (!variant) {
          if (!j.contains("mode")) throw DataError("record has no mode; pass --variant");
          variant = mt::parse_mode(j.at("mode").get<std::string>()) == mt::Mode::S2S ? VariantId::S2S : VariantId::CTX;
        }
        const auto text = j.contains("output") ? j.at("output").get<std::string>() : j.at("text").get<std::string>();
        texts[{book, *variant}][index] = text;
      } catch (const nlohmann::json::exception& e) {
        throw DataError(where + e.what());
      } catch (const Error& e) {
        throw DataError(where + e.what());
      }
    }
  }
  for (const auto& [key, by_index] : texts) {
    std::vector<std::string> ordered;
    for (const auto& [i, t] : by_index) {
      if (i != ordered.size()) {
        throw DataError("book " + key.first + " " + std::string(to_string(key.second)) + ": missing chunk " +
                        std::to_string(ordered.size()));
      }
      ordered.push_back(t);
    }
    corpus = attach_variant(std::move(corpus), key.first, key.second, ordered);
  }
  write_output(opt.out, config, [&](std::ostream& os) { write_corpus(os, corpus); });
  std::cout << "attached " << texts.size() << " book variants\n";
}

std::filesystem::path record_path(const std::filesystem::path& out_dir, std::string_view book_id, mt::Mode mode) {
  return out_dir / (std::string(book_id) + "." + std::string(to_string(mode)) + ".jsonl");
}

void cmd_translate(const RunConfig& config, const TranslateOptions& opt, mt::Endpoint* endpoint) {
  const auto corpus = load_corpus(opt.corpus);
  std::unique_ptr<mt::Endpoint> owned;
  if (!endpoint) {
    if (opt.mock) {
      owned = std::make_unique<mt::MockEndpoint>();
    } else {
      owned = std::make_unique<mt::HttpEndpoint>(config.endpoint);
    }
    endpoint = owned.get();
  }
  std::vector<const Book*> books;
  for (const auto& b : corpus.books) {
    if (opt.books.empty() || std::find(opt.books.begin(), opt.books.end(), b.book_id) != opt.books.end()) {
      books.push_back(&b);
    }
  }
  if (books.empty()) throw UsageError("no matching books to translate");
  std::filesystem::create_directories(opt.out_dir);
  for (const auto* b : books) {
    const auto path = record_path(opt.out_dir, b->book_id, opt.mode);
    if (std::filesystem::exists(path) && !opt.resume) {
      throw UsageError(path.string() + " already exists; pass --resume to continue it");
    }
  }

  mt::Translator translator(*endpoint, config.endpoint);
  std::mutex fail_mutex;
  std::vector<std::string> failures;
  std::optional<EndpointError::Kind> worst;
  std::atomic<bool> abort{false};
  std::size_t translated = 0;

  auto run_book = [&](const Book& book) {
    if (abort) return;
    const auto path = record_path(opt.out_dir, book.book_id, opt.mode);
    std::vector<mt::TranslationRecord> done;
    if (std::filesystem::exists(path)) {
      done = mt::read_records(path);
    } else {
      std::ofstream head(path, std::ios::binary);
      csv::write_header(head, config.header());
    }
    std::vector<std::string> sources;
    for (const auto& c : corpus.chunks) {
      if (c.book_id == book.book_id) sources.push_back(c.source);
    }
    mt::PromptSpec spec{opt.mode, std::string(to_string(book.genre)), config.purpose, config.audience};
    mt::RecordWriter writer(path);
    std::size_t fresh = 0;
    try {
      translator.translate_book(
          spec, book.book_id, sources, std::move(done),
          [&](const mt::TranslationRecord& r) {
            writer.append(r);
            ++fresh;
          },
          opt.mode == mt::Mode::S2S ? config.threads : 1);
    } catch (const mt::TranslationHalted& e) {
      std::lock_guard lock(fail_mutex);
      failures.push_back(e.what());
      if (!worst || e.kind() == EndpointError::Kind::Auth) worst = e.kind();
      if (e.kind() == EndpointError::Kind::Auth) abort = true;
    }
    std::lock_guard lock(fail_mutex);
    translated += fresh;
  };

  if (opt.mode == mt::Mode::CTX && config.threads > 1 && books.size() > 1) {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    const unsigned n = std::min<unsigned>(config.threads, static_cast<unsigned>(books.size()));
    for (unsigned t = 0; t < n; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < books.size(); i = next++) run_book(*books[i]);
      });
    }
  } else {
    for (const auto* b : books) run_book(*b);
  }
  std::cout << "translated " << translated << " new chunks (" << to_string(opt.mode) << ")\n";
  if (!failures.empty()) {
    std::string msg = std::to_string(failures.size()) + " book(s) halted:";
    for (const auto& f : failures) msg += "\n  " + f;
    throw EndpointError(*worst, msg);
  }
}

void cmd_extract(const RunConfig& config, const ExtractOptions& opt) {
  const auto corpus = load_corpus(opt.corpus);
  const auto assembled = assemble_docs(corpus);
  for (const auto& p : assembled.excluded) {
    spdlog::warn("book {} {}: only {} of {} chunks translated; excluded", p.book_id, to_string(p.variant), p.present,
                 p.expected);
  }
  if (assembled.docs.empty()) throw DataError("corpus has no complete translations to extract");

  FeatureConfig fc;
  if (config.function_words) fc.function_words = load_lexicon(*config.function_words, LexiconKind::FunctionWords);
  if (config.transition_words) {
    fc.transition_words = load_lexicon(*config.transition_words, LexiconKind::TransitionWords);
  }
  if (config.pronouns) fc.pronouns = load_lexicon(*config.pronouns, LexiconKind::Pronouns);
  if (config.emotion_lexicon) fc.emotion = load_lexicon(*config.emotion_lexicon, LexiconKind::EmotionWords);
  fc.categories = opt.categories;
  if (fc.categories.empty()) {
    for (auto c : kAllCategories) {
      if (c != ContentCategory::EmotionWords || fc.emotion) fc.categories.push_back(c);
    }
  }
  fc.threads = config.threads;

  const auto result = extract_all(assembled.docs, fc);
  for (const auto& f : result.failures) spdlog::error("{}: {}", f.doc_id.str(), f.message);
  if (result.vectors.empty()) throw DataError("feature extraction failed for every document");

  write_output(opt.out_dir / "features.csv", config,
               [&](std::ostream& os) { write_features_csv(os, result.vectors); });
  for (auto c : fc.categories) {
    write_output(opt.out_dir / content_file_name(c), config,
                 [&](std::ostream& os) { write_content_csv(os, result.vectors, c); });
  }
  std::cout << "extracted features for " << result.vectors.size() << " documents";
  if (!result.failures.empty()) std::cout << " (" << result.failures.size() << " failed)";
  std::cout << '\n';
}

void cmd_anova(const RunConfig& config, const AnovaOptions& opt) {
  const auto vectors = parse_features_csv(read_file(opt.features));
  const auto results = stats::anova_suite(vectors);
  write_output(opt.out, config, [&](std::ostream& os) { stats::write_anova_csv(os, results); });
  if (opt.table) {
    write_output(*opt.table, config, [&](std::ostream& os) {
      stats::write_anova_table(os, results, true);
      os << '\n';
      stats::write_anova_table(os, results, false);
    });
  }
  std::size_t significant = 0;
  for (const auto& r : results) significant += r.summary.p < stats::kSignificance;
  std::cout << results.size() << " metrics tested, " << significant << " significant at p<0.05\n";
}

attribution::AccuracyCurve cmd_attribute(const RunConfig& config, const AttributeOptions& opt) {
  auto path = opt.features;
  if (std::filesystem::is_directory(path)) path /= content_file_name(opt.category);
  const auto docs = parse_content_csv(read_file(path), opt.category);
  if (docs.empty()) throw DataError(path.string() + " has no documents");
  const auto curve =
      attribution::mfw_sweep<double>(docs, opt.category, config.sweep, config.hyper, config.seed, config.threads);
  for (const auto& w : curve.warnings) spdlog::warn("{}", w);
  write_output(opt.out, config, [&](std::ostream& os) { attribution::write_curve_csv(os, curve); });
  if (opt.svg) {
    write_output(
        *opt.svg, config, [&](std::ostream& os) { attribution::write_curve_svg(os, std::span(&curve, 1)); }, true);
  }
  std::printf("%s: best balanced accuracy %.4f at n=%zu\n", std::string(to_string(opt.category)).c_str(),
              curve.best.second, curve.best.first);
  return curve;
}

void cmd_report(const RunConfig& config, const ReportOptions& opt) {
  if (!std::filesystem::is_directory(opt.inputs)) throw UsageError(opt.inputs.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(opt.inputs)) {
    if (e.is_regular_file() && e.path() != opt.out) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());

  std::ostringstream body;
  body << "stylemark summary\n\n";
  const auto features_path = opt.inputs / "features.csv";
  if (std::filesystem::exists(features_path)) {
    const auto vectors = parse_features_csv(read_file(features_path));
    std::map<VariantId, std::size_t> per_variant;
    std::set<std::string> books;
    for (const auto& v : vectors) {
      ++per_variant[v.doc_id.variant];
      books.insert(v.doc_id.book_id);
    }
    body << "Documents: " << vectors.size() << " from " << books.size() << " books (";
    bool first = true;
    for (const auto& [variant, n] : per_variant) {
      body << (first ? "" : ", ") << to_string(variant) << " " << n;
      first = false;
    }
    body << ")\n\n";
    if (per_variant.size() >= 2) {
      const auto results = stats::anova_suite(vectors);
      stats::write_anova_table(body, results, true);
      body << '\n';
      stats::write_anova_table(body, results, false);
      body << '\n';
    }
  }

  std::vector<attribution::AccuracyCurve> curves;
  for (const auto& f : files) {
    if (f.extension() != ".csv") continue;
    const auto text = read_file(f);
    if (text.find("row,category,n_mfw,accuracy") == std::string::npos) continue;
    curves.push_back(attribution::parse_curve_csv(text));
  }
  if (!curves.empty()) {
    body << "Attribution (balanced leave-one-book-out accuracy, chance = 0.5)\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-14s %8s %10s   %s\n", "Category", "Best n", "Accuracy", "Curve");
    body << line;
    for (const auto& c : curves) {
      std::string points;
      for (const auto& [n, acc] : c.points) {
        char p[48];
        std::snprintf(p, sizeof p, "%s%zu:%.3f", points.empty() ? "" : " ", n, acc);
        points += p;
      }
      std::snprintf(line, sizeof line, "%-14s %8zu %10.4f   ", std::string(to_string(c.category)).c_str(),
                    c.best.first, c.best.second);
      body << line << points << '\n';
    }
    body << '\n';
  }

  body << "Files\n";
  for (const auto& f : files) {
    const auto text = read_file(f);
    char line[512];
    std::snprintf(line, sizeof line, "  %-32s %10zu bytes  fnv1a=%s\n", f.filename().string().c_str(), text.size(),
                  csv::fnv1a_hex(text).c_str());
    body << line;
  }
  write_output(opt.out, config, [&](std::ostream& os) { os << body.str(); });
}

void cmd_synth(const RunConfig& config, const SynthOptions& opt) {
  synth::SynthConfig sc;
  sc.books = opt.books;
  sc.words_per_doc = opt.words;
  sc.markers = opt.markers;
  sc.marker_boost = opt.boost;
  sc.seed = config.seed;
  const auto corpus = synth::generate_corpus(sc);
  synth::write_sources(corpus, opt.out_dir);
  write_output(opt.out_dir / "corpus.jsonl", config, [&](std::ostream& os) { write_corpus(os, corpus); });
  write_output(opt.out_dir / "markers.txt", config, [&](std::ostream& os) {
    for (const auto& w : synth::marker_words(sc)) os << w << '\n';
  });
  std::cout << "generated " << corpus.books.size() << " books, " << corpus.chunks.size() << " chunks, marker boost "
            << opt.boost << '\n';
}

int run(int argc, const char* const* argv) {
  CLI::App app{"stylemark: stylometric comparison of human and machine translations"};
  app.set_version_flag("--version", STYLEMARK_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string log_level = "warn";
  app.add_option("--config", config_path, "key = value config file; ${VAR} is read from the environment");
  app.add_option("--seed", seed, "random seed, recorded in every output header (default 0)");
  app.add_option("--threads", threads, "worker threads for extraction, sweeps and S2S translation (default 1)");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  IngestOptions ingest;
  std::optional<std::size_t> chunk_bytes, max_chunks;
  auto* c_ingest = app.add_subcommand("ingest", "read a manifest and source files into a chunked corpus file");
  c_ingest->add_option("--manifest", ingest.manifest, "CSV with book_id,title,genre")->required();
  c_ingest->add_option("--dir", ingest.dir, "directory holding <book_id>.chs_re.txt files")->required();
  c_ingest->add_option("--out", ingest.out, "corpus file to write")->required();
  c_ingest->add_option("--chunk-bytes", chunk_bytes, "maximum chunk size in bytes (default 3072)");
  c_ingest->add_option("--max-chunks", max_chunks, "maximum chunks per book (default 100)");

  AttachOptions attach;
  std::string attach_variant;
  auto* c_attach = app.add_subcommand("attach", "attach translations from record files to a corpus");
  c_attach->add_option("--corpus", attach.corpus, "input corpus file")->required();
  c_attach->add_option("--records", attach.records,
                       "JSON-lines files with book_id, chunk_index and output (or text)")
      ->required();
  c_attach->add_option("--variant", attach_variant, "HT, S2S or CTX; default is each record's mode");
  c_attach->add_option("--out", attach.out, "corpus file to write")->required();

  TranslateOptions translate;
  std::string mode = "S2S";
  auto* c_translate = app.add_subcommand("translate", "translate every chunk with a chat-completion endpoint");
  c_translate->add_option("--corpus", translate.corpus, "corpus file")->required();
  c_translate->add_option("--mode", mode, "S2S or CTX")->required();
  c_translate->add_option("--out-dir", translate.out_dir, "directory for <book_id>.<MODE>.jsonl record files")
      ->required();
  c_translate->add_flag("--resume", translate.resume, "continue existing record files, skipping finished chunks");
  c_translate->add_flag("--mock", translate.mock, "use the offline deterministic mock endpoint");
  c_translate->add_option("--books", translate.books, "only these book ids");

  ExtractOptions extract;
  std::vector<std::string> categories;
  std::optional<std::string> fw, tw, pr, emo;
  auto* c_extract = app.add_subcommand("extract", "compute lexical, syntactic and content features");
  c_extract->add_option("--corpus", extract.corpus, "corpus file with translations attached")->required();
  c_extract->add_option("--out-dir", extract.out_dir, "directory for features.csv and content_*.csv")->required();
  c_extract->add_option("--function-words", fw, "function-word list (default built in)");
  c_extract->add_option("--transition-words", tw, "transition-word list (default built in)");
  c_extract->add_option("--pronouns", pr, "pronoun list (default built in)");
  c_extract->add_option("--emotion-lexicon", emo, "word<TAB>emotion list or NRC word-level file");
  c_extract->add_option("--categories", categories,
                        "content categories: words, word_bigrams, word_trigrams, pronouns, nouns, verbs, "
                        "adjectives, emotion_words (default all available)");

  AnovaOptions anova;
  std::optional<std::string> table;
  auto* c_anova = app.add_subcommand("anova", "one-way ANOVA and Tukey HSD over HT, S2S and CTX");
  c_anova->add_option("--features", anova.features, "features.csv from extract")->required();
  c_anova->add_option("--out", anova.out, "CSV with one row per metric")->required();
  c_anova->add_option("--table", table, "also write a plain-text table");

  AttributeOptions attribute;
  std::string category = "nouns";
  std::optional<std::string> sweep, svg;
  auto* c_attr = app.add_subcommand("attribute", "Human-vs-Machine attribution accuracy over basis sizes");
  c_attr->add_option("--features", attribute.features, "content CSV, or the extract output directory")->required();
  c_attr->add_option("--category", category, "content category (default nouns)");
  c_attr->add_option("--sweep", sweep, "basis sizes, start:stop:step or a comma list (default 100:1000:100)");
  c_attr->add_option("--out", attribute.out, "accuracy curve CSV")->required();
  c_attr->add_option("--svg", svg, "also write an SVG line chart");

  ReportOptions report;
  auto* c_report = app.add_subcommand("report", "summarise an output directory in one text file");
  c_report->add_option("--inputs", report.inputs, "directory with features.csv and curve CSVs")->required();
  c_report->add_option("--out", report.out, "summary file")->required();

  SynthOptions synth_opt;
  auto* c_synth = app.add_subcommand("synth", "generate a synthetic parallel corpus for testing");
  c_synth->add_option("--out-dir", synth_opt.out_dir, "output directory")->required();
  c_synth->add_option("--books", synth_opt.books, "number of books (default 25)");
  c_synth->add_option("--words", synth_opt.words, "words per translation (default 2400)");
  c_synth->add_option("--markers", synth_opt.markers, "marker nouns oversampled in Machine variants (default 20)");
  c_synth->add_option("--boost", synth_opt.boost, "marker oversampling factor; 1 means no difference (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  spdlog::set_level(spdlog::level::from_str(log_level));
  spdlog::set_pattern("%^%l%$: %v");
  try {
    const auto getenv_lookup = [](std::string_view name) -> std::optional<std::string> {
      const char* v = std::getenv(std::string(name).c_str());
      if (!v) return std::nullopt;
      return std::string(v);
    };
    RunConfig config = config_path ? load_config(*config_path, getenv_lookup) : RunConfig{};
    if (seed) config.seed = *seed;
    if (threads) config.threads = *threads;
    if (chunk_bytes) config.chunk_bytes = *chunk_bytes;
    if (max_chunks) config.max_chunks = *max_chunks;
    if (sweep) config.sweep = parse_sweep(*sweep);
    if (fw) config.function_words = *fw;
    if (tw) config.transition_words = *tw;
    if (pr) config.pronouns = *pr;
    if (emo) config.emotion_lexicon = *emo;
    config.validate();

    if (*c_ingest) {
      cmd_ingest(config, ingest);
    } else if (*c_attach) {
      if (!attach_variant.empty()) attach.variant = parse_variant(attach_variant);
      cmd_attach(config, attach);
    } else if (*c_translate) {
      translate.mode = mt::parse_mode(mode);
      cmd_translate(config, translate);
    } else if (*c_extract) {
      for (const auto& c : categories) extract.categories.push_back(parse_category(c));
      cmd_extract(config, extract);
    } else if (*c_anova) {
      if (table) anova.table = *table;
      cmd_anova(config, anova);
    } else if (*c_attr) {
      attribute.category = parse_category(category);
      if (svg) attribute.svg = *svg;
      cmd_attribute(config, attribute);
    } else if (*c_report) {
      cmd_report(config, report);
    } else if (*c_synth) {
      cmd_synth(config, synth_opt);
    }
  } catch (const std::exception& e) {
    std::cerr << "stylemark: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kOk;
}

}  // namespace stylemark::cli
