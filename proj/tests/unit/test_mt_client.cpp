#include <doctest.h>

#include <chrono>

#include "stylemark/csv.hpp"
#include "stylemark/mt_client.hpp"
#include "support.hpp"

using namespace stylemark;
using namespace stylemark::mt;
using namespace std::chrono_literals;

namespace {

const std::string kSource = "第一章 天色已晚。";

PromptSpec spec(Mode mode) { return {mode, "Mysterious Fantasy"}; }

// Clock that only moves when something sleeps.
struct FakeClock {
  std::chrono::steady_clock::time_point t{};
  std::vector<std::chrono::milliseconds> sleeps;

  Timing timing() {
    return {[this] { return t; },
            [this](std::chrono::milliseconds d) {
              sleeps.push_back(d);
              t += d;
            }};
  }
};

std::vector<std::string> chunks(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("第" + std::to_string(i) + "段。");
  return out;
}

}  // namespace

TEST_SUITE("mt_client") {
  TEST_CASE("prompts match the committed goldens") {
    CHECK(render_prompt(spec(Mode::S2S), kSource, std::nullopt) ==
          test::slurp(test::source_dir() / "golden" / "prompt_s2s.txt"));
    CHECK(render_prompt(spec(Mode::CTX), kSource, ContextPair{"序章。", "Prologue."}, 1) ==
          test::slurp(test::source_dir() / "golden" / "prompt_ctx.txt"));
  }

  TEST_CASE("prompt rules") {
    const auto p = render_prompt({Mode::S2S, "Fantasy"}, "x", std::nullopt);
    CHECK(p.find("recently released online popular Chinese novel about 'Fantasy'") != std::string::npos);
    const auto first = render_prompt(spec(Mode::CTX), kSource, std::nullopt, 0);
    CHECK(first.find("Previous") == std::string::npos);
    CHECK(first.ends_with("Current source text:\n" + kSource));
    CHECK_THROWS_AS(render_prompt(spec(Mode::CTX), kSource, std::nullopt, 3), UsageError);
    CHECK_THROWS_AS(render_prompt(spec(Mode::S2S), kSource, ContextPair{"a", "b"}), UsageError);
    CHECK_THROWS_AS(render_instruction({Mode::S2S, ""}), UsageError);
    CHECK(parse_mode("ctx") == Mode::CTX);
    CHECK_THROWS_AS(parse_mode("S2T"), UsageError);
  }

  TEST_CASE("status codes and completion bodies") {
    CHECK(classify_status(401) == EndpointError::Kind::Auth);
    CHECK(classify_status(403) == EndpointError::Kind::Auth);
    CHECK(classify_status(429) == EndpointError::Kind::Transient);
    CHECK(classify_status(503) == EndpointError::Kind::Transient);
    CHECK(classify_status(400) == EndpointError::Kind::Permanent);
    CHECK(parse_completion(R"({"choices":[{"message":{"role":"assistant","content":"Hi."}}]})") == "Hi.");
    CHECK_THROWS_AS(parse_completion("not json"), EndpointError);
    CHECK_THROWS_AS(parse_completion(R"({"choices":[]})"), EndpointError);
  }

  TEST_CASE("CTX prompts carry the previous source and output") {
    MockEndpoint mock;
    FakeClock clock;
    Translator tr(mock, EndpointConfig{}, clock.timing());
    const auto src = chunks(5);
    const auto records = tr.translate_book(spec(Mode::CTX), "7", src);
    REQUIRE(records.size() == 5);
    const auto sent = mock.requests();
    REQUIRE(sent.size() == 5);
    CHECK(sent[0].find("Previous") == std::string::npos);
    for (std::size_t i = 1; i < 5; ++i) {
      CHECK(sent[i].find(src[i - 1]) != std::string::npos);
      CHECK(sent[i].find(records[i - 1].output) != std::string::npos);
      CHECK(records[i].prompt == sent[i]);
    }
  }

  TEST_CASE("interrupted runs resume without repeating requests") {
    test::TempDir dir("resume");
    const auto path = dir.path() / "7.CTX.jsonl";
    const auto src = chunks(6);
    MockEndpoint first;
    first.fail_from(4, EndpointError::Kind::Permanent);
    FakeClock clock;
    {
      Translator tr(first, EndpointConfig{}, clock.timing());
      RecordWriter writer(path);
      try {
        tr.translate_book(spec(Mode::CTX), "7", src, {}, [&](const auto& r) { writer.append(r); });
        FAIL("expected TranslationHalted");
      } catch (const TranslationHalted& e) {
        CHECK(e.failed_chunk() == 3);
        CHECK(e.resume_token() == "7:CTX:3");
      }
    }
    auto done = read_records(path);
    REQUIRE(done.size() == 3);

    MockEndpoint second;
    Translator tr(second, EndpointConfig{}, clock.timing());
    const auto all = tr.translate_book(spec(Mode::CTX), "7", src, done);
    CHECK(second.request_count() == 3);
    REQUIRE(all.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) CHECK(all[i].chunk_index == i);
    CHECK(second.requests()[0].find(all[2].output) != std::string::npos);

    // An uninterrupted run produces identical prompts.
    MockEndpoint fresh;
    const auto clean = Translator(fresh, EndpointConfig{}, clock.timing()).translate_book(spec(Mode::CTX), "7", src);
    for (std::size_t i = 0; i < 6; ++i) CHECK(clean[i].prompt == all[i].prompt);
  }

  TEST_CASE("S2S in parallel matches S2S in sequence") {
    const auto src = chunks(9);
    MockEndpoint a, b;
    FakeClock clock;
    EndpointConfig cfg;
    cfg.requests_per_minute = 60000;
    const auto seq = Translator(a, cfg, clock.timing()).translate_book(spec(Mode::S2S), "1", src, {}, {}, 1);
    const auto par = Translator(b, cfg, clock.timing()).translate_book(spec(Mode::S2S), "1", src, {}, {}, 4);
    REQUIRE(seq.size() == par.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
      CHECK(seq[i].prompt == par[i].prompt);
      CHECK(seq[i].output == par[i].output);
    }
  }

  TEST_CASE("transient failures back off and retry") {
    MockEndpoint mock;
    mock.fail_request(1, EndpointError::Kind::Transient);
    mock.fail_request(2, EndpointError::Kind::Transient);
    FakeClock clock;
    Translator tr(mock, EndpointConfig{}, clock.timing());
    const auto r = tr.translate_chunk(spec(Mode::S2S), "1", 0, kSource, std::nullopt);
    CHECK(r.attempts == 3);
    CHECK(clock.sleeps == std::vector<std::chrono::milliseconds>{1000ms, 2000ms});
  }

  TEST_CASE("auth errors are not retried and retries run out") {
    MockEndpoint auth;
    auth.fail_from(1, EndpointError::Kind::Auth);
    FakeClock clock;
    Translator tr(auth, EndpointConfig{}, clock.timing());
    try {
      tr.translate_chunk(spec(Mode::S2S), "1", 0, kSource, std::nullopt);
      FAIL("expected EndpointError");
    } catch (const EndpointError& e) {
      CHECK(e.kind() == EndpointError::Kind::Auth);
    }
    CHECK(auth.request_count() == 1);

    MockEndpoint flaky;
    flaky.fail_from(1, EndpointError::Kind::Transient);
    Translator tr2(flaky, EndpointConfig{}, clock.timing());
    CHECK_THROWS_WITH_AS(tr2.translate_chunk(spec(Mode::S2S), "1", 0, kSource, std::nullopt),
                         doctest::Contains("giving up after 4 attempts"), EndpointError);
    CHECK(flaky.request_count() == 4);
  }

  TEST_CASE("oversized prompts fail before sending") {
    MockEndpoint mock;
    EndpointConfig cfg;
    cfg.max_prompt_tokens = 10;
    Translator tr(mock, cfg, FakeClock{}.timing());
    CHECK_THROWS_AS(tr.translate_chunk(spec(Mode::S2S), "1", 0, kSource, std::nullopt), EndpointError);
    CHECK(mock.request_count() == 0);
    CHECK(estimate_tokens("abcdefgh") == 2);
    CHECK(estimate_tokens("abcdefghi") == 3);
  }

  TEST_CASE("rate limiter spaces requests evenly") {
    FakeClock clock;
    RateLimiter limiter(120, clock.timing());
    for (int i = 0; i < 4; ++i) limiter.acquire();
    CHECK(clock.sleeps == std::vector<std::chrono::milliseconds>{500ms, 500ms, 500ms});
  }

  TEST_CASE("scripted mock and strict mode") {
    const auto prompt = render_prompt(spec(Mode::S2S), kSource, std::nullopt);
    MockEndpoint scripted({{csv::fnv1a(prompt), "Chapter one. It was late."}}, true);
    CHECK(scripted.complete(prompt) == "Chapter one. It was late.");
    CHECK_THROWS_AS(scripted.complete("other"), EndpointError);
    CHECK(MockEndpoint::default_output("p") == MockEndpoint::default_output("p"));
  }

  TEST_CASE("record files tolerate a torn final line") {
    test::TempDir dir("records");
    const auto path = dir.path() / "r.jsonl";
    TranslationRecord r{"1", 0, Mode::S2S, "p\n\"q\"", "out 中", 12.5, 1};
    CHECK(parse_record(to_json_line(r)) == r);
    auto r1 = r;
    r1.chunk_index = 1;
    test::write(path, "# header\n" + to_json_line(r) + "\n" + to_json_line(r) + "\n" + to_json_line(r1) + "\n" +
                          to_json_line(r).substr(0, 20));
    const auto back = read_records(path);
    REQUIRE(back.size() == 2);
    CHECK(back[1] == r1);
    test::write(path, to_json_line(r).substr(0, 20) + "\n" + to_json_line(r1) + "\n");
    CHECK_THROWS_AS(read_records(path), DataError);
  }
}
