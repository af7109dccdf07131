#include <doctest.h>

#include "stylemark/cli.hpp"
#include "support.hpp"

using namespace stylemark;
using namespace stylemark::cli;

namespace {

std::optional<std::string> fake_env(std::string_view name) {
  if (name == "HOME_DIR") return "/data";
  return std::nullopt;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config lines interpolate the environment") {
    const auto e = parse_config("# comment\ncorpus = ${HOME_DIR}/c.jsonl\n\nseed=7\n", fake_env);
    CHECK(e.at("corpus") == "/data/c.jsonl");
    CHECK(e.at("seed") == "7");
    CHECK_THROWS_AS(parse_config("x = ${MISSING}\n", fake_env), UsageError);
    CHECK_THROWS_AS(parse_config("x = ${HOME_DIR\n", fake_env), UsageError);
    CHECK_THROWS_AS(parse_config("no equals sign\n", fake_env), UsageError);
    CHECK_THROWS_AS(parse_config("a = 1\na = 2\n", fake_env), UsageError);
  }

  TEST_CASE("known keys are applied and unknown keys rejected") {
    RunConfig c;
    apply_config(c, {{"seed", "9"},
                     {"sweep", "100:300:100"},
                     {"endpoint.model", "gpt-4o"},
                     {"endpoint.max_retries", "5"},
                     {"l2_lambda", "0.5"},
                     {"prompt.audience", "adults"}});
    CHECK(c.seed == 9);
    CHECK(c.sweep == std::vector<std::size_t>{100, 200, 300});
    CHECK(c.endpoint.model_name == "gpt-4o");
    CHECK(c.endpoint.max_retries == 5);
    CHECK(c.hyper.l2_lambda == 0.5);
    CHECK(c.audience == "adults");
    CHECK(c.digest.size() == 16);
    RunConfig d;
    apply_config(d, {{"prompt.audience", "adults"}, {"l2_lambda", "0.5"}, {"endpoint.max_retries", "5"},
                     {"endpoint.model", "gpt-4o"}, {"sweep", "100:300:100"}, {"seed", "9"}});
    CHECK(d.digest == c.digest);
    RunConfig bad;
    CHECK_THROWS_AS(apply_config(bad, {{"colour", "blue"}}), UsageError);
    CHECK_THROWS_AS(apply_config(bad, {{"seed", "many"}}), UsageError);
  }

  TEST_CASE("sweep lists") {
    CHECK(parse_sweep("100:1000:100").size() == 10);
    CHECK(parse_sweep("50, 20,50") == std::vector<std::size_t>{20, 50});
    CHECK_THROWS_AS(parse_sweep("0:10:5"), UsageError);
    CHECK_THROWS_AS(parse_sweep("10:5:1"), UsageError);
    CHECK_THROWS_AS(parse_sweep(""), UsageError);
    CHECK_THROWS_AS(parse_sweep("1,x"), UsageError);
  }

  TEST_CASE("exit codes by error type") {
    CHECK(exit_code_for(UsageError("u")) == kUsage);
    CHECK(exit_code_for(DataError("d")) == kData);
    CHECK(exit_code_for(EndpointError(EndpointError::Kind::Auth, "e")) == kEndpoint);
    CHECK(exit_code_for(std::runtime_error("x")) == kData);
  }

  TEST_CASE("run reports usage problems with exit code 1") {
    const char* no_cmd[] = {"stylemark", "frobnicate"};
    CHECK(run(2, no_cmd) == kUsage);
    const char* help[] = {"stylemark", "--help"};
    CHECK(run(2, help) == kOk);
    test::TempDir dir("cfg");
    test::write(dir.path() / "bad.conf", "unknown_key = 1\n");
    const std::string cfg = (dir.path() / "bad.conf").string();
    const char* bad_cfg[] = {"stylemark", "--config", cfg.c_str(), "report", "--inputs", ".", "--out", "x"};
    CHECK(run(8, bad_cfg) == kUsage);
  }
}
