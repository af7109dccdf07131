#include <doctest.h>

#include <sstream>

#include "stylemark/csv.hpp"
#include "stylemark/error.hpp"
#include "stylemark/utf8.hpp"

using namespace stylemark;

TEST_SUITE("basics") {
  TEST_CASE("utf8 validation reports the first bad byte") {
    CHECK_FALSE(utf8::first_invalid("plain ascii").has_value());
    CHECK_FALSE(utf8::first_invalid("中文 😀").has_value());
    CHECK(utf8::first_invalid("ab\xC3").value() == 2);        // truncated sequence
    CHECK(utf8::first_invalid("a\xC0\xAF").value() == 1);     // overlong
    CHECK(utf8::first_invalid("x\xED\xA0\x80").value() == 1); // surrogate
  }

  TEST_CASE("utf8 decode and append round trip") {
    std::string s;
    for (char32_t cp : {U'A', U'é', U'中', U'😀'}) utf8::append(s, cp);
    CHECK(s == "Aé中😀");
    CHECK(utf8::count_scalars(s) == 4);
    CHECK(utf8::decode(s, 1).cp == U'é');
    CHECK(utf8::decode(s, 1).length == 2);
    CHECK(utf8::decode(s, 6).length == 4);
    CHECK_FALSE(utf8::is_boundary(s, 2));
    CHECK(utf8::decode("\xFF", 0).cp == 0xFFFD);
  }

  TEST_CASE("character classes") {
    CHECK(utf8::is_letter(U'ß'));
    CHECK(utf8::is_letter(U'龍'));
    CHECK_FALSE(utf8::is_letter(U'3'));
    CHECK(utf8::to_lower("ÉCOLE Über") == "école über");
    CHECK(utf8::is_sentence_terminator(U'。'));
    CHECK(utf8::is_closing_quote(U'”'));
    CHECK(utf8::is_apostrophe(U'’'));
  }

  TEST_CASE("csv parse handles quotes, comments and blank lines") {
    const auto rows = csv::parse("# header\nbook_id,title\n\n3,\"Hello, Mr. Major General\"\n4,\"say \"\"hi\"\"\"\n");
    REQUIRE(rows.size() == 3);
    CHECK(rows[1] == csv::Row{"3", "Hello, Mr. Major General"});
    CHECK(rows[2][1] == "say \"hi\"");
    CHECK_THROWS_AS(csv::parse("a,\"open\n"), DataError);
  }

  TEST_CASE("csv join escapes what parse needs") {
    const csv::Row row{"plain", "a,b", "q\"q", "#lead", "line\nbreak"};
    const auto back = csv::parse(csv::join(row) + "\n");
    REQUIRE(back.size() == 1);
    CHECK(back[0] == row);
  }

  TEST_CASE("fnv1a matches the published test vectors") {
    CHECK(csv::fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(csv::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(csv::fnv1a_hex("foobar") == "85944171f73967e8");
  }

  TEST_CASE("format_real round trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -0.0625}) {
      CHECK(std::stod(csv::format_real(v)) == v);
    }
  }

  TEST_CASE("header line carries version, seed and digest") {
    std::ostringstream os;
    csv::write_header(os, {42, ""});
    CHECK(os.str() == "# stylemark " STYLEMARK_VERSION " seed=42 config=none\n");
  }
}
