#include <doctest.h>

#include <algorithm>

#include "common/support.hpp"

using namespace spi;
using namespace spi::lc;

namespace {
bool has_target(const std::vector<LStep>& s, const std::string& rule, const char* target) {
  std::string k = alpha_key(parse_term(target));
  return std::any_of(s.begin(), s.end(), [&](auto& r) { return r.rule == rule && alpha_key(r.target) == k; });
}
}  // namespace

TEST_SUITE("lambda_syntax") {
  TEST_CASE("terms round-trip") {
    for (const char* s : {"x", "x[2]", "\\x. x1 [x1 <- x]", "fail{x,y}", "OK", "x1 <y> [x1 <- x]",
                          "x1 {< <y> / x1 >}", "x[1] {! !<y> / x !}", "(\\x. OK [<- x]) 1"}) {
      CAPTURE(s);
      L m = parse_term(s);
      CHECK(alpha_key(parse_term(print(m))) == alpha_key(m));
    }
    CHECK_THROWS(parse_term("\\x. y"));  // the body must share x
  }

  TEST_CASE("heads") {
    CHECK(head(parse_term("x <y>")).kind == Head::LinVar);
    CHECK(head(parse_term("x[2] <y>")).kind == Head::UnrVar);
    CHECK(head(parse_term("x[2] <y>")).index == 2);
    CHECK(head(parse_term("fail{} <y>")).kind == Head::Fail);
    CHECK(head(parse_term("OK <y>")).kind == Head::Success);
  }

  TEST_CASE("linear free variables") {
    NameSet s = llfv(parse_term("x <y> [z1 <- z]"));
    CHECK(s.count(intern("x")));
    CHECK(s.count(intern("y")));
    CHECK(s.count(intern("z")));
    CHECK(s.size() == 3);
  }

  TEST_CASE("beta then explicit substitution") {
    lc::LcFile f = parse_lc(read_file(test::corpus("running.lc")));
    auto s0 = step_all(test::lc_term(f, "M0"));
    REQUIRE(s0.size() == 1);
    CHECK(s0[0].rule == "Beta");
    auto s1 = step_all(s0[0].target);
    REQUIRE(s1.size() == 1);
    CHECK(s1[0].rule == "Ex-Sub");
    CHECK(alpha_key(s1[0].target) == alpha_key(test::lc_term(f, "M")));
  }

  TEST_CASE("the linear fetch picks each bag element") {
    lc::LcFile f = parse_lc(read_file(test::corpus("running.lc")));
    auto s = step_all(test::lc_term(f, "M"));
    CHECK(s.size() == 3);
    for (auto n : {"N1", "N2", "N3"}) {
      std::string k = alpha_key(test::lc_term(f, n));
      CAPTURE(n);
      CHECK(std::any_of(s.begin(), s.end(), [&](auto& r) { return r.rule == "Fetch-l" && alpha_key(r.target) == k; }));
    }
  }

  TEST_CASE("fetching from an unrestricted bag") {
    auto s = step_all(parse_term("x[1] {! !<y> / x !}"));
    CHECK(has_target(s, "Fetch-!", "y {! !<y> / x !}"));
    auto e = step_all(parse_term("x[1] {! !1 / x !}"));
    REQUIRE(e.size() == 1);
    CHECK(e[0].rule == "Fail-!");
  }

  TEST_CASE("bag size mismatch fails") {
    auto s = step_all(parse_term("(\\x. OK [<- x]) <y>"));
    REQUIRE(s.size() == 1);
    CHECK(s[0].rule == "Beta");
    auto t = step_all(s[0].target);
    REQUIRE(t.size() == 1);
    CHECK(has_fail(t[0].target));
  }

  TEST_CASE("expansion oracle inverts the corpus steps") {
    lc::LcFile f = parse_lc(read_file(test::corpus("running.lc")));
    auto pre = test::predecessors(test::lc_term(f, "M"));
    CHECK_FALSE(pre.empty());
  }
}
