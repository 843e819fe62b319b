#include <doctest.h>

#include <algorithm>

#include "common/support.hpp"
#include "spi/congruence.hpp"
#include "spi/eager.hpp"
#include "spi/typecheck.hpp"

using namespace spi;

namespace {
std::vector<ReductionStep> steps(const char* src) { return step_all(parse_process(src)); }
bool reaches(const std::vector<ReductionStep>& s, const char* target) {
  std::string k = canonical_key(parse_process(target));
  return std::any_of(s.begin(), s.end(), [&](auto& r) { return r.key == k; });
}
}  // namespace

TEST_SUITE("pi_eager") {
  TEST_CASE("close against wait") {
    auto s = steps("new x (close x | wait x. OK)");
    REQUIRE(s.size() == 1);
    CHECK(s[0].redex.rule == "1⊥");
    CHECK(reaches(s, "OK"));
  }

  TEST_CASE("output against input") {
    auto s = steps("new x (x!(y)(close y | close x) | x?(z). wait z. wait x. 0)");
    REQUIRE(s.size() == 1);
    CHECK(reaches(s, "new x (close x | new y (close y | wait y. wait x. 0))"));
  }

  TEST_CASE("forwarder") {
    auto s = steps("new x ([x<->y] | wait x. 0)");
    REQUIRE(s.size() == 1);
    CHECK(s[0].redex.rule == "Id");
    CHECK(reaches(s, "wait y. 0"));
  }

  TEST_CASE("selection and offer") {
    auto s = steps("new x (x#b. close x | x&{a: wait x. 0, b: wait x. OK})");
    REQUIRE(s.size() == 1);
    CHECK(reaches(s, "new x (close x | wait x. OK)"));
  }

  TEST_CASE("client against server copies the server") {
    auto s = steps("new x (?x!(y). wait y. 0 | !x?(z). close z)");
    REQUIRE(s.size() == 1);
    CHECK(reaches(s, "new x (new y (wait y. 0 | close y) | !x?(z). close z)"));
  }

  TEST_CASE("some and none") {
    auto a = steps("new x (some x. close x | expect x []. wait x. OK)");
    REQUIRE(a.size() == 1);
    CHECK(reaches(a, "new x (close x | wait x. OK)"));
    auto b = steps("new x (none x | expect x [y]. wait x. 0)");
    REQUIRE(b.size() == 1);
    CHECK(reaches(b, "none y"));
  }

  TEST_CASE("a step commits to the branch it uses") {
    auto s = steps("new x (close x | (wait x. OK ++ wait x. 0))");
    CHECK(s.size() == 2);
    CHECK(reaches(s, "OK"));
    CHECK(reaches(s, "0"));
    // branches not involved in the redex are discarded with it
    auto t = steps("new x (close x | (wait x. OK ++ close z))");
    CHECK(t.size() == 1);
    CHECK(reaches(t, "OK"));
  }

  TEST_CASE("the movie system has exactly three reducts") {
    SpiFile f = parse_spi(read_file(test::corpus("movie.spi")));
    auto s = step_all(test::spi_proc(f, "Sys"));
    CHECK(s.size() == 3);
    for (auto name : {"TCard", "TCash", "TPeek"}) {
      std::string k = canonical_key(test::spi_proc(f, name));
      CAPTURE(name);
      CHECK(std::any_of(s.begin(), s.end(), [&](auto& r) { return r.key == k; }));
    }
  }

  TEST_CASE("steps keep the typing") {
    SpiFile f = parse_spi(read_file(test::corpus("movie.spi")));
    Trace t = trace_exhaustive(test::spi_proc(f, "Full"), 20);
    CHECK_FALSE(t.bound_exhausted);
    for (auto& n : t.nodes) CHECK(typecheck(n.term, {}).ok);
    auto nf = normal_forms(t);
    CHECK(nf.size() == 1);
    CHECK(is_inert(nf[0]));
  }

  TEST_CASE("random traces are reproducible") {
    SpiFile f = parse_spi(read_file(test::corpus("movie.spi")));
    P p = test::spi_proc(f, "Full");
    Trace a = trace_random(p, 50, 9), b = trace_random(p, 50, 9);
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (size_t i = 0; i < a.nodes.size(); ++i) CHECK(a.nodes[i].key == b.nodes[i].key);
  }

  TEST_CASE("commitment paths count branch choices") {
    P p = parse_process("new x (close x | (wait x. OK ++ wait x. OK ++ wait x. 0))");
    auto cp = commitment_paths(p, 5, [](const P& q) { return step_all(q).empty(); });
    CHECK(cp.count == 2);  // OK ++ OK collapses to one branch
  }
}
