#include <doctest.h>

#include <algorithm>

#include "common/support.hpp"
#include "spi/congruence.hpp"
#include "spi/equivalence.hpp"

using namespace spi;

namespace {
P pp(const char* s) { return parse_process(s); }
std::set<std::string> raw_ready(const P& p) {
  std::vector<std::string> out;
  std::vector<Name> bound;
  test::raw_unguarded(p, out, bound);
  return {out.begin(), out.end()};
}
std::set<std::string> texts(const std::set<Prefix>& ps) {
  std::set<std::string> out;
  for (auto& p : ps) out.insert(p.erased());
  return out;
}
}  // namespace

TEST_SUITE("equivalence") {
  TEST_CASE("ready prefixes of the vending machine interfaces") {
    SpiFile f = parse_spi(read_file(test::corpus("vm.spi")));
    P a = test::spi_proc(f, "IF1"), b = test::spi_proc(f, "IF2");
    CHECK(raw_ready(a) == std::set<std::string>{"x!(_)"});
    CHECK(raw_ready(b) == std::set<std::string>{"x!(_)"});
    CHECK(ready_keys(a) == ready_keys(b));
    CHECK(texts(ready_prefixes(a)) == texts(ready_prefixes(b)));
  }

  TEST_CASE("ready prefixes skip guarded and cut actions") {
    auto r = ready_prefixes(pp("(wait x. close y | new z (close z | wait z. 0) | none w)"));
    std::set<std::string> subjects;
    for (auto& p : r) subjects.insert(p.subject);
    CHECK(subjects.count("x"));
    CHECK(subjects.count("w"));
    CHECK_FALSE(subjects.count("y"));
  }

  TEST_CASE("compatibility") {
    auto one = [](const char* s) { return *ready_prefixes(pp(s)).begin(); };
    CHECK(prefix_compatible(one("x!(y)(close y | close x)"), one("x!(z)(wait z. 0 | close x)")));
    CHECK(prefix_compatible(one("x?(y). close y"), one("x?(z). wait z. 0")));
    CHECK(prefix_compatible(one("x#a. 0"), one("x#a. close x")));
    CHECK_FALSE(prefix_compatible(one("x#a. 0"), one("x#b. 0")));
    CHECK_FALSE(prefix_compatible(one("close x"), one("close y")));
    CHECK_FALSE(prefix_compatible(one("some x. 0"), one("none x")));
  }

  TEST_CASE("choice precongruence") {
    CHECK(nd_precongruence(pp("close x ++ none x"), pp("close x")));
    CHECK(nd_precongruence(pp("close x ++ none x"), pp("none x")));
    CHECK(nd_precongruence(pp("close x"), pp("close x")));
    CHECK_FALSE(nd_precongruence(pp("close x"), pp("close x ++ none x")));
    CHECK(nd_precongruence(pp("((close x ++ none x) | wait y. 0)"), pp("(none x | wait y. 0)")));
    CHECK(nd_precongruence(pp("new x ((close x ++ none x) | wait x. 0)"), pp("new x (close x | wait x. 0)")));
    CHECK(nd_precongruence(pp("close x ++ none x ++ some x. 0"), pp("none x ++ close x")));
    // resolution does not look under prefixes
    CHECK_FALSE(nd_precongruence(pp("wait y. (close x ++ none x)"), pp("wait y. close x")));
  }

  TEST_CASE("bisimilarity is reflexive and symmetric on the corpus") {
    SpiFile f = parse_spi(read_file(test::corpus("movie.spi")));
    P sys = test::spi_proc(f, "Sys");
    CHECK(bisim_eager(sys, sys).verdict == Verdict::Bisimilar);
    P card = test::spi_proc(f, "TCard"), cash = test::spi_proc(f, "TCash");
    auto ab = bisim_eager(card, cash), ba = bisim_eager(cash, card);
    CHECK(ab.verdict == ba.verdict);
  }

  TEST_CASE("committing early is observable") {
    SpiFile f = parse_spi(read_file(test::corpus("vm.spi")));
    auto r = bisim_eager(test::spi_proc(f, "VM1"), test::spi_proc(f, "VM2"));
    CHECK(r.verdict == Verdict::Distinguished);
    CHECK_FALSE(r.difference.empty());
    CHECK_FALSE(r.moves.empty());
  }

  TEST_CASE("differing ready sets are distinguished at once") {
    auto r = bisim_eager(pp("close x"), pp("none x"));
    CHECK(r.verdict == Verdict::Distinguished);
    CHECK(r.moves.empty());
  }

  TEST_CASE("success") {
    CHECK(succeeds_pi(pp("OK"), 0).success);
    CHECK(succeeds_pi(pp("new x (close x | wait x. OK)"), 1).success);
    CHECK_FALSE(succeeds_pi(pp("new x (close x | wait x. OK)"), 0).success);
    CHECK_FALSE(succeeds_pi(pp("new x (close x | wait x. 0)"), 5).success);
    CHECK(succeeds_lambda(lc::parse_term("OK"), 0).success);
    CHECK(succeeds_lambda(lc::parse_term("(\\x. OK [<- x]) 1"), 5).success);
    CHECK_FALSE(succeeds_lambda(lc::parse_term("fail{}"), 5).success);
  }

  TEST_CASE("success sensitivity on small terms") {
    for (const char* m : {"OK", "(\\x. OK [<- x]) 1", "(\\x. OK [<- x]) <OK>", "fail{}"}) {
      CAPTURE(m);
      auto r = check_success_sensitivity(lc::parse_term(m), 10);
      CHECK(r.agree());
    }
  }

  TEST_CASE("loose completeness on the running example") {
    lc::LcFile f = lc::parse_lc(read_file(test::corpus("running.lc")));
    auto r = check_loose_completeness(test::lc_term(f, "M"), 30);
    CHECK(r.ok);
    CHECK(r.witnesses.size() == 3);
    for (auto& w : r.witnesses) CHECK(w.q);
  }
}
