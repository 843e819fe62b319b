#include <doctest.h>

#include <random>

#include "common/support.hpp"
#include "spi/typecheck.hpp"

using namespace spi;

namespace {
Derivation tc(const char* p, const char* ctx) { return typecheck(parse_process(p), parse_ctx(ctx)); }
TypeErrorKind kind_of(const Derivation& d) {
  REQUIRE_FALSE(d.ok);
  REQUIRE(d.error);
  return d.error->kind;
}
}  // namespace

TEST_SUITE("pi_types") {
  TEST_CASE("duality is an involution and matches the textbook table") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 300; ++i) {
      T a = test::random_type(rng, 3);
      CHECK(type_equal(dual(dual(a)), a));
      CHECK(test::oracle_text(dual(a)) == test::oracle_dual_text(a));
    }
    CHECK(type_equal(dual(parse_type("1 * bot")), parse_type("bot @ 1")));
    CHECK(type_equal(dual(parse_type("!1")), parse_type("?bot")));
  }

  TEST_CASE("types print and parse back") {
    for (const char* s : {"1", "bot", "1 * bot", "&{a: 1, b: bot}", "+{a: 1}", "!1", "?bot", "maybe 1", "expect bot"}) {
      CAPTURE(s);
      CHECK(type_equal(parse_type(print_type(parse_type(s))), parse_type(s)));
    }
  }

  TEST_CASE("well-typed processes") {
    CHECK(tc("new x (close x | wait x. 0)", "").ok);
    CHECK(tc("x!(y)(close y | close x)", "x: 1 * 1").ok);
    CHECK(tc("x?(y). wait y. wait x. 0", "x: bot @ bot").ok);
    CHECK(tc("x#a. close x", "x: +{a: 1, b: bot}").ok);
    CHECK(tc("x&{a: close x, b: close x}", "x: &{a: 1, b: 1}").ok);
    CHECK(tc("some x. close x", "x: maybe 1").ok);
    CHECK(tc("none x", "x: maybe 1").ok);
    CHECK(tc("expect x [y]. (wait x. 0 | some y. close y)", "x: expect bot, y: maybe 1").ok);
    CHECK(tc("!x?(y). close y", "x: !1").ok);
    CHECK(tc("?x!(y). wait y. 0", "x: ?bot").ok);
    // weakening and contraction of ?-names
    CHECK(tc("0", "x: ?1").ok);
    CHECK(tc("?x!(y). wait y. ?x!(z). wait z. 0", "x: ?bot").ok);
    CHECK(tc("close x ++ close x", "x: 1").ok);
  }

  TEST_CASE("the movie server and the composed system") {
    SpiFile f = parse_spi(read_file(test::corpus("movie.spi")));
    for (auto name : {"Movies", "Sys", "Full", "TCard", "TCash", "TPeek"}) {
      const SpiDecl* d = f.find(name);
      REQUIRE(d);
      CAPTURE(name);
      CHECK(typecheck(d->proc, d->ctx.value_or(TypingCtx{})).ok);
    }
  }

  TEST_CASE("each error kind") {
    CHECK(kind_of(tc("close x", "")) == TypeErrorKind::UnboundName);
    CHECK(kind_of(tc("0", "x: 1")) == TypeErrorKind::LinearNameUnused);
    CHECK(kind_of(tc("(close x | close x)", "x: 1")) == TypeErrorKind::LinearNameReused);
    CHECK(kind_of(tc("close x", "x: bot")) == TypeErrorKind::TypeMismatch);
    CHECK(kind_of(tc("close x ++ 0", "x: 1")) == TypeErrorKind::BranchContextMismatch);
    CHECK(kind_of(tc("expect x []. (wait x. 0 | close y)", "x: expect bot, y: 1")) ==
          TypeErrorKind::NonMonadicContextForExpect);
    CHECK(kind_of(tc("!x?(y). (close y | close z)", "x: !1, z: 1")) == TypeErrorKind::NonServerContextForBang);
  }

  TEST_CASE("OK stands for any maybe-typed names") {
    CHECK(tc("OK", "").ok);
    CHECK(tc("OK", "u: maybe 1").ok);
    CHECK(tc("OK", "u: ?1").ok);
    CHECK_FALSE(tc("OK", "u: 1").ok);
    CHECK(tc("new v (OK | expect v [u]. (v?(b). wait b. wait v. 0 | none u))", "u: maybe 1").ok);
    // ... but not under a server
    CHECK_FALSE(tc("!x?(y). (close y | OK)", "x: !1, u: maybe 1").ok);
  }

  TEST_CASE("every corpus context checks") {
    size_t n = 0;
    for (auto& tp : test::typed_processes()) {
      CAPTURE(tp.name);
      Derivation d = typecheck(tp.proc, tp.ctx);
      CHECK(d.ok);
      ++n;
    }
    CHECK(n >= 100);
  }

  TEST_CASE("progress probe") {
    DeadlockProbe p = probe_deadlock_freedom(parse_process("new x (close x | wait x. 0)"));
    CHECK(p.precondition_ok);
    CHECK(p.progress);
    DeadlockProbe q = probe_deadlock_freedom(parse_process("close x"));
    CHECK_FALSE(q.precondition_ok);
    // a choice of two unused servers is typable, yet cannot step and is not 0
    DeadlockProbe r = probe_deadlock_freedom(parse_process("new x (0 | (!x?(y). y#a. close y ++ !x?(y). y#b. close y))"));
    CHECK(r.precondition_ok);
    CHECK_FALSE(r.progress);
  }
}
