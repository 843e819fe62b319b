#include <doctest.h>

#include "common/support.hpp"
#include "spi/congruence.hpp"
#include "spi/translate.hpp"

using namespace spi;

namespace {
P tr(const char* m, TranslateOptions opt = {}) { return translate_term(lc::parse_term(m), intern("u"), opt); }
}  // namespace

TEST_SUITE("translate") {
  TEST_CASE("leaf clauses") {
    CHECK(print(tr("x")) == "some x. [x<->u]");
    CHECK(print(tr("OK")) == "OK");
    CHECK(canonical_key(tr("fail{x,y}")) == canonical_key(parse_process("(none u | none x | none y)")));
  }

  TEST_CASE("unrestricted variables request a copy and select the index") {
    P p = tr("x[2]");
    REQUIRE(p->kind == Kind::Client);
    CHECK(p->x == unr_channel(intern("x")));
    REQUIRE(p->p->kind == Kind::Select);
    CHECK(p->p->label == "2");
    CHECK(p->p->p->kind == Kind::Forward);
  }

  TEST_CASE("abstraction waits for a request on u") {
    P p = tr("\\x. x1 [x1 <- x]");
    CHECK(p->kind == Kind::Some);
    CHECK(p->x == intern("u"));
    CHECK(fn(p) == NameSet{intern("u")});
  }

  TEST_CASE("the translation only talks on u and the free variables") {
    lc::LcFile f = lc::parse_lc(read_file(test::corpus("running.lc")));
    P p = translate_term(test::lc_term(f, "M"), intern("u"));
    NameSet want{intern("u"), intern("y")};
    CHECK(fn(p) == want);
  }

  TEST_CASE("empty unrestricted substitution can be left out") {
    TranslateOptions omit;
    omit.omit_empty_usub = true;
    P full = tr("OK {! !1 / x !}"), small = tr("OK {! !1 / x !}", omit);
    CHECK(size(small) < size(full));
    CHECK(print(small) == "OK");
  }

  TEST_CASE("types translate to the monadic encoding") {
    CHECK(type_equal(translate_strict(lc::t_unit()), parse_type("maybe 1")));
    auto arrow = lc::parse_itype("(unit^1, unit) -> unit");
    T t = translate_strict(arrow);
    CHECK(t->k == TK::Maybe);
  }

  TEST_CASE("judgments are preserved") {
    for (auto& jt : test::judged_terms()) {
      CAPTURE(jt.name);
      auto r = check_translation_preservation(jt.term, jt.judgment);
      CHECK_MESSAGE(r.ok, r.error);
    }
  }

  TEST_CASE("names of the source are never reused") {
    P p = tr("x1 <y> [x1 <- x]");
    auto f = free_names(p).all;
    CHECK(f.count(intern("u")));
    CHECK(f.count(intern("y")));
    CHECK(f.count(intern("x")));
  }
}
