#include <doctest.h>

#include <random>

#include "common/support.hpp"

using namespace spi;

TEST_SUITE("pi_syntax") {
  TEST_CASE("printing round-trips through the parser") {
    for (const char* src : {
             "0",
             "OK",
             "[x<->y]",
             "(close x | wait y. 0)",
             "new x (close x | wait x. 0)",
             "x!(y)(close y | close x)",
             "x?(y). wait y. wait x. 0",
             "x#l. close x",
             "x&{a: close x, b: wait x. 0}",
             "?x!(y). close y",
             "!x?(y). close y",
             "some x. close x",
             "none x",
             "expect x [y,z]. none x",
             "close x ++ none x",
         }) {
      CAPTURE(src);
      P p = parse_process(src);
      CHECK(print(p) == src);
      CHECK(same(parse_process(print(p)), p));
    }
  }

  TEST_CASE("prefix binds tighter than | and ++ is loosest") {
    P p = parse_process("wait x. close y | close z ++ 0");
    REQUIRE(p->kind == Kind::Choice);
    REQUIRE(p->p->kind == Kind::Par);
    CHECK(p->p->p->kind == Kind::Wait);
    CHECK(p->p->p->p->kind == Kind::Close);
  }

  TEST_CASE("random processes survive print and parse") {
    std::mt19937_64 rng(11);
    std::vector<Name> free{intern("a"), intern("b")};
    for (int i = 0; i < 200; ++i) {
      P p = test::random_process(rng, 3, free);
      std::string s = print(p);
      CAPTURE(s);
      CHECK(print(parse_process(s)) == s);
    }
  }

  TEST_CASE("parse errors carry a position") {
    try {
      parse_process("x?(y). \n  wait");
      FAIL("no error");
    } catch (const ParseError& e) {
      CHECK(e.line == 2);
      CHECK(e.col >= 3);
    }
    CHECK_THROWS_AS(parse_process("x&{a: 0, a: 0}"), ParseError);
    CHECK_THROWS_AS(parse_process("(close x"), ParseError);
    CHECK_THROWS_AS(parse_process("close x )"), ParseError);
  }

  TEST_CASE("free names respect binders") {
    P p = parse_process("x?(y). y!(z)(close z | close x) | !s?(w). close w");
    NameSet f = fn(p);
    CHECK(f.count(intern("x")));
    CHECK(f.count(intern("s")));
    CHECK_FALSE(f.count(intern("y")));
    CHECK_FALSE(f.count(intern("z")));
    CHECK_FALSE(f.count(intern("w")));
    CHECK(free_names(p).unrestricted.count(intern("s")));
  }

  TEST_CASE("substitution avoids capture") {
    P p = parse_process("x?(y). [y<->z]");
    P q = substitute(p, intern("y"), intern("z"));
    // the bound y is renamed, the free z becomes y
    REQUIRE(q->kind == Kind::Input);
    CHECK(q->y != intern("y"));
    CHECK(q->p->kind == Kind::Forward);
    CHECK(q->p->y == intern("y"));
    CHECK(q->p->x == q->y);
  }

  TEST_CASE("script declarations expand earlier names") {
    SpiFile f = parse_spi("A = close x;\nB = A | wait x. 0;\nB :: x: 1;\n");
    REQUIRE(f.find("B"));
    CHECK(print(f.find("B")->proc) == "(close x | wait x. 0)");
    REQUIRE(f.find("B")->ctx);
    CHECK(f.find("B")->ctx->size() == 1);
    CHECK(f.find("A")->ctx == std::nullopt);
  }

  TEST_CASE("size and width") {
    P p = parse_process("close x ++ (none x ++ some x. close x)");
    CHECK(nd_width(p) == 3);
    CHECK(nd_width(parse_process("wait x. (close y ++ close y)")) == 1);
    CHECK(size(parse_process("0")) == 1);
  }
}
