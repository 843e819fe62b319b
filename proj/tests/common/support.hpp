#pragma once
// Corpus loading, random generators and the independent oracles shared by the
// unit tests and the acceptance binary.
#include <algorithm>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "spi/lambda.hpp"
#include "spi/lc_parse.hpp"
#include "spi/parse.hpp"
#include "spi/process.hpp"
#include "spi/session_type.hpp"

namespace spi::test {

inline std::string corpus(const std::string& file) { return std::string(SPI_CORPUS) + "/" + file; }

struct TypedProcess {
  std::string name;
  P proc;
  TypingCtx ctx;
};

// every .spi declaration that carries a context
inline std::vector<TypedProcess> typed_processes() {
  std::vector<TypedProcess> out;
  for (auto file : {"movie.spi", "vm.spi", "generated.spi"}) {
    SpiFile f = parse_spi(read_file(corpus(file)));
    for (auto& d : f.decls)
      if (d.ctx) out.push_back({std::string(file) + ":" + d.name, d.proc, *d.ctx});
  }
  return out;
}

struct JudgedTerm {
  std::string name;
  lc::L term;
  lc::Judgment judgment;
};

inline std::vector<JudgedTerm> judged_terms() {
  std::vector<JudgedTerm> out;
  for (auto file : {"running.lc", "lambda.lc"}) {
    lc::LcFile f = lc::parse_lc(read_file(corpus(file)));
    for (auto& d : f.decls)
      for (auto& j : d.judgments) out.push_back({std::string(file) + ":" + d.name, d.term, j});
  }
  return out;
}

inline const lc::L& lc_term(const lc::LcFile& f, const std::string& name) { return f.find(name)->term; }
inline P spi_proc(const SpiFile& f, const std::string& name) { return f.find(name)->proc; }

// ---- random session types and the textbook dual ----

inline T random_type(std::mt19937_64& rng, int depth) {
  auto pick = [&](int n) { return std::uniform_int_distribution<>(0, n - 1)(rng); };
  int k = depth <= 0 ? pick(2) : pick(10);
  auto ls = [&] {
    std::map<std::string, T> m;
    int n = 1 + pick(3);
    for (int i = 0; i < n; ++i) m.emplace(std::string(1, static_cast<char>('a' + pick(4))), random_type(rng, depth - 1));
    return m;
  };
  switch (k) {
    case 0: return t_one();
    case 1: return t_bot();
    case 2: return t_tensor(random_type(rng, depth - 1), random_type(rng, depth - 1));
    case 3: return t_par(random_type(rng, depth - 1), random_type(rng, depth - 1));
    case 4: return t_plus(ls());
    case 5: return t_with(ls());
    case 6: return t_maybe(random_type(rng, depth - 1));
    case 7: return t_expect(random_type(rng, depth - 1));
    case 8: return t_bang(random_type(rng, depth - 1));
    default: return t_query(random_type(rng, depth - 1));
  }
}

// the dual written out as text, without the library's dual()
inline std::string oracle_dual_text(const T& t) {
  auto labels = [](const T& t, const char* open) {
    std::string s = open;
    bool first = true;
    for (auto& [l, a] : t->labels) {
      s += (first ? "" : ", ") + l + ": " + oracle_dual_text(a);
      first = false;
    }
    return s + "}";
  };
  switch (t->k) {
    case TK::One: return "bot";
    case TK::Bot: return "1";
    case TK::Tensor: return "(" + oracle_dual_text(t->a) + " @ " + oracle_dual_text(t->b) + ")";
    case TK::Par: return "(" + oracle_dual_text(t->a) + " * " + oracle_dual_text(t->b) + ")";
    case TK::Plus: return labels(t, "&{");
    case TK::With: return labels(t, "+{");
    case TK::Maybe: return "(+)" + oracle_dual_text(t->a);
    case TK::Expect: return "&" + oracle_dual_text(t->a);
    case TK::Bang: return "?" + oracle_dual_text(t->a);
    case TK::Query: return "!" + oracle_dual_text(t->a);
    default: return "?";
  }
}

// same fully parenthesised rendering for a type as given
inline std::string oracle_text(const T& t) {
  auto labels = [](const T& t, const char* open) {
    std::string s = open;
    bool first = true;
    for (auto& [l, a] : t->labels) {
      s += (first ? "" : ", ") + l + ": " + oracle_text(a);
      first = false;
    }
    return s + "}";
  };
  switch (t->k) {
    case TK::One: return "1";
    case TK::Bot: return "bot";
    case TK::Tensor: return "(" + oracle_text(t->a) + " * " + oracle_text(t->b) + ")";
    case TK::Par: return "(" + oracle_text(t->a) + " @ " + oracle_text(t->b) + ")";
    case TK::Plus: return labels(t, "+{");
    case TK::With: return labels(t, "&{");
    case TK::Maybe: return "&" + oracle_text(t->a);
    case TK::Expect: return "(+)" + oracle_text(t->a);
    case TK::Bang: return "!" + oracle_text(t->a);
    case TK::Query: return "?" + oracle_text(t->a);
    default: return "?";
  }
}

// ---- random (untyped) processes ----

inline P random_process(std::mt19937_64& rng, int depth, const std::vector<Name>& free) {
  auto pick = [&](int n) { return std::uniform_int_distribution<>(0, n - 1)(rng); };
  auto any = [&] { return free[static_cast<size_t>(pick(static_cast<int>(free.size())))]; };
  if (depth <= 0) {
    switch (pick(4)) {
      case 0: return zero();
      case 1: return close_(any());
      case 2: return none(any());
      default: return fwd(any(), any());
    }
  }
  auto sub = [&](std::vector<Name> fs) { return random_process(rng, depth - 1, fs); };
  std::vector<Name> more = free;
  Name y = fresh("y");
  more.push_back(y);
  switch (pick(11)) {
    case 0: return par(sub(free), sub(free));
    case 1: return choice(sub(free), sub(free));
    case 2: return nu(y, sub(more), sub(more));
    case 3: return out(any(), y, sub(more), sub(free));
    case 4: return in(any(), y, sub(more));
    case 5: return sel(any(), pick(2) ? "a" : "b", sub(free));
    case 6: return branch(any(), {{"a", sub(free)}, {"b", sub(free)}});
    case 7: return wait(any(), sub(free));
    case 8: return some(any(), sub(free));
    case 9: return expect(any(), {}, sub(free));
    default: return server(any(), y, sub(more));
  }
}

// ---- unguarded-prefix scan on the raw term (no canonical form) ----

// subject text of each unguarded prefix; restricted subjects print as "_"
inline void raw_unguarded(const P& p, std::vector<std::string>& out, std::vector<Name>& bound) {
  switch (p->kind) {
    case Kind::Inaction: case Kind::Forward: case Kind::Success: return;
    case Kind::Par: case Kind::Choice:
      raw_unguarded(p->p, out, bound);
      raw_unguarded(p->q, out, bound);
      return;
    case Kind::Restrict:
      bound.push_back(p->x);
      raw_unguarded(p->p, out, bound);
      raw_unguarded(p->q, out, bound);
      bound.pop_back();
      return;
    default: break;
  }
  bool b = std::find(bound.begin(), bound.end(), p->x) != bound.end();
  std::string s = b ? "_" : text(p->x);
  switch (p->kind) {
    case Kind::Output: out.push_back(s + "!(_)"); break;
    case Kind::Input: out.push_back(s + "?(_)"); break;
    case Kind::Select: out.push_back(s + "#" + p->label); break;
    case Kind::Close: out.push_back("close " + s); break;
    case Kind::Some: out.push_back("some " + s); break;
    case Kind::None: out.push_back("none " + s); break;
    case Kind::Wait: out.push_back("wait " + s); break;
    default: out.push_back("other " + s); break;
  }
}

// ---- expansion oracle: single-step predecessors by inverting Beta and Ex-Sub ----

inline std::vector<lc::L> inverse_root(const lc::L& m) {
  using namespace lc;
  std::vector<L> out;
  // M [xs <- x] {| B / x |}  <-Beta-  (\x. M [xs <- x]) B
  if (m->kind == LKind::ISub && m->m->kind == LKind::Share && m->m->x == m->x)
    out.push_back(app(abs(m->x, m->m), m->bag));
  // M {< C / xs >} {! U / x !}  <-Ex-Sub-  M [xs <- x] {| C * U / x |}
  if (m->kind == LKind::USub && m->m->kind == LKind::LSub) {
    const L& ls = m->m;
    Bag b{ls->bag.lin, m->bag.unr};
    out.push_back(isub(share(ls->m, ls->xs, m->x), b, m->x));
  }
  // an empty linear substitution is dropped by Ex-Sub
  if (m->kind == LKind::USub) {
    Bag b{{}, m->bag.unr};
    out.push_back(isub(share(m->m, {}, m->x), b, m->x));
  }
  return out;
}

inline std::vector<lc::L> expansions(const lc::L& m) {
  using namespace lc;
  std::vector<L> out = inverse_root(m);
  auto rebuild = [&](const L& inner, auto mk) {
    for (auto& e : expansions(inner)) out.push_back(mk(e));
  };
  switch (m->kind) {
    case LKind::App: rebuild(m->m, [&](const L& e) { return app(e, m->bag); }); break;
    case LKind::ISub: rebuild(m->m, [&](const L& e) { return isub(e, m->bag, m->x); }); break;
    case LKind::LSub: rebuild(m->m, [&](const L& e) { return lsub(e, m->bag.lin, m->xs); }); break;
    case LKind::USub: rebuild(m->m, [&](const L& e) { return usub(e, m->bag.unr, m->x); }); break;
    case LKind::Share: rebuild(m->m, [&](const L& e) { return share(e, m->xs, m->x); }); break;
    default: break;
  }
  return out;
}

// the candidates that really step to m
inline std::vector<lc::L> predecessors(const lc::L& m) {
  std::vector<lc::L> out;
  std::string k = lc::alpha_key(m);
  for (auto& e : expansions(m))
    for (auto& s : lc::step_all(e))
      if (lc::alpha_key(s.target) == k) {
        out.push_back(e);
        break;
      }
  return out;
}

}  // namespace spi::test
