#include "spi/parse.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "lexer.hpp"

namespace spi {
namespace detail {

void Lexer::run() {
  static const char* spi_syms[] = {"<->", "++", "::", "..", "+{", "&{", "(", ")", "[", "]", "{", "}",
                                   "|", ",", ".", ";", ":", "!", "?", "#", "&", "*", "@", "=", "~"};
  static const char* lc_syms[] = {"{|", "|}", "{!", "!}", "{<", ">}", "<-", "|=", "|-", "->", "::", "\\", ".",
                                  "(",  ")",  "[",  "]",  "{",  "}",  "<",  ">",  ",",  "*",  "!",
                                  ";",  ":",  "=",  "^",  "/",  "&",  "+"};
  int line = 1, col = 1;
  size_t i = 0;
  auto adv = [&](size_t n) {
    for (size_t k = 0; k < n; ++k, ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src_.size()) {
    char c = src_[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
      continue;
    }
    if (c == '-' && i + 1 < src_.size() && src_[i + 1] == '-') {
      while (i < src_.size() && src_[i] != '\n') adv(1);
      continue;
    }
    Tok t{Tok::Sym, "", line, col};
    if (is_ident_start(c)) {
      size_t j = i;
      while (j < src_.size() && is_ident_char(src_[j])) ++j;
      t.kind = Tok::Ident;
      t.s = std::string(src_.substr(i, j - i));
      adv(j - i);
      toks_.push_back(t);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
      t.kind = Tok::Number;
      t.s = std::string(src_.substr(i, j - i));
      adv(j - i);
      toks_.push_back(t);
      continue;
    }
    bool matched = false;
    auto try_syms = [&](auto& syms) {
      for (const char* s : syms) {
        std::string_view sv(s);
        if (src_.substr(i, sv.size()) == sv) {
          t.s = std::string(sv);
          adv(sv.size());
          matched = true;
          return;
        }
      }
    };
    if (lc_) try_syms(lc_syms);
    else try_syms(spi_syms);
    if (!matched) throw ParseError(line, col, std::string("unexpected character `") + c + "`");
    toks_.push_back(t);
  }
  toks_.push_back({Tok::End, "", line, col});
}

}  // namespace detail

using detail::Lexer;
using detail::Tok;

namespace {

bool is_upper(const std::string& s) { return !s.empty() && std::isupper(static_cast<unsigned char>(s[0])); }

struct ProcParser {
  Lexer& lx;
  const std::map<std::string, P>* defs;

  P proc() {
    std::vector<P> items{par_expr()};
    while (lx.eat("++")) items.push_back(par_expr());
    return choice_all(items);
  }

  P par_expr() {
    std::vector<P> items{pre()};
    while (lx.eat("|")) items.push_back(pre());
    if (items.size() == 1) return items[0];
    P acc = items.back();
    for (size_t i = items.size() - 1; i-- > 0;) acc = par(items[i], acc);
    return acc;
  }

  // "(L | R)" as the body of new / output
  std::pair<P, P> pair(const char* what) {
    lx.expect("(");
    P body = proc();
    lx.expect(")");
    if (body->kind != Kind::Par) lx.fail(std::string(what) + " needs a body of the form (P | Q)");
    return {body->p, body->q};
  }

  Name name() { return intern(lx.ident("name")); }

  P pre() {
    const Tok& t = lx.peek();
    if (t.kind == Tok::Number && t.s == "0") {
      lx.next();
      return zero();
    }
    if (lx.eat("(")) {
      P p = proc();
      lx.expect(")");
      return p;
    }
    if (lx.eat("[")) {
      Name x = name();
      lx.expect("<->");
      Name y = name();
      lx.expect("]");
      return fwd(x, y);
    }
    if (lx.eat("?")) {
      Name x = name();
      lx.expect("!");
      lx.expect("(");
      Name y = name();
      lx.expect(")");
      lx.expect(".");
      return client(x, y, pre());
    }
    if (lx.eat("!")) {
      Name x = name();
      lx.expect("?");
      lx.expect("(");
      Name y = name();
      lx.expect(")");
      lx.expect(".");
      return server(x, y, pre());
    }
    if (t.kind != Tok::Ident) lx.fail("expected a process");
    const Tok& nx = lx.peek(1);
    bool action_follows = nx.kind == Tok::Sym && (nx.s == "!" || nx.s == "?" || nx.s == "#" || nx.s == "&{");
    if (!action_follows) {
      if (t.s == "OK") {
        lx.next();
        return ok();
      }
      if (t.s == "new") {
        lx.next();
        Name x = name();
        auto [l, r] = pair("new");
        return nu(x, l, r);
      }
      if (t.s == "close") {
        lx.next();
        return close_(name());
      }
      if (t.s == "none") {
        lx.next();
        return none(name());
      }
      if (t.s == "wait" || t.s == "some") {
        bool w = t.s == "wait";
        lx.next();
        Name x = name();
        lx.expect(".");
        P k = pre();
        return w ? wait(x, k) : some(x, k);
      }
      if (t.s == "expect") {
        lx.next();
        Name x = name();
        std::vector<Name> ws;
        lx.expect("[");
        if (!lx.at("]")) {
          ws.push_back(name());
          while (lx.eat(",")) ws.push_back(name());
        }
        lx.expect("]");
        lx.expect(".");
        return expect(x, ws, pre());
      }
      if (is_upper(t.s)) {
        std::string ref = lx.ident();
        auto it = defs ? defs->find(ref) : decltype(defs->end()){};
        if (!defs || it == defs->end()) {
          lx.reset(lx.mark() - 1);
          lx.fail("undefined process " + ref);
        }
        return freshen(it->second);
      }
      lx.fail("expected a process");
    }
    Name x = name();
    if (lx.eat("!")) {
      lx.expect("(");
      Name y = name();
      lx.expect(")");
      auto [l, r] = pair("output");
      return out(x, y, l, r);
    }
    if (lx.eat("?")) {
      lx.expect("(");
      Name y = name();
      lx.expect(")");
      lx.expect(".");
      return in(x, y, pre());
    }
    if (lx.eat("#")) {
      std::string l = lx.label();
      lx.expect(".");
      return sel(x, l, pre());
    }
    lx.expect("&{");
    Branches bs;
    do {
      std::string l = lx.label();
      lx.expect(":");
      P b = proc();
      if (!bs.emplace(l, b).second) lx.fail("duplicate label " + l);
    } while (lx.eat(","));
    lx.expect("}");
    return branch(x, std::move(bs));
  }
};

struct TypeParser {
  Lexer& lx;

  T type() {
    T a = unary();
    if (lx.eat("*")) return t_tensor(a, type());
    if (lx.eat("@")) return t_par(a, type());
    return a;
  }

  std::map<std::string, T> rows() {
    std::map<std::string, T> ls;
    if (lx.at("}")) lx.fail("empty label set");
    do {
      std::string l = lx.label();
      lx.expect(":");
      if (!ls.emplace(l, type()).second) lx.fail("duplicate label " + l);
    } while (lx.eat(","));
    lx.expect("}");
    return ls;
  }

  T unary() {
    const Tok& t = lx.peek();
    if (t.kind == Tok::Number && t.s == "1") {
      lx.next();
      return t_one();
    }
    if (lx.eat("(")) {
      T a = type();
      lx.expect(")");
      return a;
    }
    if (lx.eat("?")) return t_query(unary());
    if (lx.eat("!")) return t_bang(unary());
    if (lx.eat("+{")) return t_plus(rows());
    if (lx.eat("&{")) return t_with(rows());
    if (lx.at_ident("bot")) {
      lx.next();
      return t_bot();
    }
    if (lx.at_ident("maybe")) {
      lx.next();
      return t_maybe(unary());
    }
    if (lx.at_ident("expect")) {
      lx.next();
      return t_expect(unary());
    }
    lx.fail("expected a session type");
  }

  TypingCtx ctx(std::initializer_list<const char*> stops) {
    TypingCtx g;
    auto stop = [&] {
      if (lx.done()) return true;
      for (auto s : stops)
        if (lx.at(s)) return true;
      return false;
    };
    if (stop()) return g;
    do {
      Name x = intern(lx.ident("name"));
      lx.expect(":");
      T a = type();
      if (lookup(g, x)) lx.fail("name " + text(x) + " twice in a context");
      g.emplace_back(x, a);
    } while (lx.eat(","));
    return g;
  }
};

void expect_end(Lexer& lx) {
  if (!lx.done()) lx.fail("trailing input");
}

}  // namespace

P parse_process(std::string_view src) {
  Lexer lx(src, false);
  ProcParser pp{lx, nullptr};
  P p = pp.proc();
  expect_end(lx);
  return p;
}

T parse_type(std::string_view src) {
  Lexer lx(src, false);
  TypeParser tp{lx};
  T t = tp.type();
  expect_end(lx);
  return t;
}

TypingCtx parse_ctx(std::string_view src) {
  Lexer lx(src, false);
  TypeParser tp{lx};
  TypingCtx g = tp.ctx({});
  expect_end(lx);
  return g;
}

const SpiDecl* SpiFile::find(const std::string& name) const {
  for (auto& d : decls)
    if (d.name == name) return &d;
  return nullptr;
}

SpiFile parse_spi(std::string_view src) {
  Lexer lx(src, false);
  SpiFile f;
  std::map<std::string, P> defs;
  std::map<std::string, TypingCtx> ctxs;
  while (!lx.done()) {
    int line = lx.peek().line;
    std::string name = lx.ident("declaration name");
    if (lx.eat("::")) {
      TypeParser tp{lx};
      TypingCtx g = tp.ctx({";"});
      lx.expect(";");
      if (ctxs.count(name)) lx.fail("second context for " + name);
      ctxs[name] = g;
      if (auto* d = const_cast<SpiDecl*>(f.find(name))) d->ctx = g;
      continue;
    }
    lx.expect("=");
    ProcParser pp{lx, &defs};
    P p = pp.proc();
    lx.expect(";");
    if (defs.count(name)) throw ParseError(line, 1, "second definition of " + name);
    defs[name] = p;
    SpiDecl d{name, p, std::nullopt, line};
    if (auto it = ctxs.find(name); it != ctxs.end()) d.ctx = it->second;
    f.decls.push_back(std::move(d));
  }
  return f;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace spi
