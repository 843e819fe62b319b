#include "spi/lc_parse.hpp"

#include <cctype>
#include <map>

#include "lexer.hpp"

namespace spi::lc {

using detail::Lexer;
using detail::Tok;

namespace {

bool is_upper(const std::string& s) { return !s.empty() && std::isupper(static_cast<unsigned char>(s[0])); }

struct TermParser {
  Lexer& lx;
  const std::map<std::string, L>* defs;

  Name name() { return intern(lx.ident("variable")); }

  std::vector<Name> names(std::initializer_list<const char*> stops) {
    std::vector<Name> xs;
    for (auto s : stops)
      if (lx.at(s)) return xs;
    xs.push_back(name());
    while (lx.eat(",")) xs.push_back(name());
    return xs;
  }

  L term() {
    if (lx.eat("\\")) {
      Name x = name();
      lx.expect(".");
      L body = term();
      if (body->kind != LKind::Share || body->x != x) lx.fail("the body of \\" + text(x) + ". must be a sharing on " + text(x));
      return abs(x, body);
    }
    return postfix();
  }

  L postfix() {
    L m = application();
    for (;;) {
      if (lx.eat("[")) {
        std::vector<Name> xs = names({"<-"});
        lx.expect("<-");
        Name x = name();
        lx.expect("]");
        m = share(m, xs, x);
      } else if (lx.eat("{|")) {
        Bag b = bag();
        lx.expect("/");
        Name x = name();
        lx.expect("|}");
        m = isub(m, b, x);
      } else if (lx.eat("{<")) {
        LinBag c = linbag();
        lx.expect("/");
        std::vector<Name> xs = names({">}"});
        lx.expect(">}");
        m = lsub(m, c, xs);
      } else if (lx.eat("{!")) {
        UnrBag u = unrbag();
        lx.expect("/");
        Name x = name();
        lx.expect("!}");
        m = usub(m, u, x);
      } else {
        return m;
      }
    }
  }

  bool at_bag() const { return lx.at("<") || (lx.peek().kind == Tok::Number && lx.peek().s == "1"); }

  L application() {
    L m = atom();
    while (at_bag()) m = app(m, bag());
    return m;
  }

  LinBag linbag() {
    if (lx.peek().kind == Tok::Number && lx.peek().s == "1") {
      lx.next();
      return {};
    }
    lx.expect("<");
    LinBag c{term()};
    while (lx.eat(",")) c.push_back(term());
    lx.expect(">");
    return c;
  }

  std::optional<L> uslot() {
    if (lx.eat("<")) {
      lx.expect("!");
      L n = term();
      lx.expect(">");
      return n;
    }
    lx.expect("!");
    if (lx.peek().kind == Tok::Number && lx.peek().s == "1") {
      lx.next();
      return std::nullopt;
    }
    lx.expect("<");
    L n = term();
    lx.expect(">");
    return n;
  }

  UnrBag unrbag() {
    UnrBag u{uslot()};
    while (lx.eat(".")) u.push_back(uslot());
    return u;
  }

  Bag bag() {
    Bag b;
    b.lin = linbag();
    if (lx.eat("*")) b.unr = unrbag();
    return b;
  }

  L atom() {
    if (lx.eat("(")) {
      L m = term();
      lx.expect(")");
      return m;
    }
    const Tok& t = lx.peek();
    if (t.kind != Tok::Ident) lx.fail("expected a term");
    if (t.s == "OK") {
      lx.next();
      return success();
    }
    if (t.s == "fail" && lx.peek(1).kind == Tok::Sym && lx.peek(1).s == "{") {
      lx.next();
      lx.next();
      std::vector<Name> xs = names({"}"});
      lx.expect("}");
      return fail(xs);
    }
    if (is_upper(t.s)) {
      std::string ref = lx.ident();
      auto it = defs ? defs->find(ref) : decltype(defs->end()){};
      if (!defs || it == defs->end()) {
        lx.reset(lx.mark() - 1);
        lx.fail("undefined term " + ref);
      }
      return freshen(it->second);
    }
    Name x = name();
    if (lx.at("[") && lx.peek(1).kind == Tok::Number) {
      lx.next();
      int i = lx.number();
      if (i < 1) lx.fail("unrestricted index must be at least 1");
      lx.expect("]");
      return uvar(x, i);
    }
    return var(x);
  }
};

struct ITypeParser {
  Lexer& lx;

  IT strict() {
    if (lx.at_ident("unit")) {
      lx.next();
      return t_unit();
    }
    lx.expect("(");
    IT sigma;
    int k = 0;
    if (lx.at_ident("w")) {
      lx.next();
    } else {
      IT s = strict();
      if (lx.eat(")")) return s;
      lx.expect("^");
      sigma = s;
      k = lx.number();
    }
    lx.expect(",");
    std::vector<IT> eta = list();
    lx.expect(")");
    lx.expect("->");
    return t_arrow(k == 0 ? nullptr : sigma, k, eta, strict());
  }

  std::vector<IT> list() {
    std::vector<IT> eta{strict()};
    while (lx.eat(".")) eta.push_back(strict());
    return eta;
  }

  Judgment judgment() {
    Judgment j;
    auto at_turnstile = [&] { return lx.at("|=") || lx.at("|-"); };
    if (!at_turnstile()) {
      do {
        Name x = intern(lx.ident("variable"));
        if (lx.eat("!")) {
          lx.expect(":");
          for (auto& e : j.theta)
            if (e.x == x) lx.fail(text(x) + "! twice in a context");
          j.theta.push_back({x, list()});
          continue;
        }
        lx.expect(":");
        for (auto& e : j.gamma)
          if (e.x == x) lx.fail(text(x) + " twice in a context");
        LinEntry e{x, false, nullptr, 0};
        if (lx.at_ident("w")) {
          lx.next();
          e.multi = true;
        } else {
          e.sigma = strict();
          if (lx.eat("^")) {
            e.multi = true;
            e.k = lx.number();
            if (e.k == 0) e.sigma = nullptr;
          }
        }
        j.gamma.push_back(e);
      } while (lx.eat(","));
    }
    if (lx.eat("|-")) j.well_typed = true;
    else lx.expect("|=");
    j.tau = strict();
    return j;
  }
};

void expect_end(Lexer& lx) {
  if (!lx.done()) lx.fail("trailing input");
}

}  // namespace

L parse_term(std::string_view src) {
  Lexer lx(src, true);
  TermParser tp{lx, nullptr};
  L m = tp.term();
  expect_end(lx);
  return m;
}

IT parse_itype(std::string_view src) {
  Lexer lx(src, true);
  ITypeParser tp{lx};
  IT t = tp.strict();
  expect_end(lx);
  return t;
}

Judgment parse_judgment(std::string_view src) {
  Lexer lx(src, true);
  ITypeParser tp{lx};
  Judgment j = tp.judgment();
  expect_end(lx);
  return j;
}

const LcDecl* LcFile::find(const std::string& name) const {
  for (auto& d : decls)
    if (d.name == name) return &d;
  return nullptr;
}

LcFile parse_lc(std::string_view src) {
  Lexer lx(src, true);
  LcFile f;
  std::map<std::string, L> defs;
  std::map<std::string, std::vector<Judgment>> pending;
  while (!lx.done()) {
    int line = lx.peek().line;
    std::string name = lx.ident("declaration name");
    if (lx.eat("::")) {
      ITypeParser tp{lx};
      Judgment j = tp.judgment();
      lx.expect(";");
      if (auto* d = const_cast<LcDecl*>(f.find(name))) d->judgments.push_back(j);
      else pending[name].push_back(j);
      continue;
    }
    lx.expect("=");
    TermParser tp{lx, &defs};
    L m = tp.term();
    lx.expect(";");
    if (defs.count(name)) throw ParseError(line, 1, "second definition of " + name);
    defs[name] = m;
    LcDecl d{name, m, pending[name], line};
    pending.erase(name);
    f.decls.push_back(std::move(d));
  }
  for (auto& [n, js] : pending)
    if (!js.empty()) throw ParseError(0, 0, "judgment for undefined term " + n);
  return f;
}

}  // namespace spi::lc
