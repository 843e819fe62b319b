#include "spi/lambda.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace spi::lc {

namespace {
L mk(Term t) { return std::make_shared<const Term>(std::move(t)); }

std::vector<Name> sorted_set(std::vector<Name> xs) {
  std::sort(xs.begin(), xs.end(), ByText());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}
}  // namespace

L var(Name x) {
  Term t;
  t.kind = LKind::Var;
  t.x = x;
  return mk(std::move(t));
}
L uvar(Name x, int i) {
  Term t;
  t.kind = LKind::UVar;
  t.x = x;
  t.index = i;
  return mk(std::move(t));
}
L abs(Name x, L body) {
  Term t;
  t.kind = LKind::Abs;
  t.x = x;
  t.m = std::move(body);
  return mk(std::move(t));
}
L app(L m, Bag b) {
  Term t;
  t.kind = LKind::App;
  t.m = std::move(m);
  t.bag = std::move(b);
  return mk(std::move(t));
}
L fail(std::vector<Name> xs) {
  Term t;
  t.kind = LKind::Fail;
  t.xs = sorted_set(std::move(xs));
  return mk(std::move(t));
}
L share(L m, std::vector<Name> xs, Name x) {
  Term t;
  t.kind = LKind::Share;
  t.m = std::move(m);
  t.xs = std::move(xs);
  t.x = x;
  return mk(std::move(t));
}
L isub(L m, Bag b, Name x) {
  Term t;
  t.kind = LKind::ISub;
  t.m = std::move(m);
  t.bag = std::move(b);
  t.x = x;
  return mk(std::move(t));
}
L lsub(L m, LinBag c, std::vector<Name> xs) {
  Term t;
  t.kind = LKind::LSub;
  t.m = std::move(m);
  t.bag.lin = std::move(c);
  t.bag.unr = {};
  t.xs = std::move(xs);
  return mk(std::move(t));
}
L usub(L m, UnrBag u, Name x) {
  Term t;
  t.kind = LKind::USub;
  t.m = std::move(m);
  t.bag.unr = std::move(u);
  t.x = x;
  return mk(std::move(t));
}
L success() {
  static L s = mk(Term{});
  return s;
}

std::optional<L> slot(const UnrBag& u, int i) {
  if (i < 1 || i > static_cast<int>(u.size())) return std::nullopt;
  return u[i - 1];
}

Head head(const L& m) {
  switch (m->kind) {
    case LKind::Var: return {Head::LinVar, m->x};
    case LKind::UVar: return {Head::UnrVar, m->x, m->index};
    case LKind::Abs: return {Head::Abs, {}};
    case LKind::Fail: return {Head::Fail, {}};
    case LKind::ISub: return {Head::ISub, {}};
    case LKind::Success: return {Head::Success, {}};
    case LKind::App: case LKind::LSub: case LKind::USub: return head(m->m);
    case LKind::Share: {
      Head h = head(m->m);
      if (h.kind == Head::LinVar && std::find(m->xs.begin(), m->xs.end(), h.x) != m->xs.end())
        return {Head::LinVar, m->x};
      return h;
    }
  }
  return {Head::Success, {}};
}

// ---- free variables ----

namespace {
void add_all(NameSet& a, const NameSet& b) { a.insert(b.begin(), b.end()); }
void remove_all(NameSet& a, const std::vector<Name>& xs) {
  for (Name x : xs) a.erase(x);
}
NameSet llfv_bag(const Bag& b) {
  NameSet s = llfv(b.lin);
  for (auto& u : b.unr)
    if (u) add_all(s, llfv(*u));
  return s;
}
}  // namespace

NameSet llfv(const LinBag& c) {
  NameSet s;
  for (auto& n : c) add_all(s, llfv(n));
  return s;
}

NameSet llfv(const L& m) {
  switch (m->kind) {
    case LKind::Var: return {m->x};
    case LKind::UVar: case LKind::Success: return {};
    case LKind::Fail: return NameSet(m->xs.begin(), m->xs.end());
    case LKind::Abs: {
      NameSet s = llfv(m->m);
      s.erase(m->x);
      return s;
    }
    case LKind::App: {
      NameSet s = llfv(m->m);
      add_all(s, llfv_bag(m->bag));
      return s;
    }
    case LKind::Share: {
      NameSet s = llfv(m->m);
      remove_all(s, m->xs);
      s.insert(m->x);
      return s;
    }
    case LKind::ISub: {
      NameSet s = llfv(m->m);
      s.erase(m->x);
      add_all(s, llfv_bag(m->bag));
      return s;
    }
    case LKind::LSub: {
      NameSet s = llfv(m->m);
      remove_all(s, m->xs);
      add_all(s, llfv(m->bag.lin));
      return s;
    }
    case LKind::USub: {
      NameSet s = llfv(m->m);
      add_all(s, llfv_bag(m->bag));
      return s;
    }
  }
  return {};
}

// free unrestricted variables
namespace {
NameSet ufv(const L& m);
NameSet ufv_bag(const Bag& b) {
  NameSet s;
  for (auto& n : b.lin) add_all(s, ufv(n));
  for (auto& u : b.unr)
    if (u) add_all(s, ufv(*u));
  return s;
}
NameSet ufv(const L& m) {
  switch (m->kind) {
    case LKind::UVar: return {m->x};
    case LKind::Var: case LKind::Fail: case LKind::Success: return {};
    case LKind::Abs: {
      NameSet s = ufv(m->m);
      s.erase(m->x);
      return s;
    }
    case LKind::ISub: case LKind::USub: {
      NameSet s = ufv(m->m);
      s.erase(m->x);
      add_all(s, ufv_bag(m->bag));
      return s;
    }
    case LKind::App: case LKind::Share: case LKind::LSub: {
      NameSet s = ufv(m->m);
      add_all(s, ufv_bag(m->bag));
      return s;
    }
  }
  return {};
}
}  // namespace

NameSet fv(const L& m) {
  NameSet s = llfv(m);
  add_all(s, ufv(m));
  return s;
}

NameSet all_names(const L& m) {
  NameSet s;
  std::function<void(const L&)> go = [&](const L& t) {
    if (t->x.valid()) s.insert(t->x);
    for (Name n : t->xs) s.insert(n);
    if (t->m) go(t->m);
    for (auto& n : t->bag.lin) go(n);
    for (auto& u : t->bag.unr)
      if (u) go(*u);
  };
  go(m);
  return s;
}

// ---- renaming ----

namespace {
using Map = std::unordered_map<Name, Name>;

Name fresh_like(Name n) { return fresh(base_of(text(n))); }

struct Renamer {
  // lin and unr maps are kept apart: USub binds x! but not x
  L go(const L& m, Map lin, Map unr) {
    auto gl = [&](Name n) {
      auto it = lin.find(n);
      return it == lin.end() ? n : it->second;
    };
    auto gu = [&](Name n) {
      auto it = unr.find(n);
      return it == unr.end() ? n : it->second;
    };
    auto bag = [&](const Bag& b) {
      Bag r;
      for (auto& n : b.lin) r.lin.push_back(go(n, lin, unr));
      r.unr.clear();
      for (auto& u : b.unr) r.unr.push_back(u ? std::optional<L>(go(*u, lin, unr)) : std::nullopt);
      return r;
    };
    switch (m->kind) {
      case LKind::Var: return var(gl(m->x));
      case LKind::UVar: return uvar(gu(m->x), m->index);
      case LKind::Success: return m;
      case LKind::Fail: {
        std::vector<Name> xs;
        for (Name x : m->xs) xs.push_back(gl(x));
        return fail(xs);
      }
      case LKind::Abs: {
        Name b = fresh_like(m->x);
        lin[m->x] = b;
        unr[m->x] = b;
        return abs(b, go(m->m, lin, unr));
      }
      case LKind::App: {
        L f = go(m->m, lin, unr);
        return app(f, bag(m->bag));
      }
      case LKind::Share: {
        Name x = gl(m->x);
        std::vector<Name> xs;
        for (Name y : m->xs) {
          Name b = fresh_like(y);
          lin[y] = b;
          xs.push_back(b);
        }
        return share(go(m->m, lin, unr), xs, x);
      }
      case LKind::ISub: {
        Bag b = bag(m->bag);
        Name n = fresh_like(m->x);
        lin[m->x] = n;
        unr[m->x] = n;
        return isub(go(m->m, lin, unr), b, n);
      }
      case LKind::LSub: {
        LinBag c;
        for (auto& n : m->bag.lin) c.push_back(go(n, lin, unr));
        std::vector<Name> xs;
        for (Name y : m->xs) {
          Name b = fresh_like(y);
          lin[y] = b;
          xs.push_back(b);
        }
        return lsub(go(m->m, lin, unr), c, xs);
      }
      case LKind::USub: {
        Bag b = bag(m->bag);
        Name n = fresh_like(m->x);
        unr[m->x] = n;
        return usub(go(m->m, lin, unr), b.unr, n);
      }
    }
    return m;
  }
};

L rename_lin(const L& m, const Map& lin) { return Renamer{}.go(m, lin, {}); }
L rename_unr(const L& m, const Map& unr) { return Renamer{}.go(m, {}, unr); }
}  // namespace

L freshen(const L& m) { return Renamer{}.go(m, {}, {}); }

L head_substitute(const L& m, const L& n, Name x, int index) {
  NameSet fn = fv(n);
  std::function<L(const L&)> go = [&](const L& t) -> L {
    switch (t->kind) {
      case LKind::Var:
        if (index == 0 && t->x == x) return n;
        throw std::logic_error("head mismatch");
      case LKind::UVar:
        if (index > 0 && t->x == x && t->index == index) return n;
        throw std::logic_error("head mismatch");
      case LKind::App: return app(go(t->m), t->bag);
      case LKind::LSub: {
        L body = t->m;
        std::vector<Name> xs = t->xs;
        Map mp;
        for (Name& y : xs)
          if (fn.count(y)) {
            Name b = fresh_like(y);
            mp[y] = b;
            y = b;
          }
        if (!mp.empty()) body = rename_lin(body, mp);
        return lsub(go(body), t->bag.lin, xs);
      }
      case LKind::USub: {
        L body = t->m;
        Name y = t->x;
        if (fn.count(y)) {
          y = fresh_like(y);
          body = rename_unr(body, {{t->x, y}});
        }
        return usub(go(body), t->bag.unr, y);
      }
      case LKind::Share: {
        L body = t->m;
        std::vector<Name> xs = t->xs;
        Map mp;
        for (Name& y : xs)
          if (fn.count(y)) {
            Name b = fresh_like(y);
            mp[y] = b;
            y = b;
          }
        if (!mp.empty()) body = rename_lin(body, mp);
        // the head x of a sharing node is one of its aliases
        return share(go(body), xs, t->x);
      }
      default:
        throw std::logic_error("head mismatch");
    }
  };
  return go(m);
}

// ---- printing ----

namespace {
struct Printer {
  std::ostringstream os;
  std::function<std::string(Name)> free = [](Name n) { return text(n); };
  std::function<std::string(Name)> bind = [](Name n) { return text(n); };
  std::function<void(Name)> unbind = [](Name) {};
  // unrestricted names are looked up separately only for alpha keys
  std::function<std::string(Name)> ufree = [](Name n) { return text(n); };
  std::function<std::string(Name)> ubind = [](Name n) { return text(n); };
  std::function<void(Name)> uunbind = [](Name) {};

  void names(const std::vector<Name>& xs, bool binding) {
    for (size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << (binding ? bind(xs[i]) : free(xs[i]));
  }

  void ubag(const UnrBag& u) {
    for (size_t i = 0; i < u.size(); ++i) {
      if (i) os << " . ";
      if (u[i]) {
        os << "!<";
        term(*u[i], 0);
        os << ">";
      } else {
        os << "!1";
      }
    }
  }

  void linbag(const LinBag& c) {
    if (c.empty()) {
      os << "1";
      return;
    }
    os << "<";
    for (size_t i = 0; i < c.size(); ++i) {
      if (i) os << ", ";
      term(c[i], 0);
    }
    os << ">";
  }

  void bag(const Bag& b) {
    linbag(b.lin);
    if (!(b.unr.size() == 1 && !b.unr[0])) {
      os << " * ";
      ubag(b.unr);
    }
  }

  // 0 term, 1 postfix, 2 application, 3 atom
  void term(const L& m, int level) {
    switch (m->kind) {
      case LKind::Var: os << free(m->x); return;
      case LKind::UVar: os << ufree(m->x) << "[" << m->index << "]"; return;
      case LKind::Success: os << "OK"; return;
      case LKind::Fail:
        os << "fail{";
        names(m->xs, false);
        os << "}";
        return;
      case LKind::Abs: {
        if (level > 0) os << "(";
        std::string b = bind(m->x);
        ubind(m->x);
        os << "\\" << b << ". ";
        term(m->m, 0);
        unbind(m->x);
        uunbind(m->x);
        if (level > 0) os << ")";
        return;
      }
      case LKind::App:
        if (level > 2) os << "(";
        term(m->m, 2);
        os << " ";
        bag(m->bag);
        if (level > 2) os << ")";
        return;
      case LKind::Share: {
        if (level > 1) os << "(";
        for (Name y : m->xs) bind(y);
        term(m->m, 1);
        os << " [";
        std::vector<std::string> bs;
        for (size_t i = 0; i < m->xs.size(); ++i) os << (i ? "," : "") << free(m->xs[i]);
        for (size_t i = m->xs.size(); i-- > 0;) unbind(m->xs[i]);
        os << " <- " << free(m->x) << "]";
        if (level > 1) os << ")";
        return;
      }
      case LKind::ISub: {
        if (level > 1) os << "(";
        std::string b = bind(m->x);
        ubind(m->x);
        term(m->m, 1);
        unbind(m->x);
        uunbind(m->x);
        os << " {| ";
        bag(m->bag);
        os << " / " << b << " |}";
        if (level > 1) os << ")";
        return;
      }
      case LKind::LSub: {
        if (level > 1) os << "(";
        std::vector<std::string> bs;
        for (Name y : m->xs) bs.push_back(bind(y));
        term(m->m, 1);
        for (size_t i = m->xs.size(); i-- > 0;) unbind(m->xs[i]);
        os << " {< ";
        linbag(m->bag.lin);
        os << " / ";
        for (size_t i = 0; i < bs.size(); ++i) os << (i ? "," : "") << bs[i];
        os << " >}";
        if (level > 1) os << ")";
        return;
      }
      case LKind::USub: {
        if (level > 1) os << "(";
        std::string b = ubind(m->x);
        term(m->m, 1);
        uunbind(m->x);
        os << " {! ";
        ubag(m->bag.unr);
        os << " / " << b << " !}";
        if (level > 1) os << ")";
        return;
      }
    }
  }
};
}  // namespace

std::string print(const L& m) {
  Printer p;
  p.term(m, 0);
  return p.os.str();
}

std::string print_bag(const Bag& b) {
  Printer p;
  p.bag(b);
  return p.os.str();
}

std::string alpha_key(const L& m) {
  Printer p;
  std::vector<std::pair<Name, std::string>> lin, unr;
  int k = 0;
  auto look = [](std::vector<std::pair<Name, std::string>>& env, Name n) {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == n) return it->second;
    return text(n);
  };
  p.free = [&](Name n) { return look(lin, n); };
  p.ufree = [&](Name n) { return look(unr, n); };
  p.bind = [&](Name n) {
    std::string t = "%" + std::to_string(k++);
    lin.emplace_back(n, t);
    return t;
  };
  p.unbind = [&](Name) { lin.pop_back(); };
  p.ubind = [&](Name n) {
    std::string t = "%" + std::to_string(k++);
    unr.emplace_back(n, t);
    return t;
  };
  p.uunbind = [&](Name) { unr.pop_back(); };
  p.term(m, 0);
  return p.os.str();
}

bool same(const L& a, const L& b) { return alpha_key(a) == alpha_key(b); }

size_t size(const L& m) {
  size_t n = 1;
  if (m->m) n += size(m->m);
  for (auto& i : m->bag.lin) n += size(i);
  for (auto& u : m->bag.unr)
    if (u) n += size(*u);
  return n;
}

bool is_closed(const L& m) { return fv(m).empty(); }

bool has_fail(const L& m) {
  if (m->kind == LKind::Fail) return true;
  if (m->m && has_fail(m->m)) return true;
  for (auto& i : m->bag.lin)
    if (has_fail(i)) return true;
  for (auto& u : m->bag.unr)
    if (u && has_fail(*u)) return true;
  return false;
}

// ---- reduction ----

namespace {

std::vector<Name> minus(const std::vector<Name>& xs, Name y) {
  std::vector<Name> r;
  for (Name x : xs)
    if (x != y) r.push_back(x);
  return r;
}

std::vector<Name> to_vec(const NameSet& s) { return std::vector<Name>(s.begin(), s.end()); }

L lsub_or_body(L m, LinBag c, std::vector<Name> xs) {
  if (c.empty() && xs.empty()) return m;
  return lsub(std::move(m), std::move(c), std::move(xs));
}

void root_steps(const L& t, std::vector<LStep>& out) {
  switch (t->kind) {
    case LKind::App: {
      const L& f = t->m;
      if (f->kind == LKind::Abs) out.push_back({"Beta", isub(f->m, t->bag, f->x)});
      if (f->kind == LKind::Fail) {
        NameSet s(f->xs.begin(), f->xs.end());
        add_all(s, llfv(t->bag.lin));
        out.push_back({"Cons1", fail(to_vec(s))});
      }
      return;
    }
    case LKind::ISub: {
      const L& sh = t->m;
      if (sh->kind != LKind::Share || sh->x != t->x) return;
      const L& body = sh->m;
      size_t k = t->bag.lin.size();
      if (k == sh->xs.size()) {
        if (body->kind == LKind::Fail) {
          NameSet s(body->xs.begin(), body->xs.end());
          remove_all(s, sh->xs);
          add_all(s, llfv(t->bag.lin));
          out.push_back({"Cons2", fail(to_vec(s))});
        } else {
          out.push_back({"Ex-Sub", usub(lsub_or_body(body, t->bag.lin, sh->xs), t->bag.unr, t->x)});
        }
      } else {
        NameSet s = llfv(body);
        remove_all(s, sh->xs);
        add_all(s, llfv(t->bag.lin));
        out.push_back({"Fail-l", fail(to_vec(s))});
      }
      return;
    }
    case LKind::LSub: {
      if (t->m->kind == LKind::Fail) {
        NameSet s(t->m->xs.begin(), t->m->xs.end());
        remove_all(s, t->xs);
        add_all(s, llfv(t->bag.lin));
        out.push_back({"Cons3", fail(to_vec(s))});
        return;
      }
      Head h = head(t->m);
      if (h.kind != Head::LinVar) return;
      if (std::find(t->xs.begin(), t->xs.end(), h.x) == t->xs.end()) return;
      for (size_t i = 0; i < t->bag.lin.size(); ++i) {
        LinBag rest = t->bag.lin;
        rest.erase(rest.begin() + static_cast<long>(i));
        L body = head_substitute(t->m, t->bag.lin[i], h.x);
        out.push_back({"Fetch-l", lsub_or_body(body, rest, minus(t->xs, h.x))});
      }
      return;
    }
    case LKind::USub: {
      if (t->m->kind == LKind::Fail) {
        out.push_back({"Cons4", t->m});
        return;
      }
      Head h = head(t->m);
      if (h.kind != Head::UnrVar || h.x != t->x) return;
      auto s = slot(t->bag.unr, h.index);
      if (s) out.push_back({"Fetch-!", usub(head_substitute(t->m, freshen(*s), h.x, h.index), t->bag.unr, t->x)});
      else out.push_back({"Fail-!", usub(head_substitute(t->m, fail({}), h.x, h.index), t->bag.unr, t->x)});
      return;
    }
    default:
      return;
  }
}

void steps(const L& t, std::vector<LStep>& out) {
  root_steps(t, out);
  // evaluation contexts: function position, bodies of explicit substitutions and sharing
  switch (t->kind) {
    case LKind::App: case LKind::LSub: case LKind::USub: case LKind::Share: {
      std::vector<LStep> inner;
      steps(t->m, inner);
      for (auto& s : inner) {
        Term c = *t;
        c.m = s.target;
        out.push_back({s.rule, std::make_shared<const Term>(std::move(c))});
      }
      return;
    }
    default:
      return;
  }
}

}  // namespace

std::vector<LStep> step_all(const L& m) {
  std::vector<LStep> raw, out;
  steps(m, raw);
  std::unordered_set<std::string> seen;
  for (auto& s : raw)
    if (seen.insert(s.rule + "|" + alpha_key(s.target)).second) out.push_back(s);
  return out;
}

}  // namespace spi::lc
