#include "spi/process.hpp"

#include <optional>
#include <sstream>

namespace spi {

namespace {
P mk(Proc pr) { return std::make_shared<const Proc>(std::move(pr)); }
}  // namespace

P zero() {
  static P z = mk(Proc{});
  return z;
}
P ok() {
  static P s = [] {
    Proc pr;
    pr.kind = Kind::Success;
    return mk(pr);
  }();
  return s;
}
P fwd(Name x, Name y) {
  Proc pr;
  pr.kind = Kind::Forward;
  pr.x = x;
  pr.y = y;
  return mk(pr);
}
P par(P a, P b) {
  Proc pr;
  pr.kind = Kind::Par;
  pr.p = std::move(a);
  pr.q = std::move(b);
  return mk(pr);
}
P par_all(const std::vector<P>& ps) {
  if (ps.empty()) return zero();
  P acc = ps.back();
  for (size_t i = ps.size() - 1; i-- > 0;) acc = par(ps[i], acc);
  return acc;
}
P nu(Name x, P a, P b) {
  Proc pr;
  pr.kind = Kind::Restrict;
  pr.x = x;
  pr.p = std::move(a);
  pr.q = std::move(b);
  return mk(pr);
}
P choice(P a, P b) {
  Proc pr;
  pr.kind = Kind::Choice;
  pr.p = std::move(a);
  pr.q = std::move(b);
  return mk(pr);
}
P choice_all(const std::vector<P>& ps) {
  if (ps.empty()) return zero();
  P acc = ps.back();
  for (size_t i = ps.size() - 1; i-- > 0;) acc = choice(ps[i], acc);
  return acc;
}
P out(Name x, Name y, P a, P b) {
  Proc pr;
  pr.kind = Kind::Output;
  pr.x = x;
  pr.y = y;
  pr.p = std::move(a);
  pr.q = std::move(b);
  return mk(pr);
}
static P unary(Kind k, Name x, Name y, P a) {
  Proc pr;
  pr.kind = k;
  pr.x = x;
  pr.y = y;
  pr.p = std::move(a);
  return mk(pr);
}
P in(Name x, Name y, P a) { return unary(Kind::Input, x, y, std::move(a)); }
P sel(Name x, std::string label, P a) {
  Proc pr;
  pr.kind = Kind::Select;
  pr.x = x;
  pr.label = std::move(label);
  pr.p = std::move(a);
  return mk(pr);
}
P branch(Name x, Branches bs) {
  Proc pr;
  pr.kind = Kind::Branch;
  pr.x = x;
  pr.branches = std::move(bs);
  return mk(pr);
}
P close_(Name x) { return unary(Kind::Close, x, Name{}, nullptr); }
P wait(Name x, P a) { return unary(Kind::Wait, x, Name{}, std::move(a)); }
P client(Name x, Name y, P a) { return unary(Kind::Client, x, y, std::move(a)); }
P server(Name x, Name y, P a) { return unary(Kind::Server, x, y, std::move(a)); }
P some(Name x, P a) { return unary(Kind::Some, x, Name{}, std::move(a)); }
P none(Name x) { return unary(Kind::None, x, Name{}, nullptr); }
P expect(Name x, std::vector<Name> ws, P a) {
  Proc pr;
  pr.kind = Kind::Expect;
  pr.x = x;
  pr.ws = std::move(ws);
  pr.p = std::move(a);
  return mk(pr);
}

bool is_prefix(Kind k) {
  switch (k) {
    case Kind::Output: case Kind::Input: case Kind::Select: case Kind::Branch:
    case Kind::Close: case Kind::Wait: case Kind::Client: case Kind::Server:
    case Kind::Some: case Kind::None: case Kind::Expect:
      return true;
    default:
      return false;
  }
}

bool binds(Kind k) {
  return k == Kind::Output || k == Kind::Input || k == Kind::Client || k == Kind::Server;
}

namespace {

bool is_bound(const std::vector<Name>& bound, Name n) {
  for (auto it = bound.rbegin(); it != bound.rend(); ++it)
    if (*it == n) return true;
  return false;
}

void add(FreeNames& out, const std::vector<Name>& bound, Name n, bool unr) {
  if (is_bound(bound, n)) return;
  out.all.insert(n);
  if (unr) out.unrestricted.insert(n);
}

void collect(const P& p, FreeNames& out, std::vector<Name>& bound) {
  switch (p->kind) {
    case Kind::Inaction: case Kind::Success:
      return;
    case Kind::Forward:
      add(out, bound, p->x, false);
      add(out, bound, p->y, false);
      return;
    case Kind::Par: case Kind::Choice:
      collect(p->p, out, bound);
      collect(p->q, out, bound);
      return;
    case Kind::Restrict:
      bound.push_back(p->x);
      collect(p->p, out, bound);
      collect(p->q, out, bound);
      bound.pop_back();
      return;
    case Kind::Output:
      add(out, bound, p->x, false);
      bound.push_back(p->y);
      collect(p->p, out, bound);
      collect(p->q, out, bound);
      bound.pop_back();
      return;
    case Kind::Input: case Kind::Client: case Kind::Server:
      add(out, bound, p->x, p->kind != Kind::Input);
      bound.push_back(p->y);
      collect(p->p, out, bound);
      bound.pop_back();
      return;
    case Kind::Select: case Kind::Wait: case Kind::Some:
      add(out, bound, p->x, false);
      collect(p->p, out, bound);
      return;
    case Kind::Close: case Kind::None:
      add(out, bound, p->x, false);
      return;
    case Kind::Branch:
      add(out, bound, p->x, false);
      for (auto& [l, b] : p->branches) collect(b, out, bound);
      return;
    case Kind::Expect:
      add(out, bound, p->x, false);
      for (Name w : p->ws) add(out, bound, w, false);
      collect(p->p, out, bound);
      return;
  }
}

}  // namespace

FreeNames free_names(const P& p) {
  FreeNames out;
  std::vector<Name> bound;
  collect(p, out, bound);
  for (Name n : out.all)
    if (!out.unrestricted.count(n)) out.linear.insert(n);
  return out;
}

NameSet fn(const P& p) { return free_names(p).all; }

bool occurs_free(Name n, const P& p) { return fn(p).count(n) > 0; }

namespace {

struct Renamer {
  std::unordered_map<Name, Name> m;
  Name get(Name n) const {
    auto it = m.find(n);
    return it == m.end() ? n : it->second;
  }
  P go(const P& p) {
    switch (p->kind) {
      case Kind::Inaction: case Kind::Success:
        return p;
      case Kind::Forward:
        return fwd(get(p->x), get(p->y));
      case Kind::Par:
        return par(go(p->p), go(p->q));
      case Kind::Choice:
        return choice(go(p->p), go(p->q));
      case Kind::Restrict: {
        Name b = fresh(text(p->x));
        auto saved = scope(p->x, b);
        P a = go(p->p), c = go(p->q);
        restore(p->x, saved);
        return nu(b, a, c);
      }
      case Kind::Output: {
        Name x = get(p->x);
        Name b = fresh(text(p->y));
        auto saved = scope(p->y, b);
        P a = go(p->p), c = go(p->q);
        restore(p->y, saved);
        return out(x, b, a, c);
      }
      case Kind::Input: case Kind::Client: case Kind::Server: {
        Name x = get(p->x);
        Name b = fresh(text(p->y));
        auto saved = scope(p->y, b);
        P a = go(p->p);
        restore(p->y, saved);
        return unary(p->kind, x, b, a);
      }
      case Kind::Select:
        return sel(get(p->x), p->label, go(p->p));
      case Kind::Wait:
        return wait(get(p->x), go(p->p));
      case Kind::Some:
        return some(get(p->x), go(p->p));
      case Kind::Close:
        return close_(get(p->x));
      case Kind::None:
        return none(get(p->x));
      case Kind::Branch: {
        Branches bs;
        for (auto& [l, b] : p->branches) bs.emplace(l, go(b));
        return branch(get(p->x), std::move(bs));
      }
      case Kind::Expect: {
        std::vector<Name> ws;
        for (Name w : p->ws) ws.push_back(get(w));
        return expect(get(p->x), std::move(ws), go(p->p));
      }
    }
    return p;
  }
  std::optional<Name> scope(Name old, Name neu) {
    std::optional<Name> prev;
    auto it = m.find(old);
    if (it != m.end()) prev = it->second;
    m[old] = neu;
    return prev;
  }
  void restore(Name old, std::optional<Name> prev) {
    if (prev) m[old] = *prev;
    else m.erase(old);
  }
};

}  // namespace

P rename(const P& p, const std::unordered_map<Name, Name>& m) {
  Renamer r{m};
  return r.go(p);
}

P substitute(const P& p, Name neu, Name old) { return rename(p, {{old, neu}}); }

P freshen(const P& p) { return rename(p, {}); }

bool same(const P& a, const P& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->x != b->x || a->y != b->y || a->label != b->label || a->ws != b->ws)
    return false;
  if (a->branches.size() != b->branches.size()) return false;
  for (auto ia = a->branches.begin(), ib = b->branches.begin(); ia != a->branches.end(); ++ia, ++ib)
    if (ia->first != ib->first || !same(ia->second, ib->second)) return false;
  if (bool(a->p) != bool(b->p) || bool(a->q) != bool(b->q)) return false;
  if (a->p && !same(a->p, b->p)) return false;
  if (a->q && !same(a->q, b->q)) return false;
  return true;
}

size_t size(const P& p) {
  size_t n = 1;
  if (p->p) n += size(p->p);
  if (p->q) n += size(p->q);
  for (auto& [l, b] : p->branches) n += size(b);
  return n;
}

int nd_width(const P& p) {
  switch (p->kind) {
    case Kind::Choice:
      return nd_width(p->p) + nd_width(p->q);
    case Kind::Par: case Kind::Restrict:
      return std::max(nd_width(p->p), nd_width(p->q));
    default:
      return 1;
  }
}

namespace {

struct Printer {
  NamePrinter& np;
  std::ostringstream os;

  std::string nm(Name n) { return np.free(n); }

  // level 0: top (choice allowed bare), level 2: prefix continuation / item
  void proc(const P& p, int level) {
    switch (p->kind) {
      case Kind::Choice: {
        if (level > 0) os << "(";
        std::vector<P> items;
        P cur = p;
        while (cur->kind == Kind::Choice) {
          items.push_back(cur->p);
          cur = cur->q;
        }
        items.push_back(cur);
        for (size_t i = 0; i < items.size(); ++i) {
          if (i) os << " ++ ";
          proc(items[i], 2);
        }
        if (level > 0) os << ")";
        return;
      }
      case Kind::Par:
        os << "(";
        par_items(p);
        os << ")";
        return;
      default:
        atom(p);
    }
  }

  void par_items(const P& p) {
    P cur = p;
    proc(cur->p, 2);
    cur = cur->q;
    while (cur->kind == Kind::Par) {
      os << " | ";
      proc(cur->p, 2);
      cur = cur->q;
    }
    os << " | ";
    proc(cur, 2);
  }

  void pair(const P& a, const P& b) {
    os << "(";
    proc(a, 2);
    if (b->kind == Kind::Par) {
      os << " | ";
      par_items(b);
    } else {
      os << " | ";
      proc(b, 2);
    }
    os << ")";
  }

  void atom(const P& p) {
    switch (p->kind) {
      case Kind::Inaction: os << "0"; return;
      case Kind::Success: os << "OK"; return;
      case Kind::Forward: os << "[" << nm(p->x) << "<->" << nm(p->y) << "]"; return;
      case Kind::Close: os << "close " << nm(p->x); return;
      case Kind::None: os << "none " << nm(p->x); return;
      case Kind::Restrict: {
        std::string b = np.bind(p->x);
        os << "new " << b << " ";
        pair(p->p, p->q);
        np.unbind(p->x);
        return;
      }
      case Kind::Output: {
        std::string x = nm(p->x);
        std::string b = np.bind(p->y);
        os << x << "!(" << b << ")";
        pair(p->p, p->q);
        np.unbind(p->y);
        return;
      }
      case Kind::Input: case Kind::Client: case Kind::Server: {
        std::string x = nm(p->x);
        std::string b = np.bind(p->y);
        if (p->kind == Kind::Input) os << x << "?(" << b << "). ";
        else if (p->kind == Kind::Client) os << "?" << x << "!(" << b << "). ";
        else os << "!" << x << "?(" << b << "). ";
        proc(p->p, 2);
        np.unbind(p->y);
        return;
      }
      case Kind::Select: os << nm(p->x) << "#" << p->label << ". "; proc(p->p, 2); return;
      case Kind::Wait: os << "wait " << nm(p->x) << ". "; proc(p->p, 2); return;
      case Kind::Some: os << "some " << nm(p->x) << ". "; proc(p->p, 2); return;
      case Kind::Expect: {
        os << "expect " << nm(p->x) << " [";
        for (size_t i = 0; i < p->ws.size(); ++i) os << (i ? "," : "") << nm(p->ws[i]);
        os << "]. ";
        proc(p->p, 2);
        return;
      }
      case Kind::Branch: {
        os << nm(p->x) << "&{";
        bool first = true;
        for (auto& [l, b] : p->branches) {
          if (!first) os << ", ";
          first = false;
          os << l << ": ";
          proc(b, 0);
        }
        os << "}";
        return;
      }
      default: return;
    }
  }
};

}  // namespace

std::string print_with(const P& p, NamePrinter& np) {
  Printer pr{np, {}};
  pr.proc(p, 0);
  return pr.os.str();
}

std::string print(const P& p) {
  NamePrinter np{[](Name n) { return text(n); }, [](Name n) { return text(n); }, [](Name) {}};
  return print_with(p, np);
}

}  // namespace spi
