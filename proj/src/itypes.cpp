#include "spi/itypes.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace spi::lc {

IT t_unit() {
  static IT u = std::make_shared<const IType>();
  return u;
}

IT t_arrow(IT sigma, int k, std::vector<IT> eta, IT tau) {
  IType t;
  t.kind = IType::Arrow;
  t.sigma = std::move(sigma);
  t.k = k;
  t.eta = std::move(eta);
  t.tau = std::move(tau);
  return std::make_shared<const IType>(std::move(t));
}

bool list_equal(const std::vector<IT>& a, const std::vector<IT>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!itype_equal(a[i], b[i])) return false;
  return true;
}

bool itype_equal(const IT& a, const IT& b) {
  if (a->kind != b->kind) return false;
  if (a->kind == IType::Unit) return true;
  if (a->k != b->k || !itype_equal(a->tau, b->tau) || !list_equal(a->eta, b->eta)) return false;
  if (a->k == 0) return true;  // omega: the element type is irrelevant
  return itype_equal(a->sigma, b->sigma);
}

bool embraces(const std::vector<IT>& eta, const std::vector<IT>& eps) {
  if (eta.size() > eps.size()) return false;
  for (size_t i = 0; i < eta.size(); ++i)
    if (!itype_equal(eta[i], eps[i])) return false;
  return true;
}

namespace {
void print_to(std::ostream& os, const IT& t, bool paren);
void print_multi(std::ostream& os, const IT& sigma, int k) {
  if (k == 0 || !sigma) {
    os << "w";
    return;
  }
  print_to(os, sigma, true);
  os << "^" << k;
}
void print_list_to(std::ostream& os, const std::vector<IT>& eta) {
  for (size_t i = 0; i < eta.size(); ++i) {
    if (i) os << " . ";
    print_to(os, eta[i], true);
  }
}
void print_to(std::ostream& os, const IT& t, bool paren) {
  if (t->kind == IType::Unit) {
    os << "unit";
    return;
  }
  if (paren) os << "(";
  os << "(";
  print_multi(os, t->sigma, t->k);
  os << ", ";
  print_list_to(os, t->eta);
  os << ") -> ";
  print_to(os, t->tau, false);
  if (paren) os << ")";
}
}  // namespace

std::string print_itype(const IT& t) {
  std::ostringstream os;
  print_to(os, t, false);
  return os.str();
}

std::string print_list(const std::vector<IT>& eta) {
  std::ostringstream os;
  print_list_to(os, eta);
  return os.str();
}

std::string print_judgment(const Judgment& j, const std::string& subject) {
  std::ostringstream os;
  bool first = true;
  for (auto& e : j.theta) {
    os << (first ? "" : ", ") << text(e.x) << "!: ";
    print_list_to(os, e.eta);
    first = false;
  }
  for (auto& e : j.gamma) {
    os << (first ? "" : ", ") << text(e.x) << ": ";
    if (e.multi) print_multi(os, e.sigma, e.k);
    else print_to(os, e.sigma, false);
    first = false;
  }
  os << (first ? "" : " ") << (j.well_typed ? "|- " : "|= ") << subject << " : " << print_itype(j.tau);
  return os.str();
}

const char* to_string(LTypeErrorKind k) {
  switch (k) {
    case LTypeErrorKind::UnboundVariable: return "UnboundVariable";
    case LTypeErrorKind::ArityViolation: return "ArityViolation";
    case LTypeErrorKind::CoreDomainMismatch: return "CoreDomainMismatch";
    case LTypeErrorKind::EmbracesFailure: return "EmbracesFailure";
    case LTypeErrorKind::FailForbidden: return "FailForbidden";
    case LTypeErrorKind::ArityMismatch: return "ArityMismatch";
    case LTypeErrorKind::TypeMismatch: return "TypeMismatch";
    case LTypeErrorKind::Linearity: return "Linearity";
  }
  return "?";
}

namespace {

struct Fail {
  LTypeErrorKind kind;
  std::string msg;
};

// union-find over strict types, multiset sizes and list types
struct Solver {
  struct SNode {
    int parent;
    enum { Meta, Unit, Arrow } k = Meta;
    int sig = -1, size = -1, eta = -1, tau = -1;
  };
  struct INode {
    int parent;
    std::optional<int> val;
  };
  struct LNode {
    int parent;
    std::vector<int> items;
    bool open = true;
  };
  std::vector<SNode> s;
  std::vector<INode> in;
  std::vector<LNode> ls;

  int meta() {
    s.push_back({static_cast<int>(s.size())});
    return static_cast<int>(s.size()) - 1;
  }
  int unit() {
    int n = meta();
    s[n].k = SNode::Unit;
    return n;
  }
  int arrow(int sig, int size, int eta, int tau) {
    int n = meta();
    s[n].k = SNode::Arrow;
    s[n].sig = sig;
    s[n].size = size;
    s[n].eta = eta;
    s[n].tau = tau;
    return n;
  }
  int integer(std::optional<int> v = std::nullopt) {
    in.push_back({static_cast<int>(in.size()), v});
    return static_cast<int>(in.size()) - 1;
  }
  int list(std::vector<int> items, bool open) {
    ls.push_back({static_cast<int>(ls.size()), std::move(items), open});
    return static_cast<int>(ls.size()) - 1;
  }

  int fs(int a) { return s[a].parent == a ? a : s[a].parent = fs(s[a].parent); }
  int fi(int a) { return in[a].parent == a ? a : in[a].parent = fi(in[a].parent); }
  int fl(int a) { return ls[a].parent == a ? a : ls[a].parent = fl(ls[a].parent); }

  bool occurs(int m, int t) {
    t = fs(t);
    if (t == m) return true;
    if (s[t].k != SNode::Arrow) return false;
    if (occurs(m, s[t].sig) || occurs(m, s[t].tau)) return true;
    for (int i : ls[fl(s[t].eta)].items)
      if (occurs(m, i)) return true;
    return false;
  }

  void mismatch(const std::string& why) { throw Fail{LTypeErrorKind::TypeMismatch, why}; }

  void unify(int a, int b) {
    a = fs(a);
    b = fs(b);
    if (a == b) return;
    if (s[a].k == SNode::Meta) {
      if (occurs(a, b)) mismatch("cyclic type");
      s[a].parent = b;
      return;
    }
    if (s[b].k == SNode::Meta) {
      unify(b, a);
      return;
    }
    if (s[a].k != s[b].k) mismatch("cannot match " + show(a) + " with " + show(b));
    if (s[a].k == SNode::Unit) return;
    int sa = s[a].sig, sb = s[b].sig, za = s[a].size, zb = s[b].size;
    int ea = s[a].eta, eb = s[b].eta, ta = s[a].tau, tb = s[b].tau;
    s[a].parent = b;
    unify_int(za, zb, LTypeErrorKind::TypeMismatch);
    unify(sa, sb);
    unify_list(ea, eb);
    unify(ta, tb);
  }

  void unify_int(int a, int b, LTypeErrorKind kind) {
    a = fi(a);
    b = fi(b);
    if (a == b) return;
    if (in[a].val && in[b].val && *in[a].val != *in[b].val)
      throw Fail{kind, "multiset sizes " + std::to_string(*in[a].val) + " and " + std::to_string(*in[b].val)};
    if (!in[b].val) in[b].val = in[a].val;
    in[a].parent = b;
  }

  void extend(int l, size_t n) {
    l = fl(l);
    while (ls[l].items.size() < n) ls[l].items.push_back(meta());
  }

  // exact equality of list types
  void unify_list(int a, int b) {
    a = fl(a);
    b = fl(b);
    if (a == b) return;
    size_t na = ls[a].items.size(), nb = ls[b].items.size();
    if ((!ls[a].open && nb > na) || (!ls[b].open && na > nb))
      mismatch("list types of length " + std::to_string(na) + " and " + std::to_string(nb));
    size_t n = std::max(na, nb);
    extend(a, n);
    extend(b, n);
    auto ia = ls[a].items, ib = ls[b].items;
    ls[b].open = ls[a].open && ls[b].open;
    ls[a].parent = b;
    for (size_t i = 0; i < n; ++i) unify(ia[i], ib[i]);
  }

  // eta ~ eps; returns true if it changed something
  bool embrace(int eta, int eps) {
    eta = fl(eta);
    eps = fl(eps);
    if (eta == eps) return false;
    bool changed = false;
    size_t ne = ls[eta].items.size(), np = ls[eps].items.size();
    if (!ls[eta].open && ne > np) {
      if (!ls[eps].open)
        throw Fail{LTypeErrorKind::EmbracesFailure, "list of length " + std::to_string(ne) +
                                                        " is not embraced by one of length " + std::to_string(np)};
      extend(eps, ne);
      changed = true;
      np = ne;
    }
    if (ls[eta].open && ne > np && !ls[eps].open)
      throw Fail{LTypeErrorKind::EmbracesFailure, "unrestricted variable used beyond its bag"};
    if (ne > np) {
      extend(eps, ne);
      changed = true;
    }
    for (size_t i = 0; i < ne; ++i) {
      int a = fs(ls[eta].items[i]), b = fs(ls[eps].items[i]);
      if (a != b) {
        unify(a, b);
        changed = true;
      }
    }
    return changed;
  }

  std::string show(int a) {
    a = fs(a);
    switch (s[a].k) {
      case SNode::Meta: return "?" + std::to_string(a);
      case SNode::Unit: return "unit";
      default: {
        std::string r = "((" + show(s[a].sig) + ")^";
        auto v = in[fi(s[a].size)].val;
        r += v ? std::to_string(*v) : "?";
        r += ", ";
        auto& it = ls[fl(s[a].eta)].items;
        for (size_t i = 0; i < it.size(); ++i) r += (i ? " . " : "") + show(it[i]);
        return r + ") -> " + show(s[a].tau) + ")";
      }
    }
  }

  // read back a resolved type; metas default to unit
  IT read(int a) {
    a = fs(a);
    if (s[a].k != SNode::Arrow) return t_unit();
    std::vector<IT> eta;
    for (int i : ls[fl(s[a].eta)].items) eta.push_back(read(i));
    if (eta.empty()) eta.push_back(t_unit());
    return t_arrow(read(s[a].sig), in[fi(s[a].size)].val.value_or(0), std::move(eta), read(s[a].tau));
  }
  std::vector<IT> read_list(int l) {
    std::vector<IT> r;
    for (int i : ls[fl(l)].items) r.push_back(read(i));
    return r;
  }

  int embed(const IT& t) {
    if (!t) return meta();
    if (t->kind == IType::Unit) return unit();
    std::vector<int> eta;
    for (auto& e : t->eta) eta.push_back(embed(e));
    return arrow(embed(t->sigma), integer(t->k), list(eta, false), embed(t->tau));
  }
};

struct Entry {
  enum { Strict, Multi, Any } kind;
  int sig = -1, size = -1;
};
using Ctx = std::map<Name, Entry, ByText>;

struct Checker {
  Solver sv;
  bool wt;
  bool infer_theta;
  std::unordered_map<Name, int> free_theta;  // given (check) or discovered (infer) x!
  std::vector<Name> free_order;
  std::vector<std::pair<Name, int>> scope;  // bound x!
  std::vector<std::pair<int, int>> embraces;
  std::vector<std::pair<int, int>> hints;   // (j, k): default j to k

  [[noreturn]] void fail(LTypeErrorKind k, const std::string& m) { throw Fail{k, m}; }

  void merge(Ctx& into, const Ctx& from) {
    for (auto& [x, e] : from)
      if (!into.emplace(x, e).second) fail(LTypeErrorKind::Linearity, "linear variable " + text(x) + " used twice");
  }

  int theta(Name x) {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == x) return it->second;
    auto f = free_theta.find(x);
    if (f != free_theta.end()) return f->second;
    if (!infer_theta) fail(LTypeErrorKind::UnboundVariable, "unrestricted variable " + text(x) + "! is not in the context");
    int l = sv.list({}, true);
    free_theta[x] = l;
    free_order.push_back(x);
    return l;
  }

  void constrain(int eta, int eps) {
    if (wt) sv.unify_list(eta, eps);
    else embraces.emplace_back(eta, eps);
  }

  // strict element type an entry contributes to an explicit substitution or sharing
  int strict_of(Ctx& g, Name y, const char* where) {
    auto it = g.find(y);
    if (it == g.end()) fail(LTypeErrorKind::UnboundVariable, std::string(where) + " variable " + text(y) + " does not occur");
    Entry e = it->second;
    g.erase(it);
    if (e.kind == Entry::Multi) fail(LTypeErrorKind::TypeMismatch, text(y) + " is a sharing variable");
    if (e.kind == Entry::Any) return sv.meta();
    return e.sig;
  }

  struct BagT {
    Ctx g;
    int sig, size, eps;
  };

  int unr_bag(const UnrBag& u) {
    std::vector<int> items;
    for (auto& slot : u) {
      if (!slot) {
        items.push_back(sv.meta());
        continue;
      }
      auto [g, t] = syn(*slot);
      if (!g.empty()) fail(LTypeErrorKind::Linearity, "unrestricted bag element has free linear variables");
      items.push_back(t);
    }
    return sv.list(items, false);
  }

  BagT bag(const Bag& b) {
    BagT r{{}, sv.meta(), sv.integer(static_cast<int>(b.lin.size())), -1};
    for (auto& n : b.lin) {
      auto [g, t] = syn(n);
      sv.unify(r.sig, t);
      merge(r.g, g);
    }
    r.eps = unr_bag(b.unr);
    return r;
  }

  std::pair<Ctx, int> syn(const L& m) {
    switch (m->kind) {
      case LKind::Var: {
        int a = sv.meta();
        return {Ctx{{m->x, {Entry::Strict, a}}}, a};
      }
      case LKind::UVar: {
        int l = sv.fl(theta(m->x));
        auto& ln = sv.ls[l];
        if (m->index < 1) fail(LTypeErrorKind::ArityViolation, "index below 1");
        if (static_cast<size_t>(m->index) > ln.items.size()) {
          if (!ln.open)
            fail(LTypeErrorKind::ArityViolation,
                 text(m->x) + "[" + std::to_string(m->index) + "] beyond a list of length " + std::to_string(ln.items.size()));
          sv.extend(l, static_cast<size_t>(m->index));
        }
        return {Ctx{}, sv.ls[sv.fl(l)].items[static_cast<size_t>(m->index) - 1]};
      }
      case LKind::Success: return {Ctx{}, sv.meta()};
      case LKind::Fail: {
        if (wt) fail(LTypeErrorKind::FailForbidden, "fail is not well-typed");
        Ctx g;
        for (Name x : m->xs) g[x] = {Entry::Any};
        return {g, sv.meta()};
      }
      case LKind::Share: {
        auto [g, t] = syn(m->m);
        int sig = sv.meta();
        for (Name y : m->xs) sv.unify(sig, strict_of(g, y, "shared"));
        if (g.count(m->x)) fail(LTypeErrorKind::Linearity, "sharing variable " + text(m->x) + " occurs in its body");
        g[m->x] = {Entry::Multi, sig, sv.integer(static_cast<int>(m->xs.size()))};
        return {g, t};
      }
      case LKind::Abs: {
        int lx = sv.list({}, true);
        scope.emplace_back(m->x, lx);
        auto [g, t] = syn(m->m);
        scope.pop_back();
        auto it = g.find(m->x);
        if (it == g.end() || it->second.kind != Entry::Multi)
          fail(LTypeErrorKind::TypeMismatch, "abstraction body is not a sharing on " + text(m->x));
        Entry e = it->second;
        g.erase(it);
        return {g, sv.arrow(e.sig, e.size, lx, t)};
      }
      case LKind::App: {
        auto [g, tf] = syn(m->m);
        BagT b = bag(m->bag);
        int j = sv.integer(), eta = sv.list({}, true), tau = sv.meta();
        sv.unify(tf, sv.arrow(b.sig, j, eta, tau));
        if (wt) sv.unify_int(j, b.size, LTypeErrorKind::ArityMismatch);
        else hints.emplace_back(j, b.size);
        constrain(eta, b.eps);
        merge(g, b.g);
        return {g, tau};
      }
      case LKind::ISub: {
        if (m->m->kind != LKind::Share || m->m->x != m->x)
          fail(LTypeErrorKind::TypeMismatch, "intermediate substitution body is not a sharing on " + text(m->x));
        int lx = sv.list({}, true);
        scope.emplace_back(m->x, lx);
        auto [g, t] = syn(m->m);
        scope.pop_back();
        Entry e = g.at(m->x);
        g.erase(m->x);
        BagT b = bag(m->bag);
        sv.unify(e.sig, b.sig);
        if (wt) sv.unify_int(e.size, b.size, LTypeErrorKind::ArityMismatch);
        constrain(lx, b.eps);
        merge(g, b.g);
        return {g, t};
      }
      case LKind::LSub: {
        if (m->bag.lin.size() != m->xs.size())
          fail(LTypeErrorKind::ArityViolation, "linear substitution of " + std::to_string(m->bag.lin.size()) +
                                                   " resources for " + std::to_string(m->xs.size()) + " variables");
        auto [g, t] = syn(m->m);
        int sig = sv.meta();
        for (Name y : m->xs) sv.unify(sig, strict_of(g, y, "substituted"));
        for (auto& n : m->bag.lin) {
          auto [gn, tn] = syn(n);
          sv.unify(sig, tn);
          merge(g, gn);
        }
        return {g, t};
      }
      case LKind::USub: {
        int lx = sv.list({}, true);
        scope.emplace_back(m->x, lx);
        auto [g, t] = syn(m->m);
        scope.pop_back();
        int eps = unr_bag(m->bag.unr);
        constrain(lx, eps);
        return {g, t};
      }
    }
    return {Ctx{}, sv.meta()};
  }

  void solve_embraces() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto [a, b] : embraces) changed |= sv.embrace(a, b);
    }
  }

  void finalize() {
    solve_embraces();
    // an unresolved function arity takes the largest bag it meets
    std::map<int, int> best;
    for (auto [j, k] : hints) {
      int a = sv.fi(j), b = sv.fi(k);
      if (!sv.in[a].val && sv.in[b].val) best[a] = std::max(best.count(a) ? best[a] : 0, *sv.in[b].val);
    }
    for (auto [a, v] : best) sv.in[a].val = v;
    // close the remaining open lists at their minimal non-empty length
    for (size_t l = 0; l < sv.ls.size(); ++l) {
      int r = sv.fl(static_cast<int>(l));
      if (!sv.ls[r].open) continue;
      sv.extend(r, 1);
      sv.ls[r].open = false;
    }
    solve_embraces();
    for (size_t i = 0; i < sv.in.size(); ++i) {
      int r = sv.fi(static_cast<int>(i));
      if (!sv.in[r].val) sv.in[r].val = 0;
    }
  }
};

LDerivation run(const L& m, const Judgment* given, bool wt) {
  LDerivation d;
  Checker c;
  c.wt = wt;
  c.infer_theta = given == nullptr;
  try {
    if (given) {
      for (auto& e : given->theta) {
        std::vector<int> items;
        for (auto& t : e.eta) items.push_back(c.sv.embed(t));
        c.free_theta[e.x] = c.sv.list(items, false);
        c.free_order.push_back(e.x);
      }
    }
    auto [g, tau] = c.syn(m);
    Judgment out;
    out.well_typed = wt;
    if (given) {
      c.sv.unify(tau, c.sv.embed(given->tau));
      std::map<Name, const LinEntry*, ByText> want;
      for (auto& e : given->gamma) want[e.x] = &e;
      for (auto& [x, e] : g) {
        auto it = want.find(x);
        if (it == want.end()) c.fail(LTypeErrorKind::CoreDomainMismatch, "linear variable " + text(x) + " is not in the context");
        const LinEntry& w = *it->second;
        if (e.kind == Entry::Any) continue;
        if ((e.kind == Entry::Multi) != w.multi)
          c.fail(LTypeErrorKind::TypeMismatch, text(x) + (w.multi ? " needs a multiset type" : " needs a strict type"));
        if (e.kind == Entry::Multi) {
          c.sv.unify_int(e.size, c.sv.integer(w.k), LTypeErrorKind::TypeMismatch);
          if (w.k > 0 && w.sigma) c.sv.unify(e.sig, c.sv.embed(w.sigma));
        } else {
          c.sv.unify(e.sig, c.sv.embed(w.sigma));
        }
      }
      for (auto& [x, w] : want)
        if (!g.count(x)) c.fail(LTypeErrorKind::CoreDomainMismatch, "context variable " + text(x) + " does not occur");
      c.finalize();
      out = *given;
    } else {
      c.finalize();
      for (Name x : c.free_order) out.theta.push_back({x, c.sv.read_list(c.free_theta[x])});
      for (auto& [x, e] : g) {
        LinEntry le{x, e.kind == Entry::Multi, nullptr, 0};
        if (e.kind == Entry::Any) le.sigma = t_unit();
        else le.sigma = c.sv.read(e.sig);
        if (le.multi) le.k = c.sv.in[c.sv.fi(e.size)].val.value_or(0);
        out.gamma.push_back(le);
      }
      out.tau = c.sv.read(tau);
    }
    d.ok = true;
    d.judgment = out;
  } catch (const Fail& f) {
    d.error = LTypeError{f.kind, f.msg};
  }
  return d;
}

}  // namespace

LDerivation check(const L& m, const Judgment& j) { return run(m, &j, j.well_typed); }
LDerivation infer(const L& m, bool well_typed) { return run(m, nullptr, well_typed); }

}  // namespace spi::lc
