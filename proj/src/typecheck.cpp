#include "spi/typecheck.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace spi {

const char* to_string(TypeErrorKind k) {
  switch (k) {
    case TypeErrorKind::UnboundName: return "UnboundName";
    case TypeErrorKind::LinearNameUnused: return "LinearNameUnused";
    case TypeErrorKind::LinearNameReused: return "LinearNameReused";
    case TypeErrorKind::TypeMismatch: return "TypeMismatch";
    case TypeErrorKind::BranchContextMismatch: return "BranchContextMismatch";
    case TypeErrorKind::NonMonadicContextForExpect: return "NonMonadicContextForExpect";
    case TypeErrorKind::NonServerContextForBang: return "NonServerContextForBang";
  }
  return "?";
}

TypeError::TypeError(TypeErrorKind k, std::string msg, std::string exp, std::string fnd,
                     std::string where)
    : std::runtime_error(std::string(to_string(k)) + ": " + msg),
      kind(k),
      expected(std::move(exp)),
      found(std::move(fnd)),
      at(std::move(where)) {}

const T* lookup(const TypingCtx& g, Name n) {
  for (auto& [m, t] : g)
    if (m == n) return &t;
  return nullptr;
}

std::string print_ctx(const TypingCtx& g) {
  std::ostringstream os;
  for (size_t i = 0; i < g.size(); ++i)
    os << (i ? ", " : "") << text(g[i].first) << ": " << print_type(g[i].second);
  return os.str();
}

namespace {

std::string snippet(const P& p) {
  std::string s = print(p);
  if (s.size() > 72) s = s.substr(0, 69) + "...";
  return s;
}

// absorbs: an unguarded OK may stand for any missing &- or ?-typed name
struct Ctx : std::map<Name, T> {
  using std::map<Name, T>::map;
  bool absorbs = false;
};

struct Checker {
  Solver s;
  std::vector<std::pair<Name, T>> cuts;
  std::vector<std::pair<T, P>> absorbed;  // must end up &- or ?-typed

  [[noreturn]] void fail(TypeErrorKind k, const std::string& msg, const P& where,
                         const Mismatch* m = nullptr) {
    throw TypeError(k, msg + " in `" + snippet(where) + "`", m ? m->expected : "",
                    m ? m->found : "", snippet(where));
  }

  void uni(const T& a, const T& b, const P& where, TypeErrorKind k = TypeErrorKind::TypeMismatch,
           const std::string& what = "") {
    try {
      s.unify(a, b);
    } catch (Mismatch& m) {
      fail(k, (what.empty() ? "" : what + ": ") + "expected " + m.expected + ", found " + m.found,
           where, &m);
    }
  }

  void need_query(Name n, const T& t, TypeErrorKind k, const P& where) {
    try {
      s.unify(t, t_query(s.fresh()));
    } catch (Mismatch& m) {
      fail(k, "name " + text(n) + " : " + print_type(s.resolve(t)) + " is not ?-typed", where, &m);
    }
  }

  T take(Ctx& g, Name n) {
    auto it = g.find(n);
    if (it == g.end()) return g.absorbs ? absorb(s.fresh(), nullptr) : t_query(s.fresh());
    T t = it->second;
    g.erase(it);
    return t;
  }

  T absorb(const T& t, const P& where) {
    absorbed.emplace_back(t, where);
    return t;
  }

  void settle(const P& root) {
    for (auto& [t, where] : absorbed) {
      T r = s.resolve(t);
      if (r->k != TK::Var && r->k != TK::Maybe && r->k != TK::Query)
        fail(TypeErrorKind::LinearNameUnused, "OK absorbs only maybe- or ?-typed names, got " + print_type(r),
             where ? where : root);
    }
  }

  Ctx merge(Ctx a, const Ctx& b, const P& where) {
    a.absorbs = a.absorbs || b.absorbs;
    for (auto& [n, t] : b) {
      auto it = a.find(n);
      if (it == a.end()) {
        a.emplace(n, t);
        continue;
      }
      need_query(n, it->second, TypeErrorKind::LinearNameReused, where);
      uni(it->second, t, where);
    }
    return a;
  }

  // both branches of a choice (or all branches of an offer) need the same context
  Ctx same(Ctx a, const Ctx& b, const P& where) {
    bool absorbs_a = a.absorbs;
    for (auto& [n, t] : b) {
      auto it = a.find(n);
      if (it == a.end()) {
        if (absorbs_a) absorb(t, where);
        else need_query(n, t, TypeErrorKind::BranchContextMismatch, where);
        a.emplace(n, t);
      } else {
        uni(it->second, t, where, TypeErrorKind::TypeMismatch, "branch types of " + text(n));
      }
    }
    for (auto& [n, t] : a)
      if (!b.count(n)) {
        if (b.absorbs) absorb(t, where);
        else need_query(n, t, TypeErrorKind::BranchContextMismatch, where);
      }
    a.absorbs = absorbs_a && b.absorbs;
    return a;
  }

  Ctx syn(const P& p) {
    switch (p->kind) {
      case Kind::Inaction:
        return {};
      case Kind::Success: {
        Ctx g;
        g.absorbs = true;
        return g;
      }
      case Kind::Forward: {
        if (p->x == p->y) fail(TypeErrorKind::LinearNameReused, "forwarder on a single name", p);
        T a = s.fresh();
        return {{p->x, a}, {p->y, dual(a)}};
      }
      case Kind::Par:
        return merge(syn(p->p), syn(p->q), p);
      case Kind::Choice:
        return same(syn(p->p), syn(p->q), p);
      case Kind::Restrict: {
        Ctx g1 = syn(p->p), g2 = syn(p->q);
        bool u1 = g1.count(p->x), u2 = g2.count(p->x);
        if (!u1 && !u2 && !g1.absorbs && !g2.absorbs) fail(TypeErrorKind::LinearNameUnused, "cut name " + text(p->x) + " unused", p);
        T a = take(g1, p->x), b = take(g2, p->x);
        uni(a, dual(b), p, TypeErrorKind::TypeMismatch, "cut on " + text(p->x));
        cuts.emplace_back(p->x, a);
        return merge(std::move(g1), g2, p);
      }
      case Kind::Output: {
        Ctx gp = syn(p->p), gq = syn(p->q);
        if (gp.count(p->x)) fail(TypeErrorKind::LinearNameReused, text(p->x) + " used by the payload", p);
        if (gq.count(p->y)) fail(TypeErrorKind::LinearNameReused, text(p->y) + " used by the continuation", p);
        T a = take(gp, p->y), b = take(gq, p->x);
        Ctx g = merge(std::move(gp), gq, p);
        g[p->x] = t_tensor(a, b);
        return g;
      }
      case Kind::Input: {
        Ctx g = syn(p->p);
        T a = take(g, p->y), b = take(g, p->x);
        g[p->x] = t_par(a, b);
        return g;
      }
      case Kind::Select: {
        Ctx g = syn(p->p);
        T a = take(g, p->x);
        g[p->x] = t_plus({{p->label, a}}, s.fresh_id());
        return g;
      }
      case Kind::Branch: {
        std::optional<Ctx> acc;
        std::map<std::string, T> ls;
        for (auto& [l, b] : p->branches) {
          Ctx g = syn(b);
          ls.emplace(l, take(g, p->x));
          acc = acc ? same(std::move(*acc), g, p) : g;
        }
        Ctx g = acc ? *acc : Ctx{};
        if (g.count(p->x)) fail(TypeErrorKind::LinearNameReused, text(p->x) + " reused", p);
        g[p->x] = t_with(std::move(ls));
        return g;
      }
      case Kind::Close:
        return {{p->x, t_one()}};
      case Kind::Wait: {
        Ctx g = syn(p->p);
        if (g.count(p->x)) fail(TypeErrorKind::LinearNameReused, text(p->x) + " used after wait", p);
        g[p->x] = t_bot();
        return g;
      }
      case Kind::Some: {
        Ctx g = syn(p->p);
        T a = take(g, p->x);
        g[p->x] = t_maybe(a);
        return g;
      }
      case Kind::None:
        return {{p->x, t_maybe(s.fresh())}};
      case Kind::Expect: {
        Ctx g = syn(p->p);
        T a = take(g, p->x);
        NameSet ws(p->ws.begin(), p->ws.end());
        ws.erase(p->x);
        for (Name w : ws)
          if (!g.count(w) && !g.absorbs)
            fail(TypeErrorKind::NonMonadicContextForExpect, text(w) + " listed but unused", p);
        for (auto& [n, t] : g) {
          if (ws.count(n))
            uni(t, t_maybe(s.fresh()), p, TypeErrorKind::NonMonadicContextForExpect,
                text(n) + " must be maybe-typed");
          else
            need_query(n, t, TypeErrorKind::NonMonadicContextForExpect, p);
        }
        g[p->x] = t_expect(a);
        return g;
      }
      case Kind::Client: {
        Ctx g = syn(p->p);
        T a = take(g, p->y);
        T q = t_query(a);
        auto it = g.find(p->x);
        if (it != g.end()) uni(it->second, q, p, TypeErrorKind::TypeMismatch, "contraction on " + text(p->x));
        else g[p->x] = q;
        return g;
      }
      case Kind::Server: {
        Ctx g = syn(p->p);
        T a = take(g, p->y);
        if (g.count(p->x)) fail(TypeErrorKind::LinearNameReused, text(p->x) + " used by its own server", p);
        for (auto& [n, t] : g) need_query(n, t, TypeErrorKind::NonServerContextForBang, p);
        g.absorbs = false;
        g[p->x] = t_bang(a);
        return g;
      }
    }
    return {};
  }
};

}  // namespace

Derivation typecheck(const P& p, const TypingCtx& gamma) {
  Derivation d;
  Checker c;
  try {
    Ctx g = c.syn(p);
    for (auto& [n, t] : g) {
      const T* want = lookup(gamma, n);
      if (!want) c.fail(TypeErrorKind::UnboundName, "free name " + text(n) + " not in context", p);
      c.uni(*want, t, p, TypeErrorKind::TypeMismatch, "name " + text(n));
    }
    for (auto& [n, t] : gamma)
      if (!g.count(n)) {
        if (g.absorbs) c.absorb(t, p);
        else c.need_query(n, t, TypeErrorKind::LinearNameUnused, p);
      }
    c.settle(p);
    d.ok = true;
    for (auto& [n, t] : gamma) d.context.emplace_back(n, c.s.resolve(t));
    for (auto& [n, t] : c.cuts) d.cut_types.emplace_back(n, c.s.resolve(t));
  } catch (TypeError& e) {
    d.ok = false;
    d.error = e;
  }
  return d;
}

Derivation infer_context(const P& p) {
  Derivation d;
  Checker c;
  try {
    Ctx g = c.syn(p);
    c.settle(p);
    std::vector<std::pair<Name, T>> v(g.begin(), g.end());
    std::sort(v.begin(), v.end(), [](auto& a, auto& b) { return text(a.first) < text(b.first); });
    for (auto& [n, t] : v) d.context.emplace_back(n, c.s.resolve(t));
    for (auto& [n, t] : c.cuts) d.cut_types.emplace_back(n, c.s.resolve(t));
    d.ok = true;
  } catch (TypeError& e) {
    d.error = e;
  }
  return d;
}

}  // namespace spi
