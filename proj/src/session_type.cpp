#include "spi/session_type.hpp"

#include <sstream>

namespace spi {
namespace {
T mk(SType s) { return std::make_shared<const SType>(std::move(s)); }
T unary(TK k, T a) {
  SType s;
  s.k = k;
  s.a = std::move(a);
  return mk(std::move(s));
}
T binary(TK k, T a, T b) {
  SType s;
  s.k = k;
  s.a = std::move(a);
  s.b = std::move(b);
  return mk(std::move(s));
}
T labelled(TK k, std::map<std::string, T> ls, int row, bool neg) {
  SType s;
  s.k = k;
  s.labels = std::move(ls);
  s.var = row;
  s.neg = row >= 0 && neg;
  return mk(std::move(s));
}
}  // namespace

T t_one() {
  static T t = mk(SType{});
  return t;
}
T t_bot() {
  static T t = [] {
    SType s;
    s.k = TK::Bot;
    return mk(s);
  }();
  return t;
}
T t_tensor(T a, T b) { return binary(TK::Tensor, std::move(a), std::move(b)); }
T t_par(T a, T b) { return binary(TK::Par, std::move(a), std::move(b)); }
T t_plus(std::map<std::string, T> ls, int row, bool neg) {
  return labelled(TK::Plus, std::move(ls), row, neg);
}
T t_with(std::map<std::string, T> ls, int row, bool neg) {
  return labelled(TK::With, std::move(ls), row, neg);
}
T t_query(T a) { return unary(TK::Query, std::move(a)); }
T t_bang(T a) { return unary(TK::Bang, std::move(a)); }
T t_maybe(T a) { return unary(TK::Maybe, std::move(a)); }
T t_expect(T a) { return unary(TK::Expect, std::move(a)); }
T t_var(int id, bool neg) {
  SType s;
  s.k = TK::Var;
  s.var = id;
  s.neg = neg;
  return mk(std::move(s));
}

T dual(const T& t) {
  switch (t->k) {
    case TK::One: return t_bot();
    case TK::Bot: return t_one();
    case TK::Tensor: return t_par(dual(t->a), dual(t->b));
    case TK::Par: return t_tensor(dual(t->a), dual(t->b));
    case TK::Query: return t_bang(dual(t->a));
    case TK::Bang: return t_query(dual(t->a));
    case TK::Maybe: return t_expect(dual(t->a));
    case TK::Expect: return t_maybe(dual(t->a));
    case TK::Var: return t_var(t->var, !t->neg);
    case TK::Plus: case TK::With: {
      std::map<std::string, T> ls;
      for (auto& [l, a] : t->labels) ls.emplace(l, dual(a));
      return labelled(t->k == TK::Plus ? TK::With : TK::Plus, std::move(ls), t->var, !t->neg);
    }
  }
  return t;
}

bool type_equal(const T& a, const T& b) {
  if (a == b) return true;
  if (a->k != b->k || a->var != b->var || a->neg != b->neg) return false;
  if (bool(a->a) != bool(b->a) || bool(a->b) != bool(b->b)) return false;
  if (a->a && !type_equal(a->a, b->a)) return false;
  if (a->b && !type_equal(a->b, b->b)) return false;
  if (a->labels.size() != b->labels.size()) return false;
  for (auto ia = a->labels.begin(), ib = b->labels.begin(); ia != a->labels.end(); ++ia, ++ib)
    if (ia->first != ib->first || !type_equal(ia->second, ib->second)) return false;
  return true;
}

bool is_ground(const T& t) {
  if (t->k == TK::Var) return false;
  if ((t->k == TK::Plus || t->k == TK::With) && t->var >= 0) return false;
  if (t->a && !is_ground(t->a)) return false;
  if (t->b && !is_ground(t->b)) return false;
  for (auto& [l, a] : t->labels)
    if (!is_ground(a)) return false;
  return true;
}

namespace {
void pr(std::ostringstream& os, const T& t, int level) {
  switch (t->k) {
    case TK::One: os << "1"; return;
    case TK::Bot: os << "bot"; return;
    case TK::Var: os << (t->neg ? "~" : "") << "$" << t->var; return;
    case TK::Tensor: case TK::Par:
      if (level > 0) os << "(";
      pr(os, t->a, 1);
      os << (t->k == TK::Tensor ? " * " : " @ ");
      pr(os, t->b, 0);
      if (level > 0) os << ")";
      return;
    case TK::Query: os << "?"; pr(os, t->a, 2); return;
    case TK::Bang: os << "!"; pr(os, t->a, 2); return;
    case TK::Maybe: os << "maybe "; pr(os, t->a, 2); return;
    case TK::Expect: os << "expect "; pr(os, t->a, 2); return;
    case TK::Plus: case TK::With: {
      os << (t->k == TK::Plus ? "+{" : "&{");
      bool first = true;
      for (auto& [l, a] : t->labels) {
        if (!first) os << ", ";
        first = false;
        os << l << ": ";
        pr(os, a, 0);
      }
      if (t->var >= 0) os << (first ? "" : ", ") << ".." << (t->neg ? "~" : "") << "$" << t->var;
      os << "}";
      return;
    }
  }
}
}  // namespace

std::string print_type(const T& t) {
  std::ostringstream os;
  pr(os, t, 0);
  return os.str();
}

// ---- solver ----

T Solver::fresh() { return t_var(next_++); }

T Solver::head(const T& t) const {
  if (t->k == TK::Var) {
    auto it = sub_.find(t->var);
    if (it == sub_.end()) return t;
    return head(t->neg ? dual(it->second) : it->second);
  }
  if ((t->k == TK::Plus || t->k == TK::With) && t->var >= 0) {
    auto it = sub_.find(t->var);
    if (it == sub_.end()) return t;
    T rest = head(t->neg ? dual(it->second) : it->second);
    std::map<std::string, T> ls = t->labels;
    for (auto& [l, a] : rest->labels) ls.emplace(l, a);
    return labelled(t->k, std::move(ls), rest->var, rest->neg);
  }
  return t;
}

T Solver::resolve(const T& t0) const {
  T t = head(t0);
  switch (t->k) {
    case TK::One: case TK::Bot: case TK::Var: return t;
    case TK::Tensor: case TK::Par: return binary(t->k, resolve(t->a), resolve(t->b));
    case TK::Query: case TK::Bang: case TK::Maybe: case TK::Expect:
      return unary(t->k, resolve(t->a));
    case TK::Plus: case TK::With: {
      std::map<std::string, T> ls;
      for (auto& [l, a] : t->labels) ls.emplace(l, resolve(a));
      return labelled(t->k, std::move(ls), t->var, t->neg);
    }
  }
  return t;
}

bool Solver::occurs(int id, const T& t0) const {
  T t = resolve(t0);
  if (t->var == id && (t->k == TK::Var || t->k == TK::Plus || t->k == TK::With)) return true;
  if (t->a && occurs(id, t->a)) return true;
  if (t->b && occurs(id, t->b)) return true;
  for (auto& [l, a] : t->labels)
    if (occurs(id, a)) return true;
  return false;
}

void Solver::bind(int id, bool neg, const T& t) {
  if (occurs(id, t)) throw Mismatch{"$" + std::to_string(id), print_type(resolve(t))};
  sub_[id] = neg ? dual(t) : t;
}

void Solver::unify(const T& a0, const T& b0) {
  T a = head(a0), b = head(b0);
  if (a->k == TK::Var && b->k == TK::Var && a->var == b->var) {
    if (a->neg != b->neg) throw Mismatch{print_type(a), print_type(b)};
    return;
  }
  if (a->k == TK::Var) return bind(a->var, a->neg, b);
  if (b->k == TK::Var) return bind(b->var, b->neg, a);
  if (a->k != b->k) throw Mismatch{print_type(resolve(a)), print_type(resolve(b))};
  switch (a->k) {
    case TK::One: case TK::Bot: return;
    case TK::Tensor: case TK::Par:
      unify(a->a, b->a);
      unify(a->b, b->b);
      return;
    case TK::Query: case TK::Bang: case TK::Maybe: case TK::Expect:
      unify(a->a, b->a);
      return;
    case TK::Plus: case TK::With:
      unify_rows(a, b);
      return;
    case TK::Var: return;
  }
}

void Solver::unify_rows(const T& a, const T& b) {
  std::map<std::string, T> e1, e2;
  for (auto& [l, t] : a->labels) {
    auto it = b->labels.find(l);
    if (it == b->labels.end()) e1.emplace(l, t);
    else unify(t, it->second);
  }
  for (auto& [l, t] : b->labels)
    if (!a->labels.count(l)) e2.emplace(l, t);
  auto fail = [&] { throw Mismatch{print_type(resolve(a)), print_type(resolve(b))}; };
  int r1 = a->var, r2 = b->var;
  if (r1 < 0 && r2 < 0) {
    if (!e1.empty() || !e2.empty()) fail();
    return;
  }
  if (r1 < 0) {
    if (!e2.empty()) fail();
    return bind(r2, b->neg, labelled(a->k, e1, -1, false));
  }
  if (r2 < 0) {
    if (!e1.empty()) fail();
    return bind(r1, a->neg, labelled(a->k, e2, -1, false));
  }
  if (r1 == r2) {
    if (a->neg != b->neg || !e1.empty() || !e2.empty()) fail();
    return;
  }
  int r3 = next_++;
  bind(r2, b->neg, labelled(a->k, e1, r3, false));
  bind(r1, a->neg, labelled(a->k, e2, r3, false));
}

bool Solver::try_unify(const T& a, const T& b) {
  auto saved = sub_;
  int saved_next = next_;
  try {
    unify(a, b);
    return true;
  } catch (Mismatch&) {
    sub_ = std::move(saved);
    next_ = saved_next;
    return false;
  }
}

}  // namespace spi
