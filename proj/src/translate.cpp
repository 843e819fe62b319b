#include "spi/translate.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace spi {

using namespace lc;

Name FreshSupply::next(const std::string& hint) {
  for (;;) {
    std::string t = hint + std::to_string(++next_);
    if (taken_.insert(t).second) return intern(t);
  }
}

Name FreshSupply::keep_or_next(const std::string& hint) {
  if (taken_.insert(hint).second) return intern(hint);
  return next(hint);
}

Name unr_channel(Name x) { return intern(text(x) + "_u"); }

namespace {

struct Env {
  std::unordered_map<Name, Name> lin, unr;
  Name ch(Name x) const {
    auto it = lin.find(x);
    return it == lin.end() ? x : it->second;
  }
  Name uch(Name x) const {
    auto it = unr.find(x);
    return it == unr.end() ? unr_channel(x) : it->second;
  }
};

// the names an expect on x must list: linear free names of its continuation
std::vector<Name> awaiting(const P& cont, Name x) {
  std::vector<Name> ws;
  for (Name n : free_names(cont).linear)
    if (n != x) ws.push_back(n);
  std::sort(ws.begin(), ws.end(), ByText());
  return ws;
}

P guard(Name x, const P& cont) { return expect(x, awaiting(cont, x), cont); }

struct Translator {
  FreshSupply& s;
  const TranslateOptions& opt;

  std::string hint(Name x) { return base_of(text(x)) + "u"; }

  P unr(const UnrBag& u, Name x, const Env& env) {
    Branches bs;
    for (size_t i = 0; i < u.size(); ++i)
      bs.emplace(std::to_string(i + 1), u[i] ? term(*u[i], x, env) : none(x));
    return branch(x, std::move(bs));
  }

  P lin(const LinBag& c, size_t from, Name xl, const Env& env) {
    Name y = s.next("y");
    if (from == c.size()) return expect(xl, {}, in(xl, y, par(some(y, close_(y)), expect(xl, {}, none(xl)))));
    Name z = s.next("z");
    P item = guard(z, term(c[from], z, env));
    P inner = some(xl, out(xl, z, item, par(lin(c, from + 1, xl, env), none(y))));
    return guard(xl, in(xl, y, guard(xl, inner)));
  }

  P bag(const Bag& b, Name x, const Env& env) {
    Name xl = s.next("l"), xu = s.next("r"), xi = s.next("i");
    P server_part = server(xu, xi, unr(b.unr, xi, env));
    return guard(x, out(x, xl, lin(b.lin, 0, xl, env), out(x, xu, server_part, close_(x))));
  }

  // receive the linear and unrestricted channels of x on c, then continue
  P receive(Name c, Name x, Name xu, const P& body) { return some(c, in(c, x, in(c, xu, wait(c, body)))); }

  P term(const L& m, Name u, const Env& env) {
    switch (m->kind) {
      case LKind::Var: {
        Name x = env.ch(m->x);
        return some(x, fwd(x, u));
      }
      case LKind::UVar: {
        Name xi = s.next("i");
        return client(env.uch(m->x), xi, sel(xi, std::to_string(m->index), fwd(xi, u)));
      }
      case LKind::Abs: {
        Name c = s.next("b"), xu = s.next(hint(m->x));
        Env e = env;
        e.lin[m->x] = m->x;
        e.unr[m->x] = xu;
        return some(u, in(u, c, receive(c, m->x, xu, term(m->m, u, e))));
      }
      case LKind::App: {
        Name v = s.next("v"), c = s.next("b");
        P cont = out(v, c, bag(m->bag, c, env), fwd(v, u));
        return nu(v, term(m->m, v, env), guard(v, cont));
      }
      case LKind::ISub: {
        Name c = s.next("b"), xu = s.next(hint(m->x));
        Env e = env;
        e.lin[m->x] = m->x;
        e.unr[m->x] = xu;
        return nu(c, receive(c, m->x, xu, term(m->m, u, e)), bag(m->bag, c, env));
      }
      case LKind::LSub: return linsub(m, u, env);
      case LKind::USub: {
        bool all_empty = std::all_of(m->bag.unr.begin(), m->bag.unr.end(), [](auto& o) { return !o; });
        if (opt.omit_empty_usub && all_empty && !fv(m->m).count(m->x)) return term(m->m, u, env);
        Name xu = s.next(hint(m->x)), xi = s.next("i");
        Env e = env;
        e.unr[m->x] = xu;
        return nu(xu, term(m->m, u, e), server(xu, xi, unr(m->bag.unr, xi, env)));
      }
      case LKind::Share: return sharing(m->m, m->xs, m->x, u, env);
      case LKind::Fail: {
        std::vector<P> ps{none(u)};
        for (Name x : m->xs) ps.push_back(none(env.ch(x)));
        return par_all(ps);
      }
      case LKind::Success: return ok();
    }
    return zero();
  }

  P sharing(const L& body, const std::vector<Name>& xs, Name x, Name u, const Env& env) {
    Name xl = env.ch(x), y = s.next("y");
    if (xs.empty()) return some(xl, out(xl, y, guard(y, wait(y, term(body, u, env))), none(xl)));
    std::vector<P> alts;
    for (size_t i = 0; i < xs.size(); ++i) {
      std::vector<Name> rest = xs;
      rest.erase(rest.begin() + static_cast<long>(i));
      Env e = env;
      e.lin[xs[i]] = xs[i];
      alts.push_back(in(xl, xs[i], sharing(body, rest, x, u, e)));
    }
    P sum = choice_all(alts);
    return some(xl, out(xl, y, expect(y, {}, wait(y, zero())), some(xl, guard(xl, sum))));
  }

  P linsub(const L& m, Name u, const Env& env) {
    const LinBag& c = m->bag.lin;
    if (c.size() != m->xs.size()) throw std::invalid_argument("linear substitution with mismatched arity");
    size_t k = c.size();
    std::vector<Name> zs;
    for (size_t i = 0; i < k; ++i) zs.push_back(s.next("z"));
    std::vector<size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<P> alts;
    do {
      // perm[m] is the variable assigned to z_m
      Env e = env;
      for (size_t j = 0; j < k; ++j) e.lin[m->xs[perm[j]]] = zs[j];
      alts.push_back(term(m->m, u, e));
    } while (std::next_permutation(perm.begin(), perm.end()));
    P acc = choice_all(alts);
    for (size_t j = k; j-- > 0;) acc = nu(zs[j], guard(zs[j], term(c[j], zs[j], env)), acc);
    return acc;
  }
};

}  // namespace

P translate_term(const L& m, Name u, const TranslateOptions& opt) {
  FreshSupply s(opt.seed);
  for (Name n : all_names(m)) {
    s.avoid(n);
    s.avoid(text(unr_channel(n)));
  }
  s.avoid(u);
  Translator t{s, opt};
  return t.term(m, u, Env{});
}

T translate_strict(const IT& t) {
  if (t->kind == IType::Unit) return t_maybe(t_one());
  return t_maybe(t_par(dual(translate_tuple(t->sigma, t->k, t->eta, 0)), translate_strict(t->tau)));
}

T translate_multiset(const IT& sigma0, int k, int i) {
  IT sigma = sigma0 ? sigma0 : t_unit();
  auto step = [&](T rest) {
    return t_expect(t_par(t_maybe(t_one()), t_expect(t_maybe(t_tensor(t_expect(translate_strict(sigma)), rest)))));
  };
  if (k > 0) return step(translate_multiset(sigma, k - 1, i));
  if (i == 0) return t_expect(t_par(t_maybe(t_one()), t_expect(t_maybe(t_one()))));
  return step(translate_multiset(sigma, 0, i - 1));
}

T translate_list(const std::vector<IT>& eta) {
  std::map<std::string, T> ls;
  for (size_t i = 0; i < eta.size(); ++i) ls.emplace(std::to_string(i + 1), translate_strict(eta[i]));
  return t_bang(t_with(std::move(ls)));
}

T translate_tuple(const IT& sigma, int k, const std::vector<IT>& eta, int i) {
  return t_expect(t_tensor(translate_multiset(sigma, k, i), t_tensor(translate_list(eta), t_one())));
}

TypingCtx translate_contexts(const Judgment& j, const IndexOverrides& idx) {
  TypingCtx g;
  for (auto& e : j.gamma) {
    if (!e.multi) {
      g.emplace_back(e.x, t_maybe(dual(translate_strict(e.sigma))));
      continue;
    }
    auto it = idx.find(text(e.x));
    int i = it == idx.end() ? 0 : it->second;
    g.emplace_back(e.x, dual(translate_multiset(e.sigma, e.k, i)));
  }
  for (auto& e : j.theta) g.emplace_back(unr_channel(e.x), dual(translate_list(e.eta)));
  return g;
}

PreservationReport check_translation_preservation(const L& m, const Judgment& j, const TranslateOptions& opt,
                                                  const IndexOverrides& idx) {
  PreservationReport r;
  r.lambda_judgment = print_judgment(j, print(m));
  LDerivation d = check(m, j);
  if (!d.ok) {
    r.error = "source judgment rejected: " + d.error->message;
    return r;
  }
  Name u = intern("u");
  for (Name n : all_names(m))
    if (n == u) u = fresh("u");
  r.process = translate_term(m, u, opt);
  TypingCtx g = translate_contexts(j, idx);
  g.emplace_back(u, translate_strict(j.tau));
  r.pi_judgment = print(r.process) + " |- " + print_ctx(g);
  Derivation pd = typecheck(r.process, g);
  r.ok = pd.ok;
  if (!pd.ok && pd.error) r.error = pd.error->what();
  return r;
}

}  // namespace spi
