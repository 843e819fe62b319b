#include "spi/congruence.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <unordered_map>
#include <unordered_set>

namespace spi {
namespace {

using H = uint64_t;

H mix(H a, H b) {
  a ^= b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2);
  return a * 0xff51afd7ed558ccdULL;
}
H hstr(std::string_view s) { return std::hash<std::string_view>()(s); }
H hbag(std::vector<H> v) {
  std::sort(v.begin(), v.end());
  H h = hstr("bag") + v.size();
  for (H x : v) h = mix(h, x);
  return h;
}

// levels of names bound above the current point; tokens compare numerically
struct Env {
  std::unordered_map<Name, int> level;
  int depth = 0;
  Env with(Name n) const {
    Env e = *this;
    e.level[n] = e.depth++;
    return e;
  }
  std::string token(Name n) const {
    auto it = level.find(n);
    if (it == level.end()) return "$" + text(n);
    char buf[16];
    std::snprintf(buf, sizeof buf, "^%05d", it->second);
    return buf;
  }
};

// per-canonicalize caches; results depend only on the node and the levels of its free names
struct Memo {
  std::unordered_map<const Proc*, std::pair<P, std::vector<Name>>> fns;  // keeps the node alive
  std::unordered_map<std::string, P> atoms;
  std::unordered_map<std::string, std::string> keys;

  std::string profile(const P& p, const Env& env) {
    auto it = fns.find(p.get());
    if (it == fns.end()) {
      NameSet f = fn(p);
      it = fns.emplace(p.get(), std::make_pair(p, std::vector<Name>(f.begin(), f.end()))).first;
    }
    std::string out = std::to_string(reinterpret_cast<uintptr_t>(p.get())) + "|";
    for (Name n : it->second.second) {
      auto l = env.level.find(n);
      out += l == env.level.end() ? "-" : std::to_string(l->second);
      out += ",";
    }
    return out;
  }
};
thread_local Memo* g_memo = nullptr;

std::string key_text(const P& p, const Env& env);

std::string key_of(const P& p, const Env& env) {
  if (!g_memo) return key_text(p, env);
  std::string k = g_memo->profile(p, env);
  auto it = g_memo->keys.find(k);
  if (it != g_memo->keys.end()) return it->second;
  std::string r = key_text(p, env);
  g_memo->keys.emplace(std::move(k), r);
  return r;
}

std::string key_text(const P& p, const Env& env) {
  std::vector<std::pair<Name, std::string>> local;
  int counter = 0;
  NamePrinter np;
  np.free = [&](Name n) {
    for (auto it = local.rbegin(); it != local.rend(); ++it)
      if (it->first == n) return it->second;
    return env.token(n);
  };
  np.bind = [&](Name n) {
    std::string t = "#" + std::to_string(counter++);
    local.emplace_back(n, t);
    return t;
  };
  np.unbind = [&](Name) { local.pop_back(); };
  return print_with(p, np);
}

void sort_by_key(std::vector<P>& ps, const Env& env) {
  std::vector<std::pair<std::string, P>> tmp;
  tmp.reserve(ps.size());
  for (auto& p : ps) tmp.emplace_back(key_of(p, env), p);
  std::stable_sort(tmp.begin(), tmp.end(),
                   [](auto& a, auto& b) { return a.first < b.first; });
  for (size_t i = 0; i < ps.size(); ++i) ps[i] = tmp[i].second;
}

void flatten(const P& p, Kind k, std::vector<P>& out) {
  if (p->kind == k) {
    flatten(p->p, k, out);
    flatten(p->q, k, out);
  } else {
    out.push_back(p);
  }
}

// ---- shape hashes: order-insensitive, alpha-invariant, cheap ----

struct HCtx {
  const Env* env;
  std::vector<Name> binders;
  std::unordered_set<Name> at;
};

H hname(Name n, const HCtx& c) {
  for (size_t i = c.binders.size(); i-- > 0;)
    if (c.binders[i] == n) return mix(7, c.binders.size() - i);
  if (c.at.count(n)) return hstr("@");
  return hstr(c.env->token(n));
}

H hatom(const P& a, HCtx& c);

void level_atoms(const P& p, std::vector<P>& atoms, std::vector<Name>& cuts) {
  switch (p->kind) {
    case Kind::Inaction: return;
    case Kind::Par:
      level_atoms(p->p, atoms, cuts);
      level_atoms(p->q, atoms, cuts);
      return;
    case Kind::Restrict:
      cuts.push_back(p->x);
      level_atoms(p->p, atoms, cuts);
      level_atoms(p->q, atoms, cuts);
      return;
    default:
      atoms.push_back(p);
  }
}

H hlevel(const P& p, HCtx& c) {
  std::vector<P> atoms;
  std::vector<Name> cuts;
  level_atoms(p, atoms, cuts);
  std::vector<Name> added;
  for (Name x : cuts)
    if (c.at.insert(x).second) added.push_back(x);
  std::vector<H> hs;
  for (auto& a : atoms) hs.push_back(hatom(a, c));
  for (Name x : added) c.at.erase(x);
  return mix(hbag(hs), cuts.size());
}

H hatom(const P& a, HCtx& c) {
  H h = hstr("k") + static_cast<H>(a->kind);
  switch (a->kind) {
    case Kind::Inaction: case Kind::Success:
      return h;
    case Kind::Forward:
      return mix(h, hbag({hname(a->x, c), hname(a->y, c)}));
    case Kind::Close: case Kind::None:
      return mix(h, hname(a->x, c));
    case Kind::Select:
      h = mix(mix(h, hname(a->x, c)), hstr(a->label));
      return mix(h, hlevel(a->p, c));
    case Kind::Wait: case Kind::Some:
      return mix(mix(h, hname(a->x, c)), hlevel(a->p, c));
    case Kind::Expect: {
      std::vector<H> ws;
      for (Name w : a->ws) ws.push_back(hname(w, c));
      return mix(mix(mix(h, hname(a->x, c)), hbag(ws)), hlevel(a->p, c));
    }
    case Kind::Branch: {
      h = mix(h, hname(a->x, c));
      for (auto& [l, b] : a->branches) h = mix(mix(h, hstr(l)), hlevel(b, c));
      return h;
    }
    case Kind::Output: {
      h = mix(h, hname(a->x, c));
      c.binders.push_back(a->y);
      h = mix(mix(h, hlevel(a->p, c)), hlevel(a->q, c));
      c.binders.pop_back();
      return h;
    }
    case Kind::Input: case Kind::Client: case Kind::Server: {
      h = mix(h, hname(a->x, c));
      c.binders.push_back(a->y);
      h = mix(h, hlevel(a->p, c));
      c.binders.pop_back();
      return h;
    }
    case Kind::Choice: {
      std::vector<P> bs;
      flatten(a, Kind::Choice, bs);
      std::vector<H> hs;
      for (auto& b : bs) hs.push_back(hlevel(b, c));
      return mix(h, hbag(hs));
    }
    case Kind::Par: case Kind::Restrict:
      return mix(h, hlevel(a, c));
  }
  return h;
}

// ---- network of one level ----

struct Cut {
  Name x;
  std::vector<int> side[2];
  bool live = true;
  bool has(int a) const {
    return std::find(side[0].begin(), side[0].end(), a) != side[0].end() ||
           std::find(side[1].begin(), side[1].end(), a) != side[1].end();
  }
  int side_of(int a) const {
    return std::find(side[0].begin(), side[0].end(), a) != side[0].end() ? 0 : 1;
  }
};

struct Net {
  std::vector<P> atoms;
  std::vector<NameSet> fns;
  std::vector<Cut> cuts;
  std::vector<bool> dead;
};

void extract(const P& p, Net& net) {
  switch (p->kind) {
    case Kind::Inaction: return;
    case Kind::Par:
      extract(p->p, net);
      extract(p->q, net);
      return;
    case Kind::Restrict: {
      size_t a = net.atoms.size();
      extract(p->p, net);
      size_t b = net.atoms.size();
      extract(p->q, net);
      size_t e = net.atoms.size();
      Cut c;
      c.x = p->x;
      for (size_t i = a; i < b; ++i)
        if (net.fns[i].count(p->x)) c.side[0].push_back(static_cast<int>(i));
      for (size_t i = b; i < e; ++i)
        if (net.fns[i].count(p->x)) c.side[1].push_back(static_cast<int>(i));
      net.cuts.push_back(std::move(c));
      return;
    }
    default:
      net.atoms.push_back(p);
      net.fns.push_back(fn(p));
  }
}

void gc_servers(Net& net) {
  net.dead.assign(net.atoms.size(), false);
  for (bool changed = true; changed;) {
    changed = false;
    for (auto& c : net.cuts) {
      if (!c.live) continue;
      for (int s = 0; s < 2 && c.live; ++s) {
        if (c.side[s].size() != 1 || !c.side[1 - s].empty()) continue;
        int a = c.side[s][0];
        const P& at = net.atoms[a];
        if (at->kind != Kind::Server || at->x != c.x) continue;
        net.dead[a] = true;
        c.live = false;
        for (auto& d : net.cuts)
          for (auto& sd : d.side) sd.erase(std::remove(sd.begin(), sd.end(), a), sd.end());
        changed = true;
      }
    }
  }
}

struct Fallback {};

struct Canon;

struct LevelRenderer {
  Canon& cn;
  Net& net;
  std::vector<H> hash;
  bool dirty = false;

  P atom(int i, const Env& env);
  P render_set(const std::vector<int>& T, const std::vector<int>& C, const Env& env);
  P component(const std::vector<int>& S, const std::vector<int>& C, const Env& env);
  std::optional<P> rooted(int r, const std::vector<int>& S, const std::vector<int>& C,
                          const Env& env);

  std::vector<int> members(int c) const {
    std::vector<int> m = net.cuts[c].side[0];
    m.insert(m.end(), net.cuts[c].side[1].begin(), net.cuts[c].side[1].end());
    return m;
  }

  // connected components of T using cuts C (skipping one)
  std::unordered_map<int, int> comps(const std::vector<int>& T, const std::vector<int>& C,
                                     int skip) const {
    std::unordered_map<int, int> parent;
    for (int a : T) parent[a] = a;
    std::function<int(int)> find = [&](int a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    for (int c : C) {
      if (c == skip) continue;
      auto m = members(c);
      for (size_t i = 1; i < m.size(); ++i) parent[find(m[i])] = find(m[0]);
    }
    std::unordered_map<int, int> out;
    for (int a : T) out[a] = find(a);
    return out;
  }

  H set_hash(const std::vector<int>& T) const {
    std::vector<H> hs;
    for (int a : T) hs.push_back(hash[a]);
    return hbag(hs);
  }

  std::vector<int> cuts_within(const std::vector<int>& T, const std::vector<int>& C) const {
    std::unordered_set<int> in(T.begin(), T.end());
    std::vector<int> out;
    for (int c : C) {
      auto m = members(c);
      if (!m.empty() && std::all_of(m.begin(), m.end(), [&](int a) { return in.count(a) > 0; }))
        out.push_back(c);
    }
    return out;
  }
};

struct Canon {
  P level(const P& in, const Env& env);
  P fallback(const P& in, const Env& env);
  P atom(const P& a, const Env& env);
  P atom_raw(const P& a, const Env& env);

  static bool non_atomic(const P& p) {
    return p->kind == Kind::Par || p->kind == Kind::Restrict || p->kind == Kind::Inaction;
  }
};

P LevelRenderer::atom(int i, const Env& env) {
  P r = cn.atom(net.atoms[i], env);
  if (Canon::non_atomic(r)) dirty = true;
  return r;
}

P LevelRenderer::render_set(const std::vector<int>& T, const std::vector<int>& C,
                            const Env& env) {
  if (T.empty()) return zero();
  auto comp = comps(T, C, -1);
  std::map<int, std::vector<int>> groups;
  for (int a : T) groups[comp[a]].push_back(a);
  std::vector<P> parts;
  for (auto& [root, S] : groups) {
    P r = component(S, cuts_within(S, C), env);
    if (r->kind != Kind::Inaction) parts.push_back(r);
  }
  sort_by_key(parts, env);
  return par_all(parts);
}

P LevelRenderer::component(const std::vector<int>& S, const std::vector<int>& C,
                           const Env& env) {
  if (C.empty()) {
    std::vector<P> parts;
    for (int a : S) parts.push_back(atom(a, env));
    sort_by_key(parts, env);
    return par_all(parts);
  }
  std::vector<std::pair<std::pair<int, H>, int>> cand;
  for (int a : S) {
    int deg = 0;
    for (int c : C)
      if (net.cuts[c].has(a)) ++deg;
    cand.push_back({{-deg, hash[a]}, a});
  }
  std::stable_sort(cand.begin(), cand.end(),
                   [](auto& l, auto& r) { return l.first < r.first; });
  for (size_t i = 0; i < cand.size();) {
    size_t j = i;
    while (j < cand.size() && cand[j].first == cand[i].first) ++j;
    std::optional<P> best;
    std::string best_key;
    size_t tried = 0;
    for (size_t k = i; k < j && tried < 4; ++k) {
      std::optional<P> r;
      try {
        r = rooted(cand[k].second, S, C, env);
      } catch (Fallback&) {
      }
      if (!r) continue;
      ++tried;
      std::string key = key_of(*r, env);
      if (!best || key < best_key) {
        best = r;
        best_key = key;
      }
    }
    if (best) return *best;
    i = j;
  }
  throw Fallback{};
}

std::optional<P> LevelRenderer::rooted(int r, const std::vector<int>& S,
                                       const std::vector<int>& C, const Env& env) {
  struct Inc {
    int cut;
    std::vector<int> far, near;
    P farP, nearP;
    H hf, hn;
    std::string kf, kn;
  };
  std::vector<Inc> inc;
  std::unordered_map<int, int> cover;
  for (int c : C) {
    const Cut& cut = net.cuts[c];
    if (!cut.has(r)) continue;
    int s = cut.side_of(r);
    auto comp = comps(S, C, c);
    int cr = comp[r];
    std::unordered_set<int> farc, nearc;
    for (int b : cut.side[1 - s]) {
      if (comp[b] == cr) return std::nullopt;
      farc.insert(comp[b]);
    }
    for (int a : cut.side[s])
      if (comp[a] != cr) {
        if (farc.count(comp[a])) return std::nullopt;
        nearc.insert(comp[a]);
      }
    Inc e;
    e.cut = c;
    for (int a : S) {
      if (farc.count(comp[a])) e.far.push_back(a);
      else if (nearc.count(comp[a])) e.near.push_back(a);
    }
    for (int a : e.far) ++cover[a];
    for (int a : e.near) ++cover[a];
    inc.push_back(std::move(e));
  }
  for (int a : S) {
    if (a == r) continue;
    if (cover[a] != 1) return std::nullopt;
  }
  for (auto& e : inc) {
    Env ec = env.with(net.cuts[e.cut].x);
    e.farP = render_set(e.far, cuts_within(e.far, C), ec);
    e.nearP = render_set(e.near, cuts_within(e.near, C), ec);
    e.hf = set_hash(e.far);
    e.hn = set_hash(e.near);
    e.kf = key_of(e.farP, ec);
    e.kn = key_of(e.nearP, ec);
  }
  auto rank = [](const Inc& a) { return std::tie(a.hf, a.hn, a.kf, a.kn); };
  std::stable_sort(inc.begin(), inc.end(), [&](const Inc& a, const Inc& b) { return rank(a) < rank(b); });
  auto build = [&]() {
    Env inner = env;
    for (auto& e : inc) inner = inner.with(net.cuts[e.cut].x);
    P acc = atom(r, inner);
    for (size_t i = inc.size(); i-- > 0;) {
      Env ei = env;
      for (size_t k = 0; k <= i; ++k) ei = ei.with(net.cuts[inc[k].cut].x);
      std::vector<P> near;
      if (inc[i].nearP->kind != Kind::Inaction) near.push_back(inc[i].nearP);
      if (acc->kind != Kind::Inaction) near.push_back(acc);
      sort_by_key(near, ei);
      acc = nu(net.cuts[inc[i].cut].x, inc[i].farP, par_all(near));
    }
    return acc;
  };
  // cuts that look alike from outside are ordered by how the root uses them
  for (size_t i = 0; i < inc.size();) {
    size_t j = i + 1;
    while (j < inc.size() && rank(inc[j]) == rank(inc[i])) ++j;
    if (j - i > 1 && j - i <= 4) {
      std::vector<size_t> perm(j - i);
      for (size_t k = 0; k < perm.size(); ++k) perm[k] = k;
      std::vector<Inc> run(inc.begin() + static_cast<long>(i), inc.begin() + static_cast<long>(j));
      std::vector<size_t> best_perm = perm;
      std::string best_key;
      bool first = true;
      do {
        for (size_t k = 0; k < perm.size(); ++k) inc[i + k] = run[perm[k]];
        std::string key = key_of(build(), env);
        if (first || key < best_key) {
          best_key = key;
          best_perm = perm;
          first = false;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      for (size_t k = 0; k < perm.size(); ++k) inc[i + k] = run[best_perm[k]];
    }
    i = j;
  }
  return build();
}

P Canon::level(const P& in, const Env& env) {
  Net net;
  extract(in, net);
  gc_servers(net);
  LevelRenderer lr{*this, net, {}};
  HCtx hc{&env, {}, {}};
  for (auto& c : net.cuts) hc.at.insert(c.x);
  for (auto& a : net.atoms) lr.hash.push_back(hatom(a, hc));
  std::vector<int> live;
  for (size_t i = 0; i < net.atoms.size(); ++i)
    if (!net.dead[i]) live.push_back(static_cast<int>(i));
  std::vector<int> cuts;
  std::vector<P> parts;
  for (size_t c = 0; c < net.cuts.size(); ++c) {
    if (!net.cuts[c].live) continue;
    if (net.cuts[c].side[0].empty() && net.cuts[c].side[1].empty())
      parts.push_back(nu(net.cuts[c].x, zero(), zero()));
    else
      cuts.push_back(static_cast<int>(c));
  }
  P body;
  try {
    body = lr.render_set(live, cuts, env);
  } catch (Fallback&) {
    return fallback(in, env);
  }
  if (body->kind != Kind::Inaction) flatten(body, Kind::Par, parts);
  sort_by_key(parts, env);
  P res = par_all(parts);
  if (lr.dirty) return level(res, env);
  return res;
}

P Canon::fallback(const P& in, const Env& env) {
  switch (in->kind) {
    case Kind::Inaction: return in;
    case Kind::Par: {
      std::vector<P> items, out;
      flatten(in, Kind::Par, items);
      for (auto& i : items) {
        P r = fallback(i, env);
        if (r->kind == Kind::Par) flatten(r, Kind::Par, out);
        else if (r->kind != Kind::Inaction) out.push_back(r);
      }
      sort_by_key(out, env);
      return par_all(out);
    }
    case Kind::Restrict: {
      for (int s = 0; s < 2; ++s) {
        const P& srv = s ? in->q : in->p;
        const P& rest = s ? in->p : in->q;
        if (srv->kind == Kind::Server && srv->x == in->x && !occurs_free(in->x, rest))
          return fallback(rest, env);
      }
      Env e = env.with(in->x);
      P a = fallback(in->p, e), b = fallback(in->q, e);
      if (key_of(b, e) < key_of(a, e)) std::swap(a, b);
      return nu(in->x, a, b);
    }
    default:
      return atom(in, env);
  }
}

P Canon::atom(const P& a, const Env& env) {
  if (!g_memo) return atom_raw(a, env);
  std::string k = g_memo->profile(a, env);
  auto it = g_memo->atoms.find(k);
  if (it != g_memo->atoms.end()) return it->second;
  P r = atom_raw(a, env);
  g_memo->atoms.emplace(std::move(k), r);
  return r;
}

P Canon::atom_raw(const P& a, const Env& env) {
  switch (a->kind) {
    case Kind::Inaction: case Kind::Success: case Kind::Close: case Kind::None:
      return a;
    case Kind::Par: case Kind::Restrict:
      return level(a, env);
    case Kind::Forward:
      if (env.token(a->y) < env.token(a->x)) return fwd(a->y, a->x);
      return a;
    case Kind::Output: {
      Env e = env.with(a->y);
      return out(a->x, a->y, level(a->p, e), level(a->q, e));
    }
    case Kind::Input: {
      Env e = env.with(a->y);
      return in(a->x, a->y, level(a->p, e));
    }
    case Kind::Client: {
      Env e = env.with(a->y);
      return client(a->x, a->y, level(a->p, e));
    }
    case Kind::Server: {
      Env e = env.with(a->y);
      return server(a->x, a->y, level(a->p, e));
    }
    case Kind::Select: return sel(a->x, a->label, level(a->p, env));
    case Kind::Wait: return wait(a->x, level(a->p, env));
    case Kind::Some: return some(a->x, level(a->p, env));
    case Kind::Expect: {
      std::vector<std::pair<std::string, Name>> ws;
      for (Name w : a->ws) ws.emplace_back(env.token(w), w);
      std::sort(ws.begin(), ws.end());
      ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
      std::vector<Name> names;
      for (auto& [t, w] : ws) names.push_back(w);
      return expect(a->x, std::move(names), level(a->p, env));
    }
    case Kind::Branch: {
      Branches bs;
      for (auto& [l, b] : a->branches) bs.emplace(l, level(b, env));
      return branch(a->x, std::move(bs));
    }
    case Kind::Choice: {
      std::vector<P> raw, got;
      flatten(a, Kind::Choice, raw);
      for (auto& b : raw) {
        P r = level(b, env);
        if (r->kind == Kind::Choice) flatten(r, Kind::Choice, got);
        else got.push_back(r);
      }
      std::vector<std::pair<std::string, P>> keyed;
      for (auto& g : got) keyed.emplace_back(key_of(g, env), g);
      std::sort(keyed.begin(), keyed.end(),
                [](auto& l, auto& r) { return l.first < r.first; });
      std::vector<P> uniq;
      for (size_t i = 0; i < keyed.size(); ++i)
        if (i == 0 || keyed[i].first != keyed[i - 1].first) uniq.push_back(keyed[i].second);
      return choice_all(uniq);
    }
  }
  return a;
}

// ---- hygiene and final naming ----

void binders(const P& p, std::vector<Name>& out) {
  if (p->kind == Kind::Restrict || binds(p->kind)) out.push_back(p->kind == Kind::Restrict ? p->x : p->y);
  if (p->p) binders(p->p, out);
  if (p->q) binders(p->q, out);
  for (auto& [l, b] : p->branches) binders(b, out);
}

bool hygienic(const P& p) {
  std::vector<Name> bs;
  binders(p, bs);
  NameSet seen;
  for (Name b : bs)
    if (!seen.insert(b).second) return false;
  for (Name f : fn(p))
    if (seen.count(f)) return false;
  return true;
}

struct Namer {
  std::unordered_set<std::string> taken;
  int k = 0;
  Name next(const char* base) {
    for (;;) {
      std::string t = std::string(base) + "'" + std::to_string(++k);
      if (!taken.count(t)) return intern(t);
    }
  }
  P go(const P& p, std::unordered_map<Name, Name>& m) {
    auto get = [&](Name n) {
      auto it = m.find(n);
      return it == m.end() ? n : it->second;
    };
    switch (p->kind) {
      case Kind::Inaction: case Kind::Success: return p;
      case Kind::Forward: return fwd(get(p->x), get(p->y));
      case Kind::Par: {
        P a = go(p->p, m);
        return par(a, go(p->q, m));
      }
      case Kind::Choice: {
        P a = go(p->p, m);
        return choice(a, go(p->q, m));
      }
      case Kind::Restrict: {
        Name b = next("n");
        m[p->x] = b;
        P a = go(p->p, m);
        return nu(b, a, go(p->q, m));
      }
      case Kind::Output: {
        Name x = get(p->x);
        Name b = next("y");
        m[p->y] = b;
        P a = go(p->p, m);
        return out(x, b, a, go(p->q, m));
      }
      case Kind::Input: case Kind::Client: case Kind::Server: {
        Name x = get(p->x);
        Name b = next("y");
        m[p->y] = b;
        P a = go(p->p, m);
        if (p->kind == Kind::Input) return in(x, b, a);
        if (p->kind == Kind::Client) return client(x, b, a);
        return server(x, b, a);
      }
      case Kind::Select: return sel(get(p->x), p->label, go(p->p, m));
      case Kind::Wait: return wait(get(p->x), go(p->p, m));
      case Kind::Some: return some(get(p->x), go(p->p, m));
      case Kind::Close: return close_(get(p->x));
      case Kind::None: return none(get(p->x));
      case Kind::Expect: {
        std::vector<Name> ws;
        for (Name w : p->ws) ws.push_back(get(w));
        return expect(get(p->x), std::move(ws), go(p->p, m));
      }
      case Kind::Branch: {
        Name x = get(p->x);
        Branches bs;
        for (auto& [l, b] : p->branches) bs.emplace(l, go(b, m));
        return branch(x, std::move(bs));
      }
    }
    return p;
  }
};

}  // namespace

P canonicalize(const P& p0) {
  P p = hygienic(p0) ? p0 : freshen(p0);
  Canon cn;
  Memo memo;
  Memo* saved = g_memo;
  g_memo = &memo;
  P c;
  try {
    c = cn.level(p, Env{});
  } catch (...) {
    g_memo = saved;
    throw;
  }
  g_memo = saved;
  Namer nm;
  for (Name f : fn(c)) nm.taken.insert(text(f));
  std::unordered_map<Name, Name> m;
  return nm.go(c, m);
}

std::string canonical_key(const P& p) { return print(canonicalize(p)); }

bool is_inert(const P& p) { return canonicalize(p)->kind == Kind::Inaction; }

namespace {

P rebuild(const P& p, P a, P b) {
  Proc pr = *p;
  pr.p = std::move(a);
  pr.q = std::move(b);
  return std::make_shared<const Proc>(std::move(pr));
}

void rewrites_at(const P& p, std::vector<P>& out) {
  if (p->kind == Kind::Restrict) {
    Name x = p->x;
    for (int s = 0; s < 2; ++s) {
      const P& inner = s ? p->q : p->p;
      const P& R = s ? p->p : p->q;
      // nu x (nu y (A | B) | R) -> nu y (nu x (A | R) | B)
      if (inner->kind == Kind::Restrict) {
        Name y = inner->x;
        for (int t = 0; t < 2; ++t) {
          const P& A = t ? inner->q : inner->p;
          const P& B = t ? inner->p : inner->q;
          if (!occurs_free(x, B) && !occurs_free(y, R)) out.push_back(nu(y, nu(x, A, R), B));
        }
      }
      // nu x ((A | B) | R) -> nu x (A | R) | B
      if (inner->kind == Kind::Par) {
        for (int t = 0; t < 2; ++t) {
          const P& A = t ? inner->q : inner->p;
          const P& B = t ? inner->p : inner->q;
          if (!occurs_free(x, B)) out.push_back(par(nu(x, A, R), B));
        }
      }
    }
  }
  // nu x (A | R) | B -> nu x ((A | B) | R)
  if (p->kind == Kind::Par) {
    for (int s = 0; s < 2; ++s) {
      const P& r = s ? p->q : p->p;
      const P& B = s ? p->p : p->q;
      if (r->kind == Kind::Restrict && !occurs_free(r->x, B)) {
        out.push_back(nu(r->x, par(r->p, B), r->q));
        out.push_back(nu(r->x, r->p, par(r->q, B)));
      }
    }
  }
}

void rewrites(const P& p, std::vector<P>& out) {
  rewrites_at(p, out);
  if (p->p) {
    std::vector<P> sub;
    rewrites(p->p, sub);
    for (auto& s : sub) out.push_back(rebuild(p, s, p->q));
  }
  if (p->q) {
    std::vector<P> sub;
    rewrites(p->q, sub);
    for (auto& s : sub) out.push_back(rebuild(p, p->p, s));
  }
  for (auto& [l, b] : p->branches) {
    std::vector<P> sub;
    rewrites(b, sub);
    for (auto& s : sub) {
      Branches bs = p->branches;
      bs[l] = s;
      out.push_back(branch(p->x, std::move(bs)));
    }
  }
}

}  // namespace

std::vector<P> scope_rewrites(const P& p) {
  std::vector<P> out;
  rewrites(p, out);
  return out;
}

bool struct_congruent(const P& a, const P& b, int bound) {
  std::string target = canonical_key(b);
  std::string ka = canonical_key(a);
  if (ka == target) return true;
  std::unordered_set<std::string> seen{ka};
  std::vector<P> frontier{canonicalize(a)};
  const size_t cap = 2000;
  for (int d = 0; d < bound && !frontier.empty(); ++d) {
    std::vector<P> next;
    for (auto& f : frontier) {
      for (auto& r : scope_rewrites(f)) {
        P c = canonicalize(r);
        std::string k = print(c);
        if (k == target) return true;
        if (seen.insert(k).second && next.size() < cap) next.push_back(c);
      }
    }
    frontier = std::move(next);
  }
  return false;
}

}  // namespace spi
