#include "spi/eager.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "spi/congruence.hpp"
#include "spi/typecheck.hpp"

namespace spi {

NDContext commit(const NDContext& n) {
  NDContext d;
  for (auto& f : n)
    if (f.tag != Frame::NDLeft) d.push_back(f);
  return d;
}

bool is_d_context(const NDContext& n) {
  for (auto& f : n)
    if (f.tag == Frame::NDLeft) return false;
  return true;
}

P plug(const NDContext& n, const P& hole) {
  P acc = hole;
  for (size_t i = n.size(); i-- > 0;) {
    const Frame& f = n[i];
    const P& l = f.hole_left ? acc : f.other;
    const P& r = f.hole_left ? f.other : acc;
    switch (f.tag) {
      case Frame::ParLeft: acc = par(l, r); break;
      case Frame::RestrictLeft: acc = nu(f.x, l, r); break;
      case Frame::NDLeft: acc = choice(l, r); break;
    }
  }
  return acc;
}

namespace {

void decomp(const P& p, NDContext& ctx, std::vector<Decomposition>& out) {
  auto two = [&](Frame::Tag tag, Name x) {
    ctx.push_back({tag, x, p->q, true});
    decomp(p->p, ctx, out);
    ctx.back() = {tag, x, p->p, false};
    decomp(p->q, ctx, out);
    ctx.pop_back();
  };
  switch (p->kind) {
    case Kind::Inaction: return;
    case Kind::Par: two(Frame::ParLeft, Name{}); return;
    case Kind::Restrict: two(Frame::RestrictLeft, p->x); return;
    case Kind::Choice: two(Frame::NDLeft, Name{}); return;
    default:
      out.push_back({ctx, p});
  }
}

struct Found {
  Redex redex;
  P target;
};

P nones(const std::vector<Name>& ws) {
  std::vector<P> ps;
  for (Name w : ws) ps.push_back(none(w));
  return par_all(ps);
}

// cut redexes of nu x (l | r) with l in the role of the first premise
void match_cut(Name x, const P&, const P& r, const std::vector<Decomposition>& dl,
               const std::vector<Decomposition>& dr, std::vector<Found>& out) {
  for (auto& a : dl) {
    const P& s = a.sub;
    if (s->kind == Kind::Forward && (s->x == x || s->y == x)) {
      Name y = s->x == x ? s->y : s->x;
      if (y == x) continue;
      P t = plug(commit(a.ctx), substitute(r, y, x));
      out.push_back({{"Id", x, a, {}}, t});
      continue;
    }
    if (!is_prefix(s->kind) || s->x != x) continue;
    for (auto& b : dr) {
      const P& o = b.sub;
      if (!is_prefix(o->kind) || o->x != x) continue;
      NDContext dn = commit(a.ctx), dm = commit(b.ctx);
      if (s->kind == Kind::Close && o->kind == Kind::Wait) {
        out.push_back({{"1⊥", x, a, b}, par(plug(dn, zero()), plug(dm, o->p))});
      } else if (s->kind == Kind::Output && o->kind == Kind::Input) {
        P recv = plug(dm, substitute(o->p, s->y, o->y));
        out.push_back({{"⊗⅋", x, a, b}, plug(dn, nu(x, s->q, nu(s->y, s->p, recv)))});
      } else if (s->kind == Kind::Select && o->kind == Kind::Branch) {
        auto it = o->branches.find(s->label);
        if (it == o->branches.end()) continue;
        out.push_back({{"⊕&(" + s->label + ")", x, a, b}, nu(x, plug(dn, s->p), plug(dm, it->second))});
      } else if (s->kind == Kind::Client && o->kind == Kind::Server) {
        P copy = substitute(o->p, s->y, o->y);
        P t = plug(dm, nu(x, nu(s->y, plug(dn, s->p), copy), o));
        out.push_back({{"?!", x, a, b}, t});
      } else if (s->kind == Kind::Some && o->kind == Kind::Expect) {
        out.push_back({{"some", x, a, b}, nu(x, plug(dn, s->p), plug(dm, o->p))});
      } else if (s->kind == Kind::None && o->kind == Kind::Expect) {
        out.push_back({{"none", x, a, b}, par(plug(dn, zero()), plug(dm, nones(o->ws)))});
      }
    }
  }
}

void steps(const P& p, std::vector<Found>& out) {
  switch (p->kind) {
    case Kind::Par: case Kind::Choice: case Kind::Restrict: {
      std::vector<Found> sub;
      steps(p->p, sub);
      for (auto& f : sub) {
        P t = p->kind == Kind::Par ? par(f.target, p->q)
              : p->kind == Kind::Choice ? choice(f.target, p->q)
                                        : nu(p->x, f.target, p->q);
        out.push_back({f.redex, t});
      }
      sub.clear();
      steps(p->q, sub);
      for (auto& f : sub) {
        P t = p->kind == Kind::Par ? par(p->p, f.target)
              : p->kind == Kind::Choice ? choice(p->p, f.target)
                                        : nu(p->x, p->p, f.target);
        out.push_back({f.redex, t});
      }
      if (p->kind == Kind::Restrict) {
        std::vector<Decomposition> dl, dr;
        NDContext c;
        decomp(p->p, c, dl);
        decomp(p->q, c, dr);
        match_cut(p->x, p->p, p->q, dl, dr, out);
        match_cut(p->x, p->q, p->p, dr, dl, out);
      }
      return;
    }
    default:
      return;
  }
}

}  // namespace

std::vector<Decomposition> decompositions(const P& p) {
  std::vector<Decomposition> out;
  NDContext c;
  decomp(p, c, out);
  return out;
}

std::vector<ReductionStep> step_all(const P& p0) {
  P p = canonicalize(p0);
  std::vector<Found> found;
  steps(p, found);
  std::vector<ReductionStep> out;
  std::unordered_set<std::string> seen;
  for (auto& f : found) {
    P t = canonicalize(f.target);
    std::string key = print(t);
    std::string id = f.redex.rule + "|" + text(f.redex.channel) + "|" + key;
    if (!seen.insert(id).second) continue;
    out.push_back({p, f.redex, t, key});
  }
  return out;
}

size_t state_cap() {
  if (const char* s = std::getenv("SPI_MAX_STATES")) {
    long v = std::atol(s);
    if (v > 0) return static_cast<size_t>(v);
  }
  return 200000;
}

Trace trace_exhaustive(const P& p, int bound, size_t max_states) {
  if (max_states == 0) max_states = state_cap();
  Trace tr;
  std::unordered_map<std::string, int> index;
  P root = canonicalize(p);
  tr.nodes.push_back({0, -1, 0, root, print(root)});
  index[tr.nodes[0].key] = 0;
  std::deque<int> queue{0};
  while (!queue.empty()) {
    int id = queue.front();
    queue.pop_front();
    if (tr.nodes[id].depth >= bound) {
      if (!step_all(tr.nodes[id].term).empty()) tr.bound_exhausted = true;
      continue;
    }
    if (tr.nodes.size() >= max_states) {
      tr.state_cap_hit = true;
      continue;
    }
    tr.nodes[id].expanded = true;
    for (auto& s : step_all(tr.nodes[id].term)) {
      auto it = index.find(s.key);
      int to;
      if (it == index.end()) {
        to = static_cast<int>(tr.nodes.size());
        tr.nodes.push_back({to, id, tr.nodes[id].depth + 1, s.target, s.key});
        index.emplace(s.key, to);
        queue.push_back(to);
      } else {
        to = it->second;
      }
      tr.nodes[id].edges.push_back(static_cast<int>(tr.edges.size()));
      tr.edges.push_back({id, to, s.redex.rule, text(s.redex.channel)});
    }
  }
  return tr;
}

namespace {
Trace trace_path(const P& p, int bound,
                 const std::function<int(const P&, const std::vector<ReductionStep>&)>& pick) {
  Trace tr;
  P cur = canonicalize(p);
  tr.nodes.push_back({0, -1, 0, cur, print(cur)});
  for (int d = 0;; ++d) {
    auto st = step_all(cur);
    int id = static_cast<int>(tr.nodes.size()) - 1;
    if (st.empty()) {
      tr.nodes[id].expanded = true;
      break;
    }
    if (d >= bound) {
      tr.bound_exhausted = true;
      break;
    }
    int k = pick(cur, st);
    if (k < 0 || k >= static_cast<int>(st.size())) break;
    tr.nodes[id].expanded = true;
    cur = st[k].target;
    tr.nodes[id].edges.push_back(static_cast<int>(tr.edges.size()));
    tr.edges.push_back({id, id + 1, st[k].redex.rule, text(st[k].redex.channel)});
    tr.nodes.push_back({id + 1, id, d + 1, cur, st[k].key});
  }
  return tr;
}
}  // namespace

Trace trace_random(const P& p, int bound, uint64_t seed) {
  std::mt19937_64 rng(seed);
  return trace_path(p, bound, [&](const P&, const std::vector<ReductionStep>& st) {
    std::uniform_int_distribution<size_t> d(0, st.size() - 1);
    return static_cast<int>(d(rng));
  });
}

Trace trace_interactive(const P& p, int bound,
                        const std::function<int(const P&, const std::vector<ReductionStep>&)>& pick) {
  return trace_path(p, bound, pick);
}

std::vector<P> normal_forms(const Trace& t) {
  std::vector<P> out;
  for (auto& n : t.nodes)
    if (n.expanded && n.edges.empty()) out.push_back(n.term);
  return out;
}

CommitmentPaths commitment_paths(const P& p, int bound, const std::function<bool(const P&)>& hit) {
  CommitmentPaths res;
  std::unordered_map<std::string, int> index;
  std::vector<P> terms;
  std::vector<std::optional<std::vector<int>>> succ;
  std::vector<int> hits;  // -1 unknown, 0 no, 1 yes
  auto node = [&](const P& t, const std::string& k) {
    auto it = index.find(k);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(terms.size());
    index.emplace(k, id);
    terms.push_back(t);
    succ.emplace_back();
    hits.push_back(-1);
    return id;
  };
  P root = canonicalize(p);
  node(root, print(root));
  std::vector<int> path;
  const size_t cap = 100000;
  std::function<void(int, int)> dfs = [&](int id, int depth) {
    if (res.paths.size() >= cap) return;
    if (hits[id] < 0) hits[id] = hit(terms[id]) ? 1 : 0;
    path.push_back(id);
    if (hits[id] == 1) {
      res.paths.push_back(path);
    } else if (depth >= bound) {
      res.exhausted = true;
    } else {
      if (!succ[id]) {
        std::vector<int> s;
        std::set<int> uniq;
        for (auto& st : step_all(terms[id])) {
          int to = node(st.target, st.key);
          if (uniq.insert(to).second) s.push_back(to);
        }
        succ[id] = s;
      }
      for (int to : *succ[id]) {
        if (std::find(path.begin(), path.end(), to) != path.end()) continue;
        dfs(to, depth + 1);
      }
    }
    path.pop_back();
  };
  dfs(0, 0);
  res.count = res.paths.size();
  res.nodes = std::move(terms);
  return res;
}

DeadlockProbe probe_deadlock_freedom(const P& p) {
  DeadlockProbe r;
  Derivation d = typecheck(p, {});
  if (!d.ok) {
    r.error = d.error ? d.error->what() : "not typable";
    return r;
  }
  r.precondition_ok = true;
  r.progress = is_inert(p) || !step_all(p).empty();
  return r;
}

}  // namespace spi
