#include "spi/equivalence.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "spi/congruence.hpp"

namespace spi {

// ---- ready prefixes ----

std::string Prefix::text() const {
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
  };
  switch (kind) {
    case Kind::Output: return subject + "!(" + payload + ")";
    case Kind::Input: return subject + "?(" + payload + ")";
    case Kind::Select: return subject + "#" + label;
    case Kind::Branch: return subject + "&{" + join(labels) + "}";
    case Kind::Close: return "close " + subject;
    case Kind::Wait: return "wait " + subject;
    case Kind::Client: return "?" + subject + "!(" + payload + ")";
    case Kind::Server: return "!" + subject + "?(" + payload + ")";
    case Kind::Some: return "some " + subject;
    case Kind::None: return "none " + subject;
    case Kind::Expect: return "expect " + subject + " [" + join(ws) + "]";
    default: return "?";
  }
}

std::string Prefix::erased() const {
  Prefix e = *this;
  if (!e.payload.empty()) e.payload = "_";
  return e.text();
}

bool prefix_compatible(const Prefix& a, const Prefix& b) { return a.erased() == b.erased(); }

namespace {

struct Scan {
  std::set<Prefix> out;
  bool success = false;
  std::unordered_set<Name> bound;

  std::string show(Name n) const { return bound.count(n) ? "_" : spi::text(n); }

  void go(const P& p) {
    switch (p->kind) {
      case Kind::Inaction:
      case Kind::Forward: return;
      case Kind::Success: success = true; return;
      case Kind::Par:
      case Kind::Choice:
        go(p->p);
        go(p->q);
        return;
      case Kind::Restrict: {
        bool added = bound.insert(p->x).second;
        go(p->p);
        go(p->q);
        if (added) bound.erase(p->x);
        return;
      }
      default: break;
    }
    Prefix a;
    a.kind = p->kind;
    a.subject = show(p->x);
    if (binds(p->kind)) a.payload = spi::text(p->y);
    if (p->kind == Kind::Select) a.label = p->label;
    if (p->kind == Kind::Branch)
      for (auto& [l, _] : p->branches) a.labels.push_back(l);
    if (p->kind == Kind::Expect)
      for (Name w : p->ws) a.ws.push_back(show(w));
    out.insert(a);
  }
};

}  // namespace

std::set<Prefix> ready_prefixes(const P& p) {
  Scan s;
  s.go(canonicalize(p));
  return s.out;
}

std::set<std::string> ready_keys(const P& p) {
  std::set<std::string> ks;
  for (auto& a : ready_prefixes(p)) ks.insert(a.erased());
  return ks;
}

bool has_success(const P& p) {
  Scan s;
  s.go(canonicalize(p));
  return s.success;
}

// ---- resolutions ----

namespace {

struct Resolver {
  size_t cap;
  bool complete = true;

  void flatten(const P& p, std::vector<P>& bs) {
    if (p->kind == Kind::Choice) {
      flatten(p->p, bs);
      flatten(p->q, bs);
    } else {
      bs.push_back(p);
    }
  }

  template <class F>
  std::vector<P> cross(const std::vector<P>& as, const std::vector<P>& bs, F mk) {
    std::vector<P> r;
    for (auto& a : as)
      for (auto& b : bs) {
        if (r.size() >= cap) {
          complete = false;
          return r;
        }
        r.push_back(mk(a, b));
      }
    return r;
  }

  std::vector<P> go(const P& p) {
    switch (p->kind) {
      case Kind::Par: return cross(go(p->p), go(p->q), [](P a, P b) { return par(a, b); });
      case Kind::Restrict: {
        Name x = p->x;
        return cross(go(p->p), go(p->q), [x](P a, P b) { return nu(x, a, b); });
      }
      case Kind::Choice: {
        std::vector<P> bs, r{p};
        flatten(p, bs);
        for (auto& b : bs)
          for (auto& s : go(b)) r.push_back(s);
        size_t n = bs.size();
        if (n <= kSubsetLimit) {
          for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
            if (__builtin_popcount(mask) < 2) continue;
            std::vector<P> sub;
            for (size_t i = 0; i < n; ++i)
              if (mask & (1u << i)) sub.push_back(bs[i]);
            r.push_back(choice_all(sub));
          }
        } else {
          complete = false;
        }
        if (r.size() > cap) {
          r.resize(cap);
          complete = false;
        }
        return r;
      }
      default: return {p};
    }
  }
};

}  // namespace

Resolutions resolutions(const P& p, size_t cap) {
  Resolver rs{cap};
  Resolutions out;
  for (auto& q : rs.go(canonicalize(p))) out.keys.insert(canonical_key(q));
  out.complete = rs.complete;
  return out;
}

bool nd_precongruence(const P& p, const P& q) {
  std::string kq = canonical_key(q);
  if (canonical_key(p) == kq) return true;
  return resolutions(p).keys.count(kq) > 0;
}

// ---- bisimilarity ----

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Bisimilar: return "bisimilar";
    case Verdict::Distinguished: return "distinguished";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

BisimResult bisim_eager(const P& a, const P& b, int depth) {
  BisimResult res;
  Trace ta = trace_exhaustive(a, depth), tb = trace_exhaustive(b, depth);
  res.left_states = ta.nodes.size();
  res.right_states = tb.nodes.size();
  std::vector<std::set<std::string>> ra, rb;
  for (auto& n : ta.nodes) ra.push_back(ready_keys(n.term));
  for (auto& n : tb.nodes) rb.push_back(ready_keys(n.term));
  auto succ = [](const Trace& t, int id) {
    std::vector<int> s;
    for (int e : t.nodes[id].edges) s.push_back(t.edges[e].to);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
  };

  // pairs reachable through the product of moves
  using Pair = std::pair<int, int>;
  std::map<Pair, int> level;  // -1 not (yet) distinguished
  std::vector<Pair> order{{0, 0}};
  level[{0, 0}] = -1;
  bool frontier = ta.state_cap_hit || tb.state_cap_hit;
  for (size_t i = 0; i < order.size(); ++i) {
    auto [x, y] = order[i];
    if (!ta.nodes[x].expanded || !tb.nodes[y].expanded) {
      frontier = true;
      continue;
    }
    for (int x2 : succ(ta, x))
      for (int y2 : succ(tb, y))
        if (level.emplace(Pair{x2, y2}, -1).second) order.push_back({x2, y2});
  }
  res.pairs = order.size();

  for (auto& [pr, lv] : level)
    if (ra[pr.first] != rb[pr.second]) lv = 0;
  auto dist = [&](int x, int y, int below) {
    auto it = level.find({x, y});
    return it != level.end() && it->second >= 0 && it->second < below;
  };
  // a move of one side that no answer of the other side matches
  auto beats = [&](const Trace& mover, int m, const Trace& other, int o, bool left, int below) {
    if (!mover.nodes[m].expanded || !other.nodes[o].expanded) return -1;
    auto answers = succ(other, o);
    for (int e : mover.nodes[m].edges) {
      int m2 = mover.edges[e].to;
      bool all = true;
      for (int o2 : answers)
        if (!(left ? dist(m2, o2, below) : dist(o2, m2, below))) {
          all = false;
          break;
        }
      if (all) return e;
    }
    return -1;
  };
  for (int n = 1;; ++n) {
    std::vector<Pair> fresh_d;
    for (auto& [pr, lv] : level) {
      if (lv >= 0) continue;
      auto [x, y] = pr;
      if (beats(ta, x, tb, y, true, n) >= 0 || beats(tb, y, ta, x, false, n) >= 0) fresh_d.push_back(pr);
    }
    if (fresh_d.empty()) break;
    for (auto& pr : fresh_d) level[pr] = n;
  }

  int root = level[{0, 0}];
  if (root < 0) {
    res.verdict = frontier ? Verdict::Inconclusive : Verdict::Bisimilar;
    return res;
  }
  res.verdict = Verdict::Distinguished;
  int x = 0, y = 0;
  for (;;) {
    int lv = level[{x, y}];
    if (lv == 0) {
      std::vector<std::string> only_a, only_b;
      std::set_difference(ra[x].begin(), ra[x].end(), rb[y].begin(), rb[y].end(), std::back_inserter(only_a));
      std::set_difference(rb[y].begin(), rb[y].end(), ra[x].begin(), ra[x].end(), std::back_inserter(only_b));
      std::string d;
      for (auto& s : only_a) d += (d.empty() ? "" : "; ") + std::string("left has ") + s;
      for (auto& s : only_b) d += (d.empty() ? "" : "; ") + std::string("right has ") + s;
      res.difference = d;
      break;
    }
    bool left = true;
    int e = beats(ta, x, tb, y, true, lv);
    if (e < 0) {
      left = false;
      e = beats(tb, y, ta, x, false, lv);
    }
    const Trace& mt = left ? ta : tb;
    const TraceEdge& ed = mt.edges[e];
    res.moves.push_back({left, ed.rule, ed.channel, mt.nodes[ed.from].key, mt.nodes[ed.to].key});
    auto answers = left ? succ(tb, y) : succ(ta, x);
    if (answers.empty()) {
      res.difference = std::string(left ? "right" : "left") + " has no answering step";
      break;
    }
    // follow the answer that stays distinguishable longest
    int best = -1, best_lv = -1;
    for (int o : answers) {
      int l2 = left ? level[{ed.to, o}] : level[{o, ed.to}];
      if (l2 > best_lv) best_lv = l2, best = o;
    }
    if (left) x = ed.to, y = best;
    else x = best, y = ed.to;
  }
  return res;
}

// ---- success ----

SuccessResult succeeds_pi(const P& p, int bound) {
  SuccessResult r;
  size_t cap = state_cap();
  std::unordered_set<std::string> seen;
  P root = canonicalize(p);
  std::deque<std::pair<P, int>> q{{root, 0}};
  seen.insert(print(root));
  while (!q.empty()) {
    auto [t, d] = q.front();
    q.pop_front();
    if (has_success(t)) {
      r.success = true;
      r.exhausted = false;
      return r;
    }
    auto steps = step_all(t);
    if (d >= bound || seen.size() >= cap) {
      if (!steps.empty()) r.exhausted = true;
      continue;
    }
    for (auto& s : steps)
      if (seen.insert(s.key).second) q.push_back({s.target, d + 1});
  }
  return r;
}

SuccessResult succeeds_lambda(const lc::L& m, int bound) {
  SuccessResult r;
  std::unordered_set<std::string> seen{lc::alpha_key(m)};
  std::deque<std::pair<lc::L, int>> q{{m, 0}};
  while (!q.empty()) {
    auto [t, d] = q.front();
    q.pop_front();
    if (lc::head(t).kind == lc::Head::Success) {
      r.success = true;
      r.exhausted = false;
      return r;
    }
    auto steps = lc::step_all(t);
    if (d >= bound) {
      if (!steps.empty()) r.exhausted = true;
      continue;
    }
    for (auto& s : steps)
      if (seen.insert(lc::alpha_key(s.target)).second) q.push_back({s.target, d + 1});
  }
  return r;
}

// ---- correspondence ----

namespace {

Name out_name(const lc::L& m) {
  Name u = intern("u");
  for (Name n : lc::all_names(m))
    if (n == u) return fresh("u");
  return u;
}

}  // namespace

CompletenessReport check_loose_completeness(const lc::L& m, int bound, const TranslateOptions& opt) {
  CompletenessReport rep;
  Name u = out_name(m);
  auto steps = lc::step_all(m);
  std::vector<std::set<std::string>> targets;
  for (auto& s : steps) {
    rep.witnesses.push_back({s.rule, lc::print(s.target), std::nullopt, -1});
    targets.push_back(resolutions(translate_term(s.target, u, opt)).keys);
  }
  size_t missing = steps.size();
  size_t cap = state_cap();
  P root = canonicalize(translate_term(m, u, opt));
  std::unordered_set<std::string> seen{print(root)};
  std::deque<std::tuple<P, std::string, int>> q{{root, print(root), 0}};
  while (!q.empty() && missing > 0) {
    auto [t, key, d] = q.front();
    q.pop_front();
    for (size_t i = 0; i < targets.size(); ++i)
      if (!rep.witnesses[i].q && targets[i].count(key)) {
        rep.witnesses[i].q = key;
        rep.witnesses[i].depth = d;
        --missing;
      }
    if (missing == 0) break;
    auto ss = step_all(t);
    if (d >= bound || seen.size() >= cap) {
      if (!ss.empty()) rep.exhausted = true;
      continue;
    }
    for (auto& s : ss)
      if (seen.insert(s.key).second) q.push_back({s.target, s.key, d + 1});
  }
  rep.ok = missing == 0;
  if (rep.ok) rep.exhausted = false;
  return rep;
}

SoundnessReport check_loose_soundness(const lc::L& m, int bound, const TranslateOptions& opt,
                                      size_t max_witnesses) {
  SoundnessReport rep;
  Name u = out_name(m);
  // every M' with M ->* M' and the keys below its translation
  std::unordered_map<std::string, std::string> good;  // key -> M'
  std::unordered_set<std::string> seen{lc::alpha_key(m)};
  std::deque<std::pair<lc::L, int>> lq{{m, 0}};
  bool lambda_cut = false;
  while (!lq.empty()) {
    auto [t, d] = lq.front();
    lq.pop_front();
    for (auto& k : resolutions(translate_term(t, u, opt)).keys) good.emplace(k, lc::print(t));
    auto steps = lc::step_all(t);
    if (d >= bound) {
      if (!steps.empty()) lambda_cut = true;
      continue;
    }
    for (auto& s : steps)
      if (seen.insert(lc::alpha_key(s.target)).second) lq.push_back({s.target, d + 1});
  }
  rep.lambda_terms = seen.size();

  // Q ranges over depth <= bound; the search for Q' may go as far again
  Trace tr = trace_exhaustive(translate_term(m, u, opt), 2 * bound);
  size_t n = tr.nodes.size();
  std::vector<int> next(n, -2);  // -1: itself good, >=0: successor towards a good node
  std::vector<bool> open(n, false);  // reaches an unexpanded node
  for (size_t i = 0; i < n; ++i) {
    if (good.count(tr.nodes[i].key)) next[i] = -1;
    if (!tr.nodes[i].expanded) open[i] = true;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = 0; i < n; ++i)
      for (int e : tr.nodes[i].edges) {
        int to = tr.edges[e].to;
        if (next[i] == -2 && next[to] != -2) next[i] = to, changed = true;
        if (!open[i] && open[to]) open[i] = true, changed = true;
      }
  }
  rep.ok = true;
  std::vector<SoundnessWitness> bad, fine;
  for (size_t i = 0; i < n; ++i) {
    if (tr.nodes[i].depth > bound) continue;
    ++rep.pi_states;
    SoundnessWitness w{tr.nodes[i].key, std::nullopt, std::nullopt};
    if (next[i] == -2) {
      rep.ok = false;
      if (open[i] || lambda_cut || tr.state_cap_hit) rep.exhausted = true;
      bad.push_back(w);
      continue;
    }
    size_t j = i;
    while (next[j] >= 0) j = static_cast<size_t>(next[j]);
    w.q2 = tr.nodes[j].key;
    w.m2 = good[tr.nodes[j].key];
    fine.push_back(w);
  }
  for (auto& w : bad)
    if (rep.witnesses.size() < max_witnesses) rep.witnesses.push_back(w);
  for (auto& w : fine)
    if (rep.witnesses.size() < max_witnesses) rep.witnesses.push_back(w);
  return rep;
}

SensitivityReport check_success_sensitivity(const lc::L& m, int bound, int pi_bound, const TranslateOptions& opt) {
  SensitivityReport r;
  r.lambda = succeeds_lambda(m, bound);
  r.pi = succeeds_pi(translate_term(m, out_name(m), opt), pi_bound > 0 ? pi_bound : 10 * bound);
  return r;
}

}  // namespace spi
