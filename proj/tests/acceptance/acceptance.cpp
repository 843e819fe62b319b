// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "common/support.hpp"
#include "spi/congruence.hpp"
#include "spi/eager.hpp"
#include "spi/equivalence.hpp"
#include "spi/itypes.hpp"
#include "spi/translate.hpp"
#include "spi/typecheck.hpp"

using namespace spi;
using namespace spi::test;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;
  void fail(const std::string& why) {
    if (ok) detail << "first failure: " << why << "; ";
    ok = false;
  }
};

int failures = 0;

void criterion(int n, const std::string& title, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs > limit_s) o.fail("took " + std::to_string(secs) + " s, limit " + std::to_string(limit_s));
  if (!o.ok) ++failures;
  std::printf("[%s] %2d. %s  (%.2f s) %s\n", o.ok ? "PASS" : "FAIL", n, title.c_str(), secs, o.detail.str().c_str());
  std::fflush(stdout);
}

// every element of `got` matches exactly one element of `want` and vice versa
template <class A, class F>
bool bijection(const std::vector<A>& got, const std::vector<A>& want, F eq) {
  if (got.size() != want.size()) return false;
  std::vector<bool> used(want.size(), false);
  for (auto& g : got) {
    bool found = false;
    for (size_t i = 0; i < want.size() && !found; ++i)
      if (!used[i] && eq(g, want[i])) used[i] = found = true;
    if (!found) return false;
  }
  return true;
}

}  // namespace

int main() {
  SpiFile movie = parse_spi(read_file(corpus("movie.spi")));
  SpiFile vm = parse_spi(read_file(corpus("vm.spi")));
  lc::LcFile running = lc::parse_lc(read_file(corpus("running.lc")));
  lc::LcFile lambda = lc::parse_lc(read_file(corpus("lambda.lc")));

  criterion(1, "movie server: Sys has exactly the 3 listed reducts", 1.0, [&](Outcome& o) {
    auto steps = step_all(spi_proc(movie, "Sys"));
    std::vector<P> got, want{spi_proc(movie, "TCard"), spi_proc(movie, "TCash"), spi_proc(movie, "TPeek")};
    for (auto& s : steps) got.push_back(s.target);
    o.detail << steps.size() << " reducts; ";
    if (!bijection(got, want, [](const P& a, const P& b) { return struct_congruent(a, b); }))
      o.fail("reducts differ from TCard/TCash/TPeek up to structural congruence");
  });

  criterion(2, "running example: M -> {N1,N2,N3}; M0 -> M by Beta then Ex-Sub", 1.0, [&](Outcome& o) {
    auto steps = lc::step_all(lc_term(running, "M"));
    std::vector<lc::L> got, want{lc_term(running, "N1"), lc_term(running, "N2"), lc_term(running, "N3")};
    for (auto& s : steps) got.push_back(s.target);
    if (!bijection(got, want, [](const lc::L& a, const lc::L& b) { return lc::same(a, b); }))
      o.fail("reducts of M are not N1,N2,N3");
    bool reached = false;
    for (auto& s1 : lc::step_all(lc_term(running, "M0"))) {
      if (s1.rule != "Beta") continue;
      for (auto& s2 : lc::step_all(s1.target))
        if (s2.rule == "Ex-Sub" && lc::same(s2.target, lc_term(running, "M"))) reached = true;
    }
    if (!reached) o.fail("no Beta;Ex-Sub path from M0 to M");
  });

  criterion(3, "[[M]]u has 6 commitment paths, each ending at some [[Ni]]u >= Pi", 60.0, [&](Outcome& o) {
    TranslateOptions opt;
    opt.omit_empty_usub = true;
    Name u = intern("u");
    std::vector<Resolutions> ns;
    for (auto n : {"N1", "N2", "N3"}) ns.push_back(resolutions(translate_term(lc_term(running, n), u, opt)));
    std::vector<int> per(3, 0);
    auto which = [&](const P& q) {
      std::string k = canonical_key(q);
      for (int i = 0; i < 3; ++i)
        if (ns[static_cast<size_t>(i)].keys.count(k)) return i;
      return -1;
    };
    P pm = translate_term(lc_term(running, "M"), u, opt);
    auto cp = commitment_paths(pm, 60, [&](const P& q) { return which(q) >= 0; });
    o.detail << cp.count << " paths; ";
    if (cp.count != 6) o.fail("expected 6 paths");
    if (cp.exhausted) o.fail("bound reached");
    for (auto& path : cp.paths) {
      int w = which(cp.nodes[static_cast<size_t>(path.back())]);
      if (w >= 0) ++per[static_cast<size_t>(w)];
    }
    o.detail << "terminals per Ni: " << per[0] << "," << per[1] << "," << per[2] << "; ";
    if (per != std::vector<int>{2, 2, 2}) o.fail("each Ni must be reached by two paths");
  });

  criterion(4, "vending machines: VM1 and VM2 typecheck and are distinguished", 10.0, [&](Outcome& o) {
    P v1 = spi_proc(vm, "VM1"), v2 = spi_proc(vm, "VM2");
    if (!typecheck(v1, {}).ok) o.fail("VM1 does not typecheck against the empty context");
    if (!typecheck(v2, {}).ok) o.fail("VM2 does not typecheck against the empty context");
    BisimResult r = bisim_eager(v1, v2);
    o.detail << to_string(r.verdict) << ", " << r.moves.size() << " moves then " << r.difference << "; ";
    if (r.verdict != Verdict::Distinguished) o.fail("not distinguished");
    if (r.difference.empty()) o.fail("no witness");
  });

  auto typed = typed_processes();

  criterion(5, "type preservation over corpus, congruence rewrites and steps", 0, [&](Outcome& o) {
    size_t procs = 0, checks = 0;
    for (auto& tp : typed) {
      if (!typecheck(tp.proc, tp.ctx).ok) {
        o.fail(tp.name + " does not typecheck");
        continue;
      }
      ++procs;
      Trace tr = trace_exhaustive(tp.proc, 3, 300);
      for (auto& n : tr.nodes) {
        std::vector<P> variants{n.term};
        for (auto& r : scope_rewrites(n.term)) variants.push_back(r);
        for (auto& v : variants) {
          ++checks;
          if (!typecheck(v, tp.ctx).ok) o.fail(tp.name + ": retyping fails for " + print(v));
        }
      }
    }
    o.detail << procs << " processes, " << checks << " retypings; ";
    if (procs < 100) o.fail("fewer than 100 typed processes");
  });

  criterion(6, "progress: closed typed processes other than 0 can step", 0, [&](Outcome& o) {
    size_t checked = 0;
    for (auto& tp : typed) {
      if (!tp.ctx.empty()) continue;
      Trace tr = trace_exhaustive(tp.proc, 3, 300);
      for (auto& n : tr.nodes) {
        if (is_inert(n.term)) continue;
        ++checked;
        if (step_all(n.term).empty()) o.fail(tp.name + ": stuck at " + n.key);
      }
    }
    o.detail << checked << " live states; ";
    if (checked < 100) o.fail("fewer than 100 states checked");
  });

  auto judged = judged_terms();

  criterion(7, "subject reduction (well-formed) and subject expansion (well-typed)", 0, [&](Outcome& o) {
    size_t sr = 0, se = 0;
    for (auto& jt : judged) {
      if (!lc::check(jt.term, jt.judgment).ok) {
        o.fail(jt.name + " rejected");
        continue;
      }
      // every term reachable from a judged term keeps the judgment
      std::vector<lc::L> frontier{jt.term}, seen_terms{jt.term};
      std::set<std::string> seen{lc::alpha_key(jt.term)};
      for (int d = 0; d < 30 && !frontier.empty(); ++d) {
        std::vector<lc::L> next;
        for (auto& t : frontier)
          for (auto& s : lc::step_all(t)) {
            if (!jt.judgment.well_typed) {
              ++sr;
              if (!lc::check(s.target, jt.judgment).ok) o.fail(jt.name + ": SR fails at " + lc::print(s.target));
            }
            if (seen.insert(lc::alpha_key(s.target)).second) {
              next.push_back(s.target);
              seen_terms.push_back(s.target);
            }
          }
        frontier = next;
      }
      if (!jt.judgment.well_typed) continue;
      // well-typed reducts: every predecessor from the expansion oracle is well-typed too
      for (auto& t : seen_terms) {
        if (!lc::check(t, jt.judgment).ok) continue;
        for (auto& pre : predecessors(t)) {
          ++se;
          if (!lc::check(pre, jt.judgment).ok) o.fail(jt.name + ": SE fails at " + lc::print(pre));
        }
      }
    }
    o.detail << sr << " SR checks, " << se << " SE checks; ";
    if (sr == 0 || se == 0) o.fail("an empty suite");
  });

  criterion(8, "translation preserves every well-formed corpus judgment", 0, [&](Outcome& o) {
    size_t n = 0;
    for (auto& jt : judged) {
      if (jt.judgment.well_typed) continue;
      ++n;
      PreservationReport r = check_translation_preservation(jt.term, jt.judgment);
      if (!r.ok) o.fail(jt.name + ": " + r.error);
    }
    o.detail << n << " judgments; ";
  });

  criterion(9, "loose completeness, soundness and success sensitivity (bound 30)", 0, [&](Outcome& o) {
    std::vector<std::pair<std::string, lc::L>> terms;
    for (auto n : {"M0", "M"}) terms.push_back({std::string("running:") + n, lc_term(running, n)});
    size_t closed = 0;
    for (auto& d : lambda.decls)
      if (lc::is_closed(d.term)) {
        terms.push_back({"lambda:" + d.name, d.term});
        ++closed;
      }
    size_t succeeding = 0;
    for (auto& [name, m] : terms) {
      CompletenessReport c = check_loose_completeness(m, 30);
      if (!c.ok) o.fail(name + ": completeness" + (c.exhausted ? " (bound)" : ""));
      SoundnessReport s = check_loose_soundness(m, 30);
      if (!s.ok) o.fail(name + ": soundness" + (s.exhausted ? " (bound)" : ""));
      SensitivityReport ss = check_success_sensitivity(m, 30);
      if (!ss.agree()) o.fail(name + ": success sensitivity");
      if (ss.lambda.success) ++succeeding;
    }
    o.detail << terms.size() << " terms (" << closed << " closed, " << succeeding << " succeed); ";
    if (closed < 10) o.fail("fewer than 10 closed terms");
  });

  criterion(10, "randomized: duality involution, compatibility and >= rules (1000 each)", 0, [&](Outcome& o) {
    std::mt19937_64 rng(2024);
    size_t dual_cases = 0, compat_cases = 0, pre_cases = 0;
    for (int i = 0; i < 1000; ++i, ++dual_cases) {
      T a = random_type(rng, 4);
      if (!type_equal(dual(dual(a)), a)) o.fail("dual(dual A) != A for " + print_type(a));
      if (oracle_text(dual(a)) != oracle_dual_text(a)) o.fail("dual disagrees with the oracle on " + print_type(a));
    }
    // compatibility: random pairs of ready prefixes from random processes
    std::vector<Name> fr{intern("a"), intern("b"), intern("c")};
    std::vector<Prefix> pool;
    while (pool.size() < 200) {
      P p = random_process(rng, 3, fr);
      for (auto& a : ready_prefixes(p)) pool.push_back(a);
    }
    for (int i = 0; i < 1000; ++i, ++compat_cases) {
      const Prefix& a = pool[rng() % pool.size()];
      const Prefix& b = pool[rng() % pool.size()];
      bool c = prefix_compatible(a, b);
      bool expect = a.kind == b.kind && a.subject == b.subject &&
                    ((a.kind == Kind::Output || a.kind == Kind::Input) ? true : a.erased() == b.erased());
      if (c != expect) o.fail("compatibility of " + a.text() + " and " + b.text());
      if (c != prefix_compatible(b, a)) o.fail("compatibility is not symmetric");
      if (!prefix_compatible(a, a)) o.fail("compatibility is not reflexive");
    }
    for (int i = 0; i < 1000; ++i, ++pre_cases) {
      P p = random_process(rng, 3, fr), q = random_process(rng, 3, fr), r = random_process(rng, 2, fr);
      if (!nd_precongruence(p, p)) o.fail("reflexivity on " + print(p));
      if (!nd_precongruence(choice(p, q), p)) o.fail("projection on " + print(choice(p, q)));
      if (!nd_precongruence(choice(p, q), q)) o.fail("projection (right) on " + print(choice(p, q)));
      // congruence: from P++Q >= P
      if (!nd_precongruence(par(choice(p, q), r), par(p, r))) o.fail("| congruence");
      Name x = fresh("x");
      if (!nd_precongruence(nu(x, choice(p, q), r), nu(x, p, r))) o.fail("new congruence");
      // a process does not dominate a choice that adds a branch it lacks
      if (!is_inert(q) && !struct_congruent(p, q) && !struct_congruent(p, choice(p, q)) &&
          nd_precongruence(p, choice(p, q)))
        o.fail(print(p) + " should not dominate " + print(choice(p, q)));
    }
    o.detail << dual_cases << " duality, " << compat_cases << " compatibility, " << pre_cases << " precongruence cases; ";
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
