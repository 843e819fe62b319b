// spi: command line for the process calculus, the resource lambda calculus,
// the translation and the equivalence checks.
#include <CLI11.hpp>
#include <deque>
#include <iostream>
#include <json.hpp>
#include <random>
#include <unordered_set>

#include "spi/congruence.hpp"
#include "spi/eager.hpp"
#include "spi/equivalence.hpp"
#include "spi/lc_parse.hpp"
#include "spi/parse.hpp"
#include "spi/translate.hpp"
#include "spi/typecheck.hpp"

using namespace spi;
using json = nlohmann::json;

namespace {

enum Exit { Ok = 0, Refuted = 1, InputError = 2, Inconclusive = 3 };

bool g_json = false;

void emit(const json& j, const std::string& text) {
  if (g_json) std::cout << j.dump() << "\n";
  else if (!text.empty()) std::cout << text << "\n";
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool is_lc(const std::string& path) { return path.size() >= 3 && path.compare(path.size() - 3, 3, ".lc") == 0; }

const SpiDecl& spi_decl(const SpiFile& f, const std::string& name) {
  const SpiDecl* d = f.find(name);
  if (!d) throw UsageError("no process named " + name);
  return *d;
}

const lc::LcDecl& lc_decl(const lc::LcFile& f, const std::string& name) {
  const lc::LcDecl* d = f.find(name);
  if (!d) throw UsageError("no term named " + name);
  return *d;
}

// ---- check ----

int cmd_check(const std::string& path, const std::optional<std::string>& ctx_text) {
  bool failed = false;
  if (is_lc(path)) {
    lc::LcFile f = lc::parse_lc(read_file(path));
    std::optional<lc::Judgment> forced;
    if (ctx_text) forced = lc::parse_judgment(*ctx_text);
    for (auto& d : f.decls) {
      std::vector<lc::Judgment> js = d.judgments;
      if (forced) js = {*forced};
      if (js.empty()) {
        lc::LDerivation r = lc::infer(d.term, false);
        failed |= !r.ok;
        json j{{"name", d.name}, {"mode", "infer"}, {"ok", r.ok}};
        std::string t = d.name + ": ";
        if (r.ok) {
          j["judgment"] = lc::print_judgment(r.judgment, d.name);
          t += "ok, " + lc::print_judgment(r.judgment, d.name);
        } else {
          j["error"] = {{"kind", lc::to_string(r.error->kind)}, {"message", r.error->message}};
          t += "not well-formed: " + r.error->message;
        }
        emit(j, t);
        continue;
      }
      for (auto& jd : js) {
        lc::LDerivation r = lc::check(d.term, jd);
        failed |= !r.ok;
        std::string judgment = lc::print_judgment(jd, d.name);
        json j{{"name", d.name}, {"mode", jd.well_typed ? "well-typed" : "well-formed"}, {"judgment", judgment},
               {"ok", r.ok}};
        if (!r.ok) j["error"] = {{"kind", lc::to_string(r.error->kind)}, {"message", r.error->message}};
        emit(j, judgment + (r.ok ? "  ok" : "  FAILS: " + r.error->message));
      }
    }
    return failed ? Refuted : Ok;
  }
  SpiFile f = parse_spi(read_file(path));
  std::optional<TypingCtx> forced;
  if (ctx_text) forced = parse_ctx(*ctx_text);
  for (auto& d : f.decls) {
    std::optional<TypingCtx> ctx = forced ? forced : d.ctx;
    Derivation r = ctx ? typecheck(d.proc, *ctx) : infer_context(d.proc);
    failed |= !r.ok;
    json j{{"name", d.name}, {"mode", ctx ? "check" : "infer"}, {"ok", r.ok}};
    std::string t = d.name;
    if (r.ok) {
      j["context"] = print_ctx(r.context);
      t += " |- " + print_ctx(r.context) + "  ok";
    } else {
      j["error"] = {{"kind", to_string(r.error->kind)}, {"message", r.error->what()}};
      t += ": type error: " + std::string(r.error->what());
    }
    emit(j, t);
  }
  return failed ? Refuted : Ok;
}

// ---- step / run ----

json record(int id, int parent, const std::string& rule, const std::string& channel, const std::string& term) {
  return {{"node", id}, {"parent", parent}, {"rule", rule}, {"channel", channel}, {"term", term}};
}

std::string record_text(int id, int parent, const std::string& rule, const std::string& channel,
                        const std::string& term) {
  return "[" + std::to_string(id) + " <- " + std::to_string(parent) + "] " + rule +
         (channel.empty() ? "" : " @" + channel) + "  " + term;
}

void emit_record(int id, int parent, const std::string& rule, const std::string& channel, const std::string& term) {
  emit(record(id, parent, rule, channel, term), record_text(id, parent, rule, channel, term));
}

void emit_trace(const Trace& tr) {
  for (auto& n : tr.nodes) {
    std::string rule = "-", channel;
    if (n.parent >= 0)
      for (int e : tr.nodes[n.parent].edges)
        if (tr.edges[e].to == n.id) {
          rule = tr.edges[e].rule;
          channel = tr.edges[e].channel;
          break;
        }
    emit_record(n.id, n.parent, rule, channel, n.key);
  }
}

int choose(const std::vector<std::string>& options) {
  for (size_t i = 0; i < options.size(); ++i) std::cerr << "  " << i << ": " << options[i] << "\n";
  std::cerr << "step (index, q to stop)> " << std::flush;
  std::string line;
  if (!std::getline(std::cin, line) || line == "q") return -1;
  try {
    size_t k = std::stoul(line);
    return k < options.size() ? static_cast<int>(k) : -1;
  } catch (...) {
    return -1;
  }
}

int cmd_step_pi(const P& p, const std::string& mode, int bound, uint64_t seed) {
  if (mode == "all") {
    Trace tr = trace_exhaustive(p, bound);
    emit_trace(tr);
    size_t leaves = 0;
    for (auto& n : tr.nodes)
      if (n.depth == 1) ++leaves;
    emit({{"summary", {{"nodes", tr.nodes.size()}, {"depth_one", leaves}, {"bound_exhausted", tr.bound_exhausted},
                       {"state_cap_hit", tr.state_cap_hit}}}},
         bound == 1 ? std::to_string(leaves) + " reducts"
                    : std::to_string(tr.nodes.size() - 1) + " reducts within " + std::to_string(bound) + " steps" +
                          (tr.bound_exhausted ? " (bound reached)" : ""));
    return tr.state_cap_hit ? Inconclusive : Ok;
  }
  Trace tr;
  if (mode == "seed") {
    tr = trace_random(p, bound, seed);
  } else {
    tr = trace_interactive(p, bound, [](const P& t, const std::vector<ReductionStep>& ss) {
      std::cerr << print(t) << "\n";
      std::vector<std::string> opts;
      for (auto& s : ss) opts.push_back(s.redex.rule + " @" + text(s.redex.channel) + " -> " + s.key);
      return choose(opts);
    });
  }
  emit_trace(tr);
  return Ok;
}

int cmd_step_lc(const lc::L& m, const std::string& mode, int bound, uint64_t seed) {
  std::mt19937_64 rng(seed);
  if (mode == "all") {
    std::unordered_map<std::string, int> seen{{lc::alpha_key(m), 0}};
    std::deque<std::tuple<lc::L, int, int>> q{{m, 0, 0}};
    emit_record(0, -1, "-", "", lc::print(m));
    int next = 1;
    while (!q.empty()) {
      auto [t, id, d] = q.front();
      q.pop_front();
      if (d >= bound) continue;
      for (auto& s : lc::step_all(t)) {
        if (!seen.emplace(lc::alpha_key(s.target), next).second) continue;
        emit_record(next, id, s.rule, "", lc::print(s.target));
        q.push_back({s.target, next++, d + 1});
      }
    }
    emit({{"summary", {{"nodes", next}}}}, std::to_string(next - 1) + " reducts");
    return Ok;
  }
  lc::L t = m;
  emit_record(0, -1, "-", "", lc::print(t));
  for (int i = 0; i < bound; ++i) {
    auto ss = lc::step_all(t);
    if (ss.empty()) break;
    int k;
    if (mode == "seed") {
      k = static_cast<int>(std::uniform_int_distribution<size_t>(0, ss.size() - 1)(rng));
    } else {
      std::cerr << lc::print(t) << "\n";
      std::vector<std::string> opts;
      for (auto& s : ss) opts.push_back(s.rule + " -> " + lc::print(s.target));
      k = choose(opts);
      if (k < 0) break;
    }
    t = ss[static_cast<size_t>(k)].target;
    emit_record(i + 1, i, ss[static_cast<size_t>(k)].rule, "", lc::print(t));
  }
  return Ok;
}

int cmd_run(const std::string& path, const std::string& name, int bound) {
  if (is_lc(path)) {
    lc::LcFile f = lc::parse_lc(read_file(path));
    const lc::L& m = lc_decl(f, name).term;
    std::unordered_set<std::string> seen{lc::alpha_key(m)};
    std::deque<std::pair<lc::L, int>> q{{m, 0}};
    bool cut = false;
    size_t k = 0;
    while (!q.empty()) {
      auto [t, d] = q.front();
      q.pop_front();
      auto ss = lc::step_all(t);
      if (ss.empty()) {
        emit({{"normal_form", lc::print(t)}, {"depth", d}}, lc::print(t));
        ++k;
        continue;
      }
      if (d >= bound) {
        cut = true;
        continue;
      }
      for (auto& s : ss)
        if (seen.insert(lc::alpha_key(s.target)).second) q.push_back({s.target, d + 1});
    }
    emit({{"summary", {{"normal_forms", k}, {"bound_exhausted", cut}}}},
         std::to_string(k) + " normal forms" + (cut ? " (bound reached)" : ""));
    return cut ? Inconclusive : Ok;
  }
  SpiFile f = parse_spi(read_file(path));
  Trace tr = trace_exhaustive(spi_decl(f, name).proc, bound);
  auto nfs = normal_forms(tr);
  for (auto& p : nfs) emit({{"normal_form", print(p)}}, print(p));
  bool cut = tr.bound_exhausted || tr.state_cap_hit;
  emit({{"summary", {{"normal_forms", nfs.size()}, {"states", tr.nodes.size()}, {"bound_exhausted", cut}}}},
       std::to_string(nfs.size()) + " normal forms, " + std::to_string(tr.nodes.size()) + " states" +
           (cut ? " (bound reached)" : ""));
  return cut ? Inconclusive : Ok;
}

// ---- translate ----

int cmd_translate(const std::string& path, const std::string& name, unsigned seed, bool omit) {
  if (!is_lc(path)) throw UsageError("translate needs a .lc file");
  lc::LcFile f = lc::parse_lc(read_file(path));
  const lc::LcDecl& d = lc_decl(f, name);
  TranslateOptions opt{seed, omit};
  P p = translate_term(d.term, intern("u"), opt);
  emit({{"name", name}, {"process", print(p)}}, print(p));
  bool failed = false;
  for (auto& j : d.judgments) {
    PreservationReport r = check_translation_preservation(d.term, j, opt);
    failed |= !r.ok;
    TypingCtx g = translate_contexts(j);
    json jr{{"judgment", r.lambda_judgment}, {"context", print_ctx(g)}, {"preserved", r.ok}};
    if (!r.ok) jr["error"] = r.error;
    emit(jr, "-- " + r.lambda_judgment + (r.ok ? "  preserved" : "  NOT preserved: " + r.error));
  }
  return failed ? Refuted : Ok;
}

// ---- bisim ----

int cmd_bisim(const std::string& path, const std::string& a, const std::string& b, int depth) {
  SpiFile f = parse_spi(read_file(path));
  BisimResult r = bisim_eager(spi_decl(f, a).proc, spi_decl(f, b).proc, depth);
  json moves = json::array();
  std::string t = std::string(to_string(r.verdict)) + " (" + std::to_string(r.left_states) + " and " +
                  std::to_string(r.right_states) + " states, " + std::to_string(r.pairs) + " pairs)";
  for (auto& m : r.moves) {
    moves.push_back({{"side", m.left ? a : b}, {"rule", m.rule}, {"channel", m.channel}, {"to", m.to}});
    t += "\n  " + (m.left ? a : b) + " moves " + m.rule + " @" + m.channel + " to " + m.to;
  }
  if (!r.difference.empty()) t += "\n  then " + r.difference;
  emit({{"verdict", to_string(r.verdict)}, {"moves", moves}, {"difference", r.difference},
        {"states", {r.left_states, r.right_states}}, {"pairs", r.pairs}},
       t);
  switch (r.verdict) {
    case Verdict::Bisimilar: return Ok;
    case Verdict::Distinguished: return Refuted;
    case Verdict::Inconclusive: return Inconclusive;
  }
  return Inconclusive;
}

// ---- correspond ----

int cmd_correspond(const std::string& path, const std::string& name, int bound, bool omit) {
  if (!is_lc(path)) throw UsageError("correspond needs a .lc file");
  lc::LcFile f = lc::parse_lc(read_file(path));
  const lc::L& m = lc_decl(f, name).term;
  TranslateOptions opt{0, omit};
  CompletenessReport c = check_loose_completeness(m, bound, opt);
  for (auto& w : c.witnesses) {
    json j{{"part", "completeness"}, {"rule", w.rule}, {"reduct", w.reduct}, {"witnessed", w.q.has_value()}};
    if (w.q) j["q"] = *w.q, j["depth"] = w.depth;
    emit(j, "completeness " + w.rule + " -> " + w.reduct + (w.q ? "  witnessed at depth " + std::to_string(w.depth)
                                                                  : "  NO WITNESS"));
  }
  SoundnessReport s = check_loose_soundness(m, bound, opt);
  for (auto& w : s.witnesses)
    if (!w.q2) emit({{"part", "soundness"}, {"q", w.q}, {"witnessed", false}}, "soundness: no witness for " + w.q);
  SensitivityReport ss = check_success_sensitivity(m, bound, 0, opt);
  json summary{{"completeness", {{"ok", c.ok}, {"exhausted", c.exhausted}}},
               {"soundness", {{"ok", s.ok}, {"exhausted", s.exhausted}, {"states", s.pi_states},
                              {"lambda_terms", s.lambda_terms}}},
               {"success", {{"lambda", ss.lambda.success}, {"pi", ss.pi.success}, {"agree", ss.agree()}}}};
  auto verdict = [](bool ok, bool ex) { return ok ? "ok" : ex ? "inconclusive" : "refuted"; };
  emit({{"summary", summary}},
       std::string("completeness ") + verdict(c.ok, c.exhausted) + ", soundness " + verdict(s.ok, s.exhausted) +
           " (" + std::to_string(s.pi_states) + " states), success " + (ss.lambda.success ? "yes" : "no") + "/" +
           (ss.pi.success ? "yes" : "no") + (ss.agree() ? " agree" : " DISAGREE"));
  bool ok = c.ok && s.ok && ss.agree();
  if (ok) return Ok;
  bool ex = (!c.ok && c.exhausted) || (!s.ok && s.exhausted) || ss.lambda.exhausted || ss.pi.exhausted;
  return ex ? Inconclusive : Refuted;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"session-typed pi-calculus and resource lambda-calculus workbench"};
  app.require_subcommand(1);
  app.add_flag("--json", g_json, "emit JSON records, one per line");

  std::string file, name, other, mode_flag;
  std::optional<std::string> ctx;
  int bound = -1, depth = 12;
  uint64_t seed = 0;
  bool interactive = false, all = false, omit = false;

  auto* check = app.add_subcommand("check", "typecheck every declaration");
  check->add_option("file", file)->required();
  check->add_option("--ctx", ctx, "context (.spi) or judgment (.lc) to check every declaration against");

  auto* step = app.add_subcommand("step", "show reductions");
  step->add_option("file", file)->required();
  step->add_option("name", name)->required();
  auto* f_inter = step->add_flag("--interactive", interactive, "pick each step from stdin");
  auto* f_all = step->add_flag("--all", all, "every reduct up to the bound (default)");
  auto* f_seed = step->add_option("--seed", seed, "follow one random path");
  f_inter->excludes(f_all)->excludes(f_seed);
  f_all->excludes(f_seed);
  step->add_option("--bound", bound, "number of steps (default 1 for --all, 100 otherwise)");

  auto* run = app.add_subcommand("run", "reduce to normal forms");
  run->add_option("file", file)->required();
  run->add_option("name", name)->required();
  run->add_option("--bound", bound, "step bound (default 100)");

  auto* tr = app.add_subcommand("translate", "translate a lambda term");
  tr->add_option("file", file)->required();
  tr->add_option("name", name)->required();
  tr->add_option("--seed", seed, "offset for generated names");
  tr->add_flag("--omit-empty-usub", omit, "drop unrestricted substitutions of empty bags");

  auto* bi = app.add_subcommand("bisim", "ready-prefix bisimilarity for the eager semantics");
  bi->add_option("file", file)->required();
  bi->add_option("P", name)->required();
  bi->add_option("Q", other)->required();
  bi->add_option("--depth", depth, "exploration depth (default 12)");

  auto* co = app.add_subcommand("correspond", "operational correspondence of the translation");
  co->add_option("file", file)->required();
  co->add_option("name", name)->required();
  co->add_option("--bound", bound, "step bound")->required();
  co->add_flag("--omit-empty-usub", omit, "drop unrestricted substitutions of empty bags");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : InputError;
  }

  try {
    if (*check) return cmd_check(file, ctx);
    if (*step) {
      std::string mode = interactive ? "interactive" : f_seed->count() ? "seed" : "all";
      int b = bound >= 0 ? bound : mode == "all" ? 1 : 100;
      if (is_lc(file)) return cmd_step_lc(lc_decl(lc::parse_lc(read_file(file)), name).term, mode, b, seed);
      return cmd_step_pi(spi_decl(parse_spi(read_file(file)), name).proc, mode, b, seed);
    }
    if (*run) return cmd_run(file, name, bound >= 0 ? bound : 100);
    if (*tr) return cmd_translate(file, name, static_cast<unsigned>(seed), omit);
    if (*bi) return cmd_bisim(file, name, other, depth);
    if (*co) return cmd_correspond(file, name, bound, omit);
  } catch (const ParseError& e) {
    emit({{"error", "parse"}, {"message", e.what()}}, std::string("parse error: ") + e.what());
    return InputError;
  } catch (const UsageError& e) {
    emit({{"error", "usage"}, {"message", e.what()}}, std::string("error: ") + e.what());
    return InputError;
  } catch (const std::exception& e) {
    emit({{"error", "internal"}, {"message", e.what()}}, std::string("error: ") + e.what());
    return InputError;
  }
  return InputError;
}
