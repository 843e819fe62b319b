#pragma once
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "spi/eager.hpp"
#include "spi/lambda.hpp"
#include "spi/process.hpp"
#include "spi/translate.hpp"

namespace spi {

// An unguarded action. Names bound inside the process (restricted subjects,
// transmitted names) print as "_", so prefixes of different processes compare.
struct Prefix {
  Kind kind = Kind::Inaction;
  std::string subject;
  std::string label;                // Select
  std::vector<std::string> labels;  // Branch, sorted
  std::vector<std::string> ws;      // Expect
  std::string payload;              // Output, Input, Client, Server
  std::string text() const;
  // equal erased keys iff the prefixes are compatible
  std::string erased() const;
  bool operator<(const Prefix& o) const { return text() < o.text(); }
  bool operator==(const Prefix& o) const { return text() == o.text(); }
};

// prefixes under only |, new and ++ in the canonical form
std::set<Prefix> ready_prefixes(const P& p);
bool prefix_compatible(const Prefix& a, const Prefix& b);
// the ready set read up to compatibility
std::set<std::string> ready_keys(const P& p);

// true iff canonicalize(p) has an unguarded OK
bool has_success(const P& p);

// ---- the ++ precongruence ----

// Canonical keys of every Q with p >= Q: each unguarded choice is kept,
// projected to one branch, or (for at most kSubsetLimit branches) narrowed to
// a sub-choice. Stops at `cap` keys; `complete` says whether it got them all.
struct Resolutions {
  std::set<std::string> keys;
  bool complete = true;
};
constexpr size_t kSubsetLimit = 8;
Resolutions resolutions(const P& p, size_t cap = 20000);
bool nd_precongruence(const P& p, const P& q);

// ---- bisimilarity for the eager semantics ----

enum class Verdict { Bisimilar, Distinguished, Inconclusive };
const char* to_string(Verdict v);

struct WitnessMove {
  bool left;  // which process moves
  std::string rule, channel;
  std::string from, to;  // canonical texts
};
struct BisimResult {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<WitnessMove> moves;  // for Distinguished: moves leading to the difference
  std::string difference;          // last step: prefix or move only one side has
  size_t left_states = 0, right_states = 0, pairs = 0;
};
BisimResult bisim_eager(const P& a, const P& b, int depth = 12);

// ---- success ----

struct SuccessResult {
  bool success = false;
  bool exhausted = false;  // false answers only: the bound or state cap cut the search
};
SuccessResult succeeds_pi(const P& p, int bound);
SuccessResult succeeds_lambda(const lc::L& m, int bound);

// ---- operational correspondence harnesses ----

// One source reduct M -> M' and the eager node of [[M]]u related to [[M']]u.
struct CompletenessWitness {
  std::string rule;
  std::string reduct;             // M'
  std::optional<std::string> q;   // node text Q with [[M']]u >= Q
  int depth = -1;                 // steps from [[M]]u to Q
};
struct CompletenessReport {
  bool ok = false;
  bool exhausted = false;  // a missing witness may lie past the bound
  std::vector<CompletenessWitness> witnesses;
};
CompletenessReport check_loose_completeness(const lc::L& m, int bound, const TranslateOptions& opt = {});

// For each Q with [[M]]u ->* Q in at most `bound` steps: a Q' with Q ->* Q' (up to
// `bound` further steps) and [[M']]u >= Q' for some M ->* M'.
struct SoundnessWitness {
  std::string q;
  std::optional<std::string> q2;  // Q'
  std::optional<std::string> m2;  // M'
};
struct SoundnessReport {
  bool ok = false;
  bool exhausted = false;
  size_t pi_states = 0, lambda_terms = 0;  // pi_states: the Q examined
  std::vector<SoundnessWitness> witnesses;  // unwitnessed entries first
};
SoundnessReport check_loose_soundness(const lc::L& m, int bound, const TranslateOptions& opt = {},
                                      size_t max_witnesses = 50);

struct SensitivityReport {
  SuccessResult lambda, pi;
  bool agree() const { return lambda.success == pi.success; }
};
// pi_bound 0 picks 10 * bound
SensitivityReport check_success_sensitivity(const lc::L& m, int bound, int pi_bound = 0,
                                            const TranslateOptions& opt = {});

}  // namespace spi
