#pragma once
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spi/name.hpp"

namespace spi::lc {

enum class LKind {
  Var,    // x
  UVar,   // x[i], 1-based
  Abs,    // \x. M  (M is a sharing on x)
  App,    // M B
  Fail,   // fail{xs}
  Share,  // M [xs <- x]
  ISub,   // M {| B / x |}   intermediate substitution
  LSub,   // M {| C / xs |}  linear substitution
  USub,   // M {! U / x !}   unrestricted substitution
  Success,
};

struct Term;
using L = std::shared_ptr<const Term>;
using LinBag = std::vector<L>;
using UnrBag = std::vector<std::optional<L>>;  // nullopt is the empty slot 1!

struct Bag {
  LinBag lin;
  UnrBag unr{std::nullopt};  // a bag written without `*` carries 1!
};

struct Term {
  LKind kind = LKind::Success;
  Name x;
  int index = 0;            // UVar
  std::vector<Name> xs;     // Fail (sorted by text), Share, LSub
  L m;                      // body / function
  Bag bag;                  // App, ISub; LSub uses bag.lin; USub uses bag.unr
};

L var(Name x);
L uvar(Name x, int i);
L abs(Name x, L body);
L app(L m, Bag b);
L fail(std::vector<Name> xs);
L share(L m, std::vector<Name> xs, Name x);
L isub(L m, Bag b, Name x);
L lsub(L m, LinBag c, std::vector<Name> xs);
L usub(L m, UnrBag u, Name x);
L success();

// U_i, 1-based; out of range gives the empty slot
std::optional<L> slot(const UnrBag& u, int i);

struct Head {
  enum Kind { LinVar, UnrVar, Abs, Fail, ISub, Success } kind;
  Name x;
  int index = 0;
};
Head head(const L& m);

NameSet llfv(const L& m);
NameSet llfv(const LinBag& c);
NameSet fv(const L& m);  // linear and unrestricted occurrences
NameSet all_names(const L& m);

// replace the head occurrence (linear x, or x[i] when index > 0) by n
L head_substitute(const L& m, const L& n, Name x, int index = 0);
L freshen(const L& m);

bool same(const L& a, const L& b);  // up to renaming of bound variables
std::string alpha_key(const L& m);
size_t size(const L& m);
bool is_closed(const L& m);
bool has_fail(const L& m);

struct LStep {
  std::string rule;  // Beta, Ex-Sub, Fetch-l, Fail-l, Fetch-!, Fail-!, Cons1..Cons4
  L target;
};
// all one-step reducts, distinct up to bound-variable renaming
std::vector<LStep> step_all(const L& m);

std::string print(const L& m);
std::string print_bag(const Bag& b);

}  // namespace spi::lc
