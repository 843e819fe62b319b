#pragma once
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spi/process.hpp"
#include "spi/session_type.hpp"

namespace spi {

using TypingCtx = std::vector<std::pair<Name, T>>;  // insertion ordered

enum class TypeErrorKind {
  UnboundName,
  LinearNameUnused,
  LinearNameReused,
  TypeMismatch,
  BranchContextMismatch,
  NonMonadicContextForExpect,
  NonServerContextForBang,
};
const char* to_string(TypeErrorKind k);

struct TypeError : std::runtime_error {
  TypeErrorKind kind;
  std::string expected, found, at;
  TypeError(TypeErrorKind k, std::string msg, std::string exp = {}, std::string fnd = {},
            std::string where = {});
};

struct Derivation {
  bool ok = false;
  std::optional<TypeError> error;
  TypingCtx context;                          // resolved, in the order of the given context
  std::vector<std::pair<Name, T>> cut_types;  // resolved type of each cut's left endpoint
};

// P |- gamma
Derivation typecheck(const P& p, const TypingCtx& gamma);
// reconstruct a context for the free names of p (variables may remain)
Derivation infer_context(const P& p);

std::string print_ctx(const TypingCtx& g);
const T* lookup(const TypingCtx& g, Name n);

// P |- {} and P is inert or has a step (needs the eager engine)
struct DeadlockProbe {
  bool precondition_ok = false;
  bool progress = false;
  std::string error;
};
DeadlockProbe probe_deadlock_freedom(const P& p);

}  // namespace spi
