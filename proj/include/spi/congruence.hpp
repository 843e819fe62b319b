#pragma once
#include <string>
#include <vector>

#include "spi/process.hpp"

namespace spi {

// Normal form for the structural congruence. Cuts at one level are read as a
// network (atoms joined by channels) and re-rendered in a fixed order, so the
// scope axioms are absorbed; 0, ++ duplicates and unused servers disappear.
// Bound names are renamed n'k / y'k by pre-order position.
P canonicalize(const P& p);
std::string canonical_key(const P& p);

// Canonical comparison first; then a bounded search over single scope-axiom
// rewrites on the left term.
bool struct_congruent(const P& a, const P& b, int bound = 4);

// one application of a scope axiom anywhere in p (both directions)
std::vector<P> scope_rewrites(const P& p);

// canonicalize(p) is 0
bool is_inert(const P& p);

}  // namespace spi
