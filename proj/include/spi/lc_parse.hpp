#pragma once
#include <string>
#include <string_view>
#include <vector>

#include "spi/itypes.hpp"
#include "spi/lambda.hpp"
#include "spi/parse.hpp"

namespace spi::lc {

// Concrete syntax of terms:
//   x  x[3]  \x. M  M B  fail{x,y}  OK  (M)
//   M [x1,x2 <- x]            sharing (M [<- x] for none)
//   M {| B / x |}             intermediate substitution
//   M {< C / x1,x2 >}         linear substitution
//   M {! U / x !}             unrestricted substitution
// Bags: C or C * U, where C is `1` or `<M1, M2>` and U is slots `!1`, `!<N>` (or `<!N>`) joined by `.`
// The body of \x. must be a sharing on x. Postfix forms bind looser than application.
L parse_term(std::string_view src);
IT parse_itype(std::string_view src);
// "x!: eta, y: sigma, z: sigma^2 |= tau" (or |- for well-typedness)
Judgment parse_judgment(std::string_view src);

// A .lc script: `Name = M;` and `Name :: judgment;` (any number per name).
// An uppercase identifier inside M refers to an earlier definition.
struct LcDecl {
  std::string name;
  L term;
  std::vector<Judgment> judgments;
  int line = 0;
};
struct LcFile {
  std::vector<LcDecl> decls;
  const LcDecl* find(const std::string& name) const;
};
LcFile parse_lc(std::string_view src);

}  // namespace spi::lc
