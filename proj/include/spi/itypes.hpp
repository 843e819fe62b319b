#pragma once
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spi/lambda.hpp"

namespace spi::lc {

// strict types: unit | (sigma^k, eta) -> tau
// multisets are restricted to powers sigma^k of one strict type; k = 0 is omega
struct IType;
using IT = std::shared_ptr<const IType>;
struct IType {
  enum Kind { Unit, Arrow } kind = Unit;
  IT sigma;              // Arrow: element type of the multiset (may be null when k = 0)
  int k = 0;             // Arrow: multiset size
  std::vector<IT> eta;   // Arrow: list type, non-empty
  IT tau;                // Arrow: result
};

IT t_unit();
IT t_arrow(IT sigma, int k, std::vector<IT> eta, IT tau);
bool itype_equal(const IT& a, const IT& b);
bool list_equal(const std::vector<IT>& a, const std::vector<IT>& b);
std::string print_itype(const IT& t);
std::string print_list(const std::vector<IT>& eta);

// eps embraces eta: eta is a prefix of eps
bool embraces(const std::vector<IT>& eta, const std::vector<IT>& eps);

struct LinEntry {
  Name x;
  bool multi = false;  // false: x : sigma, true: x : sigma^k
  IT sigma;            // null only for omega written `w`
  int k = 0;
};
struct UnrEntry {
  Name x;
  std::vector<IT> eta;
};
struct Judgment {
  std::vector<UnrEntry> theta;
  std::vector<LinEntry> gamma;
  IT tau;
  bool well_typed = false;  // `|-` instead of `|=`
};
std::string print_judgment(const Judgment& j, const std::string& subject = "M");

enum class LTypeErrorKind {
  UnboundVariable,
  ArityViolation,
  CoreDomainMismatch,
  EmbracesFailure,
  FailForbidden,
  ArityMismatch,
  TypeMismatch,
  Linearity,
};
const char* to_string(LTypeErrorKind k);

struct LTypeError {
  LTypeErrorKind kind;
  std::string message;
};

struct LDerivation {
  bool ok = false;
  std::optional<LTypeError> error;
  Judgment judgment;  // on success, the fully resolved judgment
};

// check a stated judgment (well-formedness, or well-typedness when j.well_typed)
LDerivation check(const L& m, const Judgment& j);
// synthesize the least committed judgment for m, defaulting unconstrained parts to unit
LDerivation infer(const L& m, bool well_typed);

}  // namespace spi::lc
