#pragma once
#include <map>
#include <optional>
#include <string>
#include <unordered_set>

#include "spi/itypes.hpp"
#include "spi/lambda.hpp"
#include "spi/process.hpp"
#include "spi/typecheck.hpp"

namespace spi {

// Deterministic supply of channel names hint<N>. Names already in `avoid`
// (the source's names) or previously issued are skipped.
class FreshSupply {
 public:
  explicit FreshSupply(unsigned seed = 0) : next_(seed) {}
  void avoid(const std::string& text) { taken_.insert(text); }
  void avoid(Name n) { taken_.insert(text(n)); }
  Name next(const std::string& hint);
  // the hint itself if still unused, otherwise next(hint)
  Name keep_or_next(const std::string& hint);

 private:
  unsigned next_;
  std::unordered_set<std::string> taken_;
};

struct TranslateOptions {
  unsigned seed = 0;
  // drop {! U / x !} when every slot of U is empty and x! is not used
  bool omit_empty_usub = false;
};

// channel of a free unrestricted variable x!
Name unr_channel(Name x);

P translate_term(const lc::L& m, Name u, const TranslateOptions& opt = {});

T translate_strict(const lc::IT& t);
T translate_multiset(const lc::IT& sigma, int k, int i);  // [[sigma^k]]_(sigma, i)
T translate_list(const std::vector<lc::IT>& eta);
T translate_tuple(const lc::IT& sigma, int k, const std::vector<lc::IT>& eta, int i);

// index i for each multiset assignment (default 0)
using IndexOverrides = std::map<std::string, int>;
TypingCtx translate_contexts(const lc::Judgment& j, const IndexOverrides& idx = {});

struct PreservationReport {
  bool ok = false;
  std::string lambda_judgment, pi_judgment, error;
  P process;
};
PreservationReport check_translation_preservation(const lc::L& m, const lc::Judgment& j,
                                                  const TranslateOptions& opt = {},
                                                  const IndexOverrides& idx = {});

}  // namespace spi
