#pragma once
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spi/process.hpp"
#include "spi/typecheck.hpp"

namespace spi {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(int l, int c, const std::string& msg)
      : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg), line(l), col(c) {}
};

// Concrete syntax, one process:
//   0  OK  [x<->y]  (P | Q)  new x (P | Q)  P ++ Q  x!(y)(P | Q)  x?(y). P
//   x#l. P  x&{l1: P, l2: Q}  close x  wait x. P  ?x!(y). P  !x?(y). P
//   some x. P  none x  expect x [w1,w2]. P
// Prefixing binds tighter than |, ++ is loosest. `--` starts a comment.
P parse_process(std::string_view src);
T parse_type(std::string_view src);
TypingCtx parse_ctx(std::string_view src);  // "x: A, y: B", possibly empty

// A .spi script is a list of declarations
//   Name = P;       (an uppercase identifier inside P refers to an earlier declaration)
//   Name :: ctx;    (expected typing context for Name)
struct SpiDecl {
  std::string name;
  P proc;
  std::optional<TypingCtx> ctx;
  int line = 0;
};
struct SpiFile {
  std::vector<SpiDecl> decls;
  const SpiDecl* find(const std::string& name) const;
};
SpiFile parse_spi(std::string_view src);

std::string read_file(const std::string& path);

}  // namespace spi
