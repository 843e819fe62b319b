#pragma once
// shared tokenizer for .spi and .lc sources (private to the library)
#include <string>
#include <string_view>
#include <vector>

#include "spi/parse.hpp"

namespace spi::detail {

struct Tok {
  enum Kind { Ident, Number, Sym, End } kind;
  std::string s;
  int line, col;
};

class Lexer {
 public:
  Lexer(std::string_view src, bool lambda_mode) : src_(src), lc_(lambda_mode) { run(); }

  const Tok& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  Tok next() {
    Tok t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool at(std::string_view sym) const { return peek().kind == Tok::Sym && peek().s == sym; }
  bool at_ident(std::string_view w) const { return peek().kind == Tok::Ident && peek().s == w; }
  bool eat(std::string_view sym) {
    if (!at(sym)) return false;
    next();
    return true;
  }
  void expect(std::string_view sym) {
    if (!eat(sym)) fail("expected `" + std::string(sym) + "`");
  }
  std::string ident(const char* what = "identifier") {
    if (peek().kind != Tok::Ident) fail(std::string("expected ") + what);
    return next().s;
  }
  // labels may be identifiers or numerals
  std::string label() {
    if (peek().kind != Tok::Ident && peek().kind != Tok::Number) fail("expected label");
    return next().s;
  }
  int number() {
    if (peek().kind != Tok::Number) fail("expected a number");
    return std::stoi(next().s);
  }
  bool done() const { return peek().kind == Tok::End; }
  [[noreturn]] void fail(const std::string& msg) const {
    const Tok& t = peek();
    std::string got = t.kind == Tok::End ? "end of input" : "`" + t.s + "`";
    throw ParseError(t.line, t.col, msg + ", got " + got);
  }
  size_t mark() const { return pos_; }
  void reset(size_t m) { pos_ = m; }

 private:
  void run();
  std::string_view src_;
  bool lc_;
  std::vector<Tok> toks_;
  size_t pos_ = 0;
};

}  // namespace spi::detail
