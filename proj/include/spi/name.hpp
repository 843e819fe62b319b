#pragma once
#include <compare>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <string_view>

namespace spi {

// Interned channel / variable name. Equal text means equal id.
struct Name {
  uint32_t id = 0;
  bool valid() const { return id != 0; }
  friend bool operator==(Name a, Name b) { return a.id == b.id; }
  friend auto operator<=>(Name a, Name b) { return a.id <=> b.id; }
};

Name intern(std::string_view text);
// A name whose text has never been interned before: hint'N.
Name fresh(std::string_view hint);
const std::string& text(Name n);
// "x'12" -> "x"
std::string base_of(std::string_view text);
bool is_ident_start(char c);
bool is_ident_char(char c);

using NameSet = std::set<Name>;

// ordering by text, never by id (ids depend on interning order)
struct ByText {
  bool operator()(Name a, Name b) const { return text(a) < text(b); }
};

}  // namespace spi

template <>
struct std::hash<spi::Name> {
  size_t operator()(spi::Name n) const noexcept { return std::hash<uint32_t>()(n.id); }
};
