#include "spi/name.hpp"

#include <atomic>
#include <deque>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

namespace spi {
namespace {

struct Table {
  std::shared_mutex mu;
  std::deque<std::string> texts{""};
  std::unordered_map<std::string, uint32_t> ids;
};

Table& table() {
  static Table t;
  return t;
}

std::atomic<uint64_t> counter{0};

}  // namespace

Name intern(std::string_view s) {
  Table& t = table();
  std::string key(s);
  {
    std::shared_lock lk(t.mu);
    auto it = t.ids.find(key);
    if (it != t.ids.end()) return Name{it->second};
  }
  std::unique_lock lk(t.mu);
  auto it = t.ids.find(key);
  if (it != t.ids.end()) return Name{it->second};
  uint32_t id = static_cast<uint32_t>(t.texts.size());
  t.texts.push_back(key);
  t.ids.emplace(std::move(key), id);
  return Name{id};
}

Name fresh(std::string_view hint) {
  Table& t = table();
  std::string base = base_of(hint);
  if (base.empty()) base = "n";
  std::unique_lock lk(t.mu);
  for (;;) {
    std::string cand = base + "'" + std::to_string(++counter);
    if (t.ids.count(cand)) continue;
    uint32_t id = static_cast<uint32_t>(t.texts.size());
    t.texts.push_back(cand);
    t.ids.emplace(std::move(cand), id);
    return Name{id};
  }
}

const std::string& text(Name n) {
  Table& t = table();
  std::shared_lock lk(t.mu);
  return t.texts.at(n.id);
}

std::string base_of(std::string_view s) {
  auto q = s.find('\'');
  return std::string(q == std::string_view::npos ? s : s.substr(0, q));
}

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9') || c == '\''; }

}  // namespace spi
