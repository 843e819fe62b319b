#pragma once
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace spi {

enum class TK { One, Bot, Tensor, Par, Plus, With, Query, Bang, Maybe, Expect, Var };

struct SType;
using T = std::shared_ptr<const SType>;

struct SType {
  TK k = TK::One;
  T a, b;
  std::map<std::string, T> labels;  // Plus / With
  int var = -1;      // Var: id. Plus/With: row variable (-1 when closed)
  bool neg = false;  // dual of the variable / row
};

T t_one();
T t_bot();
T t_tensor(T a, T b);
T t_par(T a, T b);
T t_plus(std::map<std::string, T> ls, int row = -1, bool neg = false);
T t_with(std::map<std::string, T> ls, int row = -1, bool neg = false);
T t_query(T a);
T t_bang(T a);
T t_maybe(T a);   // &A
T t_expect(T a);  // (+)A
T t_var(int id, bool neg = false);

T dual(const T& t);
bool type_equal(const T& a, const T& b);
bool is_ground(const T& t);
std::string print_type(const T& t);

// Unification over session types with label rows.
struct Mismatch {
  std::string expected, found;
};

class Solver {
 public:
  T fresh();
  int fresh_id() { return next_++; }
  T head(const T& t) const;     // resolve the outermost constructor
  T resolve(const T& t) const;  // resolve fully
  void unify(const T& a, const T& b);  // throws Mismatch
  bool try_unify(const T& a, const T& b);

 private:
  void bind(int id, bool neg, const T& t);
  bool occurs(int id, const T& t) const;
  void unify_rows(const T& a, const T& b);
  std::unordered_map<int, T> sub_;
  int next_ = 0;
};

}  // namespace spi
