#pragma once
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "spi/name.hpp"

namespace spi {

enum class Kind {
  Inaction,
  Forward,   // [x<->y]
  Par,       // p | q
  Restrict,  // new x (p | q)
  Choice,    // p ++ q
  Output,    // x!(y)(p | q): p implements y, q continues on x
  Input,     // x?(y). p
  Select,    // x#label. p
  Branch,    // x&{l: p, ...}
  Close,
  Wait,
  Client,    // ?x!(y). p
  Server,    // !x?(y). p
  Some,
  None,
  Expect,    // expect x [ws]. p
  Success,
};

struct Proc;
using P = std::shared_ptr<const Proc>;
using Branches = std::map<std::string, P>;

struct Proc {
  Kind kind = Kind::Inaction;
  Name x, y;
  std::string label;
  std::vector<Name> ws;
  Branches branches;
  P p, q;
};

// constructors
P zero();
P ok();
P fwd(Name x, Name y);
P par(P a, P b);
P par_all(const std::vector<P>& ps);  // right nested, 0 for empty
P nu(Name x, P a, P b);
P choice(P a, P b);
P choice_all(const std::vector<P>& ps);
P out(Name x, Name y, P a, P b);
P in(Name x, Name y, P a);
P sel(Name x, std::string label, P a);
P branch(Name x, Branches bs);
P close_(Name x);
P wait(Name x, P a);
P client(Name x, Name y, P a);
P server(Name x, Name y, P a);
P some(Name x, P a);
P none(Name x);
P expect(Name x, std::vector<Name> ws, P a);

bool is_prefix(Kind k);  // any action kind (close and none included)
bool binds(Kind k);      // kinds with a bound y

struct FreeNames {
  NameSet all, linear, unrestricted;
};
FreeNames free_names(const P& p);
NameSet fn(const P& p);
bool occurs_free(Name n, const P& p);

// Apply a name map to free names; every binder met on the way is renamed fresh.
P rename(const P& p, const std::unordered_map<Name, Name>& m);
P substitute(const P& p, Name neu, Name old);
P freshen(const P& p);

bool same(const P& a, const P& b);  // syntactic equality, names by id
size_t size(const P& p);
int nd_width(const P& p);  // number of unguarded choice branches (1 if none)

// Printing. The name callback lets keys and canonical forms reuse the printer.
struct NamePrinter {
  std::function<std::string(Name)> free;
  std::function<std::string(Name)> bind;  // called on entering a binder
  std::function<void(Name)> unbind;
};
std::string print(const P& p);
std::string print_with(const P& p, NamePrinter& np);

}  // namespace spi
