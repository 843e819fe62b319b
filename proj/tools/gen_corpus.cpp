// Writes well-typed closed processes: dual implementations of random session
// types joined by cuts, with forwarders and ++ sprinkled in. Each candidate is
// kept only if the checker accepts it against the empty context.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <random>

#include "spi/congruence.hpp"
#include "spi/parse.hpp"
#include "spi/process.hpp"
#include "spi/session_type.hpp"
#include "spi/typecheck.hpp"

using namespace spi;

namespace {

struct Gen {
  std::mt19937_64 rng;
  int names = 0;

  bool coin(double p) { return std::uniform_real_distribution<>(0, 1)(rng) < p; }
  int pick(int n) { return std::uniform_int_distribution<>(0, n - 1)(rng); }
  Name name(const char* hint) { return intern(std::string(hint) + std::to_string(++names)); }

  T type(int depth) {
    int k = depth <= 0 ? pick(2) : pick(10);
    switch (k) {
      case 0: return t_one();
      case 1: return t_bot();
      case 2: return t_tensor(type(depth - 1), type(depth - 1));
      case 3: return t_par(type(depth - 1), type(depth - 1));
      case 4: return t_plus({{"a", type(depth - 1)}, {"b", type(depth - 1)}});
      case 5: return t_with({{"a", type(depth - 1)}, {"b", type(depth - 1)}});
      case 6: return t_maybe(type(depth - 1));
      case 7: return t_expect(type(depth - 1));
      case 8: return t_bang(type(depth - 1));
      default: return t_query(type(depth - 1));
    }
  }

  P impl(const T& t, Name x, int nd) {
    if (nd > 0 && coin(0.12)) return choice(impl(t, x, nd - 1), impl(t, x, nd - 1));
    switch (t->k) {
      case TK::One: return close_(x);
      case TK::Bot: return wait(x, zero());
      case TK::Tensor: {
        Name y = name("y");
        return out(x, y, impl(t->a, y, nd), impl(t->b, x, nd));
      }
      case TK::Par: {
        Name y = name("y");
        return in(x, y, par(impl(t->a, y, nd), impl(t->b, x, nd)));
      }
      case TK::Plus: {
        auto it = t->labels.begin();
        std::advance(it, pick(static_cast<int>(t->labels.size())));
        return sel(x, it->first, impl(it->second, x, nd));
      }
      case TK::With: {
        Branches bs;
        for (auto& [l, a] : t->labels) bs.emplace(l, impl(a, x, nd));
        return branch(x, std::move(bs));
      }
      case TK::Maybe:
        if (coin(0.25)) return none(x);
        return some(x, impl(t->a, x, nd));
      case TK::Expect: return expect(x, {}, impl(t->a, x, nd));
      case TK::Bang: {
        Name y = name("y");
        return server(x, y, impl(t->a, y, 0));
      }
      case TK::Query: {
        if (coin(0.3)) return zero();
        Name y = name("y");
        return client(x, y, impl(t->a, y, nd));
      }
      default: return zero();
    }
  }

  P system(int depth) {
    T t = type(depth);
    Name x = name("x");
    P left = impl(t, x, 2), right = impl(dual(t), x, 2);
    if (coin(0.3)) {
      // route one side through a forwarder
      Name w = name("w");
      return nu(w, nu(x, left, fwd(x, w)), impl(dual(t), w, 2));
    }
    return nu(x, left, right);
  }

  P process(int depth) {
    P p = system(depth);
    if (coin(0.25)) p = par(p, system(depth - 1));
    return p;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generate the well-typed process corpus"};
  int count = 120, depth = 3;
  uint64_t seed = 7;
  std::string path = "corpus/generated.spi";
  app.add_option("-n,--count", count);
  app.add_option("-d,--depth", depth);
  app.add_option("-s,--seed", seed);
  app.add_option("-o,--out", path);
  CLI11_PARSE(app, argc, argv);

  Gen g{std::mt19937_64(seed)};
  std::ofstream out(path);
  out << "-- generated by gen_corpus --seed " << seed << " --count " << count << "\n\n";
  int kept = 0, tries = 0;
  while (kept < count && tries < 100 * count) {
    ++tries;
    P p = g.process(depth);
    if (size(p) > 120 || is_inert(p)) continue;
    if (!typecheck(p, {}).ok) continue;
    std::string text = print(p);
    // keep only what reads back
    try {
      if (!same(parse_process(text), p)) continue;
    } catch (const ParseError&) {
      continue;
    }
    ++kept;
    out << "G" << kept << " = " << text << ";\nG" << kept << " :: ;\n";
  }
  std::cerr << "kept " << kept << " of " << tries << "\n";
  return kept == count ? 0 : 1;
}
