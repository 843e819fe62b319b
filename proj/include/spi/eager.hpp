#pragma once
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spi/process.hpp"

namespace spi {

// One-hole ND-context, stored from the root down to the hole.
struct Frame {
  enum Tag { ParLeft, RestrictLeft, NDLeft } tag;
  Name x;           // RestrictLeft
  P other;          // sibling
  bool hole_left;   // the hole is the left argument (commutativity gives both)
};
using NDContext = std::vector<Frame>;

NDContext commit(const NDContext& n);
P plug(const NDContext& n, const P& hole);
bool is_d_context(const NDContext& n);

struct Decomposition {
  NDContext ctx;
  P sub;  // prefixed process, forwarder or success
};
std::vector<Decomposition> decompositions(const P& p);

struct Redex {
  std::string rule;  // Id, 1⊥, ⊗⅋, ⊕&(k), ?!, some, none
  Name channel;
  Decomposition left, right;  // right unused by Id
};

struct ReductionStep {
  P source;
  Redex redex;
  P target;         // canonical form
  std::string key;  // canonical text of target
};

// all one-step reducts of canonicalize(p), deduplicated on (rule, channel, target)
std::vector<ReductionStep> step_all(const P& p);

// ---- traces ----
struct TraceNode {
  int id;
  int parent;  // -1 for the root (first discovery for shared nodes)
  int depth;
  P term;
  std::string key;
  bool expanded = false;  // false if the bound cut it off
  std::vector<int> edges;  // indices into Trace::edges
};
struct TraceEdge {
  int from, to;
  std::string rule;
  std::string channel;
};
struct Trace {
  std::vector<TraceNode> nodes;
  std::vector<TraceEdge> edges;
  bool bound_exhausted = false;
  bool state_cap_hit = false;
};

size_t state_cap();  // SPI_MAX_STATES, default 200000

// breadth-first, nodes shared by canonical key
Trace trace_exhaustive(const P& p, int bound, size_t max_states = 0);
// uniformly random path; seed determines the run
Trace trace_random(const P& p, int bound, uint64_t seed);
// the chooser returns the index of the step to follow, or -1 to stop
Trace trace_interactive(const P& p, int bound,
                        const std::function<int(const P&, const std::vector<ReductionStep>&)>& pick);

// nodes without successors (normal forms) reached within the bound
std::vector<P> normal_forms(const Trace& t);

// Number of distinct node paths from the root that stop at the first node
// satisfying the predicate. Nodes past a hit are not explored.
struct CommitmentPaths {
  size_t count = 0;
  std::vector<std::vector<int>> paths;  // node ids
  std::vector<P> nodes;                 // canonical term of each node id
  bool exhausted = false;
};
CommitmentPaths commitment_paths(const P& p, int bound, const std::function<bool(const P&)>& hit);

}  // namespace spi
