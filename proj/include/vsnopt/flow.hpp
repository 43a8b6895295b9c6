#pragma once

#include <cstdint>
#include <vector>

namespace vsnopt {

// Min-cost max-flow via successive shortest augmenting paths with
// Johnson potentials. Arc costs must be nonnegative. Deterministic:
// shortest-path ties resolve by fixed vertex order, so identical graphs
// produce identical flows.
class MinCostFlow {
 public:
  explicit MinCostFlow(int n_vertices);

  // Returns the arc handle for later flow queries. Adds the residual
  // reverse arc internally.
  int add_arc(int from, int to, std::int64_t capacity, std::int64_t cost);

  struct Result {
    std::int64_t flow = 0;
    std::int64_t cost = 0;
  };

  // Augments along cheapest paths until the sink is unreachable.
  Result solve(int source, int sink);

  std::int64_t arc_flow(int arc) const;

 private:
  struct Arc {
    int to = 0;
    std::int64_t capacity = 0;  // residual
    std::int64_t cost = 0;
  };

  std::vector<Arc> arcs_;  // arc 2k pairs with its reverse 2k+1
  std::vector<std::vector<int>> out_;
  int n_ = 0;
};

}  // namespace vsnopt
