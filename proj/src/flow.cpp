#include "vsnopt/flow.hpp"

#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>

namespace vsnopt {

namespace {
constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
}

MinCostFlow::MinCostFlow(int n_vertices) : out_(n_vertices), n_(n_vertices) {}

int MinCostFlow::add_arc(int from, int to, std::int64_t capacity, std::int64_t cost) {
  if (from < 0 || from >= n_ || to < 0 || to >= n_)
    throw std::invalid_argument("MinCostFlow: arc endpoint out of range");
  if (capacity < 0 || cost < 0)
    throw std::invalid_argument("MinCostFlow: capacity and cost must be nonnegative");
  const int handle = static_cast<int>(arcs_.size());
  arcs_.push_back({to, capacity, cost});
  arcs_.push_back({from, 0, -cost});
  out_[from].push_back(handle);
  out_[to].push_back(handle + 1);
  return handle;
}

MinCostFlow::Result MinCostFlow::solve(int source, int sink) {
  Result result;
  std::vector<std::int64_t> potential(n_, 0);  // valid initially: costs >= 0
  std::vector<std::int64_t> dist(n_);
  std::vector<int> via_arc(n_);

  for (;;) {
    // Dijkstra on reduced costs.
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(via_arc.begin(), via_arc.end(), -1);
    dist[source] = 0;
    using Item = std::pair<std::int64_t, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    queue.push({0, source});
    while (!queue.empty()) {
      auto [d, u] = queue.top();
      queue.pop();
      if (d > dist[u]) continue;
      for (int handle : out_[u]) {
        const Arc& arc = arcs_[handle];
        if (arc.capacity <= 0) continue;
        const std::int64_t reduced = arc.cost + potential[u] - potential[arc.to];
        if (dist[u] + reduced < dist[arc.to]) {
          dist[arc.to] = dist[u] + reduced;
          via_arc[arc.to] = handle;
          queue.push({dist[arc.to], arc.to});
        }
      }
    }
    if (dist[sink] == kInf) break;

    for (int v = 0; v < n_; ++v)
      if (dist[v] < kInf) potential[v] += dist[v];

    std::int64_t bottleneck = kInf;
    for (int v = sink; v != source;) {
      const Arc& arc = arcs_[via_arc[v]];
      bottleneck = std::min(bottleneck, arc.capacity);
      v = arcs_[via_arc[v] ^ 1].to;
    }
    for (int v = sink; v != source;) {
      Arc& arc = arcs_[via_arc[v]];
      arc.capacity -= bottleneck;
      arcs_[via_arc[v] ^ 1].capacity += bottleneck;
      result.cost += bottleneck * arc.cost;
      v = arcs_[via_arc[v] ^ 1].to;
    }
    result.flow += bottleneck;
  }
  return result;
}

std::int64_t MinCostFlow::arc_flow(int arc) const { return arcs_[arc ^ 1].capacity; }

}  // namespace vsnopt
