#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace flpbd {

// Successive shortest paths with Johnson potentials and Dijkstra.
// Integral capacities, nonnegative arc costs on construction.
// The graph is reusable through reset() to avoid reallocations in hot loops.
class MinCostFlow {
 public:
  static constexpr int kInfiniteCap = std::numeric_limits<int>::max() / 4;

  struct Arc {
    int to;
    int cap;
    double cost;
  };

  void reset(int n_nodes);
  /// Returns the arc id; its reverse arc is id ^ 1.
  int add_arc(int from, int to, int cap, double cost);

  struct Result {
    int flow = 0;
    double cost = 0.0;
  };
  /// Sends up to `max_flow` units from source to sink at minimum cost.
  Result solve(int source, int sink, int max_flow);

  int flow_on(int arc) const { return arcs_[arc ^ 1].cap; }
  const Arc& arc(int id) const { return arcs_[id]; }

 private:
  int n_ = 0;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> out_;
  std::vector<double> potential_;
  std::vector<double> dist_;
  std::vector<int> parent_arc_;
  std::vector<char> done_;
};

}  // namespace flpbd
