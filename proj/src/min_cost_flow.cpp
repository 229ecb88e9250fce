#include "flpbd/min_cost_flow.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <utility>

namespace flpbd {

void MinCostFlow::reset(int n_nodes) {
  n_ = n_nodes;
  arcs_.clear();
  if (static_cast<int>(out_.size()) < n_nodes) out_.resize(n_nodes);
  for (int v = 0; v < n_nodes; ++v) out_[v].clear();
}

int MinCostFlow::add_arc(int from, int to, int cap, double cost) {
  const int id = static_cast<int>(arcs_.size());
  arcs_.push_back({to, cap, cost});
  arcs_.push_back({from, 0, -cost});
  out_[from].push_back(id);
  out_[to].push_back(id + 1);
  return id;
}

MinCostFlow::Result MinCostFlow::solve(int source, int sink, int max_flow) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  potential_.assign(n_, 0.0);
  dist_.resize(n_);
  parent_arc_.resize(n_);
  done_.resize(n_);

  Result result;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;

  while (result.flow < max_flow) {
    std::fill(dist_.begin(), dist_.end(), kInf);
    std::fill(parent_arc_.begin(), parent_arc_.end(), -1);
    std::fill(done_.begin(), done_.end(), 0);
    dist_[source] = 0.0;
    heap.push({0.0, source});
    while (!heap.empty()) {
      const auto [d, v] = heap.top();
      heap.pop();
      if (done_[v]) continue;
      done_[v] = 1;
      for (int id : out_[v]) {
        const Arc& a = arcs_[id];
        if (a.cap <= 0 || done_[a.to]) continue;
        // Reduced costs are nonnegative up to rounding.
        const double reduced = std::max(0.0, a.cost + potential_[v] - potential_[a.to]);
        const double nd = d + reduced;
        if (nd < dist_[a.to]) {
          dist_[a.to] = nd;
          parent_arc_[a.to] = id;
          heap.push({nd, a.to});
        }
      }
    }
    if (dist_[sink] == kInf) break;
    for (int v = 0; v < n_; ++v) {
      if (dist_[v] < kInf) potential_[v] += dist_[v];
    }

    int push = max_flow - result.flow;
    for (int v = sink; v != source; v = arcs_[parent_arc_[v] ^ 1].to) {
      push = std::min(push, arcs_[parent_arc_[v]].cap);
    }
    for (int v = sink; v != source; v = arcs_[parent_arc_[v] ^ 1].to) {
      const int id = parent_arc_[v];
      arcs_[id].cap -= push;
      arcs_[id ^ 1].cap += push;
      result.cost += push * arcs_[id].cost;
    }
    result.flow += push;
  }
  return result;
}

}  // namespace flpbd
