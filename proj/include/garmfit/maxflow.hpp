#pragma once

#include <cstdint>
#include <vector>

namespace garmfit {

// Max-flow / min-cut on a directed graph with terminal capacities,
// Boykov-Kolmogorov style search-tree algorithm (grow / augment / adopt).
class Maxflow {
 public:
  explicit Maxflow(int num_nodes);

  // Accumulates terminal capacities (source->node and node->sink).
  void add_terminal(int node, double source_cap, double sink_cap);

  // Adds the arc pair node a -> b with capacity cap and b -> a with rev_cap.
  void add_edge(int a, int b, double cap, double rev_cap);

  double solve();

  // Valid after solve(): true if the node stays on the source side of the cut.
  bool in_source_side(int node) const;

 private:
  static constexpr int kNone = -1;
  static constexpr int kTerminal = -2;
  static constexpr int kOrphan = -3;

  enum class Tree : uint8_t { free_node, source, sink };

  struct Arc {
    int head;
    int next;
    double r_cap;
  };

  struct Node {
    int first_arc = kNone;
    int parent_arc = kNone;  // kTerminal for roots, kOrphan while orphaned
    Tree tree = Tree::free_node;
    int ts = 0;
    int dist = 0;
    double tr_cap = 0.0;  // >0: residual from source, <0: residual to sink
  };

  int grow();                      // returns connecting arc or kNone
  void augment(int connecting_arc);
  void adopt();
  bool has_root_path(int node);    // walks parents, caches ts/dist

  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;
  std::vector<int> active_;
  size_t active_head_ = 0;
  std::vector<int> orphans_;
  int time_ = 0;
  double flow_ = 0.0;
};

}  // namespace garmfit
