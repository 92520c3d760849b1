#include "garmfit/maxflow.hpp"

#include <algorithm>
#include <limits>

namespace garmfit {

Maxflow::Maxflow(int num_nodes) : nodes_(num_nodes) {}

void Maxflow::add_terminal(int node, double source_cap, double sink_cap) {
  nodes_[node].tr_cap += source_cap - sink_cap;
  flow_ += std::min(source_cap, sink_cap);
}

void Maxflow::add_edge(int a, int b, double cap, double rev_cap) {
  int ia = static_cast<int>(arcs_.size());
  arcs_.push_back({b, nodes_[a].first_arc, cap});
  nodes_[a].first_arc = ia;
  arcs_.push_back({a, nodes_[b].first_arc, rev_cap});
  nodes_[b].first_arc = ia + 1;
}

bool Maxflow::has_root_path(int node) {
  // follow parents to a terminal; stamp the path with dist for reuse
  int n = node;
  int len = 0;
  while (true) {
    if (nodes_[n].ts == time_) {
      len += nodes_[n].dist;
      break;
    }
    int pa = nodes_[n].parent_arc;
    if (pa == kTerminal) {
      ++len;
      nodes_[n].ts = time_;
      nodes_[n].dist = 1;
      break;
    }
    if (pa == kNone || pa == kOrphan) return false;
    ++len;
    n = nodes_[n].tree == Tree::source ? arcs_[pa ^ 1].head : arcs_[pa].head;
  }
  // second pass: write distances
  int d = len;
  n = node;
  while (nodes_[n].ts != time_) {
    nodes_[n].ts = time_;
    nodes_[n].dist = d--;
    int pa = nodes_[n].parent_arc;
    n = nodes_[n].tree == Tree::source ? arcs_[pa ^ 1].head : arcs_[pa].head;
  }
  return true;
}

int Maxflow::grow() {
  while (active_head_ < active_.size()) {
    int p = active_[active_head_];
    if (nodes_[p].tree == Tree::free_node) {
      ++active_head_;
      continue;
    }
    bool p_source = nodes_[p].tree == Tree::source;
    for (int a = nodes_[p].first_arc; a != kNone; a = arcs_[a].next) {
      int residual_arc = p_source ? a : (a ^ 1);
      if (arcs_[residual_arc].r_cap <= 0) continue;
      int q = arcs_[a].head;
      Node& nq = nodes_[q];
      if (nq.tree == Tree::free_node) {
        nq.tree = nodes_[p].tree;
        nq.parent_arc = p_source ? a : (a ^ 1);
        nq.ts = nodes_[p].ts;
        nq.dist = nodes_[p].dist + 1;
        active_.push_back(q);
      } else if (nq.tree != nodes_[p].tree) {
        return p_source ? a : (a ^ 1);  // arc from source side to sink side
      }
    }
    ++active_head_;
  }
  return kNone;
}

void Maxflow::augment(int ca) {
  double bottleneck = arcs_[ca].r_cap;

  // source side: tail of ca up to the root
  int n = arcs_[ca ^ 1].head;
  while (nodes_[n].parent_arc != kTerminal) {
    int pa = nodes_[n].parent_arc;  // arc parent -> n
    bottleneck = std::min(bottleneck, arcs_[pa].r_cap);
    n = arcs_[pa ^ 1].head;
  }
  bottleneck = std::min(bottleneck, nodes_[n].tr_cap);

  // sink side: head of ca down to the root
  n = arcs_[ca].head;
  while (nodes_[n].parent_arc != kTerminal) {
    int pa = nodes_[n].parent_arc;  // arc n -> parent
    bottleneck = std::min(bottleneck, arcs_[pa].r_cap);
    n = arcs_[pa].head;
  }
  bottleneck = std::min(bottleneck, -nodes_[n].tr_cap);

  arcs_[ca].r_cap -= bottleneck;
  arcs_[ca ^ 1].r_cap += bottleneck;

  n = arcs_[ca ^ 1].head;
  while (nodes_[n].parent_arc != kTerminal) {
    int pa = nodes_[n].parent_arc;
    arcs_[pa].r_cap -= bottleneck;
    arcs_[pa ^ 1].r_cap += bottleneck;
    int parent = arcs_[pa ^ 1].head;
    if (arcs_[pa].r_cap <= 0) {
      nodes_[n].parent_arc = kOrphan;
      orphans_.push_back(n);
    }
    n = parent;
  }
  nodes_[n].tr_cap -= bottleneck;
  if (nodes_[n].tr_cap <= 0) {
    nodes_[n].parent_arc = kOrphan;
    orphans_.push_back(n);
  }

  n = arcs_[ca].head;
  while (nodes_[n].parent_arc != kTerminal) {
    int pa = nodes_[n].parent_arc;
    arcs_[pa].r_cap -= bottleneck;
    arcs_[pa ^ 1].r_cap += bottleneck;
    int parent = arcs_[pa].head;
    if (arcs_[pa].r_cap <= 0) {
      nodes_[n].parent_arc = kOrphan;
      orphans_.push_back(n);
    }
    n = parent;
  }
  nodes_[n].tr_cap += bottleneck;
  if (nodes_[n].tr_cap >= 0) {
    nodes_[n].parent_arc = kOrphan;
    orphans_.push_back(n);
  }

  flow_ += bottleneck;
}

void Maxflow::adopt() {
  while (!orphans_.empty()) {
    int n = orphans_.back();
    orphans_.pop_back();
    if (nodes_[n].parent_arc != kOrphan) continue;
    bool n_source = nodes_[n].tree == Tree::source;

    int best_arc = kNone;
    int best_dist = std::numeric_limits<int>::max();
    for (int a = nodes_[n].first_arc; a != kNone; a = arcs_[a].next) {
      int q = arcs_[a].head;
      if (nodes_[q].tree != nodes_[n].tree) continue;
      int toward = n_source ? (a ^ 1) : a;  // arc that would carry flow
      if (arcs_[toward].r_cap <= 0) continue;
      if (nodes_[q].parent_arc == kOrphan || nodes_[q].parent_arc == kNone)
        continue;
      if (!has_root_path(q)) continue;
      if (nodes_[q].dist + 1 < best_dist) {
        best_dist = nodes_[q].dist + 1;
        best_arc = toward;
      }
    }

    if (best_arc != kNone) {
      nodes_[n].parent_arc = best_arc;
      nodes_[n].ts = time_;
      nodes_[n].dist = best_dist;
      continue;
    }

    // no parent found: n leaves the tree, children become orphans,
    // potential neighbors become active again
    nodes_[n].parent_arc = kNone;
    for (int a = nodes_[n].first_arc; a != kNone; a = arcs_[a].next) {
      int q = arcs_[a].head;
      if (nodes_[q].tree != nodes_[n].tree) continue;
      int pa = nodes_[q].parent_arc;
      if (pa >= 0) {
        int q_parent = nodes_[q].tree == Tree::source ? arcs_[pa ^ 1].head
                                                      : arcs_[pa].head;
        if (q_parent == n) {
          nodes_[q].parent_arc = kOrphan;
          orphans_.push_back(q);
        }
      }
      int toward = n_source ? (a ^ 1) : a;
      if (arcs_[toward].r_cap > 0) active_.push_back(q);
    }
    nodes_[n].tree = Tree::free_node;
  }
}

double Maxflow::solve() {
  active_.clear();
  active_head_ = 0;
  orphans_.clear();
  time_ = 0;
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
    Node& nd = nodes_[i];
    if (nd.tr_cap > 0) {
      nd.tree = Tree::source;
      nd.parent_arc = kTerminal;
      nd.ts = 0;
      nd.dist = 1;
      active_.push_back(i);
    } else if (nd.tr_cap < 0) {
      nd.tree = Tree::sink;
      nd.parent_arc = kTerminal;
      nd.ts = 0;
      nd.dist = 1;
      active_.push_back(i);
    } else {
      nd.tree = Tree::free_node;
      nd.parent_arc = kNone;
    }
  }

  while (true) {
    int ca = grow();
    if (ca == kNone) break;
    ++time_;
    augment(ca);
    adopt();
  }
  return flow_;
}

bool Maxflow::in_source_side(int node) const {
  return nodes_[node].tree == Tree::source;
}

}  // namespace garmfit
