#ifndef FOLDCHECK_DECOMPOSITION_HPP
#define FOLDCHECK_DECOMPOSITION_HPP

#include "foldcheck/arrangement.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace foldcheck {

/// Simple undirected graph on vertices 0..n-1.
struct Graph {
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  static Graph from_cell_graph(const CellGraph& cg) {
    Graph g{cg.num_cells, {}};
    for (const auto& e : cg.edges) g.edges.push_back({e.u, e.v});
    return g;
  }
  static Graph cycle(std::size_t n) {
    Graph g{n, {}};
    for (std::size_t i = 0; i < n; ++i) g.edges.push_back({i, (i + 1) % n});
    return g;
  }
};

struct TreeDecomposition {
  std::vector<std::vector<std::size_t>> bags;                   // each sorted
  std::vector<std::pair<std::size_t, std::size_t>> tree_edges;  // between bag indices

  int width() const {
    std::size_t m = 0;
    for (const auto& b : bags) m = std::max(m, b.size());
    return static_cast<int>(m) - 1;
  }
};

/// Outcome of checking the three tree-decomposition properties. On failure,
/// `problem` names the first violated property and the offending vertex/edge.
struct VerifyResult {
  enum class Problem { None, NotATree, MissingVertex, MissingEdge, DisconnectedOccurrences };
  Problem problem = Problem::None;
  std::size_t vertex = 0;
  std::pair<std::size_t, std::size_t> edge{0, 0};

  explicit operator bool() const { return problem == Problem::None; }
  std::string describe() const {
    switch (problem) {
      case Problem::None: return "valid";
      case Problem::NotATree: return "decomposition tree is not a tree";
      case Problem::MissingVertex: return "vertex " + std::to_string(vertex) + " is in no bag";
      case Problem::MissingEdge:
        return "edge " + std::to_string(edge.first) + "-" + std::to_string(edge.second) + " is in no bag";
      case Problem::DisconnectedOccurrences:
        return "bags containing vertex " + std::to_string(vertex) + " are not connected";
    }
    return "?";
  }
};

inline VerifyResult verify(const Graph& g, const TreeDecomposition& td) {
  VerifyResult r;
  const std::size_t nb = td.bags.size();
  std::vector<std::vector<std::size_t>> tadj(nb);
  for (auto [a, b] : td.tree_edges) {
    if (a >= nb || b >= nb || a == b) {
      r.problem = VerifyResult::Problem::NotATree;
      return r;
    }
    tadj[a].push_back(b);
    tadj[b].push_back(a);
  }
  if (nb == 0 ? g.n != 0 : td.tree_edges.size() != nb - 1) {
    r.problem = nb == 0 ? VerifyResult::Problem::MissingVertex : VerifyResult::Problem::NotATree;
    return r;
  }
  if (nb > 0) {
    std::vector<bool> seen(nb, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t count = 0;
    while (!stack.empty()) {
      auto t = stack.back();
      stack.pop_back();
      ++count;
      for (auto u : tadj[t]) {
        if (!seen[u]) {
          seen[u] = true;
          stack.push_back(u);
        }
      }
    }
    if (count != nb) {
      r.problem = VerifyResult::Problem::NotATree;
      return r;
    }
  }
  auto in_bag = [&](std::size_t t, std::size_t v) {
    return std::binary_search(td.bags[t].begin(), td.bags[t].end(), v);
  };
  for (std::size_t v = 0; v < g.n; ++v) {
    std::vector<std::size_t> holders;
    for (std::size_t t = 0; t < nb; ++t) {
      if (in_bag(t, v)) holders.push_back(t);
    }
    if (holders.empty()) {
      r.problem = VerifyResult::Problem::MissingVertex;
      r.vertex = v;
      return r;
    }
    // Occurrence set must induce a connected subtree.
    std::vector<bool> seen(nb, false);
    std::vector<std::size_t> stack{holders[0]};
    seen[holders[0]] = true;
    std::size_t reached = 0;
    while (!stack.empty()) {
      auto t = stack.back();
      stack.pop_back();
      ++reached;
      for (auto u : tadj[t]) {
        if (!seen[u] && in_bag(u, v)) {
          seen[u] = true;
          stack.push_back(u);
        }
      }
    }
    if (reached != holders.size()) {
      r.problem = VerifyResult::Problem::DisconnectedOccurrences;
      r.vertex = v;
      return r;
    }
  }
  for (auto [a, b] : g.edges) {
    bool covered = false;
    for (std::size_t t = 0; t < nb && !covered; ++t) covered = in_bag(t, a) && in_bag(t, b);
    if (!covered) {
      r.problem = VerifyResult::Problem::MissingEdge;
      r.edge = {a, b};
      return r;
    }
  }
  return r;
}

/// Tree decomposition from a min-fill elimination ordering, ties broken by the
/// lower vertex id. Bags contained in a neighbouring bag are merged away.
inline TreeDecomposition decompose(const Graph& g) {
  const std::size_t n = g.n;
  TreeDecomposition td;
  if (n == 0) return td;
  std::vector<std::set<std::size_t>> adj(n);
  for (auto [a, b] : g.edges) {
    if (a == b) continue;
    adj[a].insert(b);
    adj[b].insert(a);
  }
  std::vector<bool> eliminated(n, false);
  std::vector<std::size_t> position(n, 0);
  std::vector<std::vector<std::size_t>> bag_of(n);
  std::vector<std::size_t> order;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = n;
    std::size_t best_fill = std::numeric_limits<std::size_t>::max();
    for (std::size_t v = 0; v < n; ++v) {
      if (eliminated[v]) continue;
      std::size_t fill = 0;
      std::vector<std::size_t> nb(adj[v].begin(), adj[v].end());
      for (std::size_t i = 0; i < nb.size() && fill < best_fill; ++i) {
        for (std::size_t j = i + 1; j < nb.size(); ++j) {
          if (!adj[nb[i]].count(nb[j])) ++fill;
        }
      }
      if (fill < best_fill) {
        best_fill = fill;
        best = v;
      }
    }
    std::vector<std::size_t> nb(adj[best].begin(), adj[best].end());
    for (std::size_t i = 0; i < nb.size(); ++i) {
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        adj[nb[i]].insert(nb[j]);
        adj[nb[j]].insert(nb[i]);
      }
      adj[nb[i]].erase(best);
    }
    std::vector<std::size_t> bag = nb;
    bag.push_back(best);
    std::sort(bag.begin(), bag.end());
    bag_of[best] = std::move(bag);
    eliminated[best] = true;
    position[best] = step;
    order.push_back(best);
  }

  // Bag of v hangs off the bag of its earliest-eliminated later neighbour.
  std::vector<std::size_t> parent(n, n);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::size_t v = order[k];
    std::size_t p = n;
    for (auto u : bag_of[v]) {
      if (u != v && (p == n || position[u] < position[p])) p = u;
    }
    parent[k] = p == n ? k + 1 : position[p];  // disconnected graphs: chain to the next bag
  }

  // Merge bags that are subsets of their tree neighbour.
  std::vector<std::vector<std::size_t>> bags;
  for (auto v : order) bags.push_back(bag_of[v]);
  std::vector<std::set<std::size_t>> tadj(n);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    tadj[k].insert(parent[k]);
    tadj[parent[k]].insert(k);
  }
  std::vector<bool> alive(n, true);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 0; k < n; ++k) {
      if (!alive[k]) continue;
      for (auto u : tadj[k]) {
        if (std::includes(bags[u].begin(), bags[u].end(), bags[k].begin(), bags[k].end())) {
          for (auto w : tadj[k]) {
            if (w == u) continue;
            tadj[w].erase(k);
            tadj[w].insert(u);
            tadj[u].insert(w);
          }
          tadj[u].erase(k);
          tadj[k].clear();
          alive[k] = false;
          changed = true;
          break;
        }
      }
    }
  }
  std::vector<std::size_t> renumber(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!alive[k]) continue;
    renumber[k] = td.bags.size();
    td.bags.push_back(bags[k]);
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (auto u : tadj[k]) {
      if (k < u) td.tree_edges.push_back({renumber[k], renumber[u]});
    }
  }
  std::sort(td.tree_edges.begin(), td.tree_edges.end());
  return td;
}

enum class NiceKind { Leaf, Introduce, Forget, Join };

inline const char* to_string(NiceKind k) {
  switch (k) {
    case NiceKind::Leaf: return "leaf";
    case NiceKind::Introduce: return "introduce";
    case NiceKind::Forget: return "forget";
    case NiceKind::Join: return "join";
  }
  return "?";
}

struct NiceNode {
  NiceKind kind = NiceKind::Leaf;
  std::vector<std::size_t> bag;       // sorted
  std::size_t vertex = 0;             // leaf vertex, or the introduced/forgotten vertex
  std::vector<std::size_t> children;  // node indices, all smaller than this node's index
};

/// Rooted nice tree decomposition; nodes are stored in post-order, so every
/// child precedes its parent and the root is the last node.
struct NiceTreeDecomposition {
  std::vector<NiceNode> nodes;
  std::size_t root = 0;

  int width() const {
    std::size_t m = 0;
    for (const auto& nd : nodes) m = std::max(m, nd.bag.size());
    return static_cast<int>(m) - 1;
  }

  TreeDecomposition as_tree() const {
    TreeDecomposition td;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      td.bags.push_back(nodes[i].bag);
      for (auto c : nodes[i].children) td.tree_edges.push_back({c, i});
    }
    return td;
  }

  std::size_t count(NiceKind k) const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [k](const NiceNode& nd) { return nd.kind == k; }));
  }
};

/// Empty string if every node obeys the leaf/introduce/forget/join rules.
inline std::string nice_grammar_violation(const NiceTreeDecomposition& ntd) {
  auto diff = [](const std::vector<std::size_t>& big, const std::vector<std::size_t>& small) {
    std::vector<std::size_t> out;
    std::set_difference(big.begin(), big.end(), small.begin(), small.end(), std::back_inserter(out));
    return out;
  };
  if (ntd.nodes.empty()) return "no nodes";
  if (ntd.root != ntd.nodes.size() - 1) return "root is not the last node";
  std::vector<int> parents(ntd.nodes.size(), 0);
  for (std::size_t i = 0; i < ntd.nodes.size(); ++i) {
    const auto& nd = ntd.nodes[i];
    std::string where = "node " + std::to_string(i) + ": ";
    for (auto c : nd.children) {
      if (c >= i) return where + "child not before parent";
      ++parents[c];
    }
    switch (nd.kind) {
      case NiceKind::Leaf:
        if (!nd.children.empty()) return where + "leaf with children";
        if (nd.bag != std::vector<std::size_t>{nd.vertex}) return where + "leaf bag is not a single vertex";
        break;
      case NiceKind::Introduce: {
        if (nd.children.size() != 1) return where + "introduce needs one child";
        const auto& cb = ntd.nodes[nd.children[0]].bag;
        if (!diff(cb, nd.bag).empty() || diff(nd.bag, cb) != std::vector<std::size_t>{nd.vertex}) {
          return where + "introduce bag does not add exactly its vertex";
        }
        break;
      }
      case NiceKind::Forget: {
        if (nd.children.size() != 1) return where + "forget needs one child";
        const auto& cb = ntd.nodes[nd.children[0]].bag;
        if (!diff(nd.bag, cb).empty() || diff(cb, nd.bag) != std::vector<std::size_t>{nd.vertex}) {
          return where + "forget bag does not remove exactly its vertex";
        }
        break;
      }
      case NiceKind::Join:
        if (nd.children.size() != 2) return where + "join needs two children";
        for (auto c : nd.children) {
          if (ntd.nodes[c].bag != nd.bag) return where + "join child bag differs";
        }
        break;
    }
  }
  for (std::size_t i = 0; i + 1 < ntd.nodes.size(); ++i) {
    if (parents[i] != 1) return "node " + std::to_string(i) + " has " + std::to_string(parents[i]) + " parents";
  }
  return {};
}

/// Converts a tree decomposition (rooted at bag 0) into a nice one of the same
/// width: chains of forget/introduce nodes between differing bags, binary joins
/// for branching, and introduce chains above single-vertex leaves.
inline NiceTreeDecomposition make_nice(const TreeDecomposition& td) {
  NiceTreeDecomposition out;
  if (td.bags.empty()) return out;
  const std::size_t nb = td.bags.size();
  std::vector<std::vector<std::size_t>> tadj(nb);
  for (auto [a, b] : td.tree_edges) {
    tadj[a].push_back(b);
    tadj[b].push_back(a);
  }
  for (auto& l : tadj) std::sort(l.begin(), l.end());

  auto add = [&](NiceNode nd) {
    out.nodes.push_back(std::move(nd));
    return out.nodes.size() - 1;
  };
  // Extends the chain ending at `node` (bag `from`) until its bag equals `to`.
  auto morph = [&](std::size_t node, const std::vector<std::size_t>& to) {
    std::vector<std::size_t> bag = out.nodes[node].bag;
    std::vector<std::size_t> drop, gain;
    std::set_difference(bag.begin(), bag.end(), to.begin(), to.end(), std::back_inserter(drop));
    std::set_difference(to.begin(), to.end(), bag.begin(), bag.end(), std::back_inserter(gain));
    for (auto v : drop) {
      bag.erase(std::find(bag.begin(), bag.end(), v));
      node = add({NiceKind::Forget, bag, v, {node}});
    }
    for (auto v : gain) {
      bag.insert(std::upper_bound(bag.begin(), bag.end(), v), v);
      node = add({NiceKind::Introduce, bag, v, {node}});
    }
    return node;
  };

  // Iterative post-order over the rooted tree.
  std::vector<std::size_t> parent(nb, nb), visit;
  std::vector<std::size_t> stack{0};
  parent[0] = 0;
  while (!stack.empty()) {
    auto t = stack.back();
    stack.pop_back();
    visit.push_back(t);
    for (auto it = tadj[t].rbegin(); it != tadj[t].rend(); ++it) {
      if (*it != parent[t] && parent[*it] == nb) {
        parent[*it] = t;
        stack.push_back(*it);
      }
    }
  }
  std::vector<std::size_t> top(nb, 0);  // nice node whose bag equals bags[t]
  for (auto it = visit.rbegin(); it != visit.rend(); ++it) {
    std::size_t t = *it;
    const auto& bag = td.bags[t];
    std::vector<std::size_t> branches;
    for (auto c : tadj[t]) {
      if (t != 0 && c == parent[t]) continue;
      branches.push_back(morph(top[c], bag));
    }
    if (branches.empty()) {
      std::vector<std::size_t> b{bag.front()};
      std::size_t node = add({NiceKind::Leaf, b, bag.front(), {}});
      top[t] = morph(node, bag);
      continue;
    }
    std::size_t acc = branches[0];
    for (std::size_t k = 1; k < branches.size(); ++k) {
      acc = add({NiceKind::Join, bag, 0, {acc, branches[k]}});
    }
    top[t] = acc;
  }
  out.root = out.nodes.size() - 1;
  return out;
}

inline nlohmann::ordered_json decomposition_to_json(const NiceTreeDecomposition& ntd) {
  using oj = nlohmann::ordered_json;
  oj out;
  out["width"] = ntd.width();
  out["root"] = ntd.root;
  oj nodes = oj::array();
  for (std::size_t i = 0; i < ntd.nodes.size(); ++i) {
    const auto& nd = ntd.nodes[i];
    oj j;
    j["id"] = i;
    j["kind"] = to_string(nd.kind);
    if (nd.kind != NiceKind::Join) j["cell"] = nd.vertex;
    j["bag"] = nd.bag;
    j["children"] = nd.children;
    nodes.push_back(std::move(j));
  }
  out["nodes"] = std::move(nodes);
  return out;
}

}  // namespace foldcheck

#endif  // FOLDCHECK_DECOMPOSITION_HPP
