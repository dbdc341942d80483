#ifndef FOLDCHECK_FOLD_DP_HPP
#define FOLDCHECK_FOLD_DP_HPP

#include "foldcheck/arrangement.hpp"
#include "foldcheck/decomposition.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <future>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace foldcheck {

enum class FoldMode { Labeled, Unlabeled };

inline const char* to_string(FoldMode m) { return m == FoldMode::Labeled ? "labeled" : "unlabeled"; }

/// Bottom-to-top order of the layers of one cell.
struct Layering {
  CellId cell = 0;
  std::vector<FaceId> order;
};

/// A layering of every cell, indexed by cell id.
struct GlobalLayering {
  std::vector<std::vector<FaceId>> orders;

  Layering of(CellId c) const { return {c, orders.at(c)}; }
  friend bool operator==(const GlobalLayering& a, const GlobalLayering& b) { return a.orders == b.orders; }
};

namespace detail {

/// The conditions at one edge that involve a single incident cell: no
/// spanning layer between the two layers of a fold, folds nest or stay apart,
/// and (labeled mode) each fold opens the way its label says.
inline bool fold_side_uncrossed(const ArrEdge& e, bool side_a, const LocalIndex* pos, FoldMode mode) {
  const std::vector<FoldPair>& folds = side_a ? e.folds_a : e.folds_b;
  for (std::size_t i = 0; i < folds.size(); ++i) {
    const FoldPair& f = folds[i];
    LocalIndex lo = std::min(pos[f.plus], pos[f.minus]);
    LocalIndex hi = std::max(pos[f.plus], pos[f.minus]);
    for (const auto& s : e.spans) {
      LocalIndex h = pos[side_a ? s.first : s.second];
      if (lo < h && h < hi) return false;
    }
    for (std::size_t j = i + 1; j < folds.size(); ++j) {
      LocalIndex lo2 = std::min(pos[folds[j].plus], pos[folds[j].minus]);
      LocalIndex hi2 = std::max(pos[folds[j].plus], pos[folds[j].minus]);
      if ((lo < lo2 && lo2 < hi && hi < hi2) || (lo2 < lo && lo < hi2 && hi2 < hi)) return false;
    }
    if (mode == FoldMode::Labeled) {
      if (f.label == Label::Valley && pos[f.plus] > pos[f.minus]) return false;
      if (f.label == Label::Mountain && pos[f.plus] < pos[f.minus]) return false;
    }
  }
  return true;
}

/// Spanning layers keep their relative order across the edge.
inline bool spans_uncrossed(const ArrEdge& e, const LocalIndex* pos_a, const LocalIndex* pos_b) {
  for (std::size_t i = 0; i < e.spans.size(); ++i) {
    for (std::size_t j = i + 1; j < e.spans.size(); ++j) {
      bool below_a = pos_a[e.spans[i].first] < pos_a[e.spans[j].first];
      bool below_b = pos_b[e.spans[i].second] < pos_b[e.spans[j].second];
      if (below_a != below_b) return false;
    }
  }
  return true;
}

/// All four uncrossed conditions at one edge. pos_a[i] is the height of the
/// i-th layer (in face-id order) of cell_a, likewise pos_b for cell_b.
inline bool edge_uncrossed(const ArrEdge& e, const LocalIndex* pos_a, const LocalIndex* pos_b, FoldMode mode) {
  return spans_uncrossed(e, pos_a, pos_b) && fold_side_uncrossed(e, true, pos_a, mode) &&
         fold_side_uncrossed(e, false, pos_b, mode);
}

/// Heights of a cell's layers from a face-id order; throws if `order` is not a
/// permutation of the faces listed on `side`.
inline std::vector<LocalIndex> heights(const std::vector<LayerClass>& side, const std::vector<FaceId>& order) {
  if (order.size() != side.size()) throw std::invalid_argument("layering has the wrong number of layers");
  std::vector<LocalIndex> pos(side.size(), 0);
  std::vector<bool> seen(side.size(), false);
  for (std::size_t h = 0; h < order.size(); ++h) {
    auto it = std::lower_bound(side.begin(), side.end(), order[h],
                               [](const LayerClass& lc, FaceId f) { return lc.face < f; });
    if (it == side.end() || it->face != order[h]) throw std::invalid_argument("layering names a foreign face");
    auto local = static_cast<std::size_t>(it - side.begin());
    if (seen[local]) throw std::invalid_argument("layering repeats a face");
    seen[local] = true;
    pos[local] = static_cast<LocalIndex>(h);
  }
  return pos;
}

}  // namespace detail

/// Whether the layerings of the two cells incident to `e` are uncrossed at `e`.
/// `la` must layer e.cell_a and `lb` e.cell_b.
inline bool check_edge(const ArrEdge& e, const Layering& la, const Layering& lb, FoldMode mode) {
  if (!e.classified) throw std::invalid_argument("edge has not been classified");
  if (la.cell != e.cell_a || lb.cell != e.cell_b) throw std::invalid_argument("layerings do not match edge cells");
  auto pa = detail::heights(e.side_a, la.order);
  auto pb = detail::heights(e.side_b, lb.order);
  return detail::edge_uncrossed(e, pa.data(), pb.data(), mode);
}

/// First arrangement edge at which `g` is crossed, if any.
inline std::optional<EdgeId> first_crossed_edge(const Arrangement& arr, const GlobalLayering& g, FoldMode mode) {
  for (const auto& e : arr.edges) {
    if (!check_edge(e, g.of(e.cell_a), g.of(e.cell_b), mode)) return e.id;
  }
  return std::nullopt;
}

/// Identity layering: every cell ordered by face id.
inline GlobalLayering identity_layering(const Arrangement& arr) {
  GlobalLayering g;
  for (const auto& c : arr.cells) g.orders.push_back(c.layers);
  return g;
}

/// Bottom-to-top reversal of every cell (the mirror image of a folded state).
inline GlobalLayering mirrored(GlobalLayering g) {
  for (auto& o : g.orders) std::reverse(o.begin(), o.end());
  return g;
}

struct NodeAudit {
  std::size_t node = 0;
  std::size_t bag_size = 0;
  std::size_t max_ply = 0;
  std::size_t states = 0;
  long double bound = 0;  // (max_ply!)^bag_size
};

struct DpOptions {
  FoldMode mode = FoldMode::Labeled;
  unsigned threads = 1;
};

struct DpResult {
  bool feasible = false;
  std::optional<GlobalLayering> witness;
  std::vector<NodeAudit> audit;  // one entry per nice node, by node index

  std::size_t max_states() const {
    std::size_t m = 0;
    for (const auto& a : audit) m = std::max(m, a.states);
    return m;
  }
};

namespace detail {

inline long double factorial(std::size_t p) {
  long double f = 1;
  for (std::size_t k = 2; k <= p; ++k) f *= static_cast<long double>(k);
  return f;
}

/// All permutations of 0..p-1 in lexicographic order, with their inverses.
struct PermutationTable {
  std::size_t ply = 0;
  std::vector<std::string> orders;     // bytes are local indices, bottom to top
  std::vector<std::string> positions;  // inverse permutations

  explicit PermutationTable(std::size_t p) : ply(p) {
    std::string perm(p, '\0');
    std::iota(perm.begin(), perm.end(), '\0');
    do {
      std::string inv(p, '\0');
      for (std::size_t h = 0; h < p; ++h) inv[static_cast<unsigned char>(perm[h])] = static_cast<char>(h);
      orders.push_back(perm);
      positions.push_back(std::move(inv));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
};

/// Valid states of one bag. A state is the concatenation, over bag cells in id
/// order, of each cell's bottom-to-top order of local layer indices.
struct StateTable {
  std::vector<CellId> bag;
  std::vector<std::size_t> offset;  // byte offset of each bag cell's block
  std::vector<std::size_t> ply;
  std::unordered_map<std::string, std::uint32_t> index;
  std::vector<const std::string*> states;  // insertion order
  std::vector<std::uint32_t> pred;         // forget nodes: child state index

  void set_bag(const std::vector<CellId>& cells, const Arrangement& arr) {
    bag = cells;
    offset.clear();
    ply.clear();
    std::size_t off = 0;
    for (auto c : bag) {
      offset.push_back(off);
      ply.push_back(arr.cells[c].ply());
      off += arr.cells[c].ply();
    }
  }
  std::size_t block(CellId c) const {
    return static_cast<std::size_t>(std::lower_bound(bag.begin(), bag.end(), c) - bag.begin());
  }
  bool insert(std::string s, std::uint32_t predecessor = 0) {
    auto [it, fresh] = index.emplace(std::move(s), static_cast<std::uint32_t>(states.size()));
    if (!fresh) return false;
    states.push_back(&it->first);
    pred.push_back(predecessor);
    return true;
  }
  std::size_t size() const { return states.size(); }
};

class DpRunner {
 public:
  DpRunner(const Arrangement& arr, const CellGraph& graph, const NiceTreeDecomposition& ntd, DpOptions opt)
      : arr_(arr), graph_(graph), ntd_(ntd), opt_(opt), tables_(ntd.nodes.size()) {
    for (const auto& c : arr.cells) {
      if (!perms_.count(c.ply())) perms_.emplace(c.ply(), PermutationTable(c.ply()));
    }
    // One-cell conditions do not depend on any neighbour, so each cell's
    // permutations are filtered by them once, up front.
    std::vector<std::vector<std::pair<const ArrEdge*, bool>>> incident(arr.cells.size());
    for (const auto& e : arr.edges) {
      incident[e.cell_a].push_back({&e, true});
      incident[e.cell_b].push_back({&e, false});
    }
    candidates_.resize(arr.cells.size());
    for (const auto& c : arr.cells) {
      const PermutationTable& table = perms_.at(c.ply());
      for (std::uint32_t pi = 0; pi < table.orders.size(); ++pi) {
        const auto* pos = reinterpret_cast<const LocalIndex*>(table.positions[pi].data());
        bool ok = true;
        for (const auto& [e, side_a] : incident[c.id]) {
          if (!fold_side_uncrossed(*e, side_a, pos, opt.mode)) {
            ok = false;
            break;
          }
        }
        if (ok) candidates_[c.id].push_back(pi);
      }
    }
    spare_threads_ = static_cast<int>(opt.threads > 1 ? opt.threads - 1 : 0);
  }

  DpResult run() {
    DpResult result;
    if (ntd_.nodes.empty()) throw InternalError("empty tree decomposition");
    compute_subtree(ntd_.root);
    for (std::size_t i = 0; i < ntd_.nodes.size(); ++i) {
      const auto& t = tables_[i];
      NodeAudit a{i, t.bag.size(), 0, t.size(), 0};
      for (auto p : t.ply) a.max_ply = std::max(a.max_ply, p);
      a.bound = std::pow(factorial(a.max_ply), static_cast<long double>(a.bag_size));
      result.audit.push_back(a);
    }
    const StateTable& root = tables_[ntd_.root];
    result.feasible = root.size() > 0;
    if (result.feasible) result.witness = extract_witness();
    return result;
  }

 private:
  void compute_subtree(std::size_t node) {
    std::vector<std::size_t> chain;
    std::size_t cur = node;
    while (ntd_.nodes[cur].children.size() == 1) {
      chain.push_back(cur);
      cur = ntd_.nodes[cur].children[0];
    }
    chain.push_back(cur);
    const NiceNode& bottom = ntd_.nodes[cur];
    if (bottom.kind == NiceKind::Join) {
      std::size_t left = bottom.children[0], right = bottom.children[1];
      int avail = spare_threads_.load();
      bool spawn = false;
      while (avail > 0 && !(spawn = spare_threads_.compare_exchange_weak(avail, avail - 1))) {
      }
      if (spawn) {
        auto fut = std::async(std::launch::async, [this, left] { compute_subtree(left); });
        try {
          compute_subtree(right);
        } catch (...) {
          fut.wait();
          spare_threads_.fetch_add(1);
          throw;
        }
        fut.get();
        spare_threads_.fetch_add(1);
      } else {
        compute_subtree(left);
        compute_subtree(right);
      }
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) evaluate(*it);
  }

  void evaluate(std::size_t i) {
    const NiceNode& nd = ntd_.nodes[i];
    StateTable& t = tables_[i];
    t.set_bag(nd.bag, arr_);
    switch (nd.kind) {
      case NiceKind::Leaf: {
        const PermutationTable& table = perms_.at(arr_.cells[nd.vertex].ply());
        for (auto pi : candidates_[nd.vertex]) t.insert(table.orders[pi]);
        break;
      }
      case NiceKind::Introduce: introduce(nd, t, tables_[nd.children[0]]); break;
      case NiceKind::Forget: forget(nd, t, tables_[nd.children[0]]); break;
      case NiceKind::Join: {
        const StateTable& l = tables_[nd.children[0]];
        const StateTable& r = tables_[nd.children[1]];
        const StateTable& small = l.size() <= r.size() ? l : r;
        const StateTable& large = l.size() <= r.size() ? r : l;
        for (const std::string* s : small.states) {
          if (large.index.count(*s)) t.insert(*s);
        }
        break;
      }
    }
  }

  struct NeighbourCheck {
    std::size_t block;            // block index in the new bag
    std::vector<const ArrEdge*> edges;
  };

  void introduce(const NiceNode& nd, StateTable& t, const StateTable& child) {
    const CellId c = nd.vertex;
    const std::size_t cb = t.block(c);
    const std::size_t coff = t.offset[cb];
    const PermutationTable& cperms = perms_.at(arr_.cells[c].ply());

    // Every cell-graph edge from c into the bag is checked here, the first
    // node on this path whose bag holds both ends.
    std::vector<NeighbourCheck> checks;
    for (std::size_t k = 0; k < t.bag.size(); ++k) {
      if (t.bag[k] == c) continue;
      const CellGraphEdge* ge = graph_.between(c, t.bag[k]);
      if (!ge) continue;
      NeighbourCheck nc{k, {}};
      for (auto eid : ge->arr_edges) nc.edges.push_back(&arr_.edges[eid]);
      checks.push_back(std::move(nc));
    }

    std::vector<std::string> neighbour_pos(checks.size());
    for (std::uint32_t si = 0; si < child.size(); ++si) {
      const std::string& s = *child.states[si];
      // Child blocks before c keep their offsets; later ones shift by ply(c).
      for (std::size_t k = 0; k < checks.size(); ++k) {
        std::size_t blk = checks[k].block;
        std::size_t off = t.offset[blk] - (blk > cb ? cperms.ply : 0);
        std::size_t p = t.ply[blk];
        std::string& pos = neighbour_pos[k];
        pos.assign(p, '\0');
        for (std::size_t h = 0; h < p; ++h) pos[static_cast<unsigned char>(s[off + h])] = static_cast<char>(h);
      }
      for (auto pi : candidates_[c]) {
        const auto* cpos = reinterpret_cast<const LocalIndex*>(cperms.positions[pi].data());
        bool ok = true;
        for (std::size_t k = 0; k < checks.size() && ok; ++k) {
          const auto* npos = reinterpret_cast<const LocalIndex*>(neighbour_pos[k].data());
          for (const ArrEdge* e : checks[k].edges) {
            // Both cells already satisfy their one-cell conditions.
            bool good = e->cell_a == c ? spans_uncrossed(*e, cpos, npos) : spans_uncrossed(*e, npos, cpos);
            if (!good) {
              ok = false;
              break;
            }
          }
        }
        if (!ok) continue;
        std::string next;
        next.reserve(s.size() + cperms.ply);
        next.append(s, 0, coff);
        next.append(cperms.orders[pi]);
        next.append(s, coff, std::string::npos);
        t.insert(std::move(next), si);
      }
    }
  }

  void forget(const NiceNode& nd, StateTable& t, const StateTable& child) {
    std::size_t blk = child.block(nd.vertex);
    std::size_t off = child.offset[blk];
    std::size_t p = child.ply[blk];
    for (std::uint32_t si = 0; si < child.size(); ++si) {
      std::string s = *child.states[si];
      s.erase(off, p);
      t.insert(std::move(s), si);
    }
  }

  GlobalLayering extract_witness() const {
    std::vector<std::optional<std::string>> cell_order(arr_.cells.size());
    std::vector<std::optional<std::string>> assigned(ntd_.nodes.size());
    const StateTable& root = tables_[ntd_.root];
    assigned[ntd_.root] = **std::min_element(root.states.begin(), root.states.end(),
                                              [](const std::string* a, const std::string* b) { return *a < *b; });
    for (std::size_t i = ntd_.nodes.size(); i-- > 0;) {
      if (!assigned[i]) continue;
      const NiceNode& nd = ntd_.nodes[i];
      const StateTable& t = tables_[i];
      const std::string& s = *assigned[i];
      for (std::size_t k = 0; k < t.bag.size(); ++k) {
        std::string block = s.substr(t.offset[k], t.ply[k]);
        auto& slot = cell_order[t.bag[k]];
        if (slot && *slot != block) throw InternalError("witness states disagree on a cell");
        slot = block;
      }
      switch (nd.kind) {
        case NiceKind::Leaf: break;
        case NiceKind::Introduce: {
          std::size_t blk = t.block(nd.vertex);
          std::string child = s;
          child.erase(t.offset[blk], t.ply[blk]);
          assigned[nd.children[0]] = std::move(child);
          break;
        }
        case NiceKind::Forget: {
          const StateTable& ct = tables_[nd.children[0]];
          assigned[nd.children[0]] = *ct.states[t.pred[t.index.at(s)]];
          break;
        }
        case NiceKind::Join:
          assigned[nd.children[0]] = s;
          assigned[nd.children[1]] = s;
          break;
      }
    }
    GlobalLayering g = identity_layering(arr_);
    for (CellId c = 0; c < arr_.cells.size(); ++c) {
      if (!cell_order[c]) continue;
      g.orders[c].clear();
      for (char local : *cell_order[c]) g.orders[c].push_back(arr_.cells[c].layers[static_cast<unsigned char>(local)]);
    }
    return g;
  }

  const Arrangement& arr_;
  const CellGraph& graph_;
  const NiceTreeDecomposition& ntd_;
  DpOptions opt_;
  std::map<std::size_t, PermutationTable> perms_;
  std::vector<std::vector<std::uint32_t>> candidates_;  // per cell: permutation indices passing one-cell checks
  std::vector<StateTable> tables_;
  std::atomic<int> spare_threads_{0};
};

}  // namespace detail

/// Bottom-up dynamic program over a nice tree decomposition of the cell graph.
/// On success the witness has been re-checked against every arrangement edge.
inline DpResult dp_solve(const Arrangement& arr, const CellGraph& graph, const NiceTreeDecomposition& ntd,
                         DpOptions opt = {}) {
  for (const auto& e : arr.edges) {
    if (!e.classified) throw std::invalid_argument("arrangement edges must be classified before solving");
  }
  DpResult result = detail::DpRunner(arr, graph, ntd, opt).run();
  if (result.witness) {
    if (auto bad = first_crossed_edge(arr, *result.witness, opt.mode)) {
      throw InternalError("witness layering is crossed at arrangement edge " + std::to_string(*bad));
    }
  }
  return result;
}

inline DpResult dp_solve(const Arrangement& arr, const CellGraph& graph, const NiceTreeDecomposition& ntd,
                         FoldMode mode) {
  return dp_solve(arr, graph, ntd, DpOptions{mode, 1});
}

struct AuditSummary {
  std::size_t max_states = 0;
  long double max_ratio = 0;  // max over nodes of states / (p!)^bag_size
};

/// Confirms every node's state count is within (p!)^|bag|.
inline AuditSummary state_count_audit(const DpResult& r) {
  AuditSummary s;
  for (const auto& a : r.audit) {
    if (static_cast<long double>(a.states) > a.bound) {
      throw InternalError("node " + std::to_string(a.node) + " holds " + std::to_string(a.states) +
                          " states, above its bound");
    }
    s.max_states = std::max(s.max_states, a.states);
    s.max_ratio = std::max(s.max_ratio, static_cast<long double>(a.states) / a.bound);
  }
  return s;
}

class OracleBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleResult {
  bool feasible = false;
  std::optional<GlobalLayering> witness;
};

inline constexpr std::uint64_t kDefaultOracleBudget = 10'000'000;

/// Number of global layerings (product of ply! over all cells).
inline long double layering_count(const Arrangement& arr) {
  long double total = 1;
  for (const auto& c : arr.cells) total *= detail::factorial(c.ply());
  return total;
}

/// Searches all combinations of per-cell layerings, cells in id order and each
/// cell's permutations in lexicographic order, abandoning a partial choice as
/// soon as an edge between two chosen cells is crossed. Returns the
/// lexicographically least uncrossed layering. `budget` caps the number of
/// cell permutations tried.
inline OracleResult oracle_solve(const Arrangement& arr, FoldMode mode,
                                 std::uint64_t budget = kDefaultOracleBudget) {
  const std::size_t n = arr.cells.size();
  // Edges become checkable once their higher-id cell is chosen.
  std::vector<std::vector<const ArrEdge*>> due(n);
  for (const auto& e : arr.edges) due[std::max(e.cell_a, e.cell_b)].push_back(&e);

  std::vector<std::vector<LocalIndex>> pos(n);
  std::uint64_t tried = 0;
  auto edges_ok = [&](CellId c) {
    if (++tried > budget) {
      throw OracleBudgetExceeded("oracle budget exceeded: more than " + std::to_string(budget) +
                                 " permutations tried");
    }
    for (const ArrEdge* e : due[c]) {
      if (!detail::edge_uncrossed(*e, pos[e->cell_a].data(), pos[e->cell_b].data(), mode)) return false;
    }
    return true;
  };
  // Explicit odometer over cells to keep the recursion depth flat.
  std::vector<std::vector<LocalIndex>> perm(n);
  std::vector<bool> started(n, false);
  std::size_t c = 0;
  while (c < n) {
    auto& p = perm[c];
    bool have = false;
    if (!started[c]) {
      p.resize(arr.cells[c].ply());
      std::iota(p.begin(), p.end(), LocalIndex{0});
      started[c] = true;
      have = true;
    } else {
      have = std::next_permutation(p.begin(), p.end());
    }
    bool advanced = false;
    while (have) {
      pos[c].assign(p.size(), 0);
      for (std::size_t h = 0; h < p.size(); ++h) pos[c][p[h]] = static_cast<LocalIndex>(h);
      if (edges_ok(c)) {
        advanced = true;
        break;
      }
      have = std::next_permutation(p.begin(), p.end());
    }
    if (advanced) {
      ++c;
      continue;
    }
    started[c] = false;
    if (c == 0) return {};
    --c;
  }
  GlobalLayering g;
  g.orders.resize(n);
  for (CellId k = 0; k < n; ++k) {
    for (auto local : perm[k]) g.orders[k].push_back(arr.cells[k].layers[local]);
  }
  return {true, g};
}

inline nlohmann::ordered_json witness_to_json(bool foldable, const std::optional<GlobalLayering>& g) {
  nlohmann::ordered_json j;
  j["foldable"] = foldable;
  nlohmann::ordered_json cells = nlohmann::ordered_json::object();
  if (g) {
    for (std::size_t c = 0; c < g->orders.size(); ++c) {
      nlohmann::ordered_json order = nlohmann::ordered_json::array();
      for (auto f : g->orders[c]) order.push_back(std::to_string(f));
      cells[std::to_string(c)] = std::move(order);
    }
  }
  j["cells"] = std::move(cells);
  return j;
}

}  // namespace foldcheck

#endif  // FOLDCHECK_FOLD_DP_HPP
