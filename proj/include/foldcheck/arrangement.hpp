#ifndef FOLDCHECK_ARRANGEMENT_HPP
#define FOLDCHECK_ARRANGEMENT_HPP

#include "foldcheck/crease_pattern.hpp"
#include "foldcheck/geometry.hpp"
#include "foldcheck/local_fold.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace foldcheck {

using CellId = std::size_t;
using EdgeId = std::size_t;
/// Position of a face within a cell's id-sorted layer list.
using LocalIndex = std::uint8_t;

inline constexpr CellId kOuterCell = 0;
inline constexpr std::size_t kMaxPly = 127;

struct Cell {
  CellId id = 0;
  std::vector<Point> boundary;   // counterclockwise; empty for the outer cell
  std::vector<FaceId> layers;    // sorted by face id
  std::optional<Point> sample;   // strictly interior point (bounded cells)
  Rat area = 0;                  // zero for the outer cell

  std::size_t ply() const { return layers.size(); }
  bool is_outer() const { return id == kOuterCell; }
  std::optional<LocalIndex> local_index(FaceId f) const {
    auto it = std::lower_bound(layers.begin(), layers.end(), f);
    if (it == layers.end() || *it != f) return std::nullopt;
    return static_cast<LocalIndex>(it - layers.begin());
  }
};

enum class LayerRole { Span, CreasePair, BoundaryEnd };

inline const char* to_string(LayerRole r) {
  switch (r) {
    case LayerRole::Span: return "span";
    case LayerRole::CreasePair: return "crease";
    case LayerRole::BoundaryEnd: return "boundary";
  }
  return "?";
}

/// How one layer of an incident cell meets an arrangement edge.
struct LayerClass {
  FaceId face = 0;
  LayerRole role = LayerRole::BoundaryEnd;
  FaceId partner = 0;                 // same face across the edge (Span) or fold partner (CreasePair)
  std::optional<CreaseId> crease;     // CreasePair only
  Label label = Label::Unassigned;    // CreasePair only
};

/// A crease folding at an edge, as local indices of its two layers in one cell.
/// `plus` is the layer whose map preserves orientation.
struct FoldPair {
  LocalIndex plus = 0;
  LocalIndex minus = 0;
  Label label = Label::Unassigned;
  CreaseId crease = 0;
};

struct ArrEdge {
  EdgeId id = 0;
  Segment carrier;
  CellId cell_a = 0;  // left of carrier.a() -> carrier.b()
  CellId cell_b = 0;  // right
  std::vector<LayerClass> side_a;  // one entry per layer of cell_a, in layer order
  std::vector<LayerClass> side_b;
  // Compiled form used by the layering checks.
  std::vector<std::pair<LocalIndex, LocalIndex>> spans;  // (index in cell_a, index in cell_b)
  std::vector<FoldPair> folds_a;
  std::vector<FoldPair> folds_b;
  bool classified = false;
};

struct Arrangement {
  std::vector<Point> vertices;
  std::vector<Cell> cells;    // cells[0] is the unbounded outer cell
  std::vector<ArrEdge> edges;

  std::size_t max_ply() const {
    std::size_t p = 0;
    for (const auto& c : cells) p = std::max(p, c.ply());
    return p;
  }
};

namespace detail {

/// Smallest t > 0 with origin + t * dir on s, if any.
inline std::optional<Rat> ray_hit(const Point& origin, const Point& dir, const Segment& s) {
  Point e = s.direction();
  Rat denom = cross(dir, e);
  Point w = s.a() - origin;
  if (denom != 0) {
    Rat t = cross(w, e) / denom;
    Rat u = cross(w, dir) / denom;
    if (t > 0 && u >= 0 && u <= 1) return t;
    return std::nullopt;
  }
  if (cross(w, dir) != 0) return std::nullopt;
  Rat nn = dot(dir, dir);
  Rat ta = dot(s.a() - origin, dir) / nn;
  Rat tb = dot(s.b() - origin, dir) / nn;
  std::optional<Rat> best;
  for (const Rat& t : {ta, tb}) {
    if (t > 0 && (!best || t < *best)) best = t;
  }
  return best;
}

}  // namespace detail

/// Overlays all face images. Every image side (and crease image) is split at
/// every intersection with the others; the resulting planar subdivision is walked
/// to obtain cells, and each bounded cell's layers are read off by exact
/// point-in-image tests at one interior point. Edges are left unclassified.
inline Arrangement build_arrangement(const LocalFlatFolding& lff) {
  std::set<std::pair<Point, Point>> seg_keys;
  for (const auto& img : lff.images) {
    for (std::size_t i = 0; i < img.size(); ++i) {
      Segment s = img.side(i).canonical();
      seg_keys.insert({s.a(), s.b()});
    }
  }
  for (const auto& ci : crease_images(lff)) {
    Segment s = ci.image.canonical();
    seg_keys.insert({s.a(), s.b()});
  }
  std::vector<Segment> segs;
  for (const auto& [a, b] : seg_keys) segs.emplace_back(a, b);

  std::set<std::pair<Point, Point>> pieces;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    std::vector<Point> cuts{segs[i].a(), segs[i].b()};
    for (std::size_t j = 0; j < segs.size(); ++j) {
      if (i == j) continue;
      auto hit = segment_intersection(segs[i], segs[j]);
      if (hit.kind == Intersection::Kind::Point) {
        cuts.push_back(hit.p);
      } else if (hit.kind == Intersection::Kind::Subsegment) {
        cuts.push_back(hit.p);
        cuts.push_back(hit.q);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) pieces.insert({cuts[k], cuts[k + 1]});
  }

  Arrangement arr;
  std::map<Point, std::size_t> vindex;
  for (const auto& [a, b] : pieces) {
    vindex.emplace(a, 0);
    vindex.emplace(b, 0);
  }
  for (auto& [p, idx] : vindex) {
    idx = arr.vertices.size();
    arr.vertices.push_back(p);
  }
  std::vector<std::array<std::size_t, 2>> edge_ends;
  for (const auto& [a, b] : pieces) edge_ends.push_back({vindex.at(a), vindex.at(b)});

  detail::HalfEdgeGraph heg(arr.vertices, edge_ends);
  std::vector<std::vector<std::size_t>> bounded;
  std::optional<std::size_t> outer_cycle;
  auto cycles = heg.cycles();
  std::vector<std::vector<Point>> cycle_points(cycles.size());
  for (std::size_t k = 0; k < cycles.size(); ++k) {
    for (auto h : cycles[k]) cycle_points[k].push_back(arr.vertices[heg.from[h]]);
    Rat a2 = twice_signed_area(cycle_points[k]);
    if (a2 > 0) continue;
    if (a2 == 0 || outer_cycle) throw InternalError("arrangement subdivision is not connected");
    outer_cycle = k;
  }
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < cycles.size(); ++k) {
    if (k != outer_cycle) order.push_back(k);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return detail::cycle_less(cycle_points[x], cycle_points[y]);
  });

  std::vector<CellId> cell_of_halfedge(heg.from.size(), kOuterCell);
  arr.cells.push_back(Cell{kOuterCell, {}, {}, std::nullopt, 0});
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    std::size_t k = order[rank];
    CellId id = rank + 1;
    auto hs = cycles[k];
    auto pts = cycle_points[k];
    std::size_t start = detail::min_vertex_position(pts);
    std::rotate(hs.begin(), hs.begin() + static_cast<std::ptrdiff_t>(start), hs.end());
    std::rotate(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(start), pts.end());
    for (auto h : hs) cell_of_halfedge[h] = id;

    // Interior sample: walk inward from the first side's midpoint, halfway
    // to the nearest arrangement edge.
    const Point& p = arr.vertices[heg.from[hs[0]]];
    const Point& q = arr.vertices[heg.to[hs[0]]];
    Point mid = midpoint(p, q);
    Point inward{-(q.y - p.y), q.x - p.x};
    std::optional<Rat> best;
    for (const auto& [a, b] : pieces) {
      auto t = detail::ray_hit(mid, inward, Segment(a, b));
      if (t && (!best || *t < *best)) best = t;
    }
    if (!best) throw InternalError("bounded cell without an opposite side");
    Point sample = mid + (*best / 2) * inward;

    Cell cell{id, pts, {}, sample, twice_signed_area(pts) / 2};
    for (FaceId f = 0; f < lff.images.size(); ++f) {
      Location loc = point_in_polygon(sample, lff.images[f]);
      if (loc == Location::Boundary) throw InternalError("cell sample lies on a face image boundary");
      if (loc == Location::Inside) cell.layers.push_back(f);
    }
    if (cell.layers.size() > kMaxPly) throw InputError("cell ply " + std::to_string(cell.layers.size()) + " exceeds the supported maximum of 127");
    arr.cells.push_back(std::move(cell));
  }

  for (std::size_t e = 0; e < edge_ends.size(); ++e) {
    ArrEdge edge{e, Segment(arr.vertices[edge_ends[e][0]], arr.vertices[edge_ends[e][1]]),
                 cell_of_halfedge[2 * e], cell_of_halfedge[2 * e + 1], {}, {}, {}, {}, {}, false};
    if (edge.cell_a == edge.cell_b) throw InternalError("arrangement edge with the same cell on both sides");
    arr.edges.push_back(std::move(edge));
  }
  return arr;
}

/// Labels every layer of both incident cells of every edge as Span, CreasePair
/// or BoundaryEnd, and compiles the per-edge constraint lists.
inline void classify_edges(Arrangement& arr, const LocalFlatFolding& lff) {
  const auto& cp = lff.pattern;
  auto boundary_side = [&](FaceId f, const Segment& s) -> const FaceSide& {
    const Polygon& img = lff.images[f];
    const FaceSide* found = nullptr;
    for (std::size_t i = 0; i < img.size(); ++i) {
      if (segment_contains(img.side(i), s)) {
        if (found) throw InternalError("two sides of face " + std::to_string(f) + " contain one edge");
        found = &cp.faces[f].sides[i];
      }
    }
    if (!found) {
      throw InternalError("face " + std::to_string(f) + " ends at an edge that is not on its boundary");
    }
    return *found;
  };

  for (auto& e : arr.edges) {
    const Cell& ca = arr.cells[e.cell_a];
    const Cell& cb = arr.cells[e.cell_b];
    e.side_a.clear();
    e.side_b.clear();
    e.spans.clear();
    e.folds_a.clear();
    e.folds_b.clear();
    auto classify_side = [&](const Cell& here, const Cell& there, std::vector<LayerClass>& side,
                             std::vector<FoldPair>& folds) {
      for (FaceId f : here.layers) {
        LayerClass lc{f, LayerRole::BoundaryEnd, f, std::nullopt, Label::Unassigned};
        if (there.local_index(f)) {
          lc.role = LayerRole::Span;
          for (std::size_t i = 0; i < lff.images[f].size(); ++i) {
            if (segment_contains(lff.images[f].side(i), e.carrier)) {
              throw InternalError("face " + std::to_string(f) + " spans an edge on its own boundary");
            }
          }
        } else {
          const FaceSide& fs = boundary_side(f, e.carrier);
          if (fs.crease) {
            const Crease& c = cp.creases[*fs.crease];
            FaceId g = c.other_face(f);
            if (!here.local_index(g)) {
              throw InternalError("fold partner of face " + std::to_string(f) + " missing from cell " +
                                  std::to_string(here.id));
            }
            if (lff.face_sign(f) == lff.face_sign(g)) {
              throw InternalError("crease " + std::to_string(c.id) + " joins faces of equal orientation");
            }
            lc.role = LayerRole::CreasePair;
            lc.partner = g;
            lc.crease = c.id;
            lc.label = c.label;
            if (f < g) {
              FaceId plus = lff.face_sign(f) > 0 ? f : g;
              FaceId minus = plus == f ? g : f;
              folds.push_back({*here.local_index(plus), *here.local_index(minus), c.label, c.id});
            }
          }
        }
        side.push_back(lc);
      }
    };
    classify_side(ca, cb, e.side_a, e.folds_a);
    classify_side(cb, ca, e.side_b, e.folds_b);
    for (const auto& lc : e.side_a) {
      if (lc.role == LayerRole::Span) e.spans.push_back({*ca.local_index(lc.face), *cb.local_index(lc.face)});
    }
    e.classified = true;
  }
}

struct CellGraphEdge {
  CellId u = 0;  // u < v
  CellId v = 0;
  std::vector<EdgeId> arr_edges;
};

/// Dual graph of the arrangement, including the outer cell.
struct CellGraph {
  std::size_t num_cells = 0;
  std::vector<CellGraphEdge> edges;                                    // sorted by (u, v)
  std::vector<std::vector<std::pair<CellId, std::size_t>>> adjacency;  // (neighbour, index into edges)

  const CellGraphEdge* between(CellId a, CellId b) const {
    for (const auto& [n, idx] : adjacency[a]) {
      if (n == b) return &edges[idx];
    }
    return nullptr;
  }
};

inline CellGraph cell_graph(const Arrangement& arr) {
  std::map<std::pair<CellId, CellId>, std::vector<EdgeId>> grouped;
  for (const auto& e : arr.edges) {
    grouped[{std::min(e.cell_a, e.cell_b), std::max(e.cell_a, e.cell_b)}].push_back(e.id);
  }
  CellGraph g;
  g.num_cells = arr.cells.size();
  g.adjacency.resize(g.num_cells);
  for (auto& [key, ids] : grouped) {
    std::size_t idx = g.edges.size();
    g.edges.push_back({key.first, key.second, std::move(ids)});
    g.adjacency[key.first].push_back({key.second, idx});
    g.adjacency[key.second].push_back({key.first, idx});
  }
  return g;
}

inline nlohmann::ordered_json point_json(const Point& p) {
  return nlohmann::ordered_json::array({format_rat(p.x), format_rat(p.y)});
}

/// Debug dump of cells and classified edges. Coordinates are exact strings.
inline nlohmann::ordered_json arrangement_to_json(const Arrangement& arr, const LocalFlatFolding& lff) {
  using oj = nlohmann::ordered_json;
  oj out;
  out["max_ply"] = arr.max_ply();
  oj cells = oj::array();
  for (const auto& c : arr.cells) {
    oj jc;
    jc["id"] = c.id;
    jc["outer"] = c.is_outer();
    jc["ply"] = c.ply();
    jc["layers"] = c.layers;
    oj boundary = oj::array();
    for (const auto& p : c.boundary) boundary.push_back(point_json(p));
    jc["boundary"] = std::move(boundary);
    cells.push_back(std::move(jc));
  }
  out["cells"] = std::move(cells);
  oj edges = oj::array();
  for (const auto& e : arr.edges) {
    oj je;
    je["id"] = e.id;
    je["from"] = point_json(e.carrier.a());
    je["to"] = point_json(e.carrier.b());
    je["cell_a"] = e.cell_a;
    je["cell_b"] = e.cell_b;
    auto side = [](const std::vector<LayerClass>& s) {
      oj arr_side = oj::array();
      for (const auto& lc : s) {
        oj l;
        l["face"] = lc.face;
        l["role"] = to_string(lc.role);
        if (lc.role == LayerRole::CreasePair) {
          l["partner"] = lc.partner;
          l["crease"] = *lc.crease;
          l["label"] = std::string(1, to_char(lc.label));
        }
        arr_side.push_back(std::move(l));
      }
      return arr_side;
    };
    je["side_a"] = side(e.side_a);
    je["side_b"] = side(e.side_b);
    edges.push_back(std::move(je));
  }
  out["edges"] = std::move(edges);
  oj creases = oj::array();
  for (const auto& ci : crease_images(lff)) {
    oj jc;
    jc["crease"] = ci.crease;
    jc["label"] = std::string(1, to_char(ci.label));
    jc["from"] = point_json(ci.image.a());
    jc["to"] = point_json(ci.image.b());
    creases.push_back(std::move(jc));
  }
  out["crease_images"] = std::move(creases);
  return out;
}

}  // namespace foldcheck

#endif  // FOLDCHECK_ARRANGEMENT_HPP
