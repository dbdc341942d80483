#ifndef FOLDCHECK_CREASE_PATTERN_HPP
#define FOLDCHECK_CREASE_PATTERN_HPP

#include "foldcheck/geometry.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace foldcheck {

using FaceId = std::size_t;
using CreaseId = std::size_t;

/// Malformed or structurally invalid crease-pattern input.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Assignment : char { Mountain = 'M', Valley = 'V', Unassigned = 'U', Boundary = 'B' };
enum class Label : char { Mountain = 'M', Valley = 'V', Unassigned = 'U' };

inline char to_char(Label l) { return static_cast<char>(l); }
inline Label flipped(Label l) {
  if (l == Label::Mountain) return Label::Valley;
  if (l == Label::Valley) return Label::Mountain;
  return l;
}

struct CreaseInput {
  std::vector<Point> vertices;
  std::vector<std::array<std::size_t, 2>> edges;
  std::vector<Assignment> assignments;
  std::optional<std::vector<std::vector<std::size_t>>> faces;
};

namespace detail {

// SAX adapter that keeps the source text of every non-integer number so that
// coordinates such as 0.1 can be read exactly instead of through a double.
class ExactNumberSax {
 public:
  using json = nlohmann::json;
  explicit ExactNumberSax(json& root) : dom_(root, true) {}

  bool null() { return dom_.null(); }
  bool boolean(bool v) { return dom_.boolean(v); }
  bool number_integer(json::number_integer_t v) { return dom_.number_integer(v); }
  bool number_unsigned(json::number_unsigned_t v) { return dom_.number_unsigned(v); }
  bool number_float(json::number_float_t, const json::string_t& text) {
    json::string_t copy = text;
    return dom_.string(copy);
  }
  bool string(json::string_t& v) { return dom_.string(v); }
  bool binary(json::binary_t& v) { return dom_.binary(v); }
  bool start_object(std::size_t n) { return dom_.start_object(n); }
  bool key(json::string_t& k) { return dom_.key(k); }
  bool end_object() { return dom_.end_object(); }
  bool start_array(std::size_t n) { return dom_.start_array(n); }
  bool end_array() { return dom_.end_array(); }
  bool parse_error(std::size_t pos, const std::string& token, const nlohmann::detail::exception& ex) {
    return dom_.parse_error(pos, token, ex);
  }

 private:
  nlohmann::detail::json_sax_dom_parser<json> dom_;
};

inline Rat coordinate_from_json(const nlohmann::json& v, const std::string& where) {
  if (v.is_number_integer()) {
    return v.is_number_unsigned() ? Rat(v.get<unsigned long long>()) : Rat(v.get<long long>());
  }
  if (v.is_string()) {
    try {
      return parse_rat(v.get<std::string>());
    } catch (const GeometryError&) {
      throw InputError(where + ": not an exact number: " + v.get<std::string>());
    }
  }
  throw InputError(where + ": expected a number or decimal string");
}

inline std::size_t index_from_json(const nlohmann::json& v, std::size_t limit, const std::string& where) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
    throw InputError(where + ": expected a vertex index");
  }
  auto idx = v.get<unsigned long long>();
  if (idx >= limit) {
    throw InputError(where + ": index out of range (" + std::to_string(idx) + " >= " + std::to_string(limit) + ")");
  }
  return static_cast<std::size_t>(idx);
}

}  // namespace detail

/// Reads the FOLD subset: vertices_coords, edges_vertices, edges_assignment and
/// optionally faces_vertices.
inline CreaseInput parse_fold(std::string_view text) {
  using nlohmann::json;
  json root;
  detail::ExactNumberSax sax(root);
  try {
    json::sax_parse(text.begin(), text.end(), &sax);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw InputError("malformed JSON: top level must be an object");

  auto require_array = [&](const char* key) -> const json& {
    auto it = root.find(key);
    if (it == root.end()) throw InputError(std::string("missing key '") + key + "'");
    if (!it->is_array()) throw InputError(std::string("key '") + key + "' must be an array");
    return *it;
  };

  CreaseInput ci;
  const json& coords = require_array("vertices_coords");
  for (std::size_t i = 0; i < coords.size(); ++i) {
    std::string where = "vertices_coords[" + std::to_string(i) + "]";
    const json& c = coords[i];
    if (!c.is_array() || c.size() != 2) throw InputError(where + ": expected [x, y]");
    ci.vertices.push_back({detail::coordinate_from_json(c[0], where), detail::coordinate_from_json(c[1], where)});
  }

  const json& edges = require_array("edges_vertices");
  const json& assignment = require_array("edges_assignment");
  if (edges.size() != assignment.size()) {
    throw InputError("edges_assignment has " + std::to_string(assignment.size()) + " entries for " +
                     std::to_string(edges.size()) + " edges");
  }
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    std::string where = "edges_vertices[" + std::to_string(i) + "]";
    const json& e = edges[i];
    if (!e.is_array() || e.size() != 2) throw InputError(where + ": expected [i, j]");
    std::size_t a = detail::index_from_json(e[0], ci.vertices.size(), where);
    std::size_t b = detail::index_from_json(e[1], ci.vertices.size(), where);
    if (a == b) throw InputError(where + ": edge joins a vertex to itself");
    if (!seen.insert({std::min(a, b), std::max(a, b)}).second) throw InputError(where + ": repeated edge");
    ci.edges.push_back({a, b});

    std::string awhere = "edges_assignment[" + std::to_string(i) + "]";
    if (!assignment[i].is_string()) throw InputError(awhere + ": expected a string");
    const auto& letter = assignment[i].get_ref<const std::string&>();
    if (letter == "M") ci.assignments.push_back(Assignment::Mountain);
    else if (letter == "V") ci.assignments.push_back(Assignment::Valley);
    else if (letter == "U") ci.assignments.push_back(Assignment::Unassigned);
    else if (letter == "B") ci.assignments.push_back(Assignment::Boundary);
    else if (letter == "F") throw InputError(awhere + ": flat (F) edges are not creases; remove them from the pattern");
    else throw InputError(awhere + ": unknown assignment '" + letter + "'");
  }

  if (auto it = root.find("faces_vertices"); it != root.end()) {
    if (!it->is_array()) throw InputError("key 'faces_vertices' must be an array");
    std::vector<std::vector<std::size_t>> faces;
    for (std::size_t i = 0; i < it->size(); ++i) {
      std::string where = "faces_vertices[" + std::to_string(i) + "]";
      const json& f = (*it)[i];
      if (!f.is_array() || f.size() < 3) throw InputError(where + ": expected a vertex cycle");
      std::vector<std::size_t> cycle;
      for (const auto& v : f) cycle.push_back(detail::index_from_json(v, ci.vertices.size(), where));
      faces.push_back(std::move(cycle));
    }
    ci.faces = std::move(faces);
  }
  return ci;
}

/// Serializes to the same FOLD subset. Integers are written as numbers,
/// other coordinates as exact strings.
inline std::string to_fold_json(const CreaseInput& ci) {
  nlohmann::ordered_json j;
  j["file_spec"] = 1.1;
  j["file_creator"] = "foldcheck";
  auto coord = [](const Rat& r) -> nlohmann::ordered_json {
    if (boost::multiprecision::denominator(r) == 1) {
      BigInt n = boost::multiprecision::numerator(r);
      if (boost::multiprecision::abs(n) < BigInt(1) << 62) return n.convert_to<long long>();
    }
    return format_rat(r);
  };
  auto coords = nlohmann::ordered_json::array();
  for (const auto& p : ci.vertices) coords.push_back({coord(p.x), coord(p.y)});
  auto edges = nlohmann::ordered_json::array();
  auto assign = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < ci.edges.size(); ++i) {
    edges.push_back({ci.edges[i][0], ci.edges[i][1]});
    assign.push_back(std::string(1, static_cast<char>(ci.assignments[i])));
  }
  j["vertices_coords"] = std::move(coords);
  j["edges_vertices"] = std::move(edges);
  j["edges_assignment"] = std::move(assign);
  if (ci.faces) j["faces_vertices"] = *ci.faces;
  // One top-level key per line keeps the files readable and diffable.
  std::string out = "{\n";
  bool first = true;
  for (const auto& [key, value] : j.items()) {
    if (!first) out += ",\n";
    out += "  " + nlohmann::ordered_json(key).dump() + ": " + value.dump();
    first = false;
  }
  return out + "\n}\n";
}

/// One side of a face polygon: a crease or a piece of the paper boundary.
struct FaceSide {
  std::optional<CreaseId> crease;  // empty for paper boundary
  std::size_t input_edge = 0;
};

struct Face {
  FaceId id = 0;
  Polygon polygon;                      // counterclockwise
  std::vector<std::size_t> vertex_ids;  // indices into CreasePattern::vertices
  std::vector<FaceSide> sides;          // sides[i] runs from vertex i to vertex i+1
  std::vector<CreaseId> creases;        // sorted ids of creases on this face
};

struct Crease {
  CreaseId id = 0;
  Segment segment;
  Label label = Label::Unassigned;
  std::size_t input_edge = 0;
  std::array<std::size_t, 2> vertex_ids{};
  FaceId left = 0;   // face to the left of segment.a() -> segment.b()
  FaceId right = 0;  // face to the right

  FaceId other_face(FaceId f) const { return f == left ? right : left; }
};

struct CreasePattern {
  std::vector<Point> vertices;
  Polygon paper;                               // counterclockwise
  std::vector<std::size_t> paper_vertex_ids;   // boundary cycle
  std::vector<Crease> creases;                 // id order == input order of non-boundary edges
  std::vector<Face> faces;                     // id order is canonical, see build_pattern
  std::size_t num_edges = 0;

  Rat paper_area() const { return paper.area(); }
};

namespace detail {

struct HalfEdgeGraph {
  // Outgoing half-edges per vertex sorted counterclockwise; half-edge h is
  // (from[h] -> to[h]) and its twin is h ^ 1.
  std::vector<std::size_t> from, to, edge;
  std::vector<std::vector<std::size_t>> outgoing;
  std::vector<std::size_t> position;  // index of h within outgoing[from[h]]

  HalfEdgeGraph(const std::vector<Point>& pts, const std::vector<std::array<std::size_t, 2>>& edges) {
    outgoing.resize(pts.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
      for (int dir = 0; dir < 2; ++dir) {
        std::size_t h = from.size();
        from.push_back(edges[e][dir]);
        to.push_back(edges[e][1 - dir]);
        edge.push_back(e);
        outgoing[edges[e][dir]].push_back(h);
      }
    }
    position.resize(from.size());
    for (std::size_t v = 0; v < pts.size(); ++v) {
      auto& out = outgoing[v];
      std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
        return angle_less(pts[to[a]] - pts[v], pts[to[b]] - pts[v]);
      });
      for (std::size_t i = 0; i < out.size(); ++i) position[out[i]] = i;
    }
  }

  /// Next half-edge around the face on the left of h.
  std::size_t next(std::size_t h) const {
    std::size_t twin = h ^ 1;
    const auto& out = outgoing[to[h]];
    std::size_t i = position[twin];
    return out[(i + out.size() - 1) % out.size()];
  }

  /// All face cycles as half-edge lists, each starting at its smallest half-edge.
  std::vector<std::vector<std::size_t>> cycles() const {
    std::vector<bool> used(from.size(), false);
    std::vector<std::vector<std::size_t>> result;
    for (std::size_t start = 0; start < from.size(); ++start) {
      if (used[start]) continue;
      std::vector<std::size_t> cyc;
      std::size_t h = start;
      do {
        used[h] = true;
        cyc.push_back(h);
        h = next(h);
      } while (h != start);
      result.push_back(std::move(cyc));
    }
    return result;
  }
};

/// Rotates a vertex cycle to start at its lexicographically smallest point.
inline std::size_t min_vertex_position(const std::vector<Point>& cycle) {
  return static_cast<std::size_t>(std::min_element(cycle.begin(), cycle.end()) - cycle.begin());
}

/// Canonical order for polygons: compare the vertex sequences starting at each
/// polygon's lexicographically smallest vertex.
inline bool cycle_less(const std::vector<Point>& a, const std::vector<Point>& b) {
  std::size_t ia = min_vertex_position(a), ib = min_vertex_position(b);
  for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
    const Point& pa = a[(ia + k) % a.size()];
    const Point& pb = b[(ib + k) % b.size()];
    if (pa != pb) return pa < pb;
  }
  return a.size() < b.size();
}

}  // namespace detail

/// Validates the input and derives the face decomposition. Faces are numbered
/// in canonical geometric order (by lowest vertex, then by boundary sequence),
/// so the numbering does not depend on the order of edges in the file.
inline CreasePattern build_pattern(const CreaseInput& ci) {
  const auto& pts = ci.vertices;
  const std::size_t nv = pts.size();
  const std::size_t ne = ci.edges.size();
  if (ci.assignments.size() != ne) throw InputError("assignment count does not match edge count");

  {
    std::map<Point, std::size_t> where;
    for (std::size_t i = 0; i < nv; ++i) {
      auto [it, fresh] = where.emplace(pts[i], i);
      if (!fresh) {
        throw InputError("vertices " + std::to_string(it->second) + " and " + std::to_string(i) +
                         " have the same coordinates");
      }
    }
  }

  auto is_boundary = [&](std::size_t e) { return ci.assignments[e] == Assignment::Boundary; };
  std::vector<Segment> segs;
  segs.reserve(ne);
  for (const auto& e : ci.edges) segs.emplace_back(pts[e[0]], pts[e[1]]);

  for (std::size_t i = 0; i < ne; ++i) {
    for (std::size_t j = i + 1; j < ne; ++j) {
      auto hit = segment_intersection(segs[i], segs[j]);
      if (hit.kind == Intersection::Kind::Empty) continue;
      if (hit.kind == Intersection::Kind::Point) {
        bool shared_endpoint = (hit.p == segs[i].a() || hit.p == segs[i].b()) &&
                               (hit.p == segs[j].a() || hit.p == segs[j].b());
        if (shared_endpoint) continue;
      }
      std::string which = std::to_string(i) + " and " + std::to_string(j);
      if (!is_boundary(i) && !is_boundary(j)) throw InputError("creases cross: edges " + which);
      if (is_boundary(i) && is_boundary(j)) throw InputError("boundary self-intersects: edges " + which);
      throw InputError("crease crosses paper boundary: edges " + which);
    }
  }

  // Boundary: a single simple cycle of B edges.
  std::vector<std::vector<std::size_t>> bnbr(nv);
  std::size_t nb = 0;
  for (std::size_t e = 0; e < ne; ++e) {
    if (!is_boundary(e)) continue;
    ++nb;
    bnbr[ci.edges[e][0]].push_back(ci.edges[e][1]);
    bnbr[ci.edges[e][1]].push_back(ci.edges[e][0]);
  }
  if (nb < 3) throw InputError("boundary not a single simple cycle: fewer than three boundary edges");
  std::size_t first = nv;
  for (std::size_t v = 0; v < nv; ++v) {
    if (bnbr[v].empty()) continue;
    if (bnbr[v].size() != 2) {
      throw InputError("boundary not a single simple cycle: vertex " + std::to_string(v) + " has " +
                       std::to_string(bnbr[v].size()) + " boundary edges");
    }
    if (first == nv) first = v;
  }
  std::vector<std::size_t> cycle{first};
  for (std::size_t prev = first, cur = bnbr[first][0]; cur != first;) {
    cycle.push_back(cur);
    std::size_t nxt = bnbr[cur][0] == prev ? bnbr[cur][1] : bnbr[cur][0];
    prev = cur;
    cur = nxt;
  }
  if (cycle.size() != nb) throw InputError("boundary not a single simple cycle: several boundary loops");
  std::vector<Point> paper_pts;
  for (auto v : cycle) paper_pts.push_back(pts[v]);
  if (twice_signed_area(paper_pts) < 0) {
    std::reverse(cycle.begin(), cycle.end());
    std::reverse(paper_pts.begin(), paper_pts.end());
  }
  Polygon paper = Polygon::trusted(paper_pts);
  if (auto why = Polygon::simplicity_violation(paper_pts); !why.empty()) {
    throw InputError("boundary not a single simple cycle: " + why);
  }

  // Creases lie inside the paper; interior vertices are not dangling.
  std::vector<std::size_t> crease_degree(nv, 0), degree(nv, 0);
  for (std::size_t e = 0; e < ne; ++e) {
    ++degree[ci.edges[e][0]];
    ++degree[ci.edges[e][1]];
    if (is_boundary(e)) continue;
    ++crease_degree[ci.edges[e][0]];
    ++crease_degree[ci.edges[e][1]];
    if (point_in_polygon(midpoint(segs[e].a(), segs[e].b()), paper) != Location::Inside) {
      throw InputError("crease " + std::to_string(e) + " lies outside the paper");
    }
  }
  for (std::size_t v = 0; v < nv; ++v) {
    if (degree[v] == 0) throw InputError("disconnected paper: vertex " + std::to_string(v) + " is isolated");
    if (!bnbr[v].empty()) continue;
    if (point_in_polygon(pts[v], paper) != Location::Inside) {
      throw InputError("vertex " + std::to_string(v) + " lies outside the paper");
    }
    if (crease_degree[v] == 1) {
      throw InputError("dangling crease: interior vertex " + std::to_string(v) + " ends a single crease");
    }
  }

  {
    std::vector<std::vector<std::size_t>> adj(nv);
    for (const auto& e : ci.edges) {
      adj[e[0]].push_back(e[1]);
      adj[e[1]].push_back(e[0]);
    }
    std::vector<bool> seen(nv, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t count = 0;
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      ++count;
      for (auto w : adj[v]) {
        if (!seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
    if (count != nv) throw InputError("disconnected paper: crease graph has several components");
  }

  detail::HalfEdgeGraph heg(pts, ci.edges);
  auto cycles = heg.cycles();
  struct RawFace {
    std::vector<std::size_t> halfedges;
    std::vector<Point> points;
  };
  std::vector<RawFace> raw;
  std::size_t outer_count = 0;
  for (auto& cyc : cycles) {
    RawFace f{cyc, {}};
    for (auto h : cyc) f.points.push_back(pts[heg.from[h]]);
    if (twice_signed_area(f.points) <= 0) {
      ++outer_count;
      continue;
    }
    raw.push_back(std::move(f));
  }
  if (outer_count != 1) throw InputError("disconnected paper");
  if (nv - ne + raw.size() + 1 != 2) throw InputError("planar subdivision fails the Euler check");

  std::vector<std::size_t> order(raw.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return detail::cycle_less(raw[a].points, raw[b].points); });

  CreasePattern cp{pts, paper, cycle, {}, {}, ne};
  std::vector<std::optional<CreaseId>> crease_of_edge(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    if (is_boundary(e)) continue;
    CreaseId id = cp.creases.size();
    crease_of_edge[e] = id;
    cp.creases.push_back(Crease{id, segs[e], static_cast<Label>(ci.assignments[e]), e, ci.edges[e], 0, 0});
  }

  std::vector<FaceId> face_of_halfedge(heg.from.size(), static_cast<FaceId>(-1));
  Rat area_sum = 0;
  for (FaceId id = 0; id < order.size(); ++id) {
    RawFace& rf = raw[order[id]];
    std::size_t start = detail::min_vertex_position(rf.points);
    std::rotate(rf.halfedges.begin(), rf.halfedges.begin() + static_cast<std::ptrdiff_t>(start), rf.halfedges.end());
    std::rotate(rf.points.begin(), rf.points.begin() + static_cast<std::ptrdiff_t>(start), rf.points.end());
    std::vector<std::size_t> vids;
    std::vector<FaceSide> sides;
    std::set<std::size_t> distinct;
    for (auto h : rf.halfedges) {
      face_of_halfedge[h] = id;
      vids.push_back(heg.from[h]);
      distinct.insert(heg.from[h]);
      sides.push_back(FaceSide{crease_of_edge[heg.edge[h]], heg.edge[h]});
    }
    if (distinct.size() != vids.size()) {
      throw InputError("face " + std::to_string(id) + " is not a simple polygon (pinched at a vertex)");
    }
    Face face{id, Polygon::trusted(rf.points), std::move(vids), std::move(sides), {}};
    area_sum += face.polygon.area();
    cp.faces.push_back(std::move(face));
  }
  if (area_sum != paper.area()) throw InputError("face areas do not sum to the paper area");

  for (auto& c : cp.creases) {
    std::size_t h = 2 * c.input_edge;  // half-edge from edges[e][0] to edges[e][1]
    c.left = face_of_halfedge[h];
    c.right = face_of_halfedge[h ^ 1];
    if (c.left == static_cast<FaceId>(-1) || c.right == static_cast<FaceId>(-1) || c.left == c.right) {
      throw InputError("crease " + std::to_string(c.input_edge) + " does not separate two faces");
    }
    cp.faces[c.left].creases.push_back(c.id);
    cp.faces[c.right].creases.push_back(c.id);
  }
  for (auto& f : cp.faces) std::sort(f.creases.begin(), f.creases.end());

  if (ci.faces) {
    auto key = [](std::vector<std::size_t> cyc) {
      auto it = std::min_element(cyc.begin(), cyc.end());
      std::rotate(cyc.begin(), it, cyc.end());
      if (cyc.size() > 2 && cyc.back() < cyc[1]) std::reverse(cyc.begin() + 1, cyc.end());
      return cyc;
    };
    std::set<std::vector<std::size_t>> computed, supplied;
    for (const auto& f : cp.faces) computed.insert(key(f.vertex_ids));
    for (const auto& f : *ci.faces) supplied.insert(key(f));
    if (computed != supplied || ci.faces->size() != cp.faces.size()) {
      throw InputError("faces_vertices does not match the faces implied by the edges");
    }
  }
  return cp;
}

}  // namespace foldcheck

#endif  // FOLDCHECK_CREASE_PATTERN_HPP
