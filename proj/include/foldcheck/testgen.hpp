#ifndef FOLDCHECK_TESTGEN_HPP
#define FOLDCHECK_TESTGEN_HPP

// Deterministic instance generators: accordions, map grids, single-vertex
// patterns and patterns produced by simulating successive simple folds.

#include "foldcheck/crease_pattern.hpp"
#include "foldcheck/geometry.hpp"

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace foldcheck {

struct GenSpec {
  enum class Kind { Accordion, MapGrid, SingleVertex, SimpleFoldSequence };

  Kind kind = Kind::Accordion;
  std::uint64_t seed = 0;
  std::size_t creases = 3;           // accordion
  std::size_t rows = 1, cols = 2;    // map grid
  std::vector<double> angles;        // single vertex, degrees, counterclockwise from +x
  std::string labels;                // single vertex, one of M/V/U per crease
  std::size_t folds = 1;             // simple fold sequence
  std::size_t flips = 0;             // mutation: number of M/V labels to flip

  static GenSpec accordion(std::size_t n) {
    GenSpec s;
    s.kind = Kind::Accordion;
    s.creases = n;
    return s;
  }
  static GenSpec map_grid(std::size_t r, std::size_t c) {
    GenSpec s;
    s.kind = Kind::MapGrid;
    s.rows = r;
    s.cols = c;
    return s;
  }
  static GenSpec single_vertex(std::vector<double> a, std::string l) {
    GenSpec s;
    s.kind = Kind::SingleVertex;
    s.angles = std::move(a);
    s.labels = std::move(l);
    return s;
  }
  static GenSpec simple_fold_sequence(std::size_t k, std::uint64_t seed) {
    GenSpec s;
    s.kind = Kind::SimpleFoldSequence;
    s.folds = k;
    s.seed = seed;
    return s;
  }
};

inline const char* to_string(GenSpec::Kind k) {
  switch (k) {
    case GenSpec::Kind::Accordion: return "accordion";
    case GenSpec::Kind::MapGrid: return "map_grid";
    case GenSpec::Kind::SingleVertex: return "single_vertex";
    case GenSpec::Kind::SimpleFoldSequence: return "simple_fold_sequence";
  }
  return "?";
}

namespace detail {

struct LabeledSegment {
  Segment segment;
  Assignment assignment;
};

/// Builds vertices and edges from segments that may cross each other;
/// every segment is split at all intersection points.
inline CreaseInput from_segments(const std::vector<LabeledSegment>& segs) {
  std::map<Point, std::size_t> vindex;
  std::vector<std::vector<Point>> cuts(segs.size());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    cuts[i] = {segs[i].segment.a(), segs[i].segment.b()};
    for (std::size_t j = 0; j < segs.size(); ++j) {
      if (i == j) continue;
      auto hit = segment_intersection(segs[i].segment, segs[j].segment);
      if (hit.kind == Intersection::Kind::Subsegment) throw std::logic_error("generator produced overlapping creases");
      if (hit.kind == Intersection::Kind::Point) cuts[i].push_back(hit.p);
    }
    std::sort(cuts[i].begin(), cuts[i].end());
    cuts[i].erase(std::unique(cuts[i].begin(), cuts[i].end()), cuts[i].end());
    for (const auto& p : cuts[i]) vindex.emplace(p, 0);
  }
  CreaseInput ci;
  for (auto& [p, idx] : vindex) {
    idx = ci.vertices.size();
    ci.vertices.push_back(p);
  }
  for (std::size_t i = 0; i < segs.size(); ++i) {
    for (std::size_t k = 0; k + 1 < cuts[i].size(); ++k) {
      ci.edges.push_back({vindex.at(cuts[i][k]), vindex.at(cuts[i][k + 1])});
      ci.assignments.push_back(segs[i].assignment);
    }
  }
  return ci;
}

inline std::vector<LabeledSegment> rectangle_boundary(const Rat& w, const Rat& h) {
  Point p0{0, 0}, p1{w, 0}, p2{w, h}, p3{0, h};
  return {{Segment(p0, p1), Assignment::Boundary},
          {Segment(p1, p2), Assignment::Boundary},
          {Segment(p2, p3), Assignment::Boundary},
          {Segment(p3, p0), Assignment::Boundary}};
}

/// Rational point on the unit circle close to the given angle.
inline Point rational_rotation(double degrees) {
  if (degrees >= 180.0) {
    Point half = rational_rotation(degrees - 180.0);
    return {-half.x, -half.y};
  }
  double t = std::tan(degrees * M_PI / 360.0);
  Rat tr(static_cast<long long>(std::llround(t * 10000.0)), 10000);
  Rat d = 1 + tr * tr;
  return {(1 - tr * tr) / d, 2 * tr / d};
}

inline Point rotate(const Point& v, const Point& unit) {
  return {v.x * unit.x - v.y * unit.y, v.x * unit.y + v.y * unit.x};
}

/// Where the ray from the origin along d leaves the square [-1, 1]^2.
inline Point to_square_boundary(const Point& d) {
  Rat m = std::max(boost::multiprecision::abs(d.x), boost::multiprecision::abs(d.y));
  return {d.x / m, d.y / m};
}

inline CreaseInput single_vertex(const GenSpec& spec) {
  const std::size_t deg = spec.angles.size();
  if (deg < 2) throw std::invalid_argument("single_vertex needs at least two angles");
  if (spec.labels.size() != deg) throw std::invalid_argument("single_vertex needs one label per crease");
  double total = 0, odd = 0;
  for (std::size_t k = 0; k < deg; ++k) {
    if (!(spec.angles[k] > 0)) throw std::invalid_argument("single_vertex angles must be positive");
    total += spec.angles[k];
    if (k % 2 == 0) odd += spec.angles[k];
  }
  if (std::abs(total - 360.0) > 1e-6) throw std::invalid_argument("single_vertex angles must sum to 360");
  for (char c : spec.labels) {
    if (c != 'M' && c != 'V' && c != 'U') throw std::invalid_argument("single_vertex labels must be M, V or U");
  }

  std::vector<Point> dirs{Point{1, 0}};
  for (std::size_t k = 0; k + 1 < deg; ++k) dirs.push_back(rotate(dirs.back(), rational_rotation(spec.angles[k])));
  bool kawasaki = deg % 2 == 0 && std::abs(odd - 180.0) < 1e-6;
  if (kawasaki) {
    // Close the loop exactly: the last crease is the axis of the product of
    // the other reflections, so the reflections around the vertex compose to
    // the identity.
    Isometry m = Isometry::identity();
    for (std::size_t k = 0; k + 1 < deg; ++k) m = compose(m, reflect_line(Point{0, 0}, dirs[k]));
    Rat c = m.linear(0, 0), s = m.linear(1, 0);
    Point axis = c == -1 ? Point{0, 1} : Point{1 + c, s};
    if (dot(axis, dirs.back()) < 0) axis = Point{-axis.x, -axis.y};
    if (!angle_less(dirs[deg - 2], axis)) throw std::invalid_argument("single_vertex angles too degenerate to close exactly");
    dirs.back() = axis;
  }

  std::vector<LabeledSegment> segs;
  std::vector<Point> rim;
  for (std::size_t k = 0; k < deg; ++k) {
    Point end = to_square_boundary(dirs[k]);
    rim.push_back(end);
    segs.push_back({Segment(Point{0, 0}, end), static_cast<Assignment>(spec.labels[k])});
  }
  for (const Point& corner : {Point{1, 1}, Point{-1, 1}, Point{-1, -1}, Point{1, -1}}) rim.push_back(corner);
  std::sort(rim.begin(), rim.end(), [](const Point& a, const Point& b) { return angle_less(a, b); });
  rim.erase(std::unique(rim.begin(), rim.end()), rim.end());
  for (std::size_t k = 0; k < rim.size(); ++k) {
    segs.push_back({Segment(rim[k], rim[(k + 1) % rim.size()]), Assignment::Boundary});
  }
  return from_segments(segs);
}

inline CreaseInput accordion(std::size_t n) {
  auto segs = rectangle_boundary(Rat(static_cast<long long>(n + 1)), Rat(1));
  for (std::size_t i = 1; i <= n; ++i) {
    Rat x(static_cast<long long>(i));
    segs.push_back({Segment(Point{x, 0}, Point{x, 1}), i % 2 == 1 ? Assignment::Valley : Assignment::Mountain});
  }
  return from_segments(segs);
}

/// Accordion in both directions: vertical creases alternate V/M; each
/// horizontal crease alternates by row and flips in every mirrored column.
inline CreaseInput map_grid(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("map_grid needs at least one row and column");
  auto segs = rectangle_boundary(Rat(static_cast<long long>(cols)), Rat(static_cast<long long>(rows)));
  for (std::size_t i = 1; i < cols; ++i) {
    Rat x(static_cast<long long>(i));
    segs.push_back({Segment(Point{x, 0}, Point{x, Rat(static_cast<long long>(rows))}),
                    i % 2 == 1 ? Assignment::Valley : Assignment::Mountain});
  }
  for (std::size_t j = 1; j < rows; ++j) {
    Rat y(static_cast<long long>(j));
    for (std::size_t k = 0; k < cols; ++k) {
      bool valley = (j % 2 == 1) != (k % 2 == 1);
      segs.push_back({Segment(Point{Rat(static_cast<long long>(k)), y}, Point{Rat(static_cast<long long>(k + 1)), y}),
                      valley ? Assignment::Valley : Assignment::Mountain});
    }
  }
  return from_segments(segs);
}

/// Convex polygon clipped to the closed side of line (p, p + d) where
/// orient(p, p + d, x) has sign `keep`.
inline std::vector<Point> clip_convex(const std::vector<Point>& poly, const Point& p, const Point& d, int keep) {
  std::vector<Point> out;
  Point q = p + d;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % poly.size()];
    int sa = orient(p, q, a) * keep;
    int sb = orient(p, q, b) * keep;
    if (sa >= 0) out.push_back(a);
    if ((sa > 0 && sb < 0) || (sa < 0 && sb > 0)) {
      Rat t = cross(p - a, d) / cross(b - a, d);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

/// Simulates k folds of the unit square, each through all layers along a random
/// rational line, then reads off the creases with their mountain/valley labels.
inline CreaseInput simple_fold_sequence(std::size_t k, std::uint64_t seed) {
  if (k == 0) throw std::invalid_argument("simple_fold_sequence needs at least one fold");
  std::mt19937_64 rng(seed);
  auto pick = [&rng](std::uint64_t n) { return rng() % n; };

  struct Facet {
    std::vector<Point> paper;  // convex, counterclockwise, paper coordinates
    Isometry phi;
  };
  std::vector<Facet> stack{{{Point{0, 0}, Point{1, 0}, Point{1, 1}, Point{0, 1}}, Isometry::identity()}};
  std::vector<LabeledSegment> segs = rectangle_boundary(1, 1);

  for (std::size_t fold = 0; fold < k; ++fold) {
    Point p, d;
    bool found = false;
    for (int attempt = 0; attempt < 1000 && !found; ++attempt) {
      const Facet& f = stack[pick(stack.size())];
      Rat wsum = 0;
      Point acc{0, 0};
      for (const auto& v : f.paper) {
        Rat w(static_cast<long long>(pick(5) + 1));
        acc = acc + w * f.phi(v);
        wsum += w;
      }
      p = (1 / wsum) * acc;
      d = Point{Rat(static_cast<long long>(pick(7)) - 3), Rat(static_cast<long long>(pick(7)) - 3)};
      if (d.x == 0 && d.y == 0) continue;
      bool touches_vertex = false, splits = false;
      for (const auto& facet : stack) {
        int lo = 1, hi = -1;
        for (const auto& v : facet.paper) {
          int o = orient(p, p + d, facet.phi(v));
          if (o == 0) touches_vertex = true;
          lo = std::min(lo, o);
          hi = std::max(hi, o);
        }
        if (lo < 0 && hi > 0) splits = true;
      }
      found = splits && !touches_vertex;
    }
    if (!found) throw std::runtime_error("simple_fold_sequence: no admissible fold line found");

    bool valley = pick(2) == 0;
    Isometry mirror = reflect_line(p, p + d);
    std::vector<Facet> stay, move;
    for (const auto& facet : stack) {
      std::vector<Point> image;
      for (const auto& v : facet.paper) image.push_back(facet.phi(v));
      int lo = 1, hi = -1;
      for (const auto& v : image) {
        int o = orient(p, p + d, v);
        lo = std::min(lo, o);
        hi = std::max(hi, o);
      }
      Isometry back = facet.phi.inverse();
      auto to_paper = [&](const std::vector<Point>& pts) {
        std::vector<Point> out;
        for (const auto& v : pts) out.push_back(back(v));
        return out;
      };
      if (hi < 0) {
        stay.push_back(facet);
      } else if (lo > 0) {
        move.push_back({facet.paper, compose(mirror, facet.phi)});
      } else {
        auto right = clip_convex(image, p, d, -1);
        auto left = clip_convex(image, p, d, +1);
        std::vector<Point> chord;
        for (const auto& v : left) {
          if (orient(p, p + d, v) == 0) chord.push_back(v);
        }
        if (chord.size() != 2) throw std::logic_error("fold line does not cut a facet in a chord");
        // A valley in the folded frame is a valley on paper only for faces
        // that are still face-up.
        bool paper_valley = valley == (facet.phi.sign() > 0);
        segs.push_back({Segment(back(chord[0]), back(chord[1])),
                        paper_valley ? Assignment::Valley : Assignment::Mountain});
        stay.push_back({to_paper(right), facet.phi});
        move.push_back({to_paper(left), compose(mirror, facet.phi)});
      }
    }
    std::reverse(move.begin(), move.end());
    stack.clear();
    if (valley) {
      stack.insert(stack.end(), stay.begin(), stay.end());
      stack.insert(stack.end(), move.begin(), move.end());
    } else {
      stack.insert(stack.end(), move.begin(), move.end());
      stack.insert(stack.end(), stay.begin(), stay.end());
    }
  }
  return from_segments(segs);
}

}  // namespace detail

/// Flips `count` distinct mountain/valley creases chosen by `seed`.
inline void flip_labels(CreaseInput& ci, std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> candidates;
  for (std::size_t e = 0; e < ci.assignments.size(); ++e) {
    if (ci.assignments[e] == Assignment::Mountain || ci.assignments[e] == Assignment::Valley) candidates.push_back(e);
  }
  if (count > candidates.size()) throw std::invalid_argument("more label flips requested than labeled creases");
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng() % (candidates.size() - i));
    std::swap(candidates[i], candidates[j]);
    auto& a = ci.assignments[candidates[i]];
    a = a == Assignment::Mountain ? Assignment::Valley : Assignment::Mountain;
  }
}

/// Sector angles (degrees, multiples of 5) of a random flat-foldable vertex:
/// alternate sectors each sum to 180.
inline std::vector<double> random_kawasaki_angles(std::size_t degree, std::uint64_t seed) {
  if (degree < 4 || degree % 2 != 0 || degree > 36) throw std::invalid_argument("degree must be even, 4 to 36");
  std::mt19937_64 rng(seed);
  const std::size_t half = degree / 2;
  auto split = [&](std::vector<double>& out) {
    // Random composition of 36 units of 5 degrees into `half` positive parts.
    std::vector<int> cuts;
    std::vector<int> pool(35);
    std::iota(pool.begin(), pool.end(), 1);
    for (std::size_t i = 0; i + 1 < half; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng() % (pool.size() - i));
      std::swap(pool[i], pool[j]);
      cuts.push_back(pool[i]);
    }
    std::sort(cuts.begin(), cuts.end());
    int prev = 0;
    for (int c : cuts) {
      out.push_back(5.0 * (c - prev));
      prev = c;
    }
    out.push_back(5.0 * (36 - prev));
  };
  std::vector<double> odd, even, angles;
  split(odd);
  split(even);
  for (std::size_t i = 0; i < half; ++i) {
    angles.push_back(odd[i]);
    angles.push_back(even[i]);
  }
  return angles;
}

/// Random M/V string with the given length.
inline std::string random_labels(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(rng() % 2 == 0 ? 'M' : 'V');
  return out;
}

inline CreaseInput generate(const GenSpec& spec) {
  CreaseInput ci;
  switch (spec.kind) {
    case GenSpec::Kind::Accordion: ci = detail::accordion(spec.creases); break;
    case GenSpec::Kind::MapGrid: ci = detail::map_grid(spec.rows, spec.cols); break;
    case GenSpec::Kind::SingleVertex: ci = detail::single_vertex(spec); break;
    case GenSpec::Kind::SimpleFoldSequence: ci = detail::simple_fold_sequence(spec.folds, spec.seed); break;
  }
  if (spec.flips > 0) flip_labels(ci, spec.flips, spec.seed);
  return ci;
}

}  // namespace foldcheck

#endif  // FOLDCHECK_TESTGEN_HPP
