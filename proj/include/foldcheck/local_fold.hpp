#ifndef FOLDCHECK_LOCAL_FOLD_HPP
#define FOLDCHECK_LOCAL_FOLD_HPP

#include "foldcheck/crease_pattern.hpp"
#include "foldcheck/geometry.hpp"

#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace foldcheck {

/// An invariant of a computed structure failed; this is a bug, not bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A continuous piecewise isometry of the paper: one exact isometry per face.
struct LocalFlatFolding {
  CreasePattern pattern;
  std::vector<Isometry> phi;     // indexed by face id
  std::vector<Polygon> images;   // phi[f] applied to face f, vertex order preserved

  int face_sign(FaceId f) const { return phi[f].sign(); }
};

struct NotLocallyFlat {
  CreaseId crease = 0;
  std::string message;
};

using ReconstructResult = std::variant<LocalFlatFolding, NotLocallyFlat>;

/// Breadth-first walk over face adjacencies from face 0 (mapped by the identity).
/// Each newly reached face gets its neighbour's map composed with the reflection
/// across the shared crease; every other adjacency must reproduce the same map.
inline ReconstructResult reconstruct(const CreasePattern& cp) {
  const std::size_t nf = cp.faces.size();
  std::vector<std::optional<Isometry>> phi(nf);
  std::deque<FaceId> queue;
  phi[0] = Isometry::identity();
  queue.push_back(0);
  while (!queue.empty()) {
    FaceId f = queue.front();
    queue.pop_front();
    for (CreaseId c : cp.faces[f].creases) {
      const Crease& crease = cp.creases[c];
      FaceId g = crease.other_face(f);
      Isometry expected = compose(*phi[f], reflect_line(crease.segment));
      if (!phi[g]) {
        phi[g] = expected;
        queue.push_back(g);
      } else if (*phi[g] != expected) {
        return NotLocallyFlat{c, "crease " + std::to_string(c) + " (input edge " + std::to_string(crease.input_edge) +
                                     ") is inconsistent: reflections around a vertex do not close up"};
      }
    }
  }
  LocalFlatFolding lff{cp, {}, {}};
  for (FaceId f = 0; f < nf; ++f) {
    if (!phi[f]) throw InternalError("face " + std::to_string(f) + " unreachable from face 0");
    lff.images.push_back(cp.faces[f].polygon.transformed(*phi[f]));
    lff.phi.push_back(std::move(*phi[f]));
  }
  return lff;
}

struct CreaseImage {
  CreaseId crease;
  Segment image;
  Label label;
};

/// Folded image of every crease. Both adjacent faces must agree on it.
inline std::vector<CreaseImage> crease_images(const LocalFlatFolding& lff) {
  std::vector<CreaseImage> out;
  for (const auto& c : lff.pattern.creases) {
    Segment left = lff.phi[c.left].apply(c.segment);
    Segment right = lff.phi[c.right].apply(c.segment);
    if (left != right) {
      throw InternalError("crease " + std::to_string(c.id) + " has two different images");
    }
    out.push_back({c.id, left, c.label});
  }
  return out;
}

}  // namespace foldcheck

#endif  // FOLDCHECK_LOCAL_FOLD_HPP
