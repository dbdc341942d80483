#include "foldcheck/crease_pattern.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace foldcheck;
using foldcheck::test_support::load_fixture;

namespace {

Point P(long long x, long long y) { return {Rat(x), Rat(y)}; }

// Unit-height strip [0,w]x[0,1] with vertical creases at the given x values.
CreaseInput strip(long long w, const std::vector<std::pair<long long, Assignment>>& creases) {
  CreaseInput ci;
  std::vector<long long> xs{0};
  for (auto& c : creases) xs.push_back(c.first);
  xs.push_back(w);
  for (auto x : xs) ci.vertices.push_back(P(x, 0));
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) ci.vertices.push_back(P(*it, 1));
  std::size_t n = xs.size();
  for (std::size_t i = 0; i < 2 * n; ++i) {
    ci.edges.push_back({i, (i + 1) % (2 * n)});
    ci.assignments.push_back(Assignment::Boundary);
  }
  for (std::size_t k = 0; k < creases.size(); ++k) {
    ci.edges.push_back({k + 1, 2 * n - 2 - k});
    ci.assignments.push_back(creases[k].second);
  }
  return ci;
}

std::string message_of(const CreaseInput& ci) {
  try {
    build_pattern(ci);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(ParseFold, InstanceACounts) {
  CreaseInput ci = load_fixture("instanceA.fold");
  EXPECT_EQ(ci.vertices.size(), 6u);
  EXPECT_EQ(ci.edges.size(), 7u);
  EXPECT_EQ(ci.assignments.back(), Assignment::Valley);
}

TEST(ParseFold, DecimalCoordinatesAreExact) {
  auto ci = parse_fold(R"({"vertices_coords": [[0.1, "1/3"], [1e-1, 2]], "edges_vertices": [], "edges_assignment": []})");
  EXPECT_EQ(ci.vertices[0].x, Rat(1, 10));
  EXPECT_EQ(ci.vertices[0].y, Rat(1, 3));
  EXPECT_EQ(ci.vertices[1].x, Rat(1, 10));
}

TEST(ParseFold, Errors) {
  auto fails = [](const std::string& text, const std::string& needle) {
    try {
      parse_fold(text);
    } catch (const InputError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
      return;
    }
    ADD_FAILURE() << "accepted: " << text;
  };
  fails("{", "malformed JSON");
  fails("[]", "malformed JSON");
  fails(R"({"vertices_coords": [[0,0],[1,0]], "edges_vertices": [[0,1]], "edges_assignment": ["X"]})",
        "unknown assignment 'X'");
  fails(R"({"vertices_coords": [[0,0],[1,0]], "edges_vertices": [[0,5]], "edges_assignment": ["B"]})",
        "index out of range");
  fails(R"({"vertices_coords": [[0,0],[1,0]], "edges_vertices": [[0,1],[1,0]], "edges_assignment": ["B","B"]})",
        "repeated edge");
  fails(R"({"vertices_coords": [[0,0],[1,0]], "edges_vertices": [[0,1]], "edges_assignment": ["F"]})", "F");
}

TEST(ParseFold, RoundTripThroughWriter) {
  CreaseInput ci = load_fixture("crimp.fold");
  CreaseInput back = parse_fold(to_fold_json(ci));
  EXPECT_EQ(back.vertices, ci.vertices);
  EXPECT_EQ(back.edges, ci.edges);
  EXPECT_EQ(back.assignments, ci.assignments);
}

TEST(BuildPattern, InstanceAFaces) {
  CreasePattern cp = build_pattern(load_fixture("instanceA.fold"));
  ASSERT_EQ(cp.faces.size(), 2u);
  ASSERT_EQ(cp.creases.size(), 1u);
  // Face 0 is L = [0,1]x[0,1], face 1 is R = [1,2]x[0,1].
  EXPECT_EQ(cp.faces[0].polygon.area(), Rat(1));
  EXPECT_EQ(point_in_polygon({Rat(1, 2), Rat(1, 2)}, cp.faces[0].polygon), Location::Inside);
  EXPECT_EQ(point_in_polygon({Rat(3, 2), Rat(1, 2)}, cp.faces[1].polygon), Location::Inside);
  const Crease& c = cp.creases[0];
  EXPECT_EQ(c.label, Label::Valley);
  EXPECT_EQ(std::min(c.left, c.right), 0u);
  EXPECT_EQ(std::max(c.left, c.right), 1u);
  for (const auto& f : cp.faces) EXPECT_TRUE(f.polygon.counterclockwise());
  EXPECT_EQ(cp.paper_area(), Rat(2));
}

TEST(BuildPattern, CrimpFacesLeftToRight) {
  CreasePattern cp = build_pattern(load_fixture("crimp.fold"));
  ASSERT_EQ(cp.faces.size(), 3u);
  for (std::size_t f = 0; f < 3; ++f) {
    Point mid{Rat(2 * static_cast<long long>(f) + 1, 2), Rat(1, 2)};
    EXPECT_EQ(point_in_polygon(mid, cp.faces[f].polygon), Location::Inside) << f;
  }
}

TEST(BuildPattern, NoCreaseSquareIsOneFace) {
  CreaseInput ci = strip(1, {});
  CreasePattern cp = build_pattern(ci);
  EXPECT_EQ(cp.faces.size(), 1u);
  EXPECT_TRUE(cp.creases.empty());
}

TEST(BuildPattern, FaceAreasSumToPaper) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    CreasePattern cp = build_pattern(generate(GenSpec::simple_fold_sequence(2, seed)));
    Rat total = 0;
    for (const auto& f : cp.faces) total += f.polygon.area();
    EXPECT_EQ(total, cp.paper_area());
  }
}

TEST(BuildPattern, FaceOrderIsCanonical) {
  // Same pattern with vertices and edges listed in a different order.
  CreaseInput a = load_fixture("instanceA.fold");
  CreaseInput b = a;
  std::reverse(b.vertices.begin(), b.vertices.end());
  std::size_t n = a.vertices.size();
  for (auto& e : b.edges) e = {n - 1 - e[1], n - 1 - e[0]};
  CreasePattern pa = build_pattern(a), pb = build_pattern(b);
  ASSERT_EQ(pa.faces.size(), pb.faces.size());
  for (std::size_t f = 0; f < pa.faces.size(); ++f) {
    EXPECT_EQ(pa.faces[f].polygon.area(), pb.faces[f].polygon.area());
    EXPECT_EQ(point_in_polygon({Rat(1, 2), Rat(1, 2)}, pa.faces[f].polygon),
              point_in_polygon({Rat(1, 2), Rat(1, 2)}, pb.faces[f].polygon));
  }
}

TEST(BuildPattern, DuplicateCoordinates) {
  CreaseInput ci = strip(2, {{1, Assignment::Valley}});
  ci.vertices.push_back(P(0, 0));
  EXPECT_NE(message_of(ci).find("vertices"), std::string::npos);
}

TEST(BuildPattern, CrossingCreases) {
  CreaseInput ci;
  ci.vertices = {P(0, 0), P(2, 0), P(2, 2), P(0, 2)};
  for (std::size_t i = 0; i < 4; ++i) {
    ci.edges.push_back({i, (i + 1) % 4});
    ci.assignments.push_back(Assignment::Boundary);
  }
  ci.edges.push_back({0, 2});
  ci.assignments.push_back(Assignment::Mountain);
  ci.edges.push_back({1, 3});
  ci.assignments.push_back(Assignment::Valley);
  EXPECT_NE(message_of(ci).find("creases cross"), std::string::npos);
}

TEST(BuildPattern, DanglingCrease) {
  CreaseInput ci = strip(2, {});
  ci.vertices.push_back({Rat(1), Rat(1, 2)});
  ci.edges.push_back({1, ci.vertices.size() - 1});
  ci.assignments.push_back(Assignment::Mountain);
  EXPECT_NE(message_of(ci).find("dangling crease"), std::string::npos);
}

TEST(BuildPattern, IsolatedVertex) {
  CreaseInput ci = strip(1, {});
  ci.vertices.push_back({Rat(1, 2), Rat(1, 2)});
  EXPECT_NE(message_of(ci).find("disconnected paper"), std::string::npos);
}

TEST(BuildPattern, BoundaryMustBeOneCycle) {
  CreaseInput ci = strip(1, {});
  ci.assignments[0] = Assignment::Mountain;
  EXPECT_NE(message_of(ci).find("boundary not a single simple cycle"), std::string::npos);
}

TEST(BuildPattern, CreaseOutsidePaper) {
  CreaseInput ci;
  // L-shaped paper; the crease joins two reflex-side corners through the notch.
  ci.vertices = {P(0, 0), P(2, 0), P(2, 1), P(1, 1), P(1, 2), P(0, 2)};
  for (std::size_t i = 0; i < 6; ++i) {
    ci.edges.push_back({i, (i + 1) % 6});
    ci.assignments.push_back(Assignment::Boundary);
  }
  ci.edges.push_back({2, 4});
  ci.assignments.push_back(Assignment::Valley);
  EXPECT_NE(message_of(ci).find("outside the paper"), std::string::npos);
}

TEST(BuildPattern, FacesVerticesMismatch) {
  CreaseInput ci = load_fixture("instanceA.fold");
  ci.faces = std::vector<std::vector<std::size_t>>{{0, 1, 2, 3, 4, 5}};
  EXPECT_NE(message_of(ci).find("faces_vertices"), std::string::npos);
}

TEST(BuildPattern, FacesVerticesAcceptedWhenConsistent) {
  CreaseInput ci = load_fixture("instanceA.fold");
  ci.faces = std::vector<std::vector<std::size_t>>{{0, 1, 4, 5}, {1, 2, 3, 4}};
  EXPECT_NO_THROW(build_pattern(ci));
}
