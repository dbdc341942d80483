#include "foldcheck/decomposition.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace foldcheck;

namespace {

Graph k2() { return Graph{2, {{0, 1}}}; }

Graph grid(std::size_t r, std::size_t c) {
  Graph g{r * c, {}};
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      if (j + 1 < c) g.edges.push_back({i * c + j, i * c + j + 1});
      if (i + 1 < r) g.edges.push_back({i * c + j, (i + 1) * c + j});
    }
  }
  return g;
}

Graph random_connected(std::size_t n, std::mt19937_64& rng) {
  Graph g{n, {}};
  for (std::size_t v = 1; v < n; ++v) g.edges.push_back({rng() % v, v});
  std::size_t extra = rng() % (2 * n);
  for (std::size_t k = 0; k < extra; ++k) {
    std::size_t a = rng() % n, b = rng() % n;
    if (a != b) g.edges.push_back({std::min(a, b), std::max(a, b)});
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  return g;
}

}  // namespace

TEST(Verify, ValidK2) {
  TreeDecomposition td{{{0, 1}}, {}};
  EXPECT_TRUE(verify(k2(), td));
}

TEST(Verify, MissingEdge) {
  Graph g{3, {{0, 1}, {1, 2}, {0, 2}}};
  TreeDecomposition td{{{0, 1}, {1, 2}}, {{0, 1}}};
  auto r = verify(g, td);
  EXPECT_FALSE(r);
  EXPECT_EQ(r.problem, VerifyResult::Problem::MissingEdge);
  EXPECT_EQ(r.edge, (std::pair<std::size_t, std::size_t>{0, 2}));
}

TEST(Verify, DisconnectedOccurrences) {
  Graph g{3, {{0, 1}, {1, 2}}};
  TreeDecomposition td{{{0, 1}, {1, 2}, {0}}, {{0, 1}, {1, 2}}};
  auto r = verify(g, td);
  EXPECT_EQ(r.problem, VerifyResult::Problem::DisconnectedOccurrences);
  EXPECT_EQ(r.vertex, 0u);
}

TEST(Verify, MissingVertexAndNotATree) {
  Graph g{3, {{0, 1}}};
  EXPECT_EQ(verify(g, TreeDecomposition{{{0, 1}}, {}}).problem, VerifyResult::Problem::MissingVertex);
  TreeDecomposition cyclic{{{0, 1}, {1, 2}, {0, 2}}, {{0, 1}, {1, 2}, {0, 2}}};
  EXPECT_EQ(verify(Graph{3, {{0, 1}}}, cyclic).problem, VerifyResult::Problem::NotATree);
  TreeDecomposition forest{{{0, 1}, {2}}, {}};
  EXPECT_EQ(verify(g, forest).problem, VerifyResult::Problem::NotATree);
}

TEST(Decompose, KnownWidths) {
  EXPECT_EQ(decompose(k2()).width(), 1);
  EXPECT_EQ(decompose(Graph::cycle(6)).width(), 2);
  EXPECT_EQ(decompose(grid(3, 3)).width(), 3);
  Graph tree{5, {{0, 1}, {0, 2}, {2, 3}, {2, 4}}};
  EXPECT_EQ(decompose(tree).width(), 1);
}

TEST(Decompose, Deterministic) {
  std::mt19937_64 rng(9);
  Graph g = random_connected(15, rng);
  auto a = decompose(g), b = decompose(g);
  EXPECT_EQ(a.bags, b.bags);
  EXPECT_EQ(a.tree_edges, b.tree_edges);
}

TEST(MakeNice, K2IsLeafThenIntroduce) {
  auto ntd = make_nice(decompose(k2()));
  ASSERT_EQ(ntd.nodes.size(), 2u);
  EXPECT_EQ(ntd.nodes[0].kind, NiceKind::Leaf);
  EXPECT_EQ(ntd.nodes[0].bag, (std::vector<std::size_t>{0}));
  EXPECT_EQ(ntd.nodes[1].kind, NiceKind::Introduce);
  EXPECT_EQ(ntd.nodes[1].vertex, 1u);
  EXPECT_EQ(ntd.root, 1u);
  EXPECT_EQ(ntd.width(), 1);
}

TEST(MakeNice, CycleHasNoJoins) {
  auto ntd = make_nice(decompose(Graph::cycle(6)));
  EXPECT_EQ(ntd.count(NiceKind::Join), 0u);
  EXPECT_TRUE(verify(Graph::cycle(6), ntd.as_tree()));
  EXPECT_EQ(nice_grammar_violation(ntd), "");
}

TEST(MakeNice, StarNeedsJoins) {
  Graph star{6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}}};
  auto ntd = make_nice(decompose(star));
  EXPECT_GT(ntd.count(NiceKind::Join), 0u);
  EXPECT_EQ(nice_grammar_violation(ntd), "");
  EXPECT_TRUE(verify(star, ntd.as_tree()));
}

TEST(MakeNice, RandomGraphsStayValidAndKeepWidth) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 200; ++i) {
    Graph g = random_connected(1 + rng() % 14, rng);
    TreeDecomposition td = decompose(g);
    ASSERT_TRUE(verify(g, td)) << verify(g, td).describe();
    auto ntd = make_nice(td);
    EXPECT_TRUE(verify(g, ntd.as_tree())) << verify(g, ntd.as_tree()).describe();
    EXPECT_EQ(nice_grammar_violation(ntd), "");
    EXPECT_EQ(ntd.width(), td.width());
    EXPECT_EQ(ntd.root, ntd.nodes.size() - 1);
    for (std::size_t n = 0; n < ntd.nodes.size(); ++n) {
      for (auto c : ntd.nodes[n].children) EXPECT_LT(c, n);
    }
  }
}

TEST(NiceGrammar, DetectsBadNodes) {
  NiceTreeDecomposition ntd;
  ntd.nodes.push_back({NiceKind::Leaf, {0, 1}, 0, {}});
  ntd.root = 0;
  EXPECT_NE(nice_grammar_violation(ntd), "");

  NiceTreeDecomposition jump;
  jump.nodes.push_back({NiceKind::Leaf, {0}, 0, {}});
  jump.nodes.push_back({NiceKind::Introduce, {0, 1, 2}, 1, {0}});
  jump.root = 1;
  EXPECT_NE(nice_grammar_violation(jump), "");

  NiceTreeDecomposition join;
  join.nodes.push_back({NiceKind::Leaf, {0}, 0, {}});
  join.nodes.push_back({NiceKind::Leaf, {1}, 1, {}});
  join.nodes.push_back({NiceKind::Join, {0}, 0, {0, 1}});
  join.root = 2;
  EXPECT_NE(nice_grammar_violation(join), "");
}

TEST(DecompositionJson, ListsNodes) {
  auto j = decomposition_to_json(make_nice(decompose(Graph::cycle(4))));
  ASSERT_TRUE(j.contains("nodes"));
  EXPECT_GT(j["nodes"].size(), 0u);
  EXPECT_TRUE(j["nodes"][0].contains("kind"));
  EXPECT_TRUE(j["nodes"][0].contains("bag"));
}
