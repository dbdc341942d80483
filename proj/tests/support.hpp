#ifndef FOLDCHECK_TESTS_SUPPORT_HPP
#define FOLDCHECK_TESTS_SUPPORT_HPP

#include "foldcheck/pipeline.hpp"
#include "foldcheck/testgen.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace foldcheck::test_support {

inline std::string fixture_path(const std::string& name) { return std::string(FOLDCHECK_FIXTURES) + "/" + name; }

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline CreaseInput load_fixture(const std::string& name) { return parse_fold(read_fixture(name)); }

inline LocalFlatFolding fold_of(const CreaseInput& ci) {
  auto r = reconstruct(build_pattern(ci));
  return std::get<LocalFlatFolding>(r);
}

/// Arrangement with classified edges.
inline Arrangement arrangement_of(const LocalFlatFolding& lff) {
  Arrangement arr = build_arrangement(lff);
  classify_edges(arr, lff);
  return arr;
}

struct Instance {
  std::string name;
  CreaseInput input;
};

/// The oracle-equivalence corpus: simple fold sequences with and without
/// label flips, short accordions, and random single vertices of degree 4
/// and 6 (flat-foldable angles, random labels).
inline std::vector<Instance> corpus() {
  std::vector<Instance> out;
  for (std::size_t k = 1; k <= 3; ++k) {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
      GenSpec spec = GenSpec::simple_fold_sequence(k, seed);
      out.push_back({"fold_seq_k" + std::to_string(k) + "_s" + std::to_string(seed), generate(spec)});
      spec.flips = 1;
      out.push_back({"fold_seq_k" + std::to_string(k) + "_s" + std::to_string(seed) + "_flip", generate(spec)});
    }
  }
  for (std::size_t n = 1; n <= 5; ++n) {
    GenSpec spec = GenSpec::accordion(n);
    out.push_back({"accordion_" + std::to_string(n), generate(spec)});
    spec.flips = 1;
    spec.seed = n;
    out.push_back({"accordion_" + std::to_string(n) + "_flip", generate(spec)});
  }
  for (std::size_t degree : {4, 6}) {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
      auto angles = random_kawasaki_angles(degree, seed);
      auto labels = random_labels(degree, seed);
      out.push_back({"vertex_d" + std::to_string(degree) + "_s" + std::to_string(seed),
                     generate(GenSpec::single_vertex(angles, labels))});
    }
  }
  return out;
}

}  // namespace foldcheck::test_support

#endif  // FOLDCHECK_TESTS_SUPPORT_HPP
