#include "foldcheck/cli.hpp"
#include "support.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace foldcheck;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail.clear();
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
};

struct CliRun {
  int code = -1;
  std::string out, err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const fs::path& scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::current_path() / "acceptance_out";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// 1. Canonical fixtures.
Outcome fixtures() {
  struct Case {
    const char* file;
    int code;
  };
  const Case cases[] = {{"instanceA.fold", 0},
                        {"crimp.fold", 0},
                        {"mmmm_vertex.fold", 1},
                        {"mmmv_vertex.fold", 0},
                        {"kawasaki_violation.fold", 2}};
  Outcome o;
  double slowest = 0;
  for (const auto& c : cases) {
    fs::path witness = scratch() / (std::string(c.file) + ".witness.json");
    auto t0 = Clock::now();
    CliRun r = cli({"check", test_support::fixture_path(c.file), "--witness", witness.string(), "--stats-json"});
    double ms = ms_since(t0);
    slowest = std::max(slowest, ms);
    if (r.code != c.code) o.fail(std::string(c.file) + " exit " + std::to_string(r.code));
    if (ms >= 1000) o.fail(std::string(c.file) + " took " + std::to_string(ms) + " ms");
    if (std::string(c.file) == "instanceA.fold") {
      auto w = nlohmann::json::parse(slurp(witness));
      if (w["cells"]["1"] != nlohmann::json::array({"0", "1"})) o.fail("instanceA witness " + w["cells"].dump());
      auto report = nlohmann::json::parse(r.out);
      if (report["ply"] != 2) o.fail("instanceA ply " + report["ply"].dump());
    }
    if (std::string(c.file) == "crimp.fold") {
      if (nlohmann::json::parse(r.out)["ply"] != 3) o.fail("crimp ply");
    }
  }
  if (o.pass) o.detail = "5 fixtures, slowest " + std::to_string(static_cast<int>(slowest)) + " ms";
  return o;
}

struct CorpusOutcomes {
  Outcome oracle, states, decomposition, witness;
};

// 2, 3, 5 and 7 share one pass over the corpus.
CorpusOutcomes corpus_pass(const std::vector<test_support::Instance>& corpus) {
  CorpusOutcomes r;
  std::size_t compared = 0, skipped = 0, audited = 0, feasible_runs = 0;
  std::size_t decompositions = 0;
  auto t0 = Clock::now();
  for (const auto& inst : corpus) {
    auto lff = test_support::fold_of(inst.input);
    Arrangement arr = test_support::arrangement_of(lff);
    CellGraph graph = cell_graph(arr);
    Graph g = Graph::from_cell_graph(graph);
    NiceTreeDecomposition nice = make_nice(decompose(g));

    auto v = verify(g, nice.as_tree());
    std::string grammar = nice_grammar_violation(nice);
    if (!v) r.decomposition.fail(inst.name + ": " + v.describe());
    if (!grammar.empty()) r.decomposition.fail(inst.name + ": " + grammar);
    ++decompositions;

    bool all_compared = true;
    for (FoldMode mode : {FoldMode::Labeled, FoldMode::Unlabeled}) {
      DpResult dp = dp_solve(arr, graph, nice, DpOptions{mode, 1});
      try {
        state_count_audit(dp);
        ++audited;
      } catch (const std::exception& e) {
        r.states.fail(inst.name + ": " + e.what());
      }
      if (dp.feasible) {
        ++feasible_runs;
        if (!dp.witness) {
          r.witness.fail(inst.name + ": feasible without witness");
        } else {
          for (const auto& e : arr.edges) {
            if (!check_edge(e, dp.witness->of(e.cell_a), dp.witness->of(e.cell_b), mode)) {
              r.witness.fail(inst.name + ": edge " + std::to_string(e.id) + " crossed");
            }
          }
        }
      }
      try {
        OracleResult o = oracle_solve(arr, mode);
        if (o.feasible != dp.feasible) {
          r.oracle.fail(inst.name + " " + to_string(mode));
        }
      } catch (const OracleBudgetExceeded&) {
        all_compared = false;
      }
    }
    all_compared ? ++compared : ++skipped;
  }
  double ms = ms_since(t0);
  if (compared < 100) r.oracle.fail("only " + std::to_string(compared) + " instances within budget");
  if (ms >= 5 * 60 * 1000) r.oracle.fail("took " + std::to_string(ms / 1000) + " s");
  if (r.oracle.pass) {
    r.oracle.detail = std::to_string(compared) + " instances x 2 modes, " + std::to_string(skipped) +
                      " over budget, 0 disagreements, " + std::to_string(static_cast<int>(ms / 1000)) + " s";
  }
  if (r.states.pass) r.states.detail = std::to_string(audited) + " runs audited";
  if (r.decomposition.pass) r.decomposition.detail = std::to_string(decompositions) + " decompositions valid";
  if (r.witness.pass) r.witness.detail = std::to_string(feasible_runs) + " witnesses, 0 crossed edges";
  return r;
}

// 4. The folded state of a map or accordion is a single stack.
Outcome structure() {
  Outcome o;
  std::vector<std::pair<std::string, CreaseInput>> cases;
  for (std::size_t r = 1; r <= 3; ++r) {
    for (std::size_t c = 1; c <= 4; ++c) {
      cases.push_back({"map_grid " + std::to_string(r) + "x" + std::to_string(c), generate(GenSpec::map_grid(r, c))});
    }
  }
  for (std::size_t n = 1; n <= 7; ++n) cases.push_back({"accordion " + std::to_string(n), generate(GenSpec::accordion(n))});
  for (const auto& [name, ci] : cases) {
    CellGraph g = cell_graph(test_support::arrangement_of(test_support::fold_of(ci)));
    if (g.num_cells != 2 || g.edges.size() != 1) {
      o.fail(name + ": " + std::to_string(g.num_cells) + " cells, " + std::to_string(g.edges.size()) + " edges");
      continue;
    }
    TreeDecomposition td = decompose(Graph::from_cell_graph(g));
    if (td.width() > 1) o.fail(name + ": width " + std::to_string(td.width()));
  }
  if (o.pass) o.detail = std::to_string(cases.size()) + " instances, cell graph K2, width 1";
  return o;
}

// 6. Geometry stages on 1xc maps, and one large accordion end to end.
Outcome scaling() {
  Outcome o;
  std::vector<double> t;
  for (std::size_t c = 2; c <= 12; ++c) {
    double best = 1e300;
    for (int rep = 0; rep < 5; ++rep) {
      CreaseInput ci = generate(GenSpec::map_grid(1, c));
      auto t0 = Clock::now();
      auto lff = test_support::fold_of(ci);
      Arrangement arr = test_support::arrangement_of(lff);
      CellGraph g = cell_graph(arr);
      if (g.num_cells == 0) o.fail("empty cell graph");
      best = std::min(best, ms_since(t0));
    }
    t.push_back(best);
  }
  double base = t[0] / 4.0;
  double worst = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    double c = static_cast<double>(i + 2);
    double ratio = t[i] / (base * c * c);
    worst = std::max(worst, ratio);
    if (ratio > 3.0) o.fail("c=" + std::to_string(i + 2) + " at " + std::to_string(ratio) + "x the c^2 curve");
  }

  auto t0 = Clock::now();
  PipelineRun run = run_pipeline(generate(GenSpec::accordion(7)));
  double acc_ms = ms_since(t0);
  if (run.verdict != Verdict::Foldable) o.fail("accordion(7) not foldable");
  if (run.arrangement.max_ply() != 8) o.fail("accordion(7) ply " + std::to_string(run.arrangement.max_ply()));
  if (run.nice.width() != 1) o.fail("accordion(7) width " + std::to_string(run.nice.width()));
  if (acc_ms >= 10000) o.fail("accordion(7) took " + std::to_string(acc_ms) + " ms");
  if (o.pass) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "map_grid c=2..12 within %.2fx of c^2 (%.2f..%.2f ms); accordion(7) %.0f ms", worst,
                  t.front(), t.back(), acc_ms);
    o.detail = buf;
  }
  return o;
}

nlohmann::ordered_json without_timings(const std::string& report) {
  auto j = nlohmann::ordered_json::parse(report);
  j.erase("timings_ms");
  return j;
}

// 8. Byte-identical outputs across repeated runs and thread counts.
Outcome determinism(const std::vector<test_support::Instance>& corpus) {
  Outcome o;
  std::size_t runs = 0;
  for (const auto& inst : corpus) {
    fs::path input = scratch() / (inst.name + ".fold");
    {
      std::ofstream(input, std::ios::binary) << to_fold_json(inst.input);
    }
    struct Output {
      CliRun run;
      nlohmann::ordered_json report;
      std::string witness, svg;
    };
    auto once = [&](const std::string& tag, const std::string& threads) {
      fs::path w = scratch() / (inst.name + "." + tag + ".witness.json");
      fs::path s = scratch() / (inst.name + "." + tag + ".svg");
      Output out;
      out.run = cli({"check", input.string(), "--stats-json", "--witness", w.string(), "--svg", s.string(), "--threads",
                     threads});
      out.report = without_timings(out.run.out);
      out.witness = slurp(w);
      out.svg = slurp(s);
      ++runs;
      return out;
    };
    Output a = once("a", "1"), b = once("b", "1"), c = once("c", "4");
    for (const Output* other : {&b, &c}) {
      if (other->run.code != a.run.code) o.fail(inst.name + ": exit code differs");
      if (other->report.dump() != a.report.dump()) o.fail(inst.name + ": report differs");
      if (other->witness != a.witness) o.fail(inst.name + ": witness differs");
      if (other->svg != a.svg) o.fail(inst.name + ": svg differs");
    }
    if (a.svg.empty() || a.witness.empty()) o.fail(inst.name + ": missing output");
  }
  if (o.pass) o.detail = std::to_string(runs) + " runs over " + std::to_string(corpus.size()) + " instances, threads 1 and 4";
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int n, const char* title, const Outcome& o) {
    std::cout << "criterion " << n << " " << (o.pass ? "PASS" : "FAIL") << ": " << title << " (" << o.detail << ")"
              << std::endl;
    if (!o.pass) ++failures;
  };
  auto guarded = [](const std::function<Outcome()>& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      Outcome o;
      o.fail(std::string("exception: ") + e.what());
      return o;
    }
  };

  std::vector<test_support::Instance> corpus = test_support::corpus();

  report(1, "canonical fixtures", guarded(fixtures));
  CorpusOutcomes co;
  try {
    co = corpus_pass(corpus);
  } catch (const std::exception& e) {
    for (Outcome* o : {&co.oracle, &co.states, &co.decomposition, &co.witness}) o->fail(std::string("exception: ") + e.what());
  }
  report(2, "dp agrees with oracle on the corpus", co.oracle);
  report(3, "state counts within (p!)^|bag|", co.states);
  report(4, "map grids and accordions give a K2 cell graph of width <= 1", guarded(structure));
  report(5, "decompositions verify and nice grammar holds", co.decomposition);
  report(6, "scaling", guarded(scaling));
  report(7, "witness self-audit", co.witness);
  report(8, "determinism", guarded([&] { return determinism(corpus); }));
  return failures == 0 ? 0 : 1;
}
