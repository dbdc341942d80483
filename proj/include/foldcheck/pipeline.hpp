#ifndef FOLDCHECK_PIPELINE_HPP
#define FOLDCHECK_PIPELINE_HPP

#include "foldcheck/arrangement.hpp"
#include "foldcheck/crease_pattern.hpp"
#include "foldcheck/decomposition.hpp"
#include "foldcheck/fold_dp.hpp"
#include "foldcheck/local_fold.hpp"

#include <json.hpp>

#include <chrono>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace foldcheck {

enum class Verdict { Foldable, NotFoldable, NotLocallyFlat };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Foldable: return "foldable";
    case Verdict::NotFoldable: return "not-foldable";
    case Verdict::NotLocallyFlat: return "not-locally-flat";
  }
  return "?";
}

inline int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Foldable: return 0;
    case Verdict::NotFoldable: return 1;
    case Verdict::NotLocallyFlat: return 2;
  }
  return 4;
}

struct StageTime {
  std::string stage;
  double ms = 0;
};

/// Every intermediate product of one run. Fields past `pattern` are set only
/// when the corresponding stage was reached.
struct PipelineRun {
  FoldMode mode = FoldMode::Labeled;
  Verdict verdict = Verdict::NotFoldable;
  CreasePattern pattern;
  std::optional<NotLocallyFlat> not_flat;
  std::optional<LocalFlatFolding> folding;
  Arrangement arrangement;
  CellGraph graph;
  NiceTreeDecomposition nice;
  DpResult dp;
  AuditSummary audit;
  std::vector<StageTime> timings;
};

namespace detail {

class StageClock {
 public:
  explicit StageClock(std::vector<StageTime>& out) : out_(out), start_(std::chrono::steady_clock::now()) {}
  void lap(std::string stage) {
    auto now = std::chrono::steady_clock::now();
    out_.push_back({std::move(stage), std::chrono::duration<double, std::milli>(now - start_).count()});
    start_ = now;
  }

 private:
  std::vector<StageTime>& out_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// Runs everything after parsing: pattern, local folding, arrangement, cell
/// graph, decomposition, nice form and the layering DP.
inline PipelineRun run_pipeline(const CreaseInput& input, DpOptions opt = {}) {
  PipelineRun run;
  run.mode = opt.mode;
  detail::StageClock clock(run.timings);

  run.pattern = build_pattern(input);
  clock.lap("build_pattern");

  auto rec = reconstruct(run.pattern);
  clock.lap("reconstruct");
  if (auto* bad = std::get_if<NotLocallyFlat>(&rec)) {
    run.not_flat = *bad;
    run.verdict = Verdict::NotLocallyFlat;
    return run;
  }
  run.folding = std::move(std::get<LocalFlatFolding>(rec));

  run.arrangement = build_arrangement(*run.folding);
  classify_edges(run.arrangement, *run.folding);
  clock.lap("arrangement");

  run.graph = cell_graph(run.arrangement);
  clock.lap("cell_graph");

  Graph g = Graph::from_cell_graph(run.graph);
  TreeDecomposition td = decompose(g);
  if (auto v = verify(g, td); !v) throw InternalError("tree decomposition invalid: " + v.describe());
  clock.lap("decompose");

  run.nice = make_nice(td);
  if (auto v = verify(g, run.nice.as_tree()); !v) throw InternalError("nice decomposition invalid: " + v.describe());
  if (auto why = nice_grammar_violation(run.nice); !why.empty()) throw InternalError("nice decomposition: " + why);
  if (run.nice.width() != td.width()) throw InternalError("nice conversion changed the width");
  clock.lap("make_nice");

  run.dp = dp_solve(run.arrangement, run.graph, run.nice, opt);
  run.audit = state_count_audit(run.dp);
  clock.lap("dp");

  run.verdict = run.dp.feasible ? Verdict::Foldable : Verdict::NotFoldable;
  return run;
}

/// The run report. Timings are kept under their own key so callers can drop
/// them before comparing reports.
inline nlohmann::ordered_json report_json(const PipelineRun& run) {
  nlohmann::ordered_json j;
  j["verdict"] = to_string(run.verdict);
  j["mode"] = to_string(run.mode);
  j["vertices"] = run.pattern.vertices.size();
  j["creases"] = run.pattern.creases.size();
  j["faces"] = run.pattern.faces.size();
  if (run.not_flat) {
    j["inconsistent_crease"] = run.not_flat->crease;
    j["input_edge"] = run.pattern.creases[run.not_flat->crease].input_edge;
    j["diagnostic"] = run.not_flat->message;
  } else {
    j["ply"] = run.arrangement.max_ply();
    j["cells"] = run.arrangement.cells.size();
    j["arrangement_edges"] = run.arrangement.edges.size();
    j["cell_graph_edges"] = run.graph.edges.size();
    j["width"] = run.nice.width();
    j["nice_nodes"] = run.nice.nodes.size();
    j["state_count_max"] = run.audit.max_states;
    j["state_bound_ratio_max"] = static_cast<double>(run.audit.max_ratio);
  }
  nlohmann::ordered_json t = nlohmann::ordered_json::object();
  for (const auto& s : run.timings) t[s.stage] = s.ms;
  j["timings_ms"] = std::move(t);
  return j;
}

}  // namespace foldcheck

#endif  // FOLDCHECK_PIPELINE_HPP
