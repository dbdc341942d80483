#ifndef FOLDCHECK_CLI_HPP
#define FOLDCHECK_CLI_HPP

#include "foldcheck/pipeline.hpp"
#include "foldcheck/svg.hpp"
#include "foldcheck/testgen.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace foldcheck {

namespace exit_codes {
inline constexpr int kFoldable = 0;
inline constexpr int kNotFoldable = 1;
inline constexpr int kNotLocallyFlat = 2;
inline constexpr int kInputError = 3;
inline constexpr int kInternalError = 4;
}  // namespace exit_codes

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << content;
  if (!out) throw InputError("failed writing " + path);
}

inline unsigned resolve_threads(int flag) {
  if (flag > 0) return static_cast<unsigned>(flag);
  if (const char* env = std::getenv("FOLDCHECK_THREADS")) {
    try {
      int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw InputError(std::string("FOLDCHECK_THREADS must be a positive integer, got '") + env + "'");
  }
  return 1;
}

inline std::vector<double> parse_angles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad angle '" + item + "'");
    }
  }
  return out;
}

struct CheckArgs {
  std::string file;
  bool ignore_labels = false;
  std::string witness, svg, decomposition;
  bool oracle = false;
  std::uint64_t oracle_budget = kDefaultOracleBudget;
  bool stats_json = false;
  int threads = 0;
};

inline void print_summary(std::ostream& out, const nlohmann::ordered_json& report) {
  for (const auto& [key, value] : report.items()) {
    if (key == "timings_ms") {
      out << "timings_ms:";
      for (const auto& [stage, ms] : value.items()) out << ' ' << stage << '=' << detail::fixed(ms.get<double>());
      out << '\n';
    } else if (key == "oracle") {
      out << "oracle: " << value.at("status").get<std::string>() << '\n';
    } else {
      out << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
    }
  }
}

inline int run_check(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  CreaseInput input = parse_fold(read_file(a.file));
  DpOptions opt{a.ignore_labels ? FoldMode::Unlabeled : FoldMode::Labeled, resolve_threads(a.threads)};
  PipelineRun run = run_pipeline(input, opt);
  nlohmann::ordered_json report = report_json(run);
  int code = exit_code(run.verdict);

  if (run.not_flat) {
    err << "not locally flat: " << run.not_flat->message << '\n';
  }
  if (a.oracle && !run.not_flat) {
    nlohmann::ordered_json o;
    try {
      OracleResult r = oracle_solve(run.arrangement, opt.mode, a.oracle_budget);
      bool agree = r.feasible == run.dp.feasible;
      o["status"] = agree ? "agree" : "disagree";
      o["foldable"] = r.feasible;
      if (!agree) {
        err << "oracle disagrees with the dynamic program\n";
        code = exit_codes::kInternalError;
      }
    } catch (const OracleBudgetExceeded& e) {
      o["status"] = "skipped (budget)";
      err << "oracle skipped (budget): " << e.what() << '\n';
    }
    // Keep timings as the final key.
    auto timings = report["timings_ms"];
    report.erase("timings_ms");
    report["oracle"] = std::move(o);
    report["timings_ms"] = std::move(timings);
  }

  if (!a.witness.empty()) {
    write_file(a.witness, witness_to_json(run.verdict == Verdict::Foldable, run.dp.witness).dump(2) + "\n");
  }
  if (!a.svg.empty()) {
    if (run.folding) {
      write_file(a.svg, render_svg(arrangement_to_json(run.arrangement, *run.folding)));
    } else {
      err << "svg not written: no arrangement for a pattern that is not locally flat\n";
    }
  }
  if (!a.decomposition.empty()) {
    if (run.folding) {
      write_file(a.decomposition, decomposition_to_json(run.nice).dump(2) + "\n");
    } else {
      err << "decomposition not written: no arrangement for a pattern that is not locally flat\n";
    }
  }
  if (a.stats_json) {
    out << report.dump(2) << '\n';
  } else {
    print_summary(out, report);
  }
  return code;
}

inline int run_cross_check(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  CreaseInput input = parse_fold(read_file(a.file));
  DpOptions opt{a.ignore_labels ? FoldMode::Unlabeled : FoldMode::Labeled, resolve_threads(a.threads)};
  PipelineRun run = run_pipeline(input, opt);
  if (run.not_flat) {
    out << "not locally flat: " << run.not_flat->message << '\n';
    return exit_codes::kNotLocallyFlat;
  }
  OracleResult r;
  try {
    r = oracle_solve(run.arrangement, opt.mode, a.oracle_budget);
  } catch (const OracleBudgetExceeded& e) {
    out << "oracle skipped (budget)\n";
    err << e.what() << '\n';
    return exit_codes::kFoldable;
  }
  nlohmann::ordered_json j;
  j["dp"] = witness_to_json(run.dp.feasible, run.dp.witness);
  j["oracle"] = witness_to_json(r.feasible, r.witness);
  if (r.feasible != run.dp.feasible) {
    out << "disagree: dp " << (run.dp.feasible ? "foldable" : "infeasible") << ", oracle "
        << (r.feasible ? "foldable" : "infeasible") << '\n'
        << j.dump(2) << '\n';
    return exit_codes::kInternalError;
  }
  out << "agree: " << (r.feasible ? "foldable" : "infeasible") << '\n' << j.dump(2) << '\n';
  return exit_codes::kFoldable;
}

struct GenArgs {
  std::string kind;
  std::uint64_t seed = 0;
  std::size_t n = 3, rows = 1, cols = 2, folds = 1, flips = 0;
  std::string angles, labels, output;
};

inline int run_gen(const GenArgs& a, std::ostream& out) {
  GenSpec spec;
  if (a.kind == "accordion") {
    spec = GenSpec::accordion(a.n);
  } else if (a.kind == "map_grid") {
    spec = GenSpec::map_grid(a.rows, a.cols);
  } else if (a.kind == "single_vertex") {
    spec = GenSpec::single_vertex(parse_angles(a.angles), a.labels);
  } else if (a.kind == "simple_fold_sequence") {
    spec = GenSpec::simple_fold_sequence(a.folds, a.seed);
  } else {
    throw std::invalid_argument("unknown kind '" + a.kind + "'");
  }
  spec.seed = a.seed;
  spec.flips = a.flips;
  std::string text = to_fold_json(generate(spec));
  if (a.output.empty() || a.output == "-") {
    out << text;
  } else {
    write_file(a.output, text);
  }
  return 0;
}

}  // namespace detail

/// Maps a failure to its exit code and prints a one-line diagnostic.
inline int exit_code_for(std::exception_ptr failure, std::ostream& err) {
  try {
    std::rethrow_exception(failure);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return exit_codes::kInputError;
  } catch (const GeometryError& e) {
    err << "input error: " << e.what() << '\n';
    return exit_codes::kInputError;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << '\n';
    return exit_codes::kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return exit_codes::kInternalError;
  } catch (...) {
    err << "internal error: unknown exception\n";
    return exit_codes::kInternalError;
  }
}

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"foldcheck: decide whether a crease pattern folds flat"};
  app.name("foldcheck");
  app.require_subcommand(1);

  detail::CheckArgs check;
  auto* check_cmd = app.add_subcommand("check", "run the full pipeline on a FOLD file");
  check_cmd->add_option("file", check.file, "crease pattern (.fold)")->required();
  auto* mv = check_cmd->add_flag("--mv", "respect mountain/valley labels (default)");
  check_cmd->add_flag("--ignore-labels", check.ignore_labels, "treat every crease as unassigned")->excludes(mv);
  check_cmd->add_option("--witness", check.witness, "write the witness layering JSON here");
  check_cmd->add_option("--svg", check.svg, "write an SVG of the arrangement here");
  check_cmd->add_option("--decomposition", check.decomposition, "write the nice tree decomposition JSON here");
  check_cmd->add_flag("--oracle", check.oracle, "also run the brute-force oracle and compare");
  check_cmd->add_option("--oracle-budget", check.oracle_budget, "maximum cell permutations the oracle may try");
  check_cmd->add_flag("--stats-json", check.stats_json, "print the run report as JSON");
  check_cmd->add_option("--threads", check.threads, "worker threads for the DP (default: FOLDCHECK_THREADS or 1)")
      ->check(CLI::PositiveNumber);

  detail::CheckArgs cross;
  auto* cross_cmd = app.add_subcommand("cross-check", "compare the DP verdict with the brute-force oracle");
  cross_cmd->add_option("file", cross.file, "crease pattern (.fold)")->required();
  auto* cmv = cross_cmd->add_flag("--mv", "respect mountain/valley labels (default)");
  cross_cmd->add_flag("--ignore-labels", cross.ignore_labels, "treat every crease as unassigned")->excludes(cmv);
  cross_cmd->add_option("--oracle-budget", cross.oracle_budget, "maximum cell permutations the oracle may try");
  cross_cmd->add_option("--threads", cross.threads, "worker threads for the DP")->check(CLI::PositiveNumber);

  detail::GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a test crease pattern");
  gen_cmd->add_option("--kind", gen.kind, "accordion | map_grid | single_vertex | simple_fold_sequence")
      ->required()
      ->check(CLI::IsMember({"accordion", "map_grid", "single_vertex", "simple_fold_sequence"}));
  gen_cmd->add_option("--seed", gen.seed, "random seed");
  gen_cmd->add_option("--n", gen.n, "accordion crease count");
  gen_cmd->add_option("--rows", gen.rows, "map grid rows");
  gen_cmd->add_option("--cols", gen.cols, "map grid columns");
  gen_cmd->add_option("--angles", gen.angles, "single vertex sector angles in degrees, comma separated");
  gen_cmd->add_option("--labels", gen.labels, "single vertex crease labels, e.g. MMMV");
  gen_cmd->add_option("--folds", gen.folds, "number of simple folds");
  gen_cmd->add_option("--flips", gen.flips, "number of labels to flip after generating");
  gen_cmd->add_option("-o,--output", gen.output, "output path (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "foldcheck: " << e.what() << '\n';
    return exit_codes::kInputError;
  }

  try {
    if (check_cmd->parsed()) return detail::run_check(check, out, err);
    if (cross_cmd->parsed()) return detail::run_cross_check(cross, out, err);
    return detail::run_gen(gen, out);
  } catch (...) {
    return exit_code_for(std::current_exception(), err);
  }
}

}  // namespace foldcheck

#endif  // FOLDCHECK_CLI_HPP
