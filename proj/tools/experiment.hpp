#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "manial/alm.hpp"
#include "manial/problems.hpp"

namespace manial {

enum class ProblemKind { kSpca, kScca };

enum class SolverKind {
  kManialResidual,     // "manial-I"
  kManialFixedBudget,  // "manial-II"
  kStoManial,          // "stomanial" (fixed-budget schedule)
  kRsub                // "rsub"
};

/// One experiment: problem source, solver choice and its knobs, output paths.
struct ExperimentConfig {
  ProblemKind problem = ProblemKind::kSpca;
  // Synthetic source dimensions (ignored when file paths are set).
  int m = 500;
  int n = 100;
  int p = 50;
  int q = 50;
  std::uint64_t data_seed = 7;
  // File source: SPCA reads x_path; SCCA reads x_path and y_path.
  std::string x_path;
  std::string y_path;
  int r = 5;
  double mu = 0.5;
  double mu1 = 0.2;
  double mu2 = 0.2;
  double ridge = 1e-6;
  SolverKind solver = SolverKind::kManialResidual;
  double b = 2.0;
  double beta0 = 1.0;
  /// Stopping tolerance; when unset, 1e-8 * (ambient rows) * r.
  std::optional<double> tol;
  int max_outer = 60;
  long inner_cap = 1000000;
  int batches = 100;
  std::uint64_t seed = 7;
  // Subgradient baseline knobs.
  double gamma0 = 1e-2;
  long rsub_steps = 2000;
  std::string trace_path = "trace.csv";
  /// JSON summary path; when empty, trace_path with its extension replaced
  /// by ".json".
  std::string summary_path;
  /// With timing off, wall-clock columns are written as zero so identical
  /// configs produce byte-identical outputs.
  bool timing = true;

  /// Validates ranges and mutual consistency; throws std::invalid_argument.
  void validate() const;
};

struct ExperimentOutcome {
  int exit_code = 0;  // 0 converged/completed, 2 budget exhausted
  double final_objective = 0.0;
  KktResiduals final_residuals;  // zeros for the subgradient baseline
  long oracle_calls = 0;
  double seconds = 0.0;
  std::string termination;  // "converged" | "budget-exhausted" | "completed"
};

/// Builds the instance, runs the solver, writes the trace CSV and the JSON
/// summary. Throws on invalid configs and I/O failures.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

/// Effective stopping tolerance of a config (resolves the default formula).
double effective_tol(const ExperimentConfig& cfg);

struct CompareEntry {
  long oracle_calls = 0;
  double seconds = 0.0;
};

struct CompareRow {
  std::string path;
  double final_objective = 0.0;
  double best_objective = 0.0;  // best row objective in this trace
  /// Entry i: first trace row whose objective is within gaps[i] of the
  /// best objective across all traces; empty when never reached.
  std::vector<std::optional<CompareEntry>> to_gap;
};

struct CompareResult {
  std::vector<double> gaps;
  double best_objective = 0.0;  // min objective across every row of every trace
  std::vector<CompareRow> rows;
};

/// Aligns traces on the objective-gap-to-best metric. Unreadable or
/// malformed traces raise std::runtime_error listing every offending file.
CompareResult compare_traces(const std::vector<std::string>& paths,
                             const std::vector<double>& gaps = {1e-1, 1e-2, 1e-3});

/// Plain-text table; unreached thresholds render as an em dash.
std::string compare_table(const CompareResult& r);

/// JSON document with the same content as the table.
std::string compare_json(const CompareResult& r);

}  // namespace manial
