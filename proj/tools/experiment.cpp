#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace manial {

namespace {

std::string default_summary_path(const std::string& trace_path) {
  const std::size_t dot = trace_path.find_last_of('.');
  const std::size_t slash = trace_path.find_last_of('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? trace_path.substr(0, dot) : trace_path) + ".json";
}

CompositeProblem build_problem(const ExperimentConfig& cfg) {
  if (cfg.problem == ProblemKind::kSpca) {
    const Matrix b = cfg.x_path.empty() ? gen_spca_data(cfg.m, cfg.n, cfg.data_seed)
                                        : load_matrix(cfg.x_path);
    return build_spca(b, cfg.mu, cfg.r, cfg.batches);
  }
  Matrix xd, yd;
  if (cfg.x_path.empty()) {
    SccaData data = gen_scca_data(cfg.n, cfg.p, cfg.q, cfg.data_seed);
    xd = std::move(data.x);
    yd = std::move(data.y);
  } else {
    xd = load_matrix(cfg.x_path);
    yd = load_matrix(cfg.y_path);
  }
  return build_scca(xd, yd, cfg.mu1, cfg.mu2, cfg.r, cfg.ridge, cfg.batches);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (r < 1) throw std::invalid_argument("config: r must be positive");
  if (problem == ProblemKind::kSpca) {
    if (x_path.empty() && (m < 2 || n < 1))
      throw std::invalid_argument("config: spca synthetic source needs m >= 2, n >= 1");
    if (mu < 0.0) throw std::invalid_argument("config: mu must be nonnegative");
  } else {
    if (x_path.empty() != y_path.empty())
      throw std::invalid_argument("config: scca file source needs both x-file and y-file");
    if (x_path.empty() && (n < 1 || p < 1 || q < 1))
      throw std::invalid_argument("config: scca synthetic source needs n, p, q >= 1");
    if (mu1 < 0.0 || mu2 < 0.0)
      throw std::invalid_argument("config: mu1, mu2 must be nonnegative");
    if (ridge < 0.0) throw std::invalid_argument("config: ridge must be nonnegative");
  }
  if (solver == SolverKind::kManialResidual && !(b > 1.0))
    throw std::invalid_argument("config: penalty base b must exceed 1");
  if (!(beta0 > 0.0)) throw std::invalid_argument("config: beta0 must be positive");
  if (tol && !(*tol > 0.0)) throw std::invalid_argument("config: tol must be positive");
  if (max_outer < 1) throw std::invalid_argument("config: max-outer must be positive");
  if (inner_cap < 1) throw std::invalid_argument("config: inner-cap must be positive");
  if (batches < 1) throw std::invalid_argument("config: batches must be positive");
  if (solver == SolverKind::kRsub) {
    if (!(gamma0 > 0.0)) throw std::invalid_argument("config: gamma0 must be positive");
    if (rsub_steps < 1) throw std::invalid_argument("config: rsub-steps must be positive");
  }
  if (trace_path.empty()) throw std::invalid_argument("config: trace path must be set");
}

double effective_tol(const ExperimentConfig& cfg) {
  if (cfg.tol) return *cfg.tol;
  const long rows = (cfg.problem == ProblemKind::kSpca) ? cfg.n : cfg.p;
  return 1e-8 * static_cast<double>(rows) * static_cast<double>(cfg.r);
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const CompositeProblem problem = build_problem(cfg);
  const std::string summary_path =
      cfg.summary_path.empty() ? default_summary_path(cfg.trace_path) : cfg.summary_path;

  ExperimentOutcome out;
  std::vector<TraceRecord> trace;

  if (cfg.solver == SolverKind::kRsub) {
    trace = rsub_baseline(problem, cfg.gamma0, cfg.rsub_steps, cfg.seed);
    out.final_objective = trace.back().objective;
    out.oracle_calls = trace.back().oracle_calls;
    out.seconds = trace.back().wall_seconds;
    out.termination = "completed";
    out.exit_code = 0;
  } else {
    AlmConfig alm;
    alm.option = (cfg.solver == SolverKind::kManialResidual) ? AlmOption::kResidual
                                                             : AlmOption::kFixedBudget;
    alm.b = cfg.b;
    alm.beta0 = cfg.beta0;
    alm.tol = effective_tol(cfg);
    alm.max_outer = cfg.max_outer;
    alm.inner_cap = cfg.inner_cap;
    alm.seed = cfg.seed;
    alm.collect_timing = cfg.timing;
    const AlmResult result = (cfg.solver == SolverKind::kStoManial) ? stomanial(problem, alm)
                                                                    : manial(problem, alm);
    trace = result.trace;
    out.final_objective = problem.objective(result.x.value());
    if (!trace.empty()) {
      out.final_residuals.primal = trace.back().eta_p;
      out.final_residuals.dual = trace.back().eta_d;
      out.final_residuals.complementarity = trace.back().eta_c;
    }
    out.oracle_calls = result.oracle_calls;
    out.seconds = cfg.timing ? result.seconds : 0.0;
    const bool converged = result.status == AlmStatus::kConverged;
    out.termination = converged ? "converged" : "budget-exhausted";
    out.exit_code = converged ? 0 : 2;
  }

  write_trace_csv(cfg.trace_path, trace, cfg.timing);

  nlohmann::json summary;
  summary["final_objective"] = out.final_objective;
  summary["final_residuals"] = {{"eta_p", out.final_residuals.primal},
                                {"eta_d", out.final_residuals.dual},
                                {"eta_C", out.final_residuals.complementarity}};
  summary["oracle_calls"] = out.oracle_calls;
  summary["seconds"] = out.seconds;
  summary["termination"] = out.termination;
  summary["exit_code"] = out.exit_code;
  std::ofstream sout(summary_path);
  if (!sout) throw std::runtime_error("cannot open summary file " + summary_path);
  sout << summary.dump(2) << '\n';
  if (!sout) throw std::runtime_error("summary write failed for " + summary_path);
  return out;
}

CompareResult compare_traces(const std::vector<std::string>& paths,
                             const std::vector<double>& gaps) {
  if (paths.empty()) throw std::invalid_argument("compare: no trace files given");
  for (double g : gaps)
    if (!(g > 0.0)) throw std::invalid_argument("compare: gap thresholds must be positive");

  std::vector<std::vector<TraceRecord>> traces;
  std::string bad;
  for (const std::string& path : paths) {
    try {
      traces.push_back(read_trace_csv(path));
    } catch (const std::exception& e) {
      if (!bad.empty()) bad += "; ";
      bad += e.what();
    }
  }
  if (!bad.empty()) throw std::runtime_error("compare: unreadable traces: " + bad);

  CompareResult result;
  result.gaps = gaps;
  result.best_objective = std::numeric_limits<double>::infinity();
  for (const auto& t : traces)
    for (const TraceRecord& row : t)
      result.best_objective = std::min(result.best_objective, row.objective);

  for (std::size_t i = 0; i < traces.size(); ++i) {
    CompareRow row;
    row.path = paths[i];
    row.final_objective = traces[i].back().objective;
    row.best_objective = std::numeric_limits<double>::infinity();
    for (const TraceRecord& rec : traces[i])
      row.best_objective = std::min(row.best_objective, rec.objective);
    for (double gap : gaps) {
      std::optional<CompareEntry> hit;
      for (const TraceRecord& rec : traces[i]) {
        if (rec.objective <= result.best_objective + gap) {
          hit = CompareEntry{rec.oracle_calls, rec.wall_seconds};
          break;
        }
      }
      row.to_gap.push_back(hit);
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::string compare_table(const CompareResult& r) {
  char buf[64];
  std::string out = "trace";
  out += "\tfinal_objective";
  for (double gap : r.gaps) {
    std::snprintf(buf, sizeof buf, "\tcalls@%g\tseconds@%g", gap, gap);
    out += buf;
  }
  out += '\n';
  for (const CompareRow& row : r.rows) {
    out += row.path;
    std::snprintf(buf, sizeof buf, "\t%.10g", row.final_objective);
    out += buf;
    for (const auto& entry : row.to_gap) {
      if (entry) {
        std::snprintf(buf, sizeof buf, "\t%ld\t%.4g", entry->oracle_calls, entry->seconds);
        out += buf;
      } else {
        out += "\t—\t—";
      }
    }
    out += '\n';
  }
  std::snprintf(buf, sizeof buf, "best objective: %.10g\n", r.best_objective);
  out += buf;
  return out;
}

std::string compare_json(const CompareResult& r) {
  nlohmann::json doc;
  doc["gaps"] = r.gaps;
  doc["best_objective"] = r.best_objective;
  doc["rows"] = nlohmann::json::array();
  for (const CompareRow& row : r.rows) {
    nlohmann::json jrow;
    jrow["trace"] = row.path;
    jrow["final_objective"] = row.final_objective;
    jrow["best_objective"] = row.best_objective;
    jrow["to_gap"] = nlohmann::json::array();
    for (std::size_t i = 0; i < row.to_gap.size(); ++i) {
      nlohmann::json entry;
      entry["gap"] = r.gaps[i];
      if (row.to_gap[i]) {
        entry["oracle_calls"] = row.to_gap[i]->oracle_calls;
        entry["seconds"] = row.to_gap[i]->seconds;
      } else {
        entry["oracle_calls"] = nullptr;
        entry["seconds"] = nullptr;
      }
      jrow["to_gap"].push_back(entry);
    }
    doc["rows"].push_back(jrow);
  }
  return doc.dump(2);
}

}  // namespace manial
