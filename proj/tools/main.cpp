#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "experiment.hpp"

namespace {

using manial::ExperimentConfig;
using manial::ProblemKind;
using manial::SolverKind;

ProblemKind parse_problem(const std::string& name) {
  if (name == "spca") return ProblemKind::kSpca;
  if (name == "scca") return ProblemKind::kScca;
  throw std::invalid_argument("unknown problem '" + name + "' (expected spca or scca)");
}

SolverKind parse_solver(const std::string& name) {
  if (name == "manial-I") return SolverKind::kManialResidual;
  if (name == "manial-II") return SolverKind::kManialFixedBudget;
  if (name == "stomanial") return SolverKind::kStoManial;
  if (name == "rsub") return SolverKind::kRsub;
  throw std::invalid_argument("unknown solver '" + name +
                              "' (expected manial-I, manial-II, stomanial or rsub)");
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void apply_json_config(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  nlohmann::json j;
  in >> j;
  if (j.contains("problem")) cfg.problem = parse_problem(j.at("problem").get<std::string>());
  if (j.contains("m")) cfg.m = j.at("m").get<int>();
  if (j.contains("n")) cfg.n = j.at("n").get<int>();
  if (j.contains("p")) cfg.p = j.at("p").get<int>();
  if (j.contains("q")) cfg.q = j.at("q").get<int>();
  if (j.contains("data-seed")) cfg.data_seed = j.at("data-seed").get<std::uint64_t>();
  if (j.contains("x-file")) cfg.x_path = j.at("x-file").get<std::string>();
  if (j.contains("y-file")) cfg.y_path = j.at("y-file").get<std::string>();
  if (j.contains("r")) cfg.r = j.at("r").get<int>();
  if (j.contains("mu")) cfg.mu = j.at("mu").get<double>();
  if (j.contains("mu1")) cfg.mu1 = j.at("mu1").get<double>();
  if (j.contains("mu2")) cfg.mu2 = j.at("mu2").get<double>();
  if (j.contains("ridge")) cfg.ridge = j.at("ridge").get<double>();
  if (j.contains("solver")) cfg.solver = parse_solver(j.at("solver").get<std::string>());
  if (j.contains("b")) cfg.b = j.at("b").get<double>();
  if (j.contains("beta0")) cfg.beta0 = j.at("beta0").get<double>();
  if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
  if (j.contains("max-outer")) cfg.max_outer = j.at("max-outer").get<int>();
  if (j.contains("inner-cap")) cfg.inner_cap = j.at("inner-cap").get<long>();
  if (j.contains("batches")) cfg.batches = j.at("batches").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("gamma0")) cfg.gamma0 = j.at("gamma0").get<double>();
  if (j.contains("rsub-steps")) cfg.rsub_steps = j.at("rsub-steps").get<long>();
  if (j.contains("trace")) cfg.trace_path = j.at("trace").get<std::string>();
  if (j.contains("summary")) cfg.summary_path = j.at("summary").get<std::string>();
  if (j.contains("no-timing")) cfg.timing = !j.at("no-timing").get<bool>();
}

std::string with_seed_suffix(const std::string& path, std::uint64_t seed) {
  const std::size_t dot = path.find_last_of('.');
  const std::size_t slash = path.find_last_of('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  const std::string stem = has_ext ? path.substr(0, dot) : path;
  const std::string ext = has_ext ? path.substr(dot) : std::string();
  return stem + "-seed" + std::to_string(seed) + ext;
}

int run_seeds(const ExperimentConfig& base, const std::vector<std::uint64_t>& seeds) {
  std::vector<std::thread> workers;
  std::vector<int> codes(seeds.size(), 1);
  std::vector<std::string> errors(seeds.size());
  std::mutex io_mutex;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    workers.emplace_back([&, i] {
      ExperimentConfig cfg = base;
      cfg.seed = seeds[i];
      cfg.trace_path = with_seed_suffix(base.trace_path, seeds[i]);
      if (!base.summary_path.empty())
        cfg.summary_path = with_seed_suffix(base.summary_path, seeds[i]);
      try {
        const manial::ExperimentOutcome out = manial::run_experiment(cfg);
        codes[i] = out.exit_code;
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cout << "seed " << seeds[i] << ": " << out.termination
                  << " objective " << out.final_objective << " oracle_calls "
                  << out.oracle_calls << " -> " << cfg.trace_path << '\n';
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    });
  }
  for (std::thread& w : workers) w.join();
  int worst = 0;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (!errors[i].empty()) {
      std::cerr << "error: seed " << seeds[i] << ": " << errors[i] << '\n';
      return 1;
    }
    worst = std::max(worst, codes[i]);
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian composite-optimization experiment runner"};
  app.require_subcommand(1);

  // run ----------------------------------------------------------------
  CLI::App* run = app.add_subcommand("run", "build an instance, run a solver, write outputs");
  std::string problem = "spca", solver = "manial-I", config_path, seeds_csv;
  std::string x_file, y_file, trace_path, summary_path;
  int m = 0, n = 0, p = 0, q = 0, r = 0, max_outer = 0, batches = 0;
  std::uint64_t data_seed = 0, seed = 0;
  double mu = 0, mu1 = 0, mu2 = 0, ridge = 0, b = 0, beta0 = 0, tol = 0, gamma0 = 0;
  long inner_cap = 0, rsub_steps = 0;
  bool no_timing = false;

  run->add_option("--config", config_path, "JSON config file; explicit flags override it");
  run->add_option("--problem", problem, "spca or scca");
  run->add_option("--m", m, "synthetic sample count (spca)");
  run->add_option("--n", n, "synthetic dimension (spca) or sample count (scca)");
  run->add_option("--p", p, "first view dimension (scca)");
  run->add_option("--q", q, "second view dimension (scca)");
  run->add_option("--data-seed", data_seed, "synthetic data seed");
  run->add_option("--x-file", x_file, "CSV matrix source (spca data, scca first view)");
  run->add_option("--y-file", y_file, "CSV matrix source (scca second view)");
  run->add_option("--r", r, "rank / number of components");
  run->add_option("--mu", mu, "l1 weight (spca)");
  run->add_option("--mu1", mu1, "first l1 weight (scca)");
  run->add_option("--mu2", mu2, "second l1 weight (scca)");
  run->add_option("--ridge", ridge, "covariance ridge (scca)");
  run->add_option("--solver", solver, "manial-I, manial-II, stomanial or rsub");
  run->add_option("--b", b, "penalty base of the residual-driven schedule");
  run->add_option("--beta0", beta0, "initial dual stepsize");
  run->add_option("--tol", tol, "stopping tolerance (default 1e-8 * rows * r)");
  run->add_option("--max-outer", max_outer, "outer iteration budget");
  run->add_option("--inner-cap", inner_cap, "inner iteration cap per outer step");
  run->add_option("--batches", batches, "finite-sum batch count");
  run->add_option("--seed", seed, "solver seed (initial point, sampling)");
  run->add_option("--gamma0", gamma0, "subgradient baseline initial stepsize");
  run->add_option("--rsub-steps", rsub_steps, "subgradient baseline step count");
  run->add_option("--trace", trace_path, "trace CSV output path");
  run->add_option("--summary", summary_path, "JSON summary output path");
  run->add_flag("--no-timing", no_timing, "write zero wall-clock columns (determinism)");
  run->add_option("--seeds", seeds_csv, "comma-separated seeds; fans out one thread per seed");

  // compare ------------------------------------------------------------
  CLI::App* cmp = app.add_subcommand("compare", "align traces on objective gap to best");
  std::vector<std::string> cmp_paths;
  std::string gaps_csv, cmp_json_path;
  cmp->add_option("traces", cmp_paths, "trace CSV files")->required()->expected(-1);
  cmp->add_option("--gaps", gaps_csv, "comma-separated gap thresholds (default 1e-1,1e-2,1e-3)");
  cmp->add_option("--json", cmp_json_path, "also write the comparison as JSON to this path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ExperimentConfig cfg;
      if (run->count("--config")) apply_json_config(cfg, config_path);
      if (run->count("--problem")) cfg.problem = parse_problem(problem);
      if (run->count("--m")) cfg.m = m;
      if (run->count("--n")) cfg.n = n;
      if (run->count("--p")) cfg.p = p;
      if (run->count("--q")) cfg.q = q;
      if (run->count("--data-seed")) cfg.data_seed = data_seed;
      if (run->count("--x-file")) cfg.x_path = x_file;
      if (run->count("--y-file")) cfg.y_path = y_file;
      if (run->count("--r")) cfg.r = r;
      if (run->count("--mu")) cfg.mu = mu;
      if (run->count("--mu1")) cfg.mu1 = mu1;
      if (run->count("--mu2")) cfg.mu2 = mu2;
      if (run->count("--ridge")) cfg.ridge = ridge;
      if (run->count("--solver")) cfg.solver = parse_solver(solver);
      if (run->count("--b")) cfg.b = b;
      if (run->count("--beta0")) cfg.beta0 = beta0;
      if (run->count("--tol")) cfg.tol = tol;
      if (run->count("--max-outer")) cfg.max_outer = max_outer;
      if (run->count("--inner-cap")) cfg.inner_cap = inner_cap;
      if (run->count("--batches")) cfg.batches = batches;
      if (run->count("--seed")) cfg.seed = seed;
      if (run->count("--gamma0")) cfg.gamma0 = gamma0;
      if (run->count("--rsub-steps")) cfg.rsub_steps = rsub_steps;
      if (run->count("--trace")) cfg.trace_path = trace_path;
      if (run->count("--summary")) cfg.summary_path = summary_path;
      if (no_timing) cfg.timing = false;

      if (!seeds_csv.empty()) {
        std::vector<std::uint64_t> seeds;
        for (const std::string& s : split_commas(seeds_csv)) seeds.push_back(std::stoull(s));
        if (seeds.empty()) throw std::invalid_argument("--seeds given but empty");
        return run_seeds(cfg, seeds);
      }
      const manial::ExperimentOutcome out = manial::run_experiment(cfg);
      std::cout << out.termination << ": objective " << out.final_objective
                << ", oracle_calls " << out.oracle_calls << ", trace " << cfg.trace_path
                << '\n';
      return out.exit_code;
    }

    std::vector<double> gaps = {1e-1, 1e-2, 1e-3};
    if (cmp->count("--gaps")) {
      gaps.clear();
      for (const std::string& s : split_commas(gaps_csv)) gaps.push_back(std::stod(s));
    }
    const manial::CompareResult result = manial::compare_traces(cmp_paths, gaps);
    std::cout << manial::compare_table(result);
    if (!cmp_json_path.empty()) {
      std::ofstream out(cmp_json_path);
      if (!out) throw std::runtime_error("cannot open " + cmp_json_path);
      out << manial::compare_json(result) << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
