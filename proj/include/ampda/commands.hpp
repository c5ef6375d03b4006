#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ampda/data_io.hpp"
#include "ampda/oracles.hpp"
#include "ampda/solver.hpp"

namespace ampda {

/// Model selector as exposed on the command line. l1l2_ls is the
/// least-squares special case of l1l2 with the impulse count forced to 0.
enum class ModelVariant { l1l2, l1sk, l1l2_ls };

ModelVariant parse_variant(const std::string& name);
const char* variant_name(ModelVariant variant);
double default_lambda(ModelVariant variant);
DenominatorVariant denominator_of(ModelVariant variant);

/// Optional solver-parameter overrides layered onto the defaults.
struct SolverOverrides {
  std::optional<double> alpha_min, alpha_max, sigma, gamma, term_tol;
  std::optional<std::size_t> max_iters, max_backtracks;

  SolverConfig apply(SolverConfig base = {}) const;
};

struct GenerateOptions {
  ModelVariant variant = ModelVariant::l1l2;
  std::size_t R = 1;
  std::uint64_t seed = 0;
  std::optional<double> lambda;
  std::optional<std::size_t> K, mu;
  std::string output_path = "instance.txt";
};

struct SolveOptions {
  std::string instance_path;  // container input ...
  std::string libsvm_path;    // ... or LIBSVM input (exactly one)
  std::optional<std::size_t> libsvm_features;
  ModelVariant variant = ModelVariant::l1l2;
  std::optional<double> lambda;
  std::optional<std::size_t> K, mu;
  std::string x0_path;  // explicit starting point, one value per coordinate
  std::string out_dir = ".";
  SolverOverrides solver;
};

struct CheckOptions {
  std::string instance_path;
  std::string trace_csv_path;
  ModelVariant variant = ModelVariant::l1l2;
  std::optional<double> lambda;
  std::optional<std::size_t> K, mu;
  std::string x0_path;
  std::string out_dir = ".";
  SolverOverrides solver;
};

struct BenchOptions {
  ModelVariant variant = ModelVariant::l1l2;
  std::size_t R = 1;
  std::size_t runs = 50;
  std::uint64_t master_seed = 20250101;
  std::optional<double> lambda;
  std::optional<std::size_t> K, mu;
  std::string out_dir = ".";
  SolverOverrides solver;
  bool zero_times = false;  // write timing fields as 0 for byte-reproducible output
};

// Exit codes: 0 success, 1 usage, 2 input/parse, 3 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

/// Maps a thrown library error onto the exit-code contract.
int exit_code_for(const Error& error);

/// Writes the instance container for one synthetic instance.
int cmd_generate(const GenerateOptions& options);

/// Builds the problem, constructs (or loads) the starting point, solves,
/// and writes trace.csv plus solve_summary.json into out_dir. A constructed
/// starting point that misses the admissibility threshold aborts the solve
/// unless an explicit x0 override was given. Returns 0 only when the solver
/// converged.
int cmd_solve(const SolveOptions& options);

/// Deterministically re-runs the solve described by the options, audits the
/// full trace, cross-checks the given trace CSV row by row, and writes
/// report.json. Returns 0 only for a clean audit and a matching CSV.
int cmd_check(const CheckOptions& options);

/// Seeded batch: generates `runs` instances from the master seed, solves
/// each, and writes summary.json, table.txt and fvstime.csv into out_dir.
/// Runs may execute in parallel workers (AMPDA_BENCH_WORKERS caps the
/// count); records are sorted by seed so the output does not depend on
/// scheduling. Returns nonzero when more than 10% of the runs fail.
int cmd_bench(const BenchOptions& options);

namespace detail {

struct PreparedRun {
  GeneratedInstance gen;
  FractionalProblem problem;
  InitialPoint start;
  double startup_s = 0.0;
};

/// Generation + wiring + starting point for one bench run; exposed for the
/// acceptance suite, which reuses the exact bench execution path.
PreparedRun prepare_run(const SyntheticSpec& spec, ModelVariant variant);

/// Criticality measure at the smaller of the last accepted stepsize and 1.
double final_criticality(const FractionalProblem& problem, const SolveResult& result,
                         double* alpha_used = nullptr);

}  // namespace detail

}  // namespace ampda
