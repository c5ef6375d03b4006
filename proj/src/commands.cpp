#include "ampda/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ampda/diagnostics.hpp"
#include "ampda/errors.hpp"
#include "ampda/kernels.hpp"
#include "ampda/rng.hpp"
#include "json.hpp"

namespace ampda {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "'");
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

Vector read_vector_file(const std::string& path, std::size_t expected) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  Vector v;
  double value = 0.0;
  while (in >> value) v.push_back(value);
  if (!in.eof()) throw ParseError("non-numeric token in vector file '" + path + "'", 0);
  if (v.size() != expected)
    throw ArgumentError("vector file '" + path + "' has " + std::to_string(v.size()) +
                        " values, expected " + std::to_string(expected));
  return v;
}

RecoveryInstance apply_model_overrides(RecoveryInstance inst, ModelVariant variant,
                                       const std::optional<double>& lambda,
                                       const std::optional<std::size_t>& K,
                                       const std::optional<std::size_t>& mu) {
  if (lambda) inst.lambda = *lambda;
  if (mu) inst.mu = *mu;
  if (K) inst.K = *K;
  if (variant == ModelVariant::l1l2_ls) inst.mu = 0;
  if (variant == ModelVariant::l1sk && !inst.K)
    throw ArgumentError("variant l1sk requires K (none in the instance, none given)");
  inst.validate();
  return inst;
}

struct SingleRun {
  FractionalProblem problem;
  InitialPoint start;
  bool explicit_x0 = false;
  SolveResult result;
  double startup_s = 0.0;
};

SingleRun run_model(const RecoveryInstance& instance, ModelVariant variant,
                    const std::string& x0_path, const SolverConfig& config) {
  SingleRun run;
  const auto t0 = Clock::now();
  run.problem = build_problem(instance, denominator_of(variant));
  Vector x0;
  if (!x0_path.empty()) {
    run.explicit_x0 = true;
    x0 = read_vector_file(x0_path, instance.n());
  } else {
    run.start = initial_point(instance);
    x0 = run.start.x0;
  }
  run.startup_s = seconds_since(t0);
  if (!run.explicit_x0 && !run.start.admissible) return run;  // caller decides
  run.result = solve(run.problem, x0, config);
  return run;
}

void write_solve_summary(const std::string& path, ModelVariant variant,
                         const RecoveryInstance& inst, const SolveResult& result,
                         double startup_s, double eps_measure, double alpha_used,
                         std::optional<double> rec_err) {
  ordered_json j;
  j["variant"] = variant_name(variant);
  j["instance"] = {{"m", inst.m()},
                   {"n", inst.n()},
                   {"lambda", inst.lambda},
                   {"mu", inst.mu},
                   {"K", inst.K ? ordered_json(*inst.K) : ordered_json(nullptr)}};
  j["status"] = to_string(result.status);
  if (result.status == SolveStatus::invalid_start) {
    j["obj"] = nullptr;
  } else {
    j["obj"] = result.final_F;
  }
  j["iters"] = result.iterations;
  j["time_s"] = result.wall_time;
  j["startup_s"] = startup_s;
  j["eps_measure"] = eps_measure;
  j["alpha_used"] = alpha_used;
  j["rec_err"] = rec_err ? ordered_json(*rec_err) : ordered_json(nullptr);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

struct CsvRow {
  std::size_t iter = 0;
  double F = 0.0, step_norm = 0.0, alpha = 0.0, criticality = 0.0;
  std::size_t backtracks = 0;
};

std::vector<CsvRow> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty trace file", 1);
  if (line != "iter,F,step_norm,alpha,backtracks,criticality")
    throw ParseError("unexpected trace header", 1);
  std::vector<CsvRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream split(line);
    CsvRow row;
    if (!(split >> row.iter >> row.F >> row.step_norm >> row.alpha >> row.backtracks >>
          row.criticality))
      throw ParseError("malformed trace row", line_no);
    rows.push_back(row);
  }
  return rows;
}

int bench_workers() {
#ifdef _OPENMP
  if (const char* env = std::getenv("AMPDA_BENCH_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::string render_table(const BenchOptions& options, const BatchStats& stats,
                         std::size_t failures) {
  char buf[512];
  std::string out;
  std::snprintf(buf, sizeof buf, "variant %s  R=%zu  runs=%zu  master_seed=%llu\n",
                variant_name(options.variant), options.R, options.runs,
                static_cast<unsigned long long>(options.master_seed));
  out += buf;
  out += "Alg    Time           Iter      Obj                RecErr\n";
  std::snprintf(buf, sizeof buf, "AMPDA  %.3f(%.3f)   %.0f(%.0f)   %.3f(%.2e)   %.2e(%.2e)\n",
                stats.mean_time, stats.mean_startup, stats.mean_iters, stats.std_iters,
                stats.mean_obj, stats.std_obj, stats.mean_rec_err, stats.std_rec_err);
  out += buf;
  if (failures > 0) {
    std::snprintf(buf, sizeof buf, "failed runs: %zu\n", failures);
    out += buf;
  }
  return out;
}

}  // namespace

ModelVariant parse_variant(const std::string& name) {
  if (name == "l1l2") return ModelVariant::l1l2;
  if (name == "l1sk") return ModelVariant::l1sk;
  if (name == "l1l2-ls") return ModelVariant::l1l2_ls;
  throw ArgumentError("unknown variant '" + name + "' (expected l1l2, l1sk or l1l2-ls)");
}

const char* variant_name(ModelVariant variant) {
  switch (variant) {
    case ModelVariant::l1l2: return "l1l2";
    case ModelVariant::l1sk: return "l1sk";
    case ModelVariant::l1l2_ls: return "l1l2-ls";
  }
  return "unknown";
}

double default_lambda(ModelVariant variant) {
  switch (variant) {
    case ModelVariant::l1l2: return 5.0;
    case ModelVariant::l1sk: return 0.5;
    case ModelVariant::l1l2_ls: return 1.0;
  }
  return 1.0;
}

DenominatorVariant denominator_of(ModelVariant variant) {
  return variant == ModelVariant::l1sk ? DenominatorVariant::l1_over_topk
                                       : DenominatorVariant::l1_over_l2;
}

SolverConfig SolverOverrides::apply(SolverConfig base) const {
  if (alpha_min) base.alpha_min = *alpha_min;
  if (alpha_max) base.alpha_max = *alpha_max;
  if (sigma) base.sigma = *sigma;
  if (gamma) base.gamma = *gamma;
  if (term_tol) base.term_tol = *term_tol;
  if (max_iters) base.max_iters = *max_iters;
  if (max_backtracks) base.max_backtracks = *max_backtracks;
  base.validate();
  return base;
}

int exit_code_for(const Error& error) {
  if (dynamic_cast<const ParseError*>(&error) || dynamic_cast<const IoError*>(&error))
    return kExitInput;
  if (dynamic_cast<const ArgumentError*>(&error)) return kExitUsage;
  return kExitNumerical;
}

namespace detail {

PreparedRun prepare_run(const SyntheticSpec& spec, ModelVariant variant) {
  PreparedRun run;
  run.gen = generate_instance(spec);
  const auto t0 = Clock::now();
  run.problem = build_problem(run.gen.instance, denominator_of(variant));
  run.start = initial_point(run.gen.instance);
  run.startup_s = seconds_since(t0);
  return run;
}

double final_criticality(const FractionalProblem& problem, const SolveResult& result,
                         double* alpha_used) {
  const double alpha_last =
      result.history.empty() ? 1.0 : result.history.back().alpha_accepted;
  const double at_last = criticality_measure(problem, result.final_x,
                                             alpha_last > 0.0 ? alpha_last : 1.0);
  const double at_unit = criticality_measure(problem, result.final_x, 1.0);
  if (at_last <= at_unit) {
    if (alpha_used) *alpha_used = alpha_last > 0.0 ? alpha_last : 1.0;
    return at_last;
  }
  if (alpha_used) *alpha_used = 1.0;
  return at_unit;
}

}  // namespace detail

int cmd_generate(const GenerateOptions& options) {
  SyntheticSpec spec;
  spec.R = options.R;
  spec.seed = options.seed;
  spec.lambda = options.lambda.value_or(default_lambda(options.variant));
  if (options.K) spec.K_model = options.K;
  if (options.mu) spec.mu_model = options.mu;
  if (options.variant == ModelVariant::l1l2_ls) spec.mu_model = 0;
  spec.validate();

  const GeneratedInstance gen = generate_instance(spec);
  write_instance(options.output_path, gen);
  std::cout << "wrote " << options.output_path << " (m=" << gen.instance.m()
            << ", n=" << gen.instance.n() << ", mu=" << gen.instance.mu
            << ", K=" << (gen.instance.K ? std::to_string(*gen.instance.K) : "-")
            << ", lambda=" << gen.instance.lambda << ", seed=" << gen.seed << ")\n";
  return kExitOk;
}

int cmd_solve(const SolveOptions& options) {
  if (options.instance_path.empty() == options.libsvm_path.empty())
    throw ArgumentError("solve: give exactly one of --instance or --libsvm");

  GeneratedInstance gen;
  if (!options.instance_path.empty()) {
    gen = read_instance(options.instance_path);
  } else {
    LibsvmData data = read_libsvm(options.libsvm_path, options.libsvm_features);
    gen.instance.A = std::move(data.A);
    gen.instance.b = std::move(data.b);
    gen.instance.lambda = default_lambda(options.variant);
    gen.instance.mu = 0;
    gen.instance.lower.assign(gen.instance.n(), -10.0);
    gen.instance.upper.assign(gen.instance.n(), 10.0);
  }
  const RecoveryInstance instance = apply_model_overrides(
      gen.instance, options.variant, options.lambda, options.K, options.mu);

  const SolverConfig config = options.solver.apply();
  SingleRun run = run_model(instance, options.variant, options.x0_path, config);
  ensure_dir(options.out_dir);

  if (!run.explicit_x0 && !run.start.admissible) {
    std::cerr << "warning: constructed starting point misses the admissibility "
                 "threshold (margin "
              << run.start.margin << "); pass --x0 to override\n";
    return kExitNumerical;
  }

  double eps_measure = 0.0;
  double alpha_used = 1.0;
  std::optional<double> rec_err;
  if (run.result.status != SolveStatus::invalid_start) {
    eps_measure = detail::final_criticality(run.problem, run.result, &alpha_used);
    if (!gen.x_true.empty()) rec_err = recovery_error(run.result.final_x, gen.x_true);
  }

  write_trace_csv(join(options.out_dir, "trace.csv"), run.result, eps_measure);
  write_solve_summary(join(options.out_dir, "solve_summary.json"), options.variant,
                      instance, run.result, run.startup_s, eps_measure, alpha_used,
                      rec_err);

  std::cout << "status " << to_string(run.result.status) << ", obj "
            << fmt17(run.result.final_F) << ", iters " << run.result.iterations
            << ", criticality " << fmt17(eps_measure) << " (alpha " << alpha_used << ")";
  if (rec_err) std::cout << ", rec_err " << fmt17(*rec_err);
  std::cout << '\n';
  return run.result.status == SolveStatus::converged ? kExitOk : kExitNumerical;
}

int cmd_check(const CheckOptions& options) {
  const GeneratedInstance gen = read_instance(options.instance_path);
  const RecoveryInstance instance = apply_model_overrides(
      gen.instance, options.variant, options.lambda, options.K, options.mu);

  SolverConfig config = options.solver.apply();
  config.record_trace = true;
  SingleRun run = run_model(instance, options.variant, options.x0_path, config);
  if (!run.explicit_x0 && !run.start.admissible)
    throw DomainError("check: constructed starting point is inadmissible");
  if (run.result.status == SolveStatus::invalid_start)
    throw DomainError("check: starting point lies outside the objective domain");

  AuditOptions audit_options;
  audit_options.fd_coords = 0;  // full-coordinate gradient check
  const CriticalityReport report =
      audit_trace(run.problem, run.result.trace, config.sigma, audit_options);

  // Row-by-row comparison against the recorded CSV; the re-run is
  // deterministic, so every mismatch means the file does not describe this
  // solve.
  std::size_t mismatches = 0;
  const std::vector<CsvRow> rows = read_trace_csv(options.trace_csv_path);
  if (rows.size() != run.result.history.size()) {
    ++mismatches;
  } else {
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const IterationScalars& h = run.result.history[k];
      const bool last = k + 1 == rows.size();
      const double expect_crit = last ? report.eps_measure : h.step_norm;
      if (rows[k].iter != k || rows[k].F != h.F_val || rows[k].step_norm != h.step_norm ||
          rows[k].alpha != h.alpha_accepted || rows[k].backtracks != h.backtracks ||
          rows[k].criticality != expect_crit)
        ++mismatches;
    }
  }

  ensure_dir(options.out_dir);
  ordered_json j;
  j["status"] = to_string(run.result.status);
  j["eps_measure"] = report.eps_measure;
  j["alpha_used"] = report.alpha_used;
  j["descent_violations"] = report.descent_violations;
  j["fenchel_residual_g"] = report.fenchel_residual_g;
  j["fenchel_residual_h2"] = report.fenchel_residual_h2;
  j["grad_check_relerr"] = report.grad_check_relerr;
  j["trace_rows"] = rows.size();
  j["trace_mismatches"] = mismatches;
  const std::string report_path = join(options.out_dir, "report.json");
  std::ofstream out(report_path);
  if (!out) throw IoError("cannot write '" + report_path + "'");
  out << j.dump(2) << '\n';

  std::cout << "descent_violations " << report.descent_violations << ", trace_mismatches "
            << mismatches << ", eps_measure " << fmt17(report.eps_measure)
            << ", grad_check " << fmt17(report.grad_check_relerr) << '\n';
  return (report.descent_violations == 0 && mismatches == 0) ? kExitOk : kExitNumerical;
}

int cmd_bench(const BenchOptions& options) {
  if (options.runs == 0) throw ArgumentError("bench: runs must be positive");
  SyntheticSpec base;
  base.R = options.R;
  base.lambda = options.lambda.value_or(default_lambda(options.variant));
  if (options.K) base.K_model = options.K;
  if (options.mu) base.mu_model = options.mu;
  if (options.variant == ModelVariant::l1l2_ls) base.mu_model = 0;
  base.validate();

  const SolverConfig config = options.solver.apply();
  const std::int64_t runs = static_cast<std::int64_t>(options.runs);
  std::vector<RunRecord> records(options.runs);
  std::vector<std::vector<IterationScalars>> histories(options.runs);

  const int workers = bench_workers();
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(workers)
#else
  (void)workers;
#endif
  for (std::int64_t i = 0; i < runs; ++i) {
    SyntheticSpec spec = base;
    spec.seed = Rng::derive(options.master_seed, static_cast<std::uint64_t>(i));
    RunRecord rec;
    rec.seed = spec.seed;
    try {
      detail::PreparedRun prep = detail::prepare_run(spec, options.variant);
      rec.startup_s = prep.startup_s;
      if (!prep.start.admissible) {
        rec.failed = true;
        rec.status = "inadmissible_start";
      } else {
        const SolveResult result = solve(prep.problem, prep.start.x0, config);
        rec.status = to_string(result.status);
        rec.failed = result.status != SolveStatus::converged;
        rec.obj = result.final_F;
        rec.iters = result.iterations;
        rec.time_s = result.wall_time;
        if (!rec.failed) {
          rec.eps_measure = detail::final_criticality(prep.problem, result, nullptr);
          rec.rec_err = recovery_error(result.final_x, prep.gen.x_true);
        }
        histories[static_cast<std::size_t>(i)] = result.history;
      }
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.status = std::string("error: ") + e.what();
    }
    records[static_cast<std::size_t>(i)] = std::move(rec);
  }

  // Seed-sorted output keeps the files independent of worker scheduling.
  std::vector<std::size_t> order(options.runs);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&records](std::size_t a, std::size_t b) {
    return records[a].seed < records[b].seed;
  });
  std::vector<RunRecord> sorted;
  sorted.reserve(options.runs);
  for (std::size_t idx : order) sorted.push_back(records[idx]);

  ensure_dir(options.out_dir);
  BatchDescription desc{variant_name(options.variant), base, options.master_seed,
                        options.runs};
  write_batch_summary_json(join(options.out_dir, "summary.json"), desc, sorted,
                           options.zero_times);

  const BatchStats stats = aggregate_runs(sorted);
  const std::size_t failures = options.runs - stats.successes;
  const std::string table = render_table(options, stats, failures);
  {
    const std::string path = join(options.out_dir, "table.txt");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << table;
  }
  {
    const std::string path = join(options.out_dir, "fvstime.csv");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "seed,iter,time_s,F\n";
    for (std::size_t idx : order) {
      const auto& history = histories[idx];
      for (std::size_t k = 0; k < history.size(); ++k)
        out << records[idx].seed << ',' << k << ',' << fmt17(history[k].elapsed_s) << ','
            << fmt17(history[k].F_val) << '\n';
    }
  }

  std::cout << table;
  return failures * 10 > options.runs ? kExitNumerical : kExitOk;
}

}  // namespace ampda
