#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ampda/commands.hpp"

namespace {

void add_solver_flags(CLI::App* cmd, ampda::SolverOverrides& overrides) {
  cmd->add_option("--alpha-min", overrides.alpha_min, "lower stepsize clamp");
  cmd->add_option("--alpha-max", overrides.alpha_max, "upper stepsize clamp");
  cmd->add_option("--sigma", overrides.sigma, "descent margin");
  cmd->add_option("--gamma", overrides.gamma, "backtracking shrink factor");
  cmd->add_option("--tol", overrides.term_tol, "relative-step termination tolerance");
  cmd->add_option("--max-iters", overrides.max_iters, "iteration cap");
  cmd->add_option("--max-backtracks", overrides.max_backtracks, "line-search cap");
}

void add_model_flags(CLI::App* cmd, std::string& variant, std::optional<double>& lambda,
                     std::optional<std::size_t>& K, std::optional<std::size_t>& mu) {
  cmd->add_option("--variant", variant, "model variant: l1l2, l1sk or l1l2-ls")
      ->capture_default_str();
  cmd->add_option("--lambda", lambda, "data-fit weight (defaults per variant)");
  cmd->add_option("--K", K, "top-K denominator order");
  cmd->add_option("--mu", mu, "impulse sparsity of the data-fit term");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proximal solver for ratio-of-norms sparse recovery models"};
  app.require_subcommand(1);

  ampda::GenerateOptions gen;
  std::string gen_variant = "l1l2";
  CLI::App* generate = app.add_subcommand("generate", "write a synthetic instance file");
  add_model_flags(generate, gen_variant, gen.lambda, gen.K, gen.mu);
  generate->add_option("--R", gen.R, "size scale factor")->capture_default_str();
  generate->add_option("--seed", gen.seed, "instance seed")->capture_default_str();
  generate->add_option("--out", gen.output_path, "output path")->capture_default_str();

  ampda::SolveOptions sol;
  std::string sol_variant = "l1l2";
  CLI::App* solve = app.add_subcommand("solve", "solve one instance");
  add_model_flags(solve, sol_variant, sol.lambda, sol.K, sol.mu);
  solve->add_option("--instance", sol.instance_path, "instance container file");
  solve->add_option("--libsvm", sol.libsvm_path, "LIBSVM data file (least-squares path)");
  solve->add_option("--features", sol.libsvm_features, "feature count for LIBSVM input");
  solve->add_option("--x0", sol.x0_path, "explicit starting point file");
  solve->add_option("--out-dir", sol.out_dir, "output directory")->capture_default_str();
  add_solver_flags(solve, sol.solver);

  ampda::CheckOptions chk;
  std::string chk_variant = "l1l2";
  CLI::App* check = app.add_subcommand("check", "audit a recorded solve");
  add_model_flags(check, chk_variant, chk.lambda, chk.K, chk.mu);
  check->add_option("--instance", chk.instance_path, "instance container file")->required();
  check->add_option("--trace", chk.trace_csv_path, "trace CSV from the solve")->required();
  check->add_option("--x0", chk.x0_path, "explicit starting point file");
  check->add_option("--out-dir", chk.out_dir, "output directory")->capture_default_str();
  add_solver_flags(check, chk.solver);

  ampda::BenchOptions ben;
  std::string ben_variant = "l1l2";
  CLI::App* bench = app.add_subcommand("bench", "seeded batch benchmark");
  add_model_flags(bench, ben_variant, ben.lambda, ben.K, ben.mu);
  bench->add_option("--R", ben.R, "size scale factor")->capture_default_str();
  bench->add_option("--runs", ben.runs, "number of seeded runs")->capture_default_str();
  bench->add_option("--master-seed", ben.master_seed, "master seed")->capture_default_str();
  bench->add_option("--out-dir", ben.out_dir, "output directory")->capture_default_str();
  bench->add_flag("--zero-times", ben.zero_times,
                  "write timing fields as 0 for byte-reproducible output");
  add_solver_flags(bench, ben.solver);

  try {
    app.parse(argc, argv);
    if (*generate) {
      gen.variant = ampda::parse_variant(gen_variant);
      return ampda::cmd_generate(gen);
    }
    if (*solve) {
      sol.variant = ampda::parse_variant(sol_variant);
      return ampda::cmd_solve(sol);
    }
    if (*check) {
      chk.variant = ampda::parse_variant(chk_variant);
      return ampda::cmd_check(chk);
    }
    if (*bench) {
      ben.variant = ampda::parse_variant(ben_variant);
      return ampda::cmd_bench(ben);
    }
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ampda::kExitOk : ampda::kExitUsage;
  } catch (const ampda::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ampda::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ampda::kExitNumerical;
  }
  return ampda::kExitUsage;
}
