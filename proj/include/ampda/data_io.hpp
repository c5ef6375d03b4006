#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ampda/oracles.hpp"
#include "ampda/solver.hpp"
#include "ampda/types.hpp"

namespace ampda {

/// Recipe for one synthetic recovery instance. Sizes scale with R:
/// n = 1280 R, m = 365 R, true sparsity 40 R, true impulse count 5 R.
/// Model-side K and mu default to ceil(1.3 x truth), computed in integer
/// arithmetic. Noise scale and impulse magnitude are the standard protocol
/// values, exposed for sensitivity studies.
struct SyntheticSpec {
  std::size_t R = 1;
  double lambda = 5.0;
  std::optional<std::size_t> K_model;   // default ceil(1.3 * K_true)
  std::optional<std::size_t> mu_model;  // default ceil(1.3 * mu_true)
  double noise_scale = 0.01;
  double impulse_magnitude = 2.0;
  std::uint64_t seed = 0;

  std::size_t n() const { return 1280 * R; }
  std::size_t m() const { return 365 * R; }
  std::size_t K_true() const { return 40 * R; }
  std::size_t mu_true() const { return 5 * R; }
  std::size_t resolved_K() const { return K_model ? *K_model : (13 * K_true() + 9) / 10; }
  std::size_t resolved_mu() const { return mu_model ? *mu_model : (13 * mu_true() + 9) / 10; }

  void validate() const;
};

struct GeneratedInstance {
  RecoveryInstance instance;
  Vector x_true;    // exactly K_true nonzeros
  Vector z_impulse;  // exactly mu_true nonzeros of magnitude impulse_magnitude
  std::uint64_t seed = 0;
};

/// Draws one instance from a single seeded stream in a fixed order:
/// sensing-matrix entries column by column (then each column is normalized
/// to unit length; a zero column would be redrawn), signal support, signal
/// values, impulse positions, impulse values (only their signs survive),
/// measurement noise. b = A x_true - z_impulse + noise_scale * eps, and the
/// box bounds are +/- max(5, ||x_true||_inf).
GeneratedInstance generate_instance(const SyntheticSpec& spec);

struct InitialPoint {
  Vector x0;
  bool admissible = false;
  double margin = 0.0;  // admissibility threshold minus F(x0)
};

/// One-hot starting point: zeroes the mu dominant measurement entries,
/// scores every column against the remaining residual, and places the
/// best least-squares coefficient (clamped to the box) at the winning
/// coordinate. Reports whether F(x0) clears the level-set admissibility
/// threshold 1 + (lambda/2) dist^2(b, mu-sparse set) and by how much.
/// Requires b to have more than mu nonzeros.
InitialPoint initial_point(const RecoveryInstance& instance);

struct LibsvmData {
  DenseMatrix A;  // rows = samples
  Vector b;       // labels
};

/// Strict LIBSVM text reader: "label index:value ..." per line, 1-based
/// strictly increasing indices, no comments. Feature count is the maximum
/// index unless n_features is given. Malformed input raises ParseError with
/// the offending line number.
LibsvmData read_libsvm(const std::string& path, std::optional<std::size_t> n_features = {});

/// Inverse of read_libsvm on dense data; zero entries are omitted.
void write_libsvm(const std::string& path, const DenseMatrix& A, const Vector& b);

/// ||x_hat - x_true|| / ||x_true||. Errors when x_true is the zero vector.
double recovery_error(ConstSpan x_hat, ConstSpan x_true);

/// Text container for one instance (dims, lambda, mu, optional K, seed,
/// dense rows of A, b, bounds, optional true signal). Values are written
/// with 17 significant digits so parsing reproduces them bit-for-bit.
void write_instance(const std::string& path, const GeneratedInstance& gen);
GeneratedInstance read_instance(const std::string& path);

/// Per-solve trace CSV: header iter,F,step_norm,alpha,backtracks,criticality
/// with one row per iterate. Rows before the last use the accepted-step
/// fixed-point residual (which equals the step norm); the last row carries
/// the independently evaluated final measure.
void write_trace_csv(const std::string& path, const SolveResult& result,
                     double final_criticality);

struct RunRecord {
  std::uint64_t seed = 0;
  bool failed = false;
  std::string status;
  double obj = 0.0;
  std::size_t iters = 0;
  double time_s = 0.0;
  double startup_s = 0.0;
  double rec_err = 0.0;
  double eps_measure = 0.0;
};

struct BatchStats {
  double mean_obj = 0.0, std_obj = 0.0;
  double mean_iters = 0.0, std_iters = 0.0;
  double mean_time = 0.0, std_time = 0.0;
  double mean_startup = 0.0, std_startup = 0.0;
  double mean_rec_err = 0.0, std_rec_err = 0.0;
  double mean_eps = 0.0, std_eps = 0.0;
  std::size_t successes = 0;
};

/// Mean and sample standard deviation (0 for a single run) over the
/// successful runs.
BatchStats aggregate_runs(const std::vector<RunRecord>& runs);

struct BatchDescription {
  std::string variant;
  SyntheticSpec spec;
  std::uint64_t master_seed = 0;
  std::size_t runs = 0;
};

/// Batch summary JSON: {spec, seeds, per_run, aggregate}. Runs must already
/// be sorted by seed order of execution; when zero_times is set every
/// timing field is written as 0 so repeated invocations with one master
/// seed emit byte-identical files.
void write_batch_summary_json(const std::string& path, const BatchDescription& desc,
                              const std::vector<RunRecord>& runs, bool zero_times);

}  // namespace ampda
