#include "ampda/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "ampda/errors.hpp"
#include "ampda/kernels.hpp"
#include "ampda/rng.hpp"
#include "json.hpp"

namespace ampda {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& tok, std::size_t line) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + tok.size() || tok.empty())
    throw ParseError("expected a number, got '" + tok + "'", line);
  return v;
}

std::size_t parse_index(const std::string& tok, std::size_t line) {
  if (tok.empty() || tok[0] == '-' || tok[0] == '+')
    throw ParseError("expected a positive integer, got '" + tok + "'", line);
  const char* begin = tok.c_str();
  char* end = nullptr;
  const unsigned long long v = std::strtoull(begin, &end, 10);
  if (end != begin + tok.size())
    throw ParseError("expected an integer, got '" + tok + "'", line);
  return static_cast<std::size_t>(v);
}

// Whitespace tokenizer that tracks the current line for error reporting.
class Tokenizer {
 public:
  explicit Tokenizer(std::istream& in) : in_(in) {}

  std::optional<std::string> next() {
    while (pos_ >= tokens_.size()) {
      std::string line;
      if (!std::getline(in_, line)) return std::nullopt;
      ++line_;
      tokens_.clear();
      pos_ = 0;
      std::istringstream split(line);
      std::string tok;
      while (split >> tok) tokens_.push_back(tok);
    }
    return tokens_[pos_++];
  }

  std::string expect(const char* what) {
    auto tok = next();
    if (!tok) throw ParseError(std::string("unexpected end of file, expected ") + what, line_);
    return *tok;
  }

  void expect_keyword(const char* keyword) {
    const std::string tok = expect(keyword);
    if (tok != keyword)
      throw ParseError("expected '" + std::string(keyword) + "', got '" + tok + "'", line_);
  }

  double expect_double(const char* what) { return parse_double(expect(what), line_); }
  std::size_t expect_index(const char* what) { return parse_index(expect(what), line_); }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::vector<std::string> tokens_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

void write_vector_line(std::ofstream& out, ConstSpan v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ' ';
    out << fmt17(v[i]);
  }
  out << '\n';
}

Vector read_values(Tokenizer& tok, std::size_t count, const char* what) {
  Vector v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = tok.expect_double(what);
  return v;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (R == 0) throw ArgumentError("spec: R must be positive");
  if (!(lambda > 0.0)) throw ArgumentError("spec: lambda must be positive");
  if (resolved_K() == 0 || resolved_K() > n()) throw ArgumentError("spec: K out of range");
  if (resolved_mu() > m()) throw ArgumentError("spec: mu exceeds m");
  if (noise_scale < 0.0) throw ArgumentError("spec: negative noise scale");
  if (impulse_magnitude < 0.0) throw ArgumentError("spec: negative impulse magnitude");
}

GeneratedInstance generate_instance(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t m = spec.m();
  const std::size_t n = spec.n();

  GeneratedInstance out;
  out.seed = spec.seed;
  RecoveryInstance& inst = out.instance;
  inst.A = DenseMatrix(m, n);
  for (std::size_t j = 0; j < n; ++j) {
    double sq = 0.0;
    do {
      sq = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double v = rng.normal();
        inst.A(i, j) = v;
        sq += v * v;
      }
    } while (sq == 0.0);
    const double inv = 1.0 / std::sqrt(sq);
    for (std::size_t i = 0; i < m; ++i) inst.A(i, j) *= inv;
  }

  out.x_true.assign(n, 0.0);
  for (std::size_t i : rng.pick_indices(spec.K_true(), n)) out.x_true[i] = rng.normal();

  out.z_impulse.assign(m, 0.0);
  for (std::size_t i : rng.pick_indices(spec.mu_true(), m))
    out.z_impulse[i] = rng.normal() >= 0.0 ? spec.impulse_magnitude : -spec.impulse_magnitude;

  inst.b.resize(m);
  kernels::matvec(inst.A, out.x_true, inst.b);
  for (std::size_t i = 0; i < m; ++i)
    inst.b[i] += -out.z_impulse[i] + spec.noise_scale * rng.normal();

  const double bound = std::max(5.0, kernels::norm_inf(out.x_true));
  inst.lower.assign(n, -bound);
  inst.upper.assign(n, bound);
  inst.lambda = spec.lambda;
  inst.mu = spec.resolved_mu();
  inst.K = spec.resolved_K();
  inst.validate();
  return out;
}

InitialPoint initial_point(const RecoveryInstance& instance) {
  instance.validate();
  const std::size_t m = instance.m();
  const std::size_t n = instance.n();

  std::size_t nnz = 0;
  for (double v : instance.b)
    if (v != 0.0) ++nnz;
  if (nnz <= instance.mu)
    throw ConstructionError("initial_point: measurement is already mu-sparse");

  const Vector tb = truncate_mu(instance.b, instance.mu);
  std::vector<bool> kept(m, false);
  for (std::size_t j = 0; j < m; ++j) kept[j] = tb[j] != 0.0;

  Vector residual_part(m);
  for (std::size_t j = 0; j < m; ++j) residual_part[j] = kept[j] ? 0.0 : instance.b[j];

  Vector scores(n);
  kernels::matvec_transpose(instance.A, residual_part, scores);
  std::size_t best = 0;
  double best_mag = std::abs(scores[0]);
  for (std::size_t i = 1; i < n; ++i) {
    const double mag = std::abs(scores[i]);
    if (mag > best_mag) {
      best_mag = mag;
      best = i;
    }
  }
  if (best_mag == 0.0)
    throw ConstructionError("initial_point: residual orthogonal to every column");

  double denom = 0.0;  // column energy outside the kept support
  for (std::size_t j = 0; j < m; ++j)
    if (!kept[j]) denom += instance.A(j, best) * instance.A(j, best);
  if (denom == 0.0)
    throw ConstructionError("initial_point: selected column vanishes off the kept support");

  const double theta = scores[best] / denom;
  const double placed = std::min(std::max(theta, instance.lower[best]), instance.upper[best]);
  if (placed == 0.0)
    throw ConstructionError("initial_point: bounds clamp the coefficient to zero");

  InitialPoint ip;
  ip.x0.assign(n, 0.0);
  ip.x0[best] = placed;

  // The off-support zeros must be box-feasible, which holds whenever the
  // bounds straddle zero; otherwise the start is unusable.
  for (std::size_t i = 0; i < n; ++i) {
    if (i == best) continue;
    if (instance.lower[i] > 0.0 || instance.upper[i] < 0.0) {
      ip.admissible = false;
      ip.margin = -std::numeric_limits<double>::infinity();
      return ip;
    }
  }

  // One-hot start: the norm ratio is exactly 1 for both denominators.
  Vector r(m);
  for (std::size_t j = 0; j < m; ++j) r[j] = placed * instance.A(j, best) - instance.b[j];
  const double f_x0 = 1.0 + 0.5 * instance.lambda * dist2_sparse(r, instance.mu);
  const double threshold = 1.0 + 0.5 * instance.lambda * dist2_sparse(instance.b, instance.mu);
  ip.margin = threshold - f_x0;
  ip.admissible = f_x0 < threshold;
  return ip;
}

LibsvmData read_libsvm(const std::string& path, std::optional<std::size_t> n_features) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");

  std::vector<double> labels;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  std::size_t max_index = 0;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find('#') != std::string::npos)
      throw ParseError("comments are not accepted", line_no);
    std::istringstream split(line);
    std::string tok;
    if (!(split >> tok)) throw ParseError("blank line", line_no);
    labels.push_back(parse_double(tok, line_no));

    std::vector<std::pair<std::size_t, double>> row;
    std::size_t prev_index = 0;
    while (split >> tok) {
      const std::size_t colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 >= tok.size())
        throw ParseError("malformed feature token '" + tok + "'", line_no);
      const std::size_t index = parse_index(tok.substr(0, colon), line_no);
      const double value = parse_double(tok.substr(colon + 1), line_no);
      if (index < 1) throw ParseError("feature index must be >= 1", line_no);
      if (index <= prev_index)
        throw ParseError("feature indices must be strictly increasing", line_no);
      if (n_features && index > *n_features)
        throw ParseError("feature index exceeds the declared feature count", line_no);
      prev_index = index;
      max_index = std::max(max_index, index);
      row.emplace_back(index, value);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("empty file", line_no == 0 ? 1 : line_no);

  const std::size_t n = n_features ? *n_features : max_index;
  if (n == 0) throw ParseError("no features present", line_no);

  LibsvmData data;
  data.A = DenseMatrix(rows.size(), n);
  data.b.assign(labels.begin(), labels.end());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& [index, value] : rows[i]) data.A(i, index - 1) = value;
  return data;
}

void write_libsvm(const std::string& path, const DenseMatrix& A, const Vector& b) {
  if (b.size() != A.rows) throw ArgumentError("write_libsvm: label count mismatch");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (std::size_t i = 0; i < A.rows; ++i) {
    out << fmt17(b[i]);
    for (std::size_t j = 0; j < A.cols; ++j)
      if (A(i, j) != 0.0) out << ' ' << j + 1 << ':' << fmt17(A(i, j));
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

double recovery_error(ConstSpan x_hat, ConstSpan x_true) {
  if (x_hat.size() != x_true.size()) throw ArgumentError("recovery_error: size mismatch");
  const double denom = kernels::norm2(x_true);
  if (denom == 0.0) throw ArgumentError("recovery_error: true signal is zero");
  return kernels::diff_norm2(x_hat, x_true) / denom;
}

void write_instance(const std::string& path, const GeneratedInstance& gen) {
  const RecoveryInstance& inst = gen.instance;
  inst.validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "ampda-instance-v1\n";
  out << "m " << inst.m() << '\n';
  out << "n " << inst.n() << '\n';
  out << "lambda " << fmt17(inst.lambda) << '\n';
  out << "mu " << inst.mu << '\n';
  if (inst.K) out << "K " << *inst.K << '\n';
  out << "seed " << gen.seed << '\n';
  out << "A\n";
  for (std::size_t i = 0; i < inst.m(); ++i) write_vector_line(out, inst.A.row(i));
  out << "b\n";
  write_vector_line(out, inst.b);
  out << "lower\n";
  write_vector_line(out, inst.lower);
  out << "upper\n";
  write_vector_line(out, inst.upper);
  if (!gen.x_true.empty()) {
    out << "x_true\n";
    write_vector_line(out, gen.x_true);
  }
  out << "end\n";
  if (!out) throw IoError("write failed for '" + path + "'");
}

GeneratedInstance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  Tokenizer tok(in);

  tok.expect_keyword("ampda-instance-v1");
  tok.expect_keyword("m");
  const std::size_t m = tok.expect_index("row count");
  tok.expect_keyword("n");
  const std::size_t n = tok.expect_index("column count");
  tok.expect_keyword("lambda");
  const double lambda = tok.expect_double("lambda");
  tok.expect_keyword("mu");
  const std::size_t mu = tok.expect_index("mu");

  GeneratedInstance gen;
  RecoveryInstance& inst = gen.instance;
  inst.lambda = lambda;
  inst.mu = mu;

  std::string key = tok.expect("section");
  if (key == "K") {
    inst.K = tok.expect_index("K");
    key = tok.expect("section");
  }
  if (key == "seed") {
    gen.seed = tok.expect_index("seed");
    key = tok.expect("section");
  }
  if (key != "A") throw ParseError("expected section 'A', got '" + key + "'", tok.line());

  inst.A = DenseMatrix(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) inst.A(i, j) = tok.expect_double("matrix entry");

  tok.expect_keyword("b");
  inst.b = read_values(tok, m, "measurement entry");
  tok.expect_keyword("lower");
  inst.lower = read_values(tok, n, "lower bound");
  tok.expect_keyword("upper");
  inst.upper = read_values(tok, n, "upper bound");

  key = tok.expect("section");
  if (key == "x_true") {
    gen.x_true = read_values(tok, n, "signal entry");
    key = tok.expect("section");
  }
  if (key != "end") throw ParseError("expected 'end', got '" + key + "'", tok.line());
  inst.validate();
  return gen;
}

void write_trace_csv(const std::string& path, const SolveResult& result,
                     double final_criticality) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "iter,F,step_norm,alpha,backtracks,criticality\n";
  for (std::size_t k = 0; k < result.history.size(); ++k) {
    const IterationScalars& h = result.history[k];
    const bool last = k + 1 == result.history.size();
    out << k << ',' << fmt17(h.F_val) << ',' << fmt17(h.step_norm) << ','
        << fmt17(h.alpha_accepted) << ',' << h.backtracks << ','
        << fmt17(last ? final_criticality : h.step_norm) << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

BatchStats aggregate_runs(const std::vector<RunRecord>& runs) {
  BatchStats stats;
  std::vector<const RunRecord*> ok;
  for (const auto& r : runs)
    if (!r.failed) ok.push_back(&r);
  stats.successes = ok.size();
  if (ok.empty()) return stats;

  auto reduce = [&ok](auto getter, double& mean, double& stddev) {
    double sum = 0.0;
    for (const auto* r : ok) sum += getter(*r);
    mean = sum / static_cast<double>(ok.size());
    if (ok.size() < 2) {
      stddev = 0.0;
      return;
    }
    double sq = 0.0;
    for (const auto* r : ok) {
      const double d = getter(*r) - mean;
      sq += d * d;
    }
    stddev = std::sqrt(sq / static_cast<double>(ok.size() - 1));
  };

  reduce([](const RunRecord& r) { return r.obj; }, stats.mean_obj, stats.std_obj);
  reduce([](const RunRecord& r) { return static_cast<double>(r.iters); }, stats.mean_iters,
         stats.std_iters);
  reduce([](const RunRecord& r) { return r.time_s; }, stats.mean_time, stats.std_time);
  reduce([](const RunRecord& r) { return r.startup_s; }, stats.mean_startup,
         stats.std_startup);
  reduce([](const RunRecord& r) { return r.rec_err; }, stats.mean_rec_err,
         stats.std_rec_err);
  reduce([](const RunRecord& r) { return r.eps_measure; }, stats.mean_eps, stats.std_eps);
  return stats;
}

void write_batch_summary_json(const std::string& path, const BatchDescription& desc,
                              const std::vector<RunRecord>& runs, bool zero_times) {
  using json = nlohmann::ordered_json;
  json j;
  j["spec"] = {{"variant", desc.variant},
               {"R", desc.spec.R},
               {"n", desc.spec.n()},
               {"m", desc.spec.m()},
               {"K_true", desc.spec.K_true()},
               {"mu_true", desc.spec.mu_true()},
               {"K", desc.spec.resolved_K()},
               {"mu", desc.spec.resolved_mu()},
               {"lambda", desc.spec.lambda},
               {"noise_scale", desc.spec.noise_scale},
               {"impulse_magnitude", desc.spec.impulse_magnitude},
               {"master_seed", desc.master_seed},
               {"runs", desc.runs}};

  json seeds = json::array();
  for (const auto& r : runs) seeds.push_back(r.seed);
  j["seeds"] = std::move(seeds);

  json per_run = json::array();
  for (const auto& r : runs) {
    json entry;
    entry["seed"] = r.seed;
    entry["status"] = r.status;
    if (r.failed) {
      entry["obj"] = nullptr;
      entry["iters"] = nullptr;
      entry["time_s"] = nullptr;
      entry["startup_s"] = nullptr;
      entry["rec_err"] = nullptr;
      entry["eps_measure"] = nullptr;
    } else {
      entry["obj"] = r.obj;
      entry["iters"] = r.iters;
      entry["time_s"] = zero_times ? 0.0 : r.time_s;
      entry["startup_s"] = zero_times ? 0.0 : r.startup_s;
      entry["rec_err"] = r.rec_err;
      entry["eps_measure"] = r.eps_measure;
    }
    per_run.push_back(std::move(entry));
  }
  j["per_run"] = std::move(per_run);

  const BatchStats stats = aggregate_runs(runs);
  j["aggregate"] = {
      {"successes", stats.successes},
      {"failures", runs.size() - stats.successes},
      {"mean",
       {{"obj", stats.mean_obj},
        {"iters", stats.mean_iters},
        {"time_s", zero_times ? 0.0 : stats.mean_time},
        {"startup_s", zero_times ? 0.0 : stats.mean_startup},
        {"rec_err", stats.mean_rec_err},
        {"eps_measure", stats.mean_eps}}},
      {"std",
       {{"obj", stats.std_obj},
        {"iters", stats.std_iters},
        {"time_s", zero_times ? 0.0 : stats.std_time},
        {"startup_s", zero_times ? 0.0 : stats.std_startup},
        {"rec_err", stats.std_rec_err},
        {"eps_measure", stats.std_eps}}}};

  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace ampda
