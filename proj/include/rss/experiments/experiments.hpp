#pragma once

#include "rss/diagnostics.hpp"
#include "rss/experiments/runner.hpp"
#include "rss/scaling_theory.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace rss {

/// A kernel line-up entry: base MALA, optionally wrapped.
struct KernelChoice {
  Wrapper wrapper = Wrapper::None;
  std::optional<StepSizeDistribution> mu;
  std::string label() const;
};

/// mala, aux-mala x {uniform, exponential}, marg-mala x {uniform, exponential}.
std::vector<KernelChoice> sweep_kernels();
/// mala, aux-mala-uniform, aux-mala-exponential.
std::vector<KernelChoice> chain_kernels();

std::vector<double> log_spaced(double lo, double hi, int n);

// ---------------------------------------------------------------------------
// ESJD sweep

struct EsjdSweepOptions {
  std::vector<double> h_grid = log_spaced(1e-2, 1e4, 40);
  std::vector<std::string> targets{"std_normal", "laplace", "student_t5"};
  std::vector<KernelChoice> kernels = sweep_kernels();
  long n_samples = 1000000;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct EsjdRow {
  std::string target;
  std::string kernel;
  std::string wrapper;
  std::string mu;
  double h = 0.0;
  double esjd = 0.0;
  double se = 0.0;
  long n = 0;
};

/// One Rao-Blackwellized estimate per (target, kernel, h). Task k draws from
/// Rng(derive_seed(seed, k)) with k the row index, so rows do not depend on
/// the thread count.
std::vector<EsjdRow> esjd_sweep(const EsjdSweepOptions& options);
void write_esjd_csv(std::ostream& os, const std::vector<EsjdRow>& rows);

// ---------------------------------------------------------------------------
// Tail-probability experiments (funnel, Rosenbrock)

struct TailExperimentOptions {
  std::string name;
  nlohmann::json hist_target;  // histogram / Q-Q runs
  nlohmann::json tail_target;  // box-plot runs
  long hist_iterations = 1000000;
  std::vector<long> checkpoints;  // box-plot runs last checkpoints.back() iterations
  int replications = 20;
  double threshold = 0.0;
  TailDirection direction = TailDirection::Below;
  double truth = 0.0;
  std::vector<KernelChoice> kernels = chain_kernels();
  int histogram_bins = 100;
  int qq_points = 200;
  long trace_thin = 100;
  std::uint64_t seed = 1;
  int threads = 1;
  bool run_histograms = true;
};

/// Funnel defaults: d = 10, sigma^2 = 9 for histograms, 4 for box plots,
/// threshold 2 Phi^{-1}(0.05), checkpoints {1e4, 1e5, 5e5, 1e6}.
TailExperimentOptions funnel_options();
/// Rosenbrock defaults: a = 1/2, b = 50, N = 2e6, two-sided threshold at the
/// 95th percentile of the N(0, 1/(2a)) first marginal.
TailExperimentOptions rosenbrock_options();

/// Every run uses burn-in n/10 and adaptation from h0 = 1 toward the
/// kernel's optimal acceptance rate. A checkpoint n uses states n/10 + 1 .. n
/// of its chain.
ExperimentConfig tail_run_config(const TailExperimentOptions& options, const KernelChoice& kernel,
                                 const nlohmann::json& target, long n_iterations, std::uint64_t seed);

struct TailRow {
  std::string kernel;
  int replication = 0;
  long checkpoint = 0;
  double estimate = 0.0;
  double truth = 0.0;
};

struct HistogramRow {
  std::string kernel;
  double bin_lo = 0.0;
  double bin_hi = 0.0;
  double density = 0.0;
  double reference = 0.0;
};

struct QqRow {
  std::string kernel;
  double p = 0.0;
  double theoretical = 0.0;
  double empirical = 0.0;
};

struct TailExperimentResult {
  std::vector<TailRow> tails;
  std::vector<HistogramRow> histogram;
  std::vector<QqRow> qq;
  std::vector<nlohmann::json> summaries;
};

/// Seeds: kernel j uses master derive_seed(seed, j) for box plots and
/// derive_seed(seed, 1000 + j) for the histogram run; replications split
/// those as usual. Writes artifacts under out_dir when given.
TailExperimentResult tail_experiment(const TailExperimentOptions& options,
                                     const std::optional<std::filesystem::path>& out_dir = std::nullopt);

void write_tail_csv(std::ostream& os, const std::vector<TailRow>& rows);
void write_histogram_csv(std::ostream& os, const std::vector<HistogramRow>& rows);
void write_qq_csv(std::ostream& os, const std::vector<QqRow>& rows);

/// Median over replications of |estimate - truth| for one kernel at one
/// checkpoint, and the median estimate itself.
struct TailSummary {
  double median_abs_error = 0.0;
  double median_estimate = 0.0;
};
TailSummary summarize_tails(const std::vector<TailRow>& rows, const std::string& kernel, long checkpoint);

// ---------------------------------------------------------------------------
// Poisson regression

struct PoissonOptions {
  Index d = 50;
  std::uint64_t data_seed = 2024;
  long n_iterations = 20000;
  int replications = 20;
  double initial_scale = 10.0;
  std::vector<KernelChoice> kernels = chain_kernels();
  std::uint64_t seed = 1;
  int threads = 1;
};

/// First iteration (1-based) with log pi(X_i) >= level, if any.
std::optional<long> bulk_hitting_time(const std::vector<double>& log_density, double level);

/// A chain that never reaches the bulk is censored: hitting_time is
/// n_iterations + 1 and reached is false.
struct HittingRow {
  std::string kernel;
  int replication = 0;
  long hitting_time = 0;
  bool reached = false;
  double max_log_density = 0.0;
};

struct PoissonResult {
  std::vector<HittingRow> hitting;
  double bulk_level = 0.0;
  std::vector<nlohmann::json> summaries;
  /// Replications where each auxiliary kernel's hitting time is <= plain
  /// MALA's, keyed by kernel label.
  std::vector<std::pair<std::string, int>> sign_counts;
};

/// Persists the simulated data, runs every kernel from X0 ~ N(0, 10^2 I)
/// and records the bulk hitting time: the bulk level is the largest log pi
/// seen by any chain of the experiment minus 2d. Replication 0 traces of
/// coordinates 0 and 1 are written per kernel.
PoissonResult poisson_experiment(const PoissonOptions& options,
                                 const std::optional<std::filesystem::path>& out_dir = std::nullopt);
void write_hitting_csv(std::ostream& os, const std::vector<HittingRow>& rows);

// ---------------------------------------------------------------------------
// Optimal scaling table

struct Table1Row {
  std::string sampler;  // rwm, mala, hmc
  double c = 0.0;
  std::string mu;  // "none" for the base rate
  double acceptance = 0.0;
  double efficiency_ratio = 1.0;
  double ell_opt = 0.0;
};

std::vector<Table1Row> table1();
void write_table1_csv(std::ostream& os, const std::vector<Table1Row>& rows);
void print_table1(std::ostream& os, const std::vector<Table1Row>& rows);

}  // namespace rss
