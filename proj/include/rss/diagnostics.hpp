#pragma once

#include "rss/randomized_kernels.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rss {

/// Streaming mean and variance (Welford), mergeable across shards.
class RunningMoments {
 public:
  void add(double x);
  /// Parallel-combination update; merging shards in a fixed order gives a
  /// fixed result.
  void merge(const RunningMoments& other);
  long count() const { return n_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance (0 for fewer than two points).
  double variance() const;
  double std_error() const;

 private:
  long n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct EsjdEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long n_samples = 0;
  std::string kernel_label;
  std::string target_label;
  double h = 0.0;
};

struct DirichletEstimate {
  double value = 0.0;
  double std_error = 0.0;
  long n_samples = 0;
};

/// Rao-Blackwellized ESJD of the first coordinate: the mean of
/// (Y1 - X1)^2 alpha(X, Y) over n independent X ~ pi, with Y and alpha drawn
/// from the kernel's own transition. Throws std::invalid_argument when the
/// target has no direct sampler or n < 1000.
EsjdEstimate esjd_rb(const Kernel& kernel, long n, Rng& rng);

/// Same estimator split into `shards` independent sub-streams derived from
/// `seed`, merged in shard order. The result depends on (seed, shards) only,
/// not on `threads`.
EsjdEstimate esjd_rb_sharded(const Kernel& kernel, long n, std::uint64_t seed, int shards = 64, int threads = 1);

/// Same draws as esjd_rb with the acceptance probability replaced by the
/// accept indicator. Seeded identically, it sees the same (X, Y, accept)
/// triples, which makes the two standard errors directly comparable.
EsjdEstimate esjd_indicator(const Kernel& kernel, long n, Rng& rng);

/// Plain estimator from one stationary chain of n transitions started at an
/// exact draw: the mean realized squared jump of the first coordinate, with
/// a batch-means standard error (`batches` batches).
EsjdEstimate esjd_realized(const Kernel& kernel, long n, Rng& rng, int batches = 100);

using TestFunction = std::function<double(const Vector&)>;

/// 1/2 E[(f(Y) - f(X))^2 alpha(X, Y)], X ~ pi.
DirichletEstimate dirichlet_rb(const Kernel& kernel, const TestFunction& f, long n, Rng& rng);
DirichletEstimate dirichlet_rb_sharded(const Kernel& kernel, const TestFunction& f, long n, std::uint64_t seed,
                                       int shards = 64, int threads = 1);

enum class TailDirection { Below, AboveAbs };

struct TailEstimate {
  double probability = 0.0;
  double threshold = 0.0;
  long n_iterations = 0;
};

/// Fraction of values[burn_in..] with v < threshold (Below) or
/// |v| > threshold (AboveAbs).
TailEstimate tail_probability(std::span<const double> values, double threshold, TailDirection direction,
                              long burn_in = 0);

/// Type-7 sample quantile at probability p.
double empirical_quantile(std::vector<double> values, double p);

/// (reference quantile, empirical quantile) at p_i = (i - 0.5) / n_points.
std::vector<std::pair<double, double>> qq_data(std::span<const double> values,
                                               const std::function<double(double)>& reference_quantile,
                                               int n_points);

}  // namespace rss
