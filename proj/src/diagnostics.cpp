#include "rss/diagnostics.hpp"

#include "rss/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rss {

void RunningMoments::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void RunningMoments::merge(const RunningMoments& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(other.n_);
  const double delta = other.mean_ - mean_;
  const double n = na + nb;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  n_ += other.n_;
}

double RunningMoments::variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

double RunningMoments::std_error() const {
  return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

namespace {

void require_sampler(const Kernel& kernel, long n) {
  if (!kernel_target(kernel).has_direct_sampler()) {
    throw std::invalid_argument("Rao-Blackwellized estimators need a directly samplable target");
  }
  if (n < 1000) throw std::invalid_argument("Rao-Blackwellized estimators need n >= 1000");
}

template <typename Summand>
RunningMoments accumulate(const Kernel& kernel, long n, Rng& rng, const Summand& summand,
                          bool rao_blackwellize = true) {
  const Target& target = kernel_target(kernel);
  RunningMoments acc;
  for (long i = 0; i < n; ++i) {
    const Vector x = target.sample(rng);
    const auto out = transition(kernel, x, rng);
    const double weight = rao_blackwellize ? out.acceptance_prob : (out.accepted ? 1.0 : 0.0);
    acc.add(summand(x, out.proposal) * weight);
  }
  return acc;
}

template <typename Summand>
RunningMoments accumulate_sharded(const Kernel& kernel, long n, std::uint64_t seed, int shards, int threads,
                                  const Summand& summand) {
  if (shards < 1) throw std::invalid_argument("shards must be positive");
  std::vector<RunningMoments> parts(static_cast<std::size_t>(shards));
  parallel_for(parts.size(), threads, [&](std::size_t s) {
    const long lo = n * static_cast<long>(s) / shards;
    const long hi = n * (static_cast<long>(s) + 1) / shards;
    Rng rng(derive_seed(seed, s));
    parts[s] = accumulate(kernel, hi - lo, rng, summand);
  });
  RunningMoments total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

double first_coordinate_jump(const Vector& x, const Vector& y) {
  const double d = y[0] - x[0];
  return d * d;
}

EsjdEstimate to_esjd(const Kernel& kernel, const RunningMoments& m) {
  EsjdEstimate e;
  e.value = m.mean();
  e.std_error = m.std_error();
  e.n_samples = m.count();
  e.kernel_label = label(kernel);
  e.target_label = kernel_target(kernel).name();
  e.h = step_size(kernel);
  return e;
}

}  // namespace

EsjdEstimate esjd_rb(const Kernel& kernel, long n, Rng& rng) {
  require_sampler(kernel, n);
  return to_esjd(kernel, accumulate(kernel, n, rng, first_coordinate_jump));
}

EsjdEstimate esjd_indicator(const Kernel& kernel, long n, Rng& rng) {
  require_sampler(kernel, n);
  return to_esjd(kernel, accumulate(kernel, n, rng, first_coordinate_jump, false));
}

EsjdEstimate esjd_rb_sharded(const Kernel& kernel, long n, std::uint64_t seed, int shards, int threads) {
  require_sampler(kernel, n);
  return to_esjd(kernel, accumulate_sharded(kernel, n, seed, shards, threads, first_coordinate_jump));
}

EsjdEstimate esjd_realized(const Kernel& kernel, long n, Rng& rng, int batches) {
  require_sampler(kernel, n);
  if (batches < 2 || n < batches) throw std::invalid_argument("esjd_realized: need 2 <= batches <= n");
  Vector x = kernel_target(kernel).sample(rng);
  RunningMoments batch_means;
  RunningMoments current;
  const long per_batch = n / batches;
  for (long i = 0; i < per_batch * batches; ++i) {
    const auto out = transition(kernel, x, rng);
    current.add(first_coordinate_jump(x, out.next_state));
    x = out.next_state;
    if (current.count() == per_batch) {
      batch_means.add(current.mean());
      current = RunningMoments{};
    }
  }
  EsjdEstimate e;
  e.value = batch_means.mean();
  e.std_error = batch_means.std_error();
  e.n_samples = per_batch * batches;
  e.kernel_label = label(kernel);
  e.target_label = kernel_target(kernel).name();
  e.h = step_size(kernel);
  return e;
}

namespace {

DirichletEstimate to_dirichlet(const RunningMoments& m) {
  return {0.5 * m.mean(), 0.5 * m.std_error(), m.count()};
}

}  // namespace

DirichletEstimate dirichlet_rb(const Kernel& kernel, const TestFunction& f, long n, Rng& rng) {
  require_sampler(kernel, n);
  auto summand = [&f](const Vector& x, const Vector& y) {
    const double d = f(y) - f(x);
    return d * d;
  };
  return to_dirichlet(accumulate(kernel, n, rng, summand));
}

DirichletEstimate dirichlet_rb_sharded(const Kernel& kernel, const TestFunction& f, long n, std::uint64_t seed,
                                       int shards, int threads) {
  require_sampler(kernel, n);
  auto summand = [&f](const Vector& x, const Vector& y) {
    const double d = f(y) - f(x);
    return d * d;
  };
  return to_dirichlet(accumulate_sharded(kernel, n, seed, shards, threads, summand));
}

TailEstimate tail_probability(std::span<const double> values, double threshold, TailDirection direction,
                              long burn_in) {
  if (burn_in < 0 || static_cast<std::size_t>(burn_in) >= values.size()) {
    throw std::invalid_argument("tail_probability: no states after burn-in");
  }
  long hits = 0;
  const auto kept = values.subspan(static_cast<std::size_t>(burn_in));
  for (double v : kept) {
    hits += direction == TailDirection::Below ? (v < threshold) : (std::abs(v) > threshold);
  }
  TailEstimate out;
  out.n_iterations = static_cast<long>(kept.size());
  out.probability = static_cast<double>(hits) / static_cast<double>(kept.size());
  out.threshold = threshold;
  return out;
}

double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<std::pair<double, double>> qq_data(std::span<const double> values,
                                               const std::function<double(double)>& reference_quantile,
                                               int n_points) {
  if (n_points < 2) throw std::invalid_argument("qq_data: need at least two points");
  if (values.empty()) throw std::invalid_argument("qq_data: empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(n_points));
  const double last = static_cast<double>(sorted.size() - 1);
  for (int i = 1; i <= n_points; ++i) {
    const double p = (i - 0.5) / n_points;
    const double pos = p * last;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double emp = sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    out.emplace_back(reference_quantile(p), emp);
  }
  return out;
}

}  // namespace rss
