#pragma once

#include "rss/rng.hpp"

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace rss {

struct Uniform01 {};
struct Exponential1 {};
struct HalfNormal {
  double sigma = 1.0;
};
/// N(mean, variance) conditioned on being positive.
struct TruncatedGaussianPositive {
  double mean = 0.0;
  double variance = 1.0;
  /// Mean sqrt(1 - sigma^2), variance sigma^2, for 0 < sigma < 1.
  static TruncatedGaussianPositive from_sigma(double sigma);
};
/// Density proportional to z^(p-1) exp(-(a z + b / z) / 2).
struct GeneralizedInverseGaussian {
  double p = 1.0;
  double a = 1.0;
  double b = 1.0;
};
/// Point mass at z0. Has no density.
struct Degenerate {
  double z0 = 1.0;
};

/// The law mu of the step-size multiplier z. Immutable value type; the
/// constructor validates the parameters.
class StepSizeDistribution {
 public:
  using Family = std::variant<Uniform01, Exponential1, HalfNormal, TruncatedGaussianPositive,
                              GeneralizedInverseGaussian, Degenerate>;

  StepSizeDistribution(Family family);  // NOLINT(google-explicit-constructor)

  const Family& family() const { return family_; }
  template <typename T>
  bool is() const { return std::holds_alternative<T>(family_); }
  bool has_density() const { return !is<Degenerate>(); }
  bool bounded_support() const { return is<Uniform01>() || is<Degenerate>(); }
  /// Right end of the support (infinity when unbounded).
  double support_upper() const;

  /// Short name used in configs and CSV output: "uniform", "exponential", ...
  std::string name() const;

  double mean() const;
  double second_moment() const;
  /// E[Z; Z > t], used to bound truncated mixture integrals.
  double upper_partial_mean(double t) const;
  /// Log normalizing constant of the GIG family (0 for the others).
  double log_normalizer() const { return log_norm_; }

 private:
  Family family_;
  double log_norm_ = 0.0;  // GIG: log normalizing constant
};

double density(const StepSizeDistribution& dist, double z);
double log_density(const StepSizeDistribution& dist, double z);
double cdf(const StepSizeDistribution& dist, double z);
double sample(const StepSizeDistribution& dist, Rng& rng);

/// Minimum of mu(z/h) / mu(z) over the grid, restricted to points with
/// mu(z) > 0. A strictly positive value is numerical evidence for
/// mu(z/h) >= C mu(z), h >= 1. Throws std::invalid_argument for a point mass
/// or an empty grid.
double assumption1_certificate(const StepSizeDistribution& dist, std::span<const double> h_grid,
                               std::span<const double> z_grid);
double assumption1_certificate(const StepSizeDistribution& dist);

std::vector<double> default_certificate_h_grid();
/// 200 log-spaced points in [1e-4, 10] intersected with the support.
std::vector<double> default_certificate_z_grid(const StepSizeDistribution& dist);

}  // namespace rss
