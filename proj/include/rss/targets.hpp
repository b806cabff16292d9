#pragma once

#include "rss/rng.hpp"
#include "rss/types.hpp"

#include "json.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>

namespace rss {

/// Exact law of the first coordinate of a target, used for Q-Q references
/// and tail-probability truth values.
class UnivariateLaw {
 public:
  struct Normal {
    double sigma = 1.0;
  };
  struct Laplace {};    // density e^{-|x|} / 2
  struct StudentT5 {};  // Student-t with 5 degrees of freedom

  UnivariateLaw(std::variant<Normal, Laplace, StudentT5> law) : law_(law) {}  // NOLINT
  static UnivariateLaw normal(double sigma) { return UnivariateLaw(Normal{sigma}); }

  double cdf(double x) const;
  double quantile(double p) const;
  double pdf(double x) const;
  std::string describe() const;

 private:
  std::variant<Normal, Laplace, StudentT5> law_;
};

/// A benchmark target pi on R^d: log-density up to an additive constant and
/// its analytic gradient. Implementations are immutable and thread-safe.
class Target {
 public:
  virtual ~Target() = default;

  virtual Index dimension() const = 0;
  virtual double log_density(const Vector& x) const = 0;
  virtual Vector grad_log_density(const Vector& x) const = 0;

  virtual bool has_direct_sampler() const { return false; }
  /// Exact draw from pi; throws std::logic_error when not available.
  virtual Vector sample(Rng& rng) const;
  virtual std::optional<UnivariateLaw> first_marginal() const { return std::nullopt; }

  /// Config name ("std_normal", "funnel", ...) and parameters, as accepted
  /// by make_target.
  virtual std::string name() const = 0;
  virtual nlohmann::json params() const { return nlohmann::json::object(); }
};

using TargetPtr = std::shared_ptr<const Target>;

TargetPtr make_std_normal(Index d);
TargetPtr make_laplace_1d();
TargetPtr make_student_t5_1d();
/// X1 ~ N(0, sigma2), X_i | X1 ~ N(0, e^{X1}) for i >= 2.
TargetPtr make_funnel(Index d, double sigma2);
/// X1 ~ N(0, 1/(2a)), X2 | X1 ~ N(X1^2, 1/(2b)).
TargetPtr make_rosenbrock(double a, double b);

struct PoissonRegressionData {
  Matrix covariates;  // n x d, rows z_i
  Vector responses;   // n nonnegative integer counts
  Vector true_parameter;
  std::uint64_t seed = 0;
};

/// Bayesian Poisson regression posterior with a standard Gaussian prior.
class PoissonPosterior final : public Target {
 public:
  explicit PoissonPosterior(PoissonRegressionData data);

  Index dimension() const override { return data_.covariates.cols(); }
  double log_density(const Vector& x) const override;
  Vector grad_log_density(const Vector& x) const override;
  std::string name() const override { return "poisson_reg"; }
  nlohmann::json params() const override;

  const PoissonRegressionData& data() const { return data_; }
  /// True once any linear predictor had to be clipped at 700 before
  /// exponentiation.
  bool overflow_guard_triggered() const { return clipped_.load(std::memory_order_relaxed); }

  static constexpr double kMaxLinearPredictor = 700.0;

 private:
  Vector clipped_linear_predictor(const Vector& x) const;

  PoissonRegressionData data_;
  mutable std::atomic<bool> clipped_{false};
};

/// Simulates x* ~ N(0, I_d), z_i ~ N(0, I_d / d), Y_i ~ Poisson(exp<z_i, x*>)
/// with n = 10 d, all from `seed`.
PoissonRegressionData simulate_poisson_data(Index d, std::uint64_t seed);
std::pair<std::shared_ptr<const PoissonPosterior>, PoissonRegressionData> make_poisson_posterior(
    Index d, std::uint64_t seed);

/// CSV (row, z_1..z_d, y) plus a JSON sidecar holding x* and the seed.
void write_poisson_data(const PoissonRegressionData& data, const std::filesystem::path& csv_path,
                        const std::filesystem::path& json_path);
PoissonRegressionData read_poisson_data(const std::filesystem::path& csv_path,
                                        const std::filesystem::path& json_path);

/// Builds a target from {"name": ..., "params": {...}}.
TargetPtr make_target(const nlohmann::json& spec);

}  // namespace rss
