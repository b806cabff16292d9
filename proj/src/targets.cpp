#include "rss/targets.hpp"

#include "rss/csv.hpp"
#include "rss/numerics.hpp"
#include "rss/special_functions.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace rss {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double student_t5_cdf(double t) {
  // Closed form for 5 degrees of freedom.
  const double theta = std::atan(t / std::sqrt(5.0));
  const double c = std::cos(theta);
  return 0.5 + (theta + std::sin(theta) * c * (1.0 + (2.0 / 3.0) * c * c)) / std::numbers::pi;
}

double student_t5_pdf(double t) {
  // Gamma(3) / (sqrt(5 pi) Gamma(5/2)) = 8 / (3 pi sqrt 5)
  const double norm = 8.0 / (3.0 * std::numbers::pi * std::sqrt(5.0));
  return norm * std::pow(1.0 + t * t / 5.0, -3.0);
}

class StdNormalTarget final : public Target {
 public:
  explicit StdNormalTarget(Index d) : d_(d) {}
  Index dimension() const override { return d_; }
  double log_density(const Vector& x) const override { return -0.5 * x.squaredNorm(); }
  Vector grad_log_density(const Vector& x) const override { return -x; }
  bool has_direct_sampler() const override { return true; }
  Vector sample(Rng& rng) const override { return rng.normal_vector(d_); }
  std::optional<UnivariateLaw> first_marginal() const override { return UnivariateLaw::normal(1.0); }
  std::string name() const override { return "std_normal"; }
  nlohmann::json params() const override { return {{"d", d_}}; }

 private:
  Index d_;
};

class LaplaceTarget final : public Target {
 public:
  Index dimension() const override { return 1; }
  double log_density(const Vector& x) const override { return -std::abs(x[0]); }
  Vector grad_log_density(const Vector& x) const override {
    // Subgradient midpoint at 0.
    const double g = x[0] > 0.0 ? -1.0 : (x[0] < 0.0 ? 1.0 : 0.0);
    return Vector::Constant(1, g);
  }
  bool has_direct_sampler() const override { return true; }
  Vector sample(Rng& rng) const override {
    const double e = -std::log(rng.uniform());
    return Vector::Constant(1, rng.rademacher() * e);
  }
  std::optional<UnivariateLaw> first_marginal() const override { return UnivariateLaw(UnivariateLaw::Laplace{}); }
  std::string name() const override { return "laplace"; }
};

class StudentT5Target final : public Target {
 public:
  Index dimension() const override { return 1; }
  double log_density(const Vector& x) const override { return -3.0 * std::log1p(x[0] * x[0] / 5.0); }
  Vector grad_log_density(const Vector& x) const override {
    return Vector::Constant(1, -6.0 * x[0] / (5.0 + x[0] * x[0]));
  }
  bool has_direct_sampler() const override { return true; }
  Vector sample(Rng& rng) const override {
    const double z = rng.normal();
    double chi2 = 0.0;
    for (int i = 0; i < 5; ++i) {
      const double n = rng.normal();
      chi2 += n * n;
    }
    return Vector::Constant(1, z / std::sqrt(chi2 / 5.0));
  }
  std::optional<UnivariateLaw> first_marginal() const override {
    return UnivariateLaw(UnivariateLaw::StudentT5{});
  }
  std::string name() const override { return "student_t5"; }
};

class FunnelTarget final : public Target {
 public:
  FunnelTarget(Index d, double sigma2) : d_(d), sigma2_(sigma2) {
    if (d < 2) throw std::invalid_argument("funnel: d must be at least 2");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("funnel: sigma2 must be positive");
  }
  Index dimension() const override { return d_; }
  double log_density(const Vector& x) const override {
    const double x1 = x[0];
    const double tail = x.tail(d_ - 1).squaredNorm();
    return -0.5 * x1 * x1 / sigma2_ - 0.5 * static_cast<double>(d_ - 1) * x1 - 0.5 * std::exp(-x1) * tail;
  }
  Vector grad_log_density(const Vector& x) const override {
    const double x1 = x[0];
    const double inv_var = std::exp(-x1);
    Vector g(d_);
    g[0] = -x1 / sigma2_ - 0.5 * static_cast<double>(d_ - 1) + 0.5 * inv_var * x.tail(d_ - 1).squaredNorm();
    g.tail(d_ - 1) = -inv_var * x.tail(d_ - 1);
    return g;
  }
  bool has_direct_sampler() const override { return true; }
  Vector sample(Rng& rng) const override {
    Vector x(d_);
    x[0] = std::sqrt(sigma2_) * rng.normal();
    const double sd = std::exp(0.5 * x[0]);
    for (Index i = 1; i < d_; ++i) x[i] = sd * rng.normal();
    return x;
  }
  std::optional<UnivariateLaw> first_marginal() const override { return UnivariateLaw::normal(std::sqrt(sigma2_)); }
  std::string name() const override { return "funnel"; }
  nlohmann::json params() const override { return {{"d", d_}, {"sigma2", sigma2_}}; }

 private:
  Index d_;
  double sigma2_;
};

class RosenbrockTarget final : public Target {
 public:
  RosenbrockTarget(double a, double b) : a_(a), b_(b) {
    if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("rosenbrock: a and b must be positive");
  }
  Index dimension() const override { return 2; }
  double log_density(const Vector& x) const override {
    const double r = x[1] - x[0] * x[0];
    return -a_ * x[0] * x[0] - b_ * r * r;
  }
  Vector grad_log_density(const Vector& x) const override {
    const double r = x[1] - x[0] * x[0];
    Vector g(2);
    g << -2.0 * a_ * x[0] + 4.0 * b_ * x[0] * r, -2.0 * b_ * r;
    return g;
  }
  bool has_direct_sampler() const override { return true; }
  Vector sample(Rng& rng) const override {
    Vector x(2);
    x[0] = rng.normal() / std::sqrt(2.0 * a_);
    x[1] = x[0] * x[0] + rng.normal() / std::sqrt(2.0 * b_);
    return x;
  }
  std::optional<UnivariateLaw> first_marginal() const override {
    return UnivariateLaw::normal(1.0 / std::sqrt(2.0 * a_));
  }
  std::string name() const override { return "rosenbrock"; }
  nlohmann::json params() const override { return {{"a", a_}, {"b", b_}}; }

 private:
  double a_, b_;
};

}  // namespace

double UnivariateLaw::cdf(double x) const {
  return std::visit(Overloaded{
                        [x](const Normal& n) { return std_normal_cdf(x / n.sigma); },
                        [x](const Laplace&) { return x < 0.0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x); },
                        [x](const StudentT5&) { return student_t5_cdf(x); },
                    },
                    law_);
}

double UnivariateLaw::pdf(double x) const {
  return std::visit(Overloaded{
                        [x](const Normal& n) { return std_normal_pdf(x / n.sigma) / n.sigma; },
                        [x](const Laplace&) { return 0.5 * std::exp(-std::abs(x)); },
                        [x](const StudentT5&) { return student_t5_pdf(x); },
                    },
                    law_);
}

double UnivariateLaw::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile: p must lie in (0, 1)");
  return std::visit(Overloaded{
                        [p](const Normal& n) { return n.sigma * std_normal_quantile(p); },
                        [p](const Laplace&) { return p < 0.5 ? std::log(2.0 * p) : -std::log(2.0 * (1.0 - p)); },
                        [p](const StudentT5&) {
                          // The t5 cdf is monotone; bracket generously and bisect.
                          double lo = -1.0;
                          double hi = 1.0;
                          while (student_t5_cdf(lo) > p) lo *= 2.0;
                          while (student_t5_cdf(hi) < p) hi *= 2.0;
                          return numerics::bisect([p](double t) { return student_t5_cdf(t) - p; }, lo, hi, 1e-14);
                        },
                    },
                    law_);
}

std::string UnivariateLaw::describe() const {
  return std::visit(Overloaded{
                        [](const Normal& n) { return "normal(0," + csv::format(n.sigma * n.sigma) + ")"; },
                        [](const Laplace&) { return std::string("laplace(0,1)"); },
                        [](const StudentT5&) { return std::string("student_t(5)"); },
                    },
                    law_);
}

Vector Target::sample(Rng&) const { throw std::logic_error(name() + ": target has no direct sampler"); }

TargetPtr make_std_normal(Index d) {
  if (d < 1) throw std::invalid_argument("std_normal: d must be positive");
  return std::make_shared<StdNormalTarget>(d);
}
TargetPtr make_laplace_1d() { return std::make_shared<LaplaceTarget>(); }
TargetPtr make_student_t5_1d() { return std::make_shared<StudentT5Target>(); }
TargetPtr make_funnel(Index d, double sigma2) { return std::make_shared<FunnelTarget>(d, sigma2); }
TargetPtr make_rosenbrock(double a, double b) { return std::make_shared<RosenbrockTarget>(a, b); }

// ---------------------------------------------------------------------------
// Poisson regression

PoissonPosterior::PoissonPosterior(PoissonRegressionData data) : data_(std::move(data)) {
  if (data_.covariates.rows() != data_.responses.size()) {
    throw std::invalid_argument("PoissonPosterior: covariate rows and responses differ in length");
  }
}

Vector PoissonPosterior::clipped_linear_predictor(const Vector& x) const {
  Vector eta = data_.covariates * x;
  if ((eta.array() > kMaxLinearPredictor).any()) {
    clipped_.store(true, std::memory_order_relaxed);
    eta = eta.cwiseMin(kMaxLinearPredictor);
  }
  return eta;
}

double PoissonPosterior::log_density(const Vector& x) const {
  const Vector eta = clipped_linear_predictor(x);
  return data_.responses.dot(eta) - eta.array().exp().sum() - 0.5 * x.squaredNorm();
}

Vector PoissonPosterior::grad_log_density(const Vector& x) const {
  const Vector eta = clipped_linear_predictor(x);
  const Vector resid = data_.responses - eta.array().exp().matrix();
  return data_.covariates.transpose() * resid - x;
}

nlohmann::json PoissonPosterior::params() const {
  return {{"d", dimension()}, {"seed", data_.seed}};
}

PoissonRegressionData simulate_poisson_data(Index d, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("poisson_reg: d must be positive");
  Rng rng(seed);
  const Index n = 10 * d;
  PoissonRegressionData data;
  data.seed = seed;
  data.true_parameter = rng.normal_vector(d);
  data.covariates.resize(n, d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) data.covariates(i, j) = scale * rng.normal();
  }
  data.responses.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double rate = std::exp(data.covariates.row(i).dot(data.true_parameter));
    std::poisson_distribution<long long> pois(rate);
    data.responses[i] = static_cast<double>(pois(rng));
  }
  return data;
}

std::pair<std::shared_ptr<const PoissonPosterior>, PoissonRegressionData> make_poisson_posterior(
    Index d, std::uint64_t seed) {
  auto data = simulate_poisson_data(d, seed);
  auto target = std::make_shared<const PoissonPosterior>(data);
  return {std::move(target), std::move(data)};
}

void write_poisson_data(const PoissonRegressionData& data, const std::filesystem::path& csv_path,
                        const std::filesystem::path& json_path) {
  std::ofstream os(csv_path);
  if (!os) throw std::runtime_error("cannot open " + csv_path.string());
  csv::Writer w(os);
  const Index d = data.covariates.cols();
  w.field("row");
  for (Index j = 0; j < d; ++j) w.field("z" + std::to_string(j + 1));
  w.field("y");
  w.end_row();
  for (Index i = 0; i < data.covariates.rows(); ++i) {
    w.field(i);
    for (Index j = 0; j < d; ++j) w.field(data.covariates(i, j));
    w.field(static_cast<long long>(data.responses[i]));
    w.end_row();
  }
  nlohmann::json side;
  side["seed"] = data.seed;
  side["d"] = d;
  side["n"] = data.covariates.rows();
  side["true_parameter"] = std::vector<double>(data.true_parameter.data(), data.true_parameter.data() + d);
  std::ofstream js(json_path);
  if (!js) throw std::runtime_error("cannot open " + json_path.string());
  js << side.dump(2) << '\n';
}

PoissonRegressionData read_poisson_data(const std::filesystem::path& csv_path,
                                        const std::filesystem::path& json_path) {
  std::ifstream js(json_path);
  if (!js) throw std::runtime_error("cannot open " + json_path.string());
  const auto side = nlohmann::json::parse(js);
  PoissonRegressionData data;
  data.seed = side.at("seed").get<std::uint64_t>();
  const auto truth = side.at("true_parameter").get<std::vector<double>>();
  data.true_parameter = Eigen::Map<const Vector>(truth.data(), static_cast<Index>(truth.size()));
  const Index d = data.true_parameter.size();
  const Index n = side.at("n").get<Index>();
  data.covariates.resize(n, d);
  data.responses.resize(n);

  std::ifstream is(csv_path);
  if (!is) throw std::runtime_error("cannot open " + csv_path.string());
  std::string line;
  std::getline(is, line);  // header
  for (Index i = 0; i < n; ++i) {
    if (!std::getline(is, line)) throw std::runtime_error("poisson data: truncated CSV");
    const auto cells = csv::split(line);
    if (static_cast<Index>(cells.size()) != d + 2) throw std::runtime_error("poisson data: bad column count");
    for (Index j = 0; j < d; ++j) data.covariates(i, j) = std::stod(cells[static_cast<std::size_t>(j) + 1]);
    data.responses[i] = std::stod(cells.back());
  }
  return data;
}

TargetPtr make_target(const nlohmann::json& spec) {
  const auto name = spec.at("name").get<std::string>();
  const auto params = spec.value("params", nlohmann::json::object());
  if (name == "std_normal") return make_std_normal(params.value("d", Index{1}));
  if (name == "laplace") return make_laplace_1d();
  if (name == "student_t5") return make_student_t5_1d();
  if (name == "funnel") return make_funnel(params.value("d", Index{10}), params.value("sigma2", 9.0));
  if (name == "rosenbrock") return make_rosenbrock(params.value("a", 0.5), params.value("b", 50.0));
  if (name == "poisson_reg") {
    return make_poisson_posterior(params.value("d", Index{50}), params.value("seed", std::uint64_t{1})).first;
  }
  throw std::invalid_argument("unknown target: " + name);
}

}  // namespace rss
