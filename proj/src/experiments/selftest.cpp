#include "rss/experiments/selftest.hpp"

#include "rss/experiments/config.hpp"
#include "rss/experiments/runner.hpp"
#include "rss/scaling_theory.hpp"
#include "rss/targets.hpp"

#include <cmath>
#include <sstream>

namespace rss {

namespace {

using Family = StepSizeDistribution::Family;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

std::vector<nlohmann::json> target_specs() {
  return {{{"name", "std_normal"}, {"params", {{"d", 3}}}},
          {{"name", "laplace"}, {"params", nlohmann::json::object()}},
          {{"name", "student_t5"}, {"params", nlohmann::json::object()}},
          {{"name", "funnel"}, {"params", {{"d", 10}, {"sigma2", 4.0}}}},
          {{"name", "rosenbrock"}, {"params", {{"a", 0.5}, {"b", 50.0}}}},
          {{"name", "poisson_reg"}, {"params", {{"d", 5}, {"seed", 7}}}}};
}

SelftestResult gradients(std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (const auto& spec : target_specs()) {
    const TargetPtr t = make_target(spec);
    for (int rep = 0; rep < 20; ++rep) {
      const Vector x = rng.normal_vector(t->dimension());
      const Vector g = t->grad_log_density(x);
      for (Index j = 0; j < x.size(); ++j) {
        const double eps = 1e-5 * std::max(1.0, std::abs(x[j]));
        Vector a = x, b = x;
        a[j] += eps;
        b[j] -= eps;
        const double fd = (t->log_density(a) - t->log_density(b)) / (2.0 * eps);
        worst = std::max(worst, std::abs(fd - g[j]) / std::max(1.0, std::abs(g[j])));
      }
    }
  }
  return {"gradients", worst <= 1e-5, "max relative error " + fmt(worst)};
}

SelftestResult detailed_balance(std::uint64_t seed) {
  Rng rng(seed);
  const TargetPtr t = make_std_normal(2);
  double worst = 0.0;
  for (auto kind : {ProposalKind::GaussianRwm, ProposalKind::Mala, ProposalKind::Barker}) {
    ProposalKernel k{kind, t};
    for (int rep = 0; rep < 50; ++rep) {
      const double h = std::exp(rng.normal());
      const Vector x = rng.normal_vector(2);
      Proposal fwd = propose(k, x, h, rng);
      const Vector& y = fwd.y;
      Proposal back;
      back.y = x;
      const double lhs = t->log_density(x) + log_proposal_density(k, x, y, h) + log_acceptance(k, x, fwd, h);
      const double rhs = t->log_density(y) + log_proposal_density(k, y, x, h) + log_acceptance(k, y, back, h);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  for (const StepSizeDistribution mu : {StepSizeDistribution(Family{Uniform01{}}),
                                        StepSizeDistribution(Family{Exponential1{}})}) {
    for (int rep = 0; rep < 50; ++rep) {
      const auto k = make_marginalized_mala(t, mu, std::exp(rng.normal()));
      const Vector x = rng.normal_vector(2);
      const Vector y = x + rng.normal_vector(2);
      const double lhs = t->log_density(x) + log_marginal_mala_density(k, x, y).log_magnitude + log_marginal_acceptance(k, x, y);
      const double rhs = t->log_density(y) + log_marginal_mala_density(k, y, x).log_magnitude + log_marginal_acceptance(k, y, x);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return {"detailed_balance", worst <= 1e-10, "max log-scale defect " + fmt(worst)};
}

SelftestResult degenerate_identity(std::uint64_t seed) {
  ExperimentConfig plain;
  plain.seed = seed;
  plain.target = {{"name", "std_normal"}, {"params", {{"d", 3}}}};
  plain.n_iterations = 2000;
  plain.burn_in = 200;
  plain.tracked_coordinates = {0, 1, 2};
  ExperimentConfig wrapped = plain;
  wrapped.wrapper = Wrapper::Auxiliary;
  wrapped.mu = StepSizeDistribution(Family{Degenerate{1.0}});
  wrapped.adaptation.alpha_star = default_alpha_star(plain);
  const auto a = run_chain(plain);
  const auto b = run_chain(wrapped);
  const bool same = a.coordinates == b.coordinates && a.alpha == b.alpha && a.h == b.h;
  return {"degenerate_wrapper", same, same ? "traces identical" : "traces differ"};
}

SelftestResult classical_rates() {
  const double want[] = {0.234, 0.574, 0.651};
  const double cs[] = {1.0, 1.0 / 3.0, 0.25};
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    worst = std::max(worst, std::abs(optimize_base(ScalingModel{cs[i], 1.0, std::nullopt}).acceptance_at_opt - want[i]));
  }
  return {"classical_rates", worst <= 1e-3, "max deviation " + fmt(worst)};
}

SelftestResult adaptation_arithmetic() {
  const double v = adapt_step(1.0, 1, 1.0, 0.574, 0.6);
  const double w = adapt_step(2.5, 17, 0.3, 0.3, 0.6);
  const bool ok = std::abs(v - std::exp(0.426)) <= 1e-14 && w == 2.5;
  return {"adapt_step", ok, "h_2 = " + fmt(v)};
}

SelftestResult config_round_trip() {
  ExperimentConfig c;
  c.seed = 99;
  c.wrapper = Wrapper::Auxiliary;
  c.mu = StepSizeDistribution(Family{GeneralizedInverseGaussian{0.5, 2.0, 1.0}});
  c.convention = StepConvention::Scale;
  c.adaptation.alpha_star = 0.6;
  c.tracked_coordinates = {0, 2};
  const auto back = parse_config(nlohmann::json::parse(to_json(c).dump()));
  const bool ok = equivalent(c, back) && config_hash(c) == config_hash(back);
  return {"config_round_trip", ok, config_hash(c)};
}

}  // namespace

std::vector<SelftestResult> run_selftest(std::uint64_t seed) {
  return {gradients(derive_seed(seed, 0)), detailed_balance(derive_seed(seed, 1)), degenerate_identity(seed),
          classical_rates(), adaptation_arithmetic(), config_round_trip()};
}

}  // namespace rss
