#include "rss/randomized_kernels.hpp"

#include "rss/kernel_detail.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rss {

double randomized_h(StepConvention convention, double h, double z) {
  return convention == StepConvention::Step ? h * z : h * z * z;
}

double randomized_effective_step(StepConvention convention, double h, double z) {
  return convention == StepConvention::Step ? h * z : std::sqrt(h) * z;
}

TransitionOutcome aux_step(const AuxiliaryKernel& kernel, const Vector& x, Rng& rng) {
  const double z = sample(kernel.mu, rng);
  TransitionOutcome out = mh_step(kernel.base, x, randomized_h(kernel.base.convention, kernel.h, z), rng);
  out.multiplier = z;
  out.effective_step = randomized_effective_step(kernel.base.convention, kernel.h, z);
  return out;
}

double auxiliary_increment_density(const AuxiliaryKernel& kernel, double x, double w) {
  if (!is_rademacher_kind(kernel.base.kind) || kernel.base.convention != StepConvention::Scale) {
    throw std::invalid_argument("auxiliary_increment_density: needs a Rademacher kind under the scale convention");
  }
  if (kernel.base.target->dimension() != 1) throw std::invalid_argument("auxiliary_increment_density: d must be 1");
  if (w == 0.0) return 0.0;
  const double sd = std::sqrt(kernel.h);
  const double z = std::abs(w) / sd;
  const double mu_z = density(kernel.mu, z) / sd;
  const double g = kernel.base.kind == ProposalKind::RademacherBarker
                       ? detail::checked_gradient(*kernel.base.target, Vector::Constant(1, x))[0]
                       : 0.0;
  // Branches (xi, b) with b xi = sign(w); the candidate increment is sqrt(h) z xi.
  double total = 0.0;
  for (double xi : {1.0, -1.0}) {
    const double b = (w > 0.0 ? 1.0 : -1.0) * xi;
    const double candidate = sd * z * xi;
    double p_b;
    if (kernel.base.kind == ProposalKind::RademacherRwm) {
      p_b = b > 0.0 ? 1.0 : 0.0;
    } else {
      const double p_plus = std::exp(detail::log_logistic_cdf(g * candidate));
      p_b = b > 0.0 ? p_plus : 1.0 - p_plus;
    }
    total += 0.5 * p_b;
  }
  return mu_z * total;
}

StepSizeDistribution step_distribution(MarginalMu kind) {
  if (kind == MarginalMu::Uniform01) return StepSizeDistribution::Family{Uniform01{}};
  return StepSizeDistribution::Family{Exponential1{}};
}

std::string to_string(MarginalMu kind) { return kind == MarginalMu::Uniform01 ? "uniform" : "exponential"; }

MarginalizedMalaKernel make_marginalized_mala(TargetPtr target, const StepSizeDistribution& mu, double h,
                                              StepConvention convention) {
  if (convention != StepConvention::Step) {
    throw std::invalid_argument("marginalized MALA is defined under the step convention only");
  }
  if (!(h > 0.0)) throw std::invalid_argument("step size h must be positive");
  MarginalizedMalaKernel k;
  if (mu.is<Uniform01>()) {
    k.mu_kind = MarginalMu::Uniform01;
  } else if (mu.is<Exponential1>()) {
    k.mu_kind = MarginalMu::Exponential1;
  } else {
    throw std::invalid_argument("marginalized MALA supports uniform and exponential mu only, got " + mu.name());
  }
  k.target = std::move(target);
  k.h = h;
  return k;
}

namespace {

LogValue log_qbar(const MarginalizedMalaKernel& k, const Vector& x, const Vector& grad_x, const Vector& y) {
  const Vector w = y - x;
  const double sq = w.squaredNorm();
  if (sq == 0.0) throw std::invalid_argument("log_marginal_mala_density: y == x");
  const double d = static_cast<double>(x.size());
  const double nu = 1.0 - 0.5 * d;
  const double a = sq / (4.0 * k.h);
  const double c = 0.5 * w.dot(grad_x);
  const double g2 = k.h * grad_x.squaredNorm() / 4.0;
  if (k.mu_kind == MarginalMu::Uniform01) {
    return {c + log_upper_incomplete_k(nu, a, g2).log_magnitude};
  }
  const double big_b = 1.0 + g2;
  return {c + 0.5 * nu * (std::log(a) - std::log(big_b)) +
          log_bessel_k(nu, 2.0 * std::sqrt(a * big_b)).log_magnitude};
}

double log_alpha_marginal(const MarginalizedMalaKernel& k, const Vector& x, double lp_x, const Vector& grad_x,
                          const Vector& y) {
  if (y == x) return 0.0;
  const double lp_y = k.target->log_density(y);
  if (std::isnan(lp_y) || lp_y == -std::numeric_limits<double>::infinity()) {
    return -std::numeric_limits<double>::infinity();
  }
  const Vector grad_y = k.target->grad_log_density(y);
  if (!grad_y.allFinite()) return -std::numeric_limits<double>::infinity();
  const double r = lp_y - lp_x + log_qbar(k, y, grad_y, x).log_magnitude - log_qbar(k, x, grad_x, y).log_magnitude;
  if (std::isnan(r)) return -std::numeric_limits<double>::infinity();
  return std::min(0.0, r);
}

}  // namespace

LogValue log_marginal_mala_density(const MarginalizedMalaKernel& kernel, const Vector& x, const Vector& y) {
  return log_qbar(kernel, x, detail::checked_gradient(*kernel.target, x), y);
}

double log_marginal_acceptance(const MarginalizedMalaKernel& kernel, const Vector& x, const Vector& y) {
  const double lp_x = detail::checked_log_density(*kernel.target, x);
  return log_alpha_marginal(kernel, x, lp_x, detail::checked_gradient(*kernel.target, x), y);
}

TransitionOutcome marginalized_step(const MarginalizedMalaKernel& kernel, const Vector& x, Rng& rng) {
  const double lp_x = detail::checked_log_density(*kernel.target, x);
  const Vector grad = detail::checked_gradient(*kernel.target, x);
  const double z = sample(step_distribution(kernel.mu_kind), rng);
  const double hz = kernel.h * z;
  Vector y = x + hz * grad + std::sqrt(2.0 * hz) * rng.normal_vector(x.size());
  const double log_alpha = log_alpha_marginal(kernel, x, lp_x, grad, y);
  TransitionOutcome out;
  out.accepted = accept_draw(log_alpha, rng);
  out.acceptance_prob = std::exp(log_alpha);
  out.next_state = out.accepted ? y : x;
  out.proposal = std::move(y);
  out.effective_step = hz;
  out.multiplier = z;
  return out;
}

namespace {
template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
}  // namespace

TransitionOutcome transition(const Kernel& kernel, const Vector& x, Rng& rng) {
  return std::visit(Overloaded{[&](const FixedStepKernel& k) { return mh_step(k.base, x, k.h, rng); },
                               [&](const AuxiliaryKernel& k) { return aux_step(k, x, rng); },
                               [&](const MarginalizedMalaKernel& k) { return marginalized_step(k, x, rng); }},
                    kernel);
}

double step_size(const Kernel& kernel) {
  return std::visit([](const auto& k) { return k.h; }, kernel);
}

Kernel with_step_size(const Kernel& kernel, double h) {
  return std::visit(
      [h](auto k) -> Kernel {
        k.h = h;
        return k;
      },
      kernel);
}

const Target& kernel_target(const Kernel& kernel) {
  return std::visit(Overloaded{[](const FixedStepKernel& k) -> const Target& { return *k.base.target; },
                               [](const AuxiliaryKernel& k) -> const Target& { return *k.base.target; },
                               [](const MarginalizedMalaKernel& k) -> const Target& { return *k.target; }},
                    kernel);
}

std::string label(const Kernel& kernel) {
  return std::visit(Overloaded{[](const FixedStepKernel& k) { return to_string(k.base.kind); },
                               [](const AuxiliaryKernel& k) { return "aux-" + to_string(k.base.kind) + "-" + k.mu.name(); },
                               [](const MarginalizedMalaKernel& k) { return "marg-mala-" + to_string(k.mu_kind); }},
                    kernel);
}

}  // namespace rss
