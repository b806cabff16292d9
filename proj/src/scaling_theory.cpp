#include "rss/scaling_theory.hpp"

#include "rss/numerics.hpp"
#include "rss/special_functions.hpp"
#include "rss/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace rss {

namespace {

void validate(const ScalingModel& m) {
  if (!(m.c > 0.0) || !(m.kappa > 0.0)) throw std::invalid_argument("ScalingModel: c and kappa must be positive");
}

const StepSizeDistribution& require_mu(const ScalingModel& m) {
  validate(m);
  if (!m.mu) throw std::invalid_argument("ScalingModel: no step-size distribution");
  return *m.mu;
}

constexpr numerics::QuadratureOptions kMixtureOptions{1e-14, 1e-13, 40, 8000};

// z at which kappa (l z)^(1/(2c)) / 2 = 1, the scale of the acceptance drop.
double transition_point(const ScalingModel& m, double ell) { return std::pow(2.0 / m.kappa, 2.0 * m.c) / ell; }

double integrate_checked(const auto& f, std::span<const double> bp) {
  const auto r = numerics::integrate(f, bp, kMixtureOptions);
  if (!r.converged && r.abs_error > 1e-10) {
    throw QuadratureError("mixture quadrature did not converge", r.abs_error);
  }
  return r.value;
}

// int g(z) mu(z) dz; tail_bound(T) bounds the contribution of z > T.
double mix(const ScalingModel& m, double ell, const auto& g, const auto& tail_bound) {
  const auto& mu = require_mu(m);
  if (const auto* point = std::get_if<Degenerate>(&mu.family())) return g(point->z0);
  auto f = [&](double z) { return z > 0.0 ? g(z) * density(mu, z) : 0.0; };
  const double z0 = transition_point(m, ell);
  auto breakpoints = [&](double upper) {
    std::vector<double> bp{0.0};
    for (double k : {0.0625, 0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
      if (k * z0 < upper) bp.push_back(k * z0);
    }
    bp.push_back(upper);
    return bp;
  };
  if (mu.bounded_support()) {
    const auto bp = breakpoints(mu.support_upper());
    return integrate_checked(f, bp);
  }
  double upper = std::max(8.0, 16.0 * z0);
  for (int it = 0; it < 60; ++it) {
    const auto bp = breakpoints(upper);
    const double value = integrate_checked(f, bp);
    if (tail_bound(mu, upper) < 1e-14 * std::abs(value)) return value;
    upper *= 2.0;
  }
  throw QuadratureError("mixture truncation did not reach 1e-14 relative tail", 0.0);
}

}  // namespace

double accept_rate(const ScalingModel& model, double ell) {
  validate(model);
  if (ell < 0.0) throw std::invalid_argument("accept_rate: ell must be nonnegative");
  return 2.0 * std_normal_cdf(-0.5 * model.kappa * std::pow(ell, 1.0 / (2.0 * model.c)));
}

double eff(const ScalingModel& model, double ell) { return ell * accept_rate(model, ell); }

Optimum optimize_base(const ScalingModel& model) {
  validate(model);
  const double c = model.c;
  auto condition = [c](double u) { return std_normal_cdf(-u) - u * std_normal_pdf(u) / (2.0 * c); };
  // condition(0) = 1/2 > 0 and it is negative once u phi(u) / (2c) > Phi(-u).
  double hi = 1.0;
  while (condition(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e3) throw std::runtime_error("optimize_base: root not bracketed");
  }
  const double u = numerics::bisect(condition, 0.0, hi, 1e-12);
  Optimum out;
  out.ell_opt = std::pow(2.0 * u / model.kappa, 2.0 * c);
  out.acceptance_at_opt = accept_rate(model, out.ell_opt);
  out.eff_at_opt = out.ell_opt * out.acceptance_at_opt;
  return out;
}

double accept_rate_bar(const ScalingModel& model, double ell) {
  ScalingModel base = model;
  base.mu.reset();
  // a <= 1, so the tail is at most P(Z > T) <= E[Z; Z > T] / T.
  auto tail = [](const StepSizeDistribution& mu, double t) { return mu.upper_partial_mean(t) / t; };
  return mix(model, ell, [&](double z) { return accept_rate(base, ell * z); }, tail);
}

double eff_bar(const ScalingModel& model, double ell) {
  ScalingModel base = model;
  base.mu.reset();
  // eff(l z) <= l z.
  auto tail = [ell](const StepSizeDistribution& mu, double t) { return ell * mu.upper_partial_mean(t); };
  return mix(model, ell, [&](double z) { return eff(base, ell * z); }, tail);
}

double mixture_expectation(const std::function<double(double)>& f, const std::function<double(double)>& density_fn,
                           double lo, double hi) {
  auto g = [&](double z) { return f(z) * density_fn(z); };
  std::vector<double> bp;
  for (int i = 0; i <= 8; ++i) bp.push_back(lo + (hi - lo) * i / 8.0);
  return integrate_checked(g, bp);
}

Optimum optimize_bar(const ScalingModel& model) {
  require_mu(model);
  ScalingModel base = model;
  base.mu.reset();
  const double start = optimize_base(base).ell_opt;
  auto f = [&](double ell) { return eff_bar(model, ell); };
  const auto br = numerics::bracket_maximum(f, start);
  Optimum out;
  out.ell_opt = numerics::golden_section_maximize(f, br, 1e-10);
  out.acceptance_at_opt = accept_rate_bar(model, out.ell_opt);
  out.eff_at_opt = eff_bar(model, out.ell_opt);
  return out;
}

double efficiency_ratio(const ScalingModel& model) {
  ScalingModel base = model;
  base.mu.reset();
  return optimize_base(base).eff_at_opt / optimize_bar(model).eff_at_opt;
}

double randomized_first_order_residual(const ScalingModel& model, double ell) {
  const auto& mu = require_mu(model);
  const double c = model.c;
  const double omega = ell * std::pow(0.5 * model.kappa, 2.0 * c);
  const double p = 1.0 / (2.0 * c);
  auto bracket_term = [&](double u) {
    const double v = std::pow(u, p);
    return u * std_normal_cdf(-v) - p * u * v * std_normal_pdf(v);
  };
  if (const auto* point = std::get_if<Degenerate>(&mu.family())) {
    // mu(u / omega) du is a point mass at u = omega z0 with weight omega.
    return bracket_term(omega * point->z0) / omega;
  }
  auto f = [&](double u) { return u > 0.0 ? bracket_term(u) * density(mu, u / omega) : 0.0; };
  std::vector<double> bp{0.0};
  for (double k : {0.25, 0.5, 1.0, 2.0, 4.0}) bp.push_back(k);
  double upper = mu.bounded_support() ? omega * mu.support_upper() : 64.0;
  std::erase_if(bp, [upper](double b) { return b >= upper; });
  bp.push_back(upper);
  // bracket_term decays like e^{-u^(2p)/2}; 64 is far into the tail.
  return integrate_checked(f, bp) / (omega * omega);
}

double c_star(const std::function<double(double)>& c_of_h, const StepSizeDistribution& mu, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("c_star: h must be positive");
  if (const auto* point = std::get_if<Degenerate>(&mu.family())) return c_of_h(h * point->z0);
  auto f = [&](double z) {
    if (!(z > 0.0)) return 0.0;
    const double dz = density(mu, z);
    if (dz == 0.0) return 0.0;
    const double cz = c_of_h(h * z);
    if (!(cz > 0.0)) throw std::domain_error("c_star: c(h z) must be positive");
    return dz / cz;
  };
  numerics::QuadratureOptions opts{0.0, 1e-12, 40, 8000};
  numerics::QuadratureResult r;
  if (mu.bounded_support()) {
    std::vector<double> bp{0.0, 0.25 * mu.support_upper(), 0.5 * mu.support_upper(), mu.support_upper()};
    r = numerics::integrate(f, bp, opts);
  } else {
    // Split at a few multiples of the mean so a sharply peaked integrand is
    // resolved, then map the remaining tail.
    const double m = mu.mean();
    std::vector<double> bp{0.0};
    const double scale = m / std::max(h, 1.0);
    for (double k : {1.0 / 64, 1.0 / 16, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) bp.push_back(k * scale);
    const double split = bp.back();
    r = numerics::integrate(f, bp, opts);
    const auto tail = numerics::integrate_to_infinity(f, split, opts);
    r.value += tail.value;
    r.abs_error += tail.abs_error;
    r.converged = r.abs_error <= 1e-10 * std::abs(r.value);
  }
  if (!r.converged) throw QuadratureError("c_star quadrature did not converge", r.abs_error);
  return 1.0 / r.value;
}

std::function<double(double)> dominating_bound(DominatingKind kind, double param) {
  if (kind == DominatingKind::Rwm) return [param](double z) { return param * z; };
  return [param](double z) { return param * (z * z + z); };
}

double dominating_bound_integral(DominatingKind kind, double param, const StepSizeDistribution& mu) {
  if (kind == DominatingKind::Rwm) return param * mu.mean();
  return param * (mu.second_moment() + mu.mean());
}

}  // namespace rss
