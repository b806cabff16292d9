#pragma once

#include "rss/step_distributions.hpp"

#include <functional>
#include <optional>

namespace rss {

/// Limiting acceptance a(l) = 2 Phi(-kappa l^(1/(2c)) / 2) and efficiency
/// eff(l) = l a(l) of a kernel whose step scales as h = l d^-c, optionally
/// randomized by mu.
struct ScalingModel {
  double c = 1.0;
  double kappa = 1.0;
  std::optional<StepSizeDistribution> mu;
};

struct Optimum {
  double ell_opt = 0.0;
  double acceptance_at_opt = 0.0;
  double eff_at_opt = 0.0;
};

double accept_rate(const ScalingModel& model, double ell);
double eff(const ScalingModel& model, double ell);

/// Maximizer of eff: u solving Phi(-u) - u phi(u) / (2c) = 0 by bisection,
/// l_opt = (2u / kappa)^(2c).
Optimum optimize_base(const ScalingModel& model);

/// Mixtures over mu: abar(l) = int a(l z) mu(dz), effbar(l) = int eff(l z) mu(dz).
/// Unbounded laws are truncated at the first T (doubling) where the tail
/// bound l E[Z; Z > T] falls below 1e-14 of the integral. Throws
/// QuadratureError when the quadrature misses its tolerance.
double accept_rate_bar(const ScalingModel& model, double ell);
double eff_bar(const ScalingModel& model, double ell);

/// int f(z) mu(z) dz over [lo, hi] for a caller-supplied density; used to
/// push a collapsing mixture through the same machinery.
double mixture_expectation(const std::function<double(double)>& f, const std::function<double(double)>& density,
                           double lo, double hi);

/// Maximizer of effbar: bracket by doubling from the base optimum, then
/// golden-section to 1e-10 in l.
Optimum optimize_bar(const ScalingModel& model);

/// max eff / max effbar.
double efficiency_ratio(const ScalingModel& model);

/// First-order condition for the randomized optimum written in
/// omega = l (kappa/2)^(2c):
///   omega^-2 int_0^inf [u Phi(-u^(1/(2c))) - u^(1/(2c)+1) phi(u^(1/(2c))) / (2c)] mu(u / omega) du.
/// Vanishes at omega(lbar_opt).
double randomized_first_order_residual(const ScalingModel& model, double ell);

/// c*(h, mu) = 1 / int mu(z) / c(h z) dz.
double c_star(const std::function<double(double)>& c_of_h, const StepSizeDistribution& mu, double h);

enum class DominatingKind { Rwm, Mala };

/// u(z) = l z (RWM) or C (z^2 + z) (MALA).
std::function<double(double)> dominating_bound(DominatingKind kind, double param);
/// int u dmu from the moments of mu.
double dominating_bound_integral(DominatingKind kind, double param, const StepSizeDistribution& mu);

}  // namespace rss
