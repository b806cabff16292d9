#pragma once

#include "rss/rng.hpp"
#include "rss/targets.hpp"

#include "json.hpp"

#include <string>

namespace rss {

enum class ProposalKind { GaussianRwm, Mala, Barker, RademacherRwm, RademacherBarker, Hmc };

/// How a step-size multiplier z enters the kernel: Step scales h itself
/// (h z), Scale scales the proposal standard deviation (sqrt(h) z, i.e.
/// h z^2).
enum class StepConvention { Step, Scale };

/// Fixed-step proposal mechanism Q_h. The parameter h is
///  - the noise variance for the random walks and Barker,
///  - the Euler step for MALA (proposal N(x + h grad, 2h I)),
///  - the squared leapfrog step for HMC (L leapfrog steps of size sqrt(h)).
struct ProposalKernel {
  ProposalKind kind = ProposalKind::Mala;
  TargetPtr target;
  int leapfrog_steps = 10;
  StepConvention convention = StepConvention::Step;
};

struct Proposal {
  Vector y;
  // HMC only: initial and final momentum.
  Vector momentum_start;
  Vector momentum_end;
};

struct TransitionOutcome {
  Vector next_state;
  Vector proposal;
  double acceptance_prob = 0.0;
  bool accepted = false;
  /// The step actually used: h z under the step convention, sqrt(h) z
  /// under the scale convention, h for unrandomized kernels.
  double effective_step = 0.0;
  /// The multiplier z drawn for this transition (1 when not randomized).
  double multiplier = 1.0;
};

bool is_density_kind(ProposalKind kind);
bool is_rademacher_kind(ProposalKind kind);
std::string to_string(ProposalKind kind);
ProposalKind proposal_kind_from_string(const std::string& name);

Proposal propose(const ProposalKernel& kernel, const Vector& x, double h, Rng& rng);

/// log Q_h(x, y) for GaussianRwm, Mala and Barker. Throws
/// std::invalid_argument for the discrete and HMC kinds.
double log_proposal_density(const ProposalKernel& kernel, const Vector& x, const Vector& y, double h);

/// log of the point mass Q_h(x, {y}) for the Rademacher kinds (d = 1).
double log_proposal_mass(const ProposalKernel& kernel, const Vector& x, const Vector& y, double h);

/// log alpha_h(x, y) = min(0, log pi(y) - log pi(x) + log q(y, x) - log q(x, y)),
/// or min(0, -Delta H) for HMC.
double log_acceptance(const ProposalKernel& kernel, const Vector& x, const Proposal& prop, double h);

/// One Metropolis-Hastings transition at step h. Throws NonFiniteError when
/// the target or its gradient is non-finite at x.
TransitionOutcome mh_step(const ProposalKernel& kernel, const Vector& x, double h, Rng& rng);

/// Leapfrog integration of (position, momentum) for `steps` steps of size eps.
void leapfrog(const Target& target, Vector& position, Vector& momentum, double eps, int steps);

/// Accepts with probability exp(log_alpha), comparing in log space.
inline bool accept_draw(double log_alpha, Rng& rng) { return std::log(rng.uniform()) <= log_alpha; }

}  // namespace rss
