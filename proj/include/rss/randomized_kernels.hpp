#pragma once

#include "rss/base_kernels.hpp"
#include "rss/special_functions.hpp"
#include "rss/step_distributions.hpp"

#include <string>
#include <variant>

namespace rss {

/// h z under the step convention, h z^2 under the scale convention: the
/// value handed to the base kernel.
double randomized_h(StepConvention convention, double h, double z);
/// h z (step) or sqrt(h) z (scale): what TransitionOutcome::effective_step
/// records.
double randomized_effective_step(StepConvention convention, double h, double z);

/// Auxiliary-variable kernel: each transition draws a fresh z ~ mu and
/// performs one base transition at the randomized step.
struct AuxiliaryKernel {
  ProposalKernel base;
  StepSizeDistribution mu{StepSizeDistribution::Family{Exponential1{}}};
  double h = 1.0;
};

TransitionOutcome aux_step(const AuxiliaryKernel& kernel, const Vector& x, Rng& rng);

/// Density of the increment w = y - x of the auxiliary proposal for the
/// Rademacher kinds in d = 1 under the scale convention. Obtained by
/// summing the four (xi, b) branches of the discrete proposal against the
/// law of |w| = sqrt(h) z.
double auxiliary_increment_density(const AuxiliaryKernel& kernel, double x, double w);

enum class MarginalMu { Uniform01, Exponential1 };

/// MALA with the step multiplier integrated out of the acceptance ratio.
/// Proposals are still generated as z ~ mu, y ~ N(x + h z grad, 2 h z I).
struct MarginalizedMalaKernel {
  MarginalMu mu_kind = MarginalMu::Exponential1;
  TargetPtr target;
  double h = 1.0;
};

/// Throws std::invalid_argument unless mu is Uniform01 or Exponential1 and
/// the convention is Step.
MarginalizedMalaKernel make_marginalized_mala(TargetPtr target, const StepSizeDistribution& mu, double h,
                                              StepConvention convention = StepConvention::Step);

StepSizeDistribution step_distribution(MarginalMu kind);
std::string to_string(MarginalMu kind);

/// log Qbar_h(x, y) up to an additive constant that depends on neither x
/// nor y. With g = grad log pi(x), a = |y-x|^2/(4h), c = <y-x, g>/2:
///   Uniform:     c + log Kcheck_{1-d/2}(a, h|g|^2/4)
///   Exponential: c + (1/2 - d/4)(log a - log B) + log K_{1-d/2}(2 sqrt(aB)),
///                B = 1 + h|g|^2/4.
/// Throws std::invalid_argument when y == x.
LogValue log_marginal_mala_density(const MarginalizedMalaKernel& kernel, const Vector& x, const Vector& y);

/// log of the marginalized acceptance probability; 0 when y == x.
double log_marginal_acceptance(const MarginalizedMalaKernel& kernel, const Vector& x, const Vector& y);

TransitionOutcome marginalized_step(const MarginalizedMalaKernel& kernel, const Vector& x, Rng& rng);

/// Unrandomized kernel at a fixed step.
struct FixedStepKernel {
  ProposalKernel base;
  double h = 1.0;
};

using Kernel = std::variant<FixedStepKernel, AuxiliaryKernel, MarginalizedMalaKernel>;

TransitionOutcome transition(const Kernel& kernel, const Vector& x, Rng& rng);
double step_size(const Kernel& kernel);
Kernel with_step_size(const Kernel& kernel, double h);
const Target& kernel_target(const Kernel& kernel);
/// "mala", "aux-mala-exponential", "marg-mala-uniform", ...
std::string label(const Kernel& kernel);

}  // namespace rss
