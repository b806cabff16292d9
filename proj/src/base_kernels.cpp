#include "rss/base_kernels.hpp"

#include "rss/kernel_detail.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace rss {

namespace detail {

double log_logistic_cdf(double t) { return t >= 0.0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t)); }

double checked_log_density(const Target& target, const Vector& x) {
  const double v = target.log_density(x);
  if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
    throw NonFiniteError("log-density is not finite at the current state", x);
  }
  return v;
}

Vector checked_gradient(const Target& target, const Vector& x) {
  Vector g = target.grad_log_density(x);
  if (!g.allFinite()) {
    std::ostringstream os;
    os << "gradient is not finite at state [" << x.transpose() << "]";
    throw NonFiniteError(os.str(), x);
  }
  return g;
}

double mala_log_density(const Vector& x, const Vector& grad_x, const Vector& y, double h) {
  const double d = static_cast<double>(x.size());
  return -(y - x - h * grad_x).squaredNorm() / (4.0 * h) - 0.5 * d * std::log(4.0 * std::numbers::pi * h);
}

double barker_log_density(const Vector& x, const Vector& grad_x, const Vector& y, double h) {
  const Vector w = y - x;
  const double d = static_cast<double>(x.size());
  double out = d * (std::log(2.0) - 0.5 * std::log(2.0 * std::numbers::pi * h)) - w.squaredNorm() / (2.0 * h);
  for (Index j = 0; j < w.size(); ++j) out += log_logistic_cdf(grad_x[j] * w[j]);
  return out;
}

}  // namespace detail

namespace {

void require_positive_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("step size h must be positive and finite");
}

double kinetic(const Vector& p) { return 0.5 * p.squaredNorm(); }

// Proposal with the gradient at x already evaluated (empty when unused).
Proposal propose_with(const ProposalKernel& k, const Vector& x, const Vector& grad_x, double h, Rng& rng) {
  const Index d = x.size();
  const double sd = std::sqrt(h);
  Proposal out;
  switch (k.kind) {
    case ProposalKind::GaussianRwm:
      out.y = x + sd * rng.normal_vector(d);
      break;
    case ProposalKind::Mala:
      out.y = x + h * grad_x + std::sqrt(2.0 * h) * rng.normal_vector(d);
      break;
    case ProposalKind::Barker: {
      out.y = x;
      for (Index j = 0; j < d; ++j) {
        const double w = sd * rng.normal();
        const bool keep = std::log(rng.uniform()) <= detail::log_logistic_cdf(grad_x[j] * w);
        out.y[j] += keep ? w : -w;
      }
      break;
    }
    case ProposalKind::RademacherRwm:
      out.y = x;
      for (Index j = 0; j < d; ++j) out.y[j] += sd * rng.rademacher();
      break;
    case ProposalKind::RademacherBarker: {
      out.y = x;
      for (Index j = 0; j < d; ++j) {
        const double w = sd * rng.rademacher();
        const bool keep = std::log(rng.uniform()) <= detail::log_logistic_cdf(grad_x[j] * w);
        out.y[j] += keep ? w : -w;
      }
      break;
    }
    case ProposalKind::Hmc: {
      out.momentum_start = rng.normal_vector(d);
      out.y = x;
      out.momentum_end = out.momentum_start;
      leapfrog(*k.target, out.y, out.momentum_end, sd, k.leapfrog_steps);
      break;
    }
  }
  return out;
}

bool needs_gradient(ProposalKind kind) {
  return kind == ProposalKind::Mala || kind == ProposalKind::Barker || kind == ProposalKind::RademacherBarker;
}

double log_q(const ProposalKernel& k, const Vector& from, const Vector& grad_from, const Vector& to, double h) {
  switch (k.kind) {
    case ProposalKind::GaussianRwm: {
      const double d = static_cast<double>(from.size());
      return -(to - from).squaredNorm() / (2.0 * h) - 0.5 * d * std::log(2.0 * std::numbers::pi * h);
    }
    case ProposalKind::Mala:
      return detail::mala_log_density(from, grad_from, to, h);
    case ProposalKind::Barker:
      return detail::barker_log_density(from, grad_from, to, h);
    case ProposalKind::RademacherRwm:
      return -static_cast<double>(from.size()) * std::log(2.0);
    case ProposalKind::RademacherBarker: {
      double out = 0.0;
      for (Index j = 0; j < from.size(); ++j) out += detail::log_logistic_cdf(grad_from[j] * (to[j] - from[j]));
      return out;
    }
    case ProposalKind::Hmc:
      break;
  }
  throw std::invalid_argument("log_q: HMC has no tractable proposal density");
}

double log_alpha_with(const ProposalKernel& k, const Vector& x, double lp_x, const Vector& grad_x,
                      const Proposal& prop, double h) {
  const Target& target = *k.target;
  const double lp_y = target.log_density(prop.y);
  if (std::isnan(lp_y) || lp_y == -std::numeric_limits<double>::infinity()) {
    return -std::numeric_limits<double>::infinity();
  }
  double log_ratio;
  if (k.kind == ProposalKind::Hmc) {
    const double h0 = -lp_x + kinetic(prop.momentum_start);
    const double h1 = -lp_y + kinetic(prop.momentum_end);
    log_ratio = h0 - h1;
  } else if (k.kind == ProposalKind::GaussianRwm || k.kind == ProposalKind::RademacherRwm) {
    log_ratio = lp_y - lp_x;
  } else {
    const Vector grad_y = target.grad_log_density(prop.y);
    if (!grad_y.allFinite()) return -std::numeric_limits<double>::infinity();
    log_ratio = lp_y - lp_x + log_q(k, prop.y, grad_y, x, h) - log_q(k, x, grad_x, prop.y, h);
  }
  if (std::isnan(log_ratio)) return -std::numeric_limits<double>::infinity();
  return std::min(0.0, log_ratio);
}

}  // namespace

bool is_density_kind(ProposalKind kind) {
  return kind == ProposalKind::GaussianRwm || kind == ProposalKind::Mala || kind == ProposalKind::Barker;
}

bool is_rademacher_kind(ProposalKind kind) {
  return kind == ProposalKind::RademacherRwm || kind == ProposalKind::RademacherBarker;
}

std::string to_string(ProposalKind kind) {
  switch (kind) {
    case ProposalKind::GaussianRwm: return "rwm";
    case ProposalKind::Mala: return "mala";
    case ProposalKind::Barker: return "barker";
    case ProposalKind::RademacherRwm: return "rademacher_rwm";
    case ProposalKind::RademacherBarker: return "rademacher_barker";
    case ProposalKind::Hmc: return "hmc";
  }
  return "unknown";
}

ProposalKind proposal_kind_from_string(const std::string& name) {
  for (auto k : {ProposalKind::GaussianRwm, ProposalKind::Mala, ProposalKind::Barker, ProposalKind::RademacherRwm,
                 ProposalKind::RademacherBarker, ProposalKind::Hmc}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown kernel: " + name);
}

void leapfrog(const Target& target, Vector& position, Vector& momentum, double eps, int steps) {
  Vector grad = target.grad_log_density(position);
  momentum += 0.5 * eps * grad;
  for (int i = 0; i < steps; ++i) {
    position += eps * momentum;
    grad = target.grad_log_density(position);
    if (i + 1 < steps) momentum += eps * grad;
  }
  momentum += 0.5 * eps * grad;
}

Proposal propose(const ProposalKernel& kernel, const Vector& x, double h, Rng& rng) {
  require_positive_step(h);
  const Vector grad = needs_gradient(kernel.kind) ? detail::checked_gradient(*kernel.target, x) : Vector();
  return propose_with(kernel, x, grad, h, rng);
}

double log_proposal_density(const ProposalKernel& kernel, const Vector& x, const Vector& y, double h) {
  require_positive_step(h);
  if (!is_density_kind(kernel.kind)) {
    throw std::invalid_argument("log_proposal_density: " + to_string(kernel.kind) + " has no proposal density");
  }
  const Vector grad = needs_gradient(kernel.kind) ? detail::checked_gradient(*kernel.target, x) : Vector();
  return log_q(kernel, x, grad, y, h);
}

double log_proposal_mass(const ProposalKernel& kernel, const Vector& x, const Vector& y, double h) {
  require_positive_step(h);
  if (!is_rademacher_kind(kernel.kind)) {
    throw std::invalid_argument("log_proposal_mass: " + to_string(kernel.kind) + " is not a discrete proposal");
  }
  const Vector grad = needs_gradient(kernel.kind) ? detail::checked_gradient(*kernel.target, x) : Vector();
  return log_q(kernel, x, grad, y, h);
}

double log_acceptance(const ProposalKernel& kernel, const Vector& x, const Proposal& prop, double h) {
  require_positive_step(h);
  const double lp_x = detail::checked_log_density(*kernel.target, x);
  const Vector grad = needs_gradient(kernel.kind) ? detail::checked_gradient(*kernel.target, x) : Vector();
  return log_alpha_with(kernel, x, lp_x, grad, prop, h);
}

TransitionOutcome mh_step(const ProposalKernel& kernel, const Vector& x, double h, Rng& rng) {
  require_positive_step(h);
  const double lp_x = detail::checked_log_density(*kernel.target, x);
  const Vector grad = needs_gradient(kernel.kind) ? detail::checked_gradient(*kernel.target, x) : Vector();
  Proposal prop = propose_with(kernel, x, grad, h, rng);
  const double log_alpha = log_alpha_with(kernel, x, lp_x, grad, prop, h);
  TransitionOutcome out;
  out.accepted = accept_draw(log_alpha, rng);
  out.acceptance_prob = std::exp(log_alpha);
  out.next_state = out.accepted ? prop.y : x;
  out.proposal = std::move(prop.y);
  out.effective_step = h;
  return out;
}

}  // namespace rss
