#pragma once

#include "rss/targets.hpp"
#include "rss/types.hpp"

namespace rss::detail {

/// log F(t) for the logistic cdf F(t) = 1 / (1 + e^-t).
double log_logistic_cdf(double t);

/// log pi(x); throws NonFiniteError for NaN or +inf.
double checked_log_density(const Target& target, const Vector& x);
/// grad log pi(x); throws NonFiniteError when any component is non-finite.
Vector checked_gradient(const Target& target, const Vector& x);

/// log N(y; x + h g, 2 h I).
double mala_log_density(const Vector& x, const Vector& grad_x, const Vector& y, double h);
/// Coordinatewise Barker density 2 F(g_j w_j) N(w_j; 0, h), w = y - x.
double barker_log_density(const Vector& x, const Vector& grad_x, const Vector& y, double h);

}  // namespace rss::detail
