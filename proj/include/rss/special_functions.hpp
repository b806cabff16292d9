#pragma once

#include <cmath>

namespace rss {

/// Natural log of a strictly positive quantity. Never encodes zero or a
/// negative number.
struct LogValue {
  double log_magnitude = 0.0;

  double value() const { return std::exp(log_magnitude); }
  friend LogValue operator*(LogValue a, LogValue b) { return {a.log_magnitude + b.log_magnitude}; }
  friend LogValue operator/(LogValue a, LogValue b) { return {a.log_magnitude - b.log_magnitude}; }
  friend bool operator==(LogValue, LogValue) = default;
};

/// log K_nu(x), the modified Bessel function of the second kind.
///
/// Half-integer orders use the terminating series; other orders integrate
/// the representation K_nu(x) = 1/2 int_R exp(-x cosh t + nu t) dt with a
/// peak-centred trapezoid rule, refined by halving until two successive sums
/// agree to 1e-14. Accumulation is done relative to the integrand maximum,
/// so the result neither overflows nor underflows for |nu| <= 200.
///
/// Throws std::domain_error for x <= 0, |nu| > 200 or non-finite input.
LogValue log_bessel_k(double nu, double x);

/// log of the upper incomplete Bessel function
///   Kcheck_nu(a, b) = int_1^inf t^(-nu-1) exp(-a t - b / t) dt.
///
/// The integral is evaluated in u = log t, where the log-integrand
/// -nu u - a e^u - b e^-u is concave; the peak and curvature locate the
/// quadrature window and adaptive Gauss-Kronrod does the rest.
///
/// Throws DivergenceError when a == 0 and nu <= 0, std::domain_error for
/// negative or non-finite a, b.
LogValue log_upper_incomplete_k(double nu, double a, double b);

double std_normal_pdf(double u);
double std_normal_cdf(double u);
/// Inverse of std_normal_cdf; throws std::domain_error unless 0 < p < 1.
double std_normal_quantile(double p);
/// erfc(u) = 2 Phi(-u sqrt 2).
double erfc(double u);

}  // namespace rss
