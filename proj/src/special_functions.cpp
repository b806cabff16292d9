#include "rss/special_functions.hpp"

#include "rss/numerics.hpp"
#include "rss/types.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace rss {

namespace {

constexpr double kMaxOrder = 200.0;

bool is_half_integer(double nu) {
  const double twice = 2.0 * nu;
  return twice == std::floor(twice) && std::fmod(twice, 2.0) == 1.0;
}

// K_{n+1/2}(x) = sqrt(pi/(2x)) e^-x sum_k (n+k)! / (k! (n-k)!) (2x)^-k.
// All terms are positive so the log-sum is exact up to rounding.
double log_bessel_k_half_integer(double nu, double x) {
  const int n = static_cast<int>(nu - 0.5);
  const double log_2x = std::log(2.0 * x);
  std::vector<double> terms(static_cast<std::size_t>(n) + 1);
  double log_term = 0.0;
  terms[0] = 0.0;
  for (int k = 0; k < n; ++k) {
    log_term += std::log(static_cast<double>(n + k + 1) * static_cast<double>(n - k) /
                         static_cast<double>(k + 1)) -
                log_2x;
    terms[static_cast<std::size_t>(k) + 1] = log_term;
  }
  return 0.5 * std::log(std::numbers::pi / (2.0 * x)) - x + numerics::log_sum_exp(terms);
}

double log_bessel_k_trapezoid(double nu, double x) {
  // f(t) = -x cosh t + nu t is concave with its maximum at asinh(nu/x).
  const double peak = std::asinh(nu / x);
  const double radius = std::hypot(x, nu);
  const double f_peak = -radius + nu * peak;
  auto f = [&](double t) { return -x * std::cosh(t) + nu * t - f_peak; };
  constexpr double kCutoff = -46.0;  // e^-46 ~ 1e-20 relative to the peak

  const double width = 1.0 / std::sqrt(radius);
  double step = 0.5 * std::min(1.0, width);
  auto trapezoid = [&](double h) {
    double sum = 1.0;  // f(peak) == 0
    for (int side : {-1, 1}) {
      for (long k = 1;; ++k) {
        const double v = f(peak + side * h * static_cast<double>(k));
        sum += std::exp(v);
        if (v < kCutoff) break;
      }
    }
    return sum * h;
  };
  double current = trapezoid(step);
  for (int level = 0; level < 12; ++level) {
    step *= 0.5;
    const double refined = trapezoid(step);
    const bool done = std::abs(refined - current) <= 1e-14 * refined;
    current = refined;
    if (done) break;
  }
  return f_peak + std::log(0.5 * current);
}

}  // namespace

LogValue log_bessel_k(double nu, double x) {
  if (!std::isfinite(nu) || !std::isfinite(x)) throw std::domain_error("log_bessel_k: non-finite input");
  if (x <= 0.0) throw std::domain_error("log_bessel_k: argument must be positive");
  nu = std::abs(nu);
  if (nu > kMaxOrder) throw std::domain_error("log_bessel_k: |nu| exceeds 200");
  if (is_half_integer(nu)) return {log_bessel_k_half_integer(nu, x)};
  return {log_bessel_k_trapezoid(nu, x)};
}

LogValue log_upper_incomplete_k(double nu, double a, double b) {
  if (!std::isfinite(nu) || !std::isfinite(a) || !std::isfinite(b)) {
    throw std::domain_error("log_upper_incomplete_k: non-finite input");
  }
  if (a < 0.0 || b < 0.0) throw std::domain_error("log_upper_incomplete_k: a and b must be nonnegative");
  if (a == 0.0 && nu <= 0.0) {
    throw DivergenceError("log_upper_incomplete_k: integral diverges for a == 0 and nu <= 0");
  }
  if (a == 0.0 && b == 0.0) return {-std::log(nu)};

  // phi(u) = -nu u - a e^u - b e^-u on u = log t in [0, inf).
  auto phi = [&](double u) { return -nu * u - a * std::exp(u) - b * std::exp(-u); };
  auto dphi = [&](double u) { return -nu - a * std::exp(u) + b * std::exp(-u); };

  // Stationary point: a w^2 + nu w - b = 0 with w = e^u.
  double w = 0.0;
  if (a > 0.0) {
    const double disc = std::sqrt(nu * nu + 4.0 * a * b);
    w = nu >= 0.0 ? 2.0 * b / (nu + disc) : (disc - nu) / (2.0 * a);
  } else {
    w = b / nu;
  }
  const double peak = (w > 1.0) ? std::log(w) : 0.0;
  const double phi_peak = phi(peak);
  // phi(peak + s) - phi(peak), free of the cancellation between two large
  // values when a b is large.
  const double big_a = a * std::exp(peak);
  const double big_b = b * std::exp(-peak);
  auto rel = [&](double s) { return -nu * s - big_a * std::expm1(s) - big_b * std::expm1(-s); };
  const double curvature = big_a + big_b;
  double scale = 1.0 / std::sqrt(curvature);
  const double slope = std::abs(dphi(peak));
  if (slope > 0.0) scale = std::min(scale, 1.0 / slope);

  // Breakpoints in s = u - peak; the domain is s >= -peak.
  constexpr double kDrop = 50.0;
  std::vector<double> breakpoints;
  if (peak > 0.0) {
    std::vector<double> left;
    for (double off = scale;; off *= 2.0) {
      if (off >= peak) {
        left.push_back(-peak);
        break;
      }
      left.push_back(-off);
      if (rel(-off) < -kDrop) break;
    }
    breakpoints.assign(left.rbegin(), left.rend());
  }
  breakpoints.push_back(0.0);
  for (double off = scale;; off *= 2.0) {
    breakpoints.push_back(off);
    if (rel(off) < -kDrop) break;
  }

  auto integrand = [&](double s) { return std::exp(rel(s)); };
  numerics::QuadratureOptions opts;
  opts.abs_tol = 0.0;
  opts.rel_tol = 1e-13;
  opts.max_depth = 10;
  const auto res = numerics::integrate(integrand, std::span<const double>(breakpoints), opts);
  if (!(res.value > 0.0) || res.abs_error > 1e-10 * res.value) {
    std::ostringstream os;
    os.precision(17);
    os << "log_upper_incomplete_k: quadrature did not converge for nu = " << nu << ", a = " << a << ", b = " << b;
    throw QuadratureError(os.str(), res.abs_error);
  }
  return {phi_peak + std::log(res.value)};
}

double std_normal_pdf(double u) {
  return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_cdf(double u) { return 0.5 * std::erfc(-u / std::numbers::sqrt2); }

double erfc(double u) { return 2.0 * std_normal_cdf(-u * std::numbers::sqrt2); }

// Wichura's AS241 (PPND16), followed by one Newton step on the cdf.
double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("std_normal_quantile: p must lie in (0, 1)");
  const double q = p - 0.5;
  double x;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    x = q *
        (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r + 67265.770927008700853) * r +
             45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
          133.14166789178437745) * r + 3.387132872796366608) /
        (((((((r * 5226.495278852545925 + 28729.085735721942674) * r + 39307.89580009271061) * r +
             21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
          42.313330701600911252) * r + 1.0);
  } else {
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    if (r <= 5.0) {
      r -= 1.6;
      x = (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
               1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
               0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
    } else {
      r -= 5.0;
      x = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
               0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
               7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
    }
    if (q < 0.0) x = -x;
  }
  const double pdf = std_normal_pdf(x);
  if (pdf > 0.0) {
    const double err = q < 0.0 ? std_normal_cdf(x) - p : (1.0 - p) - std_normal_cdf(-x);
    x -= err / pdf;
  }
  return x;
}

}  // namespace rss
