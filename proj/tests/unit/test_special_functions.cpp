#include "doctest.h"

#include "rss/special_functions.hpp"
#include "rss/types.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

using namespace rss;

namespace {

// log of 1/2 int_R exp(-x cosh t + nu t) dt, integrated relative to the
// peak value with an independent Gauss-Kronrod rule.
double oracle_log_bessel_k(double nu, double x) {
  const double peak = std::asinh(nu / x);
  const double f_peak = -x * std::cosh(peak) + nu * peak;
  auto f = [&](double t) { return -x * std::cosh(t) + nu * t - f_peak; };
  double lo = peak, hi = peak;
  while (f(lo) > -60.0) lo -= 0.25;
  while (f(hi) > -60.0) hi += 0.25;
  auto g = [&](double t) { return std::exp(f(t)); };
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, lo, hi, 12, 1e-13, &err);
  return f_peak + std::log(0.5 * v);
}

double oracle_kcheck(double nu, double a, double b) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [&](double s) {
    const double t = 1.0 + s;
    return std::exp((-nu - 1.0) * std::log(t) - a * t - b / t);
  };
  return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-14);
}

// d = 1 closed forms, alpha = sqrt(a), beta = sqrt(b).
double erfc_form_minus_half(double a, double b) {
  const double al = std::sqrt(a), be = std::sqrt(b);
  return std::sqrt(std::numbers::pi) / (2.0 * al) *
         (std::exp(-2.0 * al * be) * std::erfc(al - be) + std::exp(2.0 * al * be) * std::erfc(al + be));
}

double erfc_form_plus_half(double a, double b) {
  const double al = std::sqrt(a), be = std::sqrt(b);
  return std::sqrt(std::numbers::pi) / (2.0 * be) *
         (std::exp(-2.0 * al * be) * std::erfc(al - be) - std::exp(2.0 * al * be) * std::erfc(al + be));
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return out;
}

}  // namespace

TEST_CASE("K_nu closed form at half order") {
  CHECK(log_bessel_k(0.5, 1.0).log_magnitude == doctest::Approx(std::log(0.4610685044478946)).epsilon(1e-14));
  CHECK(log_bessel_k(0.5, 1.0).value() == doctest::Approx(std::sqrt(std::numbers::pi / 2.0) * std::exp(-1.0)));
}

TEST_CASE("K_nu is symmetric in the order") {
  CHECK(log_bessel_k(-24.0, 10.0) == log_bessel_k(24.0, 10.0));
  CHECK(log_bessel_k(-3.3, 0.7) == log_bessel_k(3.3, 0.7));
}

TEST_CASE("K_nu matches the cosh-integral oracle on the grid") {
  for (double nu : {-24.0, -5.0, -0.5, 0.0, 0.5, 5.0, 24.0, 1.3, -7.75}) {
    for (double x : log_grid(1e-3, 1e3, 25)) {
      const double got = log_bessel_k(nu, x).log_magnitude;
      const double want = oracle_log_bessel_k(std::abs(nu), x);
      INFO("nu=" << nu << " x=" << x);
      CHECK(std::abs(std::expm1(got - want)) <= 1e-10);
    }
  }
}

TEST_CASE("K_nu agrees with Boost where representable") {
  for (double nu : {0.0, 0.25, 1.0, 2.5, 10.0, 24.0}) {
    for (double x : {0.01, 0.3, 1.0, 7.0, 40.0, 300.0}) {
      const double ref = boost::math::cyl_bessel_k(nu, x);
      if (!(ref > 0.0) || !std::isfinite(ref) || ref < 1e-300) continue;
      INFO("nu=" << nu << " x=" << x);
      CHECK(log_bessel_k(nu, x).value() == doctest::Approx(ref).epsilon(1e-10));
    }
  }
}

TEST_CASE("K_nu recurrence") {
  for (double nu : {0.3, 1.0, 4.5, 11.2}) {
    for (double x : {0.2, 1.0, 5.0, 30.0}) {
      const double lhs = log_bessel_k(nu + 1, x).value();
      const double rhs = log_bessel_k(nu - 1, x).value() + 2.0 * nu / x * log_bessel_k(nu, x).value();
      CHECK(std::abs(lhs / rhs - 1.0) <= 1e-8);
    }
  }
}

TEST_CASE("K_nu rejects bad input") {
  CHECK_THROWS_AS(log_bessel_k(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(log_bessel_k(1.0, -1.0), std::domain_error);
  CHECK_THROWS_AS(log_bessel_k(NAN, 1.0), std::domain_error);
  CHECK_THROWS_AS(log_bessel_k(250.0, 1.0), std::domain_error);
  CHECK(std::isfinite(log_bessel_k(200.0, 1e-3).log_magnitude));
  CHECK(std::isfinite(log_bessel_k(0.0, 1e4).log_magnitude));
}

TEST_CASE("Kcheck direct integration example") {
  CHECK(log_upper_incomplete_k(-1.0, 2.0, 0.0).log_magnitude == doctest::Approx(std::log(std::exp(-2.0) / 2.0)).epsilon(1e-12));
}

TEST_CASE("Kcheck matches an exp-sinh oracle") {
  struct P { double nu, a, b; };
  for (P p : {P{0.5, 0.5, 0.25}, P{-0.5, 1.0, 1.0}, P{2.0, 0.0, 0.3}, P{-24.0, 5.0, 3.0}, P{0.0, 1e-3, 2.0},
              P{-1.5, 10.0, 1e-4}, P{7.0, 0.2, 40.0}}) {
    INFO("nu=" << p.nu << " a=" << p.a << " b=" << p.b);
    const double got = log_upper_incomplete_k(p.nu, p.a, p.b).value();
    CHECK(got == doctest::Approx(oracle_kcheck(p.nu, p.a, p.b)).epsilon(1e-8));
  }
}

TEST_CASE("Kcheck matches the d = 1 erfc closed forms") {
  for (double a : {0.01, 0.5, 1.0, 3.0, 20.0}) {
    for (double b : {0.01, 0.25, 1.0, 4.0, 30.0}) {
      INFO("a=" << a << " b=" << b);
      CHECK(log_upper_incomplete_k(-0.5, a, b).value() == doctest::Approx(erfc_form_minus_half(a, b)).epsilon(1e-8));
      CHECK(log_upper_incomplete_k(0.5, a, b).value() == doctest::Approx(erfc_form_plus_half(a, b)).epsilon(1e-8));
    }
  }
}

TEST_CASE("Kcheck is decreasing in a and in b") {
  for (double nu : {-24.0, -0.5, 0.5, 3.0}) {
    const auto grid = log_grid(1e-2, 1e2, 15);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      CHECK(log_upper_incomplete_k(nu, grid[i + 1], 1.0).log_magnitude <
            log_upper_incomplete_k(nu, grid[i], 1.0).log_magnitude);
      CHECK(log_upper_incomplete_k(nu, 1.0, grid[i + 1]).log_magnitude <
            log_upper_incomplete_k(nu, 1.0, grid[i]).log_magnitude);
    }
  }
}

TEST_CASE("Kcheck limit b -> 0") {
  for (double nu : {-24.0, -0.5, 0.5, 3.0}) {
    const double at_zero = log_upper_incomplete_k(nu, 1.3, 0.0).log_magnitude;
    CHECK(log_upper_incomplete_k(nu, 1.3, 1e-12).log_magnitude == doctest::Approx(at_zero).epsilon(1e-10));
  }
}

TEST_CASE("Kcheck errors") {
  CHECK_THROWS_AS(log_upper_incomplete_k(0.0, 0.0, 1.0), DivergenceError);
  CHECK_THROWS_AS(log_upper_incomplete_k(-2.0, 0.0, 0.0), DivergenceError);
  CHECK_THROWS_AS(log_upper_incomplete_k(1.0, -1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(log_upper_incomplete_k(1.0, 1.0, -1.0), std::domain_error);
  CHECK(log_upper_incomplete_k(2.0, 0.0, 0.0).log_magnitude == doctest::Approx(-std::log(2.0)));
}

TEST_CASE("normal cdf, pdf and quantile") {
  CHECK(std_normal_cdf(0.0) == 0.5);
  CHECK(std_normal_pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-15));
  CHECK(std_normal_quantile(0.05) == doctest::Approx(-1.6448536269514722).epsilon(1e-12));
  for (double u = -8.0; u <= 8.0; u += 0.25) {
    CHECK(std::abs(std_normal_cdf(u) - 0.5 * std::erfc(-u / std::sqrt(2.0))) <= 1e-12);
    // In the upper tail cdf(u) sits within a few ulps of 1, so the round trip
    // can only be as good as eps / pdf(u).
    const double conditioning = u > 0.0 ? 4.0 * std::numeric_limits<double>::epsilon() / std_normal_pdf(u) : 0.0;
    CHECK(std::abs(std_normal_quantile(std_normal_cdf(u)) - u) <= 1e-9 + conditioning);
    CHECK(std::abs(std_normal_quantile(std_normal_cdf(-std::abs(u))) + std::abs(u)) <= 1e-9);
    CHECK(rss::erfc(u) == doctest::Approx(std::erfc(u)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(std_normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(std_normal_quantile(1.0), std::domain_error);
}

TEST_CASE("Kcheck with a b far beyond the erfc forms' range") {
  // With the peak sqrt(b/a) >> 1 the [0, 1] part is negligible and the
  // integrals reduce to the full-line closed forms sqrt(pi/a) e^{-2 sqrt(ab)}
  // (weight t^-1/2) and sqrt(pi/b) e^{-2 sqrt(ab)} (weight t^-3/2).
  for (auto [a, b] : {std::pair{6.5348469111343324, 1.3430710463364001e18}, std::pair{2153.5659922875434, 536106697.29417551},
                      std::pair{1e-3, 1e12}}) {
    const double s = 2.0 * std::sqrt(a * b);
    CHECK(log_upper_incomplete_k(-0.5, a, b).log_magnitude ==
          doctest::Approx(0.5 * std::log(std::numbers::pi / a) - s).epsilon(1e-13));
    CHECK(log_upper_incomplete_k(0.5, a, b).log_magnitude ==
          doctest::Approx(0.5 * std::log(std::numbers::pi / b) - s).epsilon(1e-13));
  }
}
