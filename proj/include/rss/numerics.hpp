#pragma once

// Small numerical toolkit: adaptive Gauss-Kronrod quadrature, bracketed root
// finding and golden-section maximization. Header-only; everything is
// templated on the callable.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

namespace rss::numerics {

struct QuadratureOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-12;
  int max_depth = 30;  // bisection levels below each initial sub-interval
  int max_intervals = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int intervals = 0;
  bool converged = false;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo, hi, value, error;
  int depth;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <typename F>
Segment kronrod15(F& f, double lo, double hi, int depth) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  std::array<double, 15> fv{};
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  double abs_sum = std::abs(kronrod);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv[2 * j] = f1;
    fv[2 * j + 1] = f2;
    kronrod += kKronrodWeights[j] * (f1 + f2);
    abs_sum += kKronrodWeights[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
  }
  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    asc += kKronrodWeights[j] * (std::abs(fv[2 * j] - mean) + std::abs(fv[2 * j + 1] - mean));
  }
  const double value = kronrod * half;
  double err = std::abs((kronrod - gauss) * half);
  asc *= std::abs(half);
  abs_sum *= std::abs(half);
  // QUADPACK's error heuristic.
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * abs_sum, err);
  }
  return {lo, hi, value, err, depth};
}

}  // namespace detail

/// Globally adaptive G7-K15 quadrature over [bp[0], bp.back()], starting from
/// the sub-intervals given by the breakpoints.
template <typename F>
QuadratureResult integrate(F&& f, std::span<const double> breakpoints,
                           const QuadratureOptions& opts = {}) {
  if (breakpoints.size() < 2) throw std::invalid_argument("integrate: need at least two breakpoints");
  std::priority_queue<detail::Segment> active;
  std::vector<detail::Segment> frozen;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i + 1] > breakpoints[i])) continue;
    auto seg = detail::kronrod15(f, breakpoints[i], breakpoints[i + 1], 0);
    total += seg.value;
    total_err += seg.error;
    active.push(seg);
  }
  int count = static_cast<int>(active.size());
  auto tolerance = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };
  while (!active.empty() && total_err > tolerance() && count < opts.max_intervals) {
    auto worst = active.top();
    active.pop();
    if (worst.depth >= opts.max_depth) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.lo + worst.hi);
    auto left = detail::kronrod15(f, worst.lo, mid, worst.depth + 1);
    auto right = detail::kronrod15(f, mid, worst.hi, worst.depth + 1);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    active.push(left);
    active.push(right);
    ++count;
  }
  // Re-sum to shed accumulated cancellation error in the running totals.
  double value = 0.0;
  double err = 0.0;
  for (const auto& s : frozen) {
    value += s.value;
    err += s.error;
  }
  while (!active.empty()) {
    value += active.top().value;
    err += active.top().error;
    active.pop();
  }
  QuadratureResult out;
  out.value = value;
  out.abs_error = err;
  out.intervals = count;
  out.converged = err <= std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
  return out;
}

template <typename F>
QuadratureResult integrate(F&& f, double lo, double hi, const QuadratureOptions& opts = {}) {
  const std::array<double, 2> bp{lo, hi};
  return integrate(std::forward<F>(f), std::span<const double>(bp), opts);
}

/// Integral over [lo, inf) through t = lo + s / (1 - s).
template <typename F>
QuadratureResult integrate_to_infinity(F&& f, double lo, const QuadratureOptions& opts = {}) {
  auto mapped = [&](double s) {
    const double one_minus = 1.0 - s;
    const double t = lo + s / one_minus;
    const double v = f(t);
    return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
  };
  const std::array<double, 5> bp{0.0, 0.25, 0.5, 0.75, 1.0};
  return integrate(mapped, std::span<const double>(bp), opts);
}

/// Bisection for a sign change of f on [lo, hi]; stops when the bracket is
/// narrower than tol.
template <typename F>
double bisect(F&& f, double lo, double hi, double tol = 1e-12, int max_iter = 400) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw std::domain_error("bisect: root not bracketed");
  for (int it = 0; it < max_iter && (hi - lo) > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct Bracket {
  double lo, mid, hi;
};

/// Finds lo < mid < hi with f(mid) >= f(lo), f(hi) for a function on (0, inf)
/// by doubling/halving from x0.
template <typename F>
Bracket bracket_maximum(F&& f, double x0, int max_iter = 200) {
  if (!(x0 > 0.0)) throw std::domain_error("bracket_maximum: start must be positive");
  double mid = x0;
  double fmid = f(mid);
  double hi = 2.0 * mid;
  double fhi = f(hi);
  int it = 0;
  while (fhi > fmid && it++ < max_iter) {
    mid = hi;
    fmid = fhi;
    hi *= 2.0;
    fhi = f(hi);
  }
  double lo = 0.5 * mid;
  double flo = f(lo);
  while (flo > fmid && it++ < max_iter) {
    hi = mid;
    mid = lo;
    fmid = flo;
    lo *= 0.5;
    flo = f(lo);
  }
  if (it >= max_iter) throw std::runtime_error("bracket_maximum: no bracket found");
  return {lo, mid, hi};
}

/// Golden-section search for the maximum inside a bracket.
template <typename F>
double golden_section_maximize(F&& f, Bracket br, double tol = 1e-10, int max_iter = 500) {
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = br.lo;
  double b = br.hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

inline double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

inline double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace rss::numerics
