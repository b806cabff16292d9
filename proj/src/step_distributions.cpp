#include "rss/step_distributions.hpp"

#include "rss/numerics.hpp"
#include "rss/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double gig_log_norm(const GeneralizedInverseGaussian& g) {
  const double omega = std::sqrt(g.a * g.b);
  return 0.5 * g.p * std::log(g.a / g.b) - std::log(2.0) - log_bessel_k(g.p, omega).log_magnitude;
}

double gig_mode(double p, double a, double b) { return ((p - 1.0) + std::hypot(p - 1.0, std::sqrt(a * b))) / a; }

double gig_log_kernel(const GeneralizedInverseGaussian& g, double z) {
  return (g.p - 1.0) * std::log(z) - 0.5 * (g.a * z + g.b / z);
}

double trunc_gauss_mass(const TruncatedGaussianPositive& t) {
  return std_normal_cdf(t.mean / std::sqrt(t.variance));
}

}  // namespace

TruncatedGaussianPositive TruncatedGaussianPositive::from_sigma(double sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw std::invalid_argument("TruncatedGaussianPositive: need 0 < sigma < 1");
  return {std::sqrt(1.0 - sigma * sigma), sigma * sigma};
}

StepSizeDistribution::StepSizeDistribution(Family family) : family_(family) {
  std::visit(Overloaded{
                 [](const Uniform01&) {},
                 [](const Exponential1&) {},
                 [](const HalfNormal& d) {
                   if (!(d.sigma > 0.0)) throw std::invalid_argument("HalfNormal: sigma must be positive");
                 },
                 [](const TruncatedGaussianPositive& d) {
                   if (!(d.variance > 0.0) || !std::isfinite(d.mean)) {
                     throw std::invalid_argument("TruncatedGaussianPositive: variance must be positive");
                   }
                 },
                 [this](const GeneralizedInverseGaussian& d) {
                   if (!(d.a > 0.0 && d.b > 0.0) || !std::isfinite(d.p)) {
                     throw std::invalid_argument("GeneralizedInverseGaussian: a and b must be positive");
                   }
                   log_norm_ = gig_log_norm(d);
                 },
                 [](const Degenerate& d) {
                   if (!(d.z0 > 0.0)) throw std::invalid_argument("Degenerate: z0 must be positive");
                 },
             },
             family_);
}

double StepSizeDistribution::support_upper() const {
  if (is<Uniform01>()) return 1.0;
  if (const auto* d = std::get_if<Degenerate>(&family_)) return d->z0;
  return kInf;
}

std::string StepSizeDistribution::name() const {
  return std::visit(Overloaded{
                        [](const Uniform01&) { return std::string("uniform"); },
                        [](const Exponential1&) { return std::string("exponential"); },
                        [](const HalfNormal&) { return std::string("half_normal"); },
                        [](const TruncatedGaussianPositive&) { return std::string("trunc_gaussian"); },
                        [](const GeneralizedInverseGaussian&) { return std::string("gig"); },
                        [](const Degenerate&) { return std::string("degenerate"); },
                    },
                    family_);
}

double StepSizeDistribution::mean() const {
  return std::visit(Overloaded{
                        [](const Uniform01&) { return 0.5; },
                        [](const Exponential1&) { return 1.0; },
                        [](const HalfNormal& d) { return d.sigma * std::sqrt(2.0 / std::numbers::pi); },
                        [](const TruncatedGaussianPositive& d) {
                          const double s = std::sqrt(d.variance);
                          return d.mean + s * std_normal_pdf(d.mean / s) / trunc_gauss_mass(d);
                        },
                        [](const GeneralizedInverseGaussian& d) {
                          const double omega = std::sqrt(d.a * d.b);
                          return std::sqrt(d.b / d.a) * std::exp(log_bessel_k(d.p + 1.0, omega).log_magnitude -
                                                                 log_bessel_k(d.p, omega).log_magnitude);
                        },
                        [](const Degenerate& d) { return d.z0; },
                    },
                    family_);
}

double StepSizeDistribution::second_moment() const {
  return std::visit(Overloaded{
                        [](const Uniform01&) { return 1.0 / 3.0; },
                        [](const Exponential1&) { return 2.0; },
                        [](const HalfNormal& d) { return d.sigma * d.sigma; },
                        [](const TruncatedGaussianPositive& d) {
                          const double s = std::sqrt(d.variance);
                          const double alpha = -d.mean / s;
                          const double lambda = std_normal_pdf(alpha) / trunc_gauss_mass(d);
                          const double m = d.mean + s * lambda;
                          const double var = d.variance * (1.0 + alpha * lambda - lambda * lambda);
                          return var + m * m;
                        },
                        [](const GeneralizedInverseGaussian& d) {
                          const double omega = std::sqrt(d.a * d.b);
                          return (d.b / d.a) * std::exp(log_bessel_k(d.p + 2.0, omega).log_magnitude -
                                                        log_bessel_k(d.p, omega).log_magnitude);
                        },
                        [](const Degenerate& d) { return d.z0 * d.z0; },
                    },
                    family_);
}

double StepSizeDistribution::upper_partial_mean(double t) const {
  t = std::max(t, 0.0);
  return std::visit(Overloaded{
                        [t](const Uniform01&) { return t < 1.0 ? 0.5 * (1.0 - t * t) : 0.0; },
                        [t](const Exponential1&) { return (t + 1.0) * std::exp(-t); },
                        [t](const HalfNormal& d) {
                          return d.sigma * std::sqrt(2.0 / std::numbers::pi) *
                                 std::exp(-0.5 * t * t / (d.sigma * d.sigma));
                        },
                        [t](const TruncatedGaussianPositive& d) {
                          const double s = std::sqrt(d.variance);
                          const double w = (t - d.mean) / s;
                          return (d.mean * std_normal_cdf(-w) + s * std_normal_pdf(w)) / trunc_gauss_mass(d);
                        },
                        [this, t](const GeneralizedInverseGaussian&) {
                          auto f = [this](double z) { return z * density(*this, z); };
                          return numerics::integrate_to_infinity(f, t).value;
                        },
                        [t](const Degenerate& d) { return t < d.z0 ? d.z0 : 0.0; },
                    },
                    family_);
}

double log_density(const StepSizeDistribution& dist, double z) {
  if (!(z > 0.0)) return -kInf;
  return std::visit(Overloaded{
                        [z](const Uniform01&) { return z <= 1.0 ? 0.0 : -kInf; },
                        [z](const Exponential1&) { return -z; },
                        [z](const HalfNormal& d) {
                          const double u = z / d.sigma;
                          return 0.5 * std::log(2.0 / std::numbers::pi) - std::log(d.sigma) - 0.5 * u * u;
                        },
                        [z](const TruncatedGaussianPositive& d) {
                          const double s = std::sqrt(d.variance);
                          const double u = (z - d.mean) / s;
                          return -0.5 * u * u - std::log(s * std::sqrt(2.0 * std::numbers::pi)) -
                                 std::log(trunc_gauss_mass(d));
                        },
                        [&dist, z](const GeneralizedInverseGaussian& d) {
                          return dist.log_normalizer() + gig_log_kernel(d, z);
                        },
                        [](const Degenerate&) -> double {
                          throw std::invalid_argument("Degenerate step distribution has no density");
                        },
                    },
                    dist.family());
}

double density(const StepSizeDistribution& dist, double z) {
  if (!(z > 0.0)) return 0.0;
  return std::exp(log_density(dist, z));
}

double cdf(const StepSizeDistribution& dist, double z) {
  if (!(z > 0.0)) return 0.0;
  return std::visit(Overloaded{
                        [z](const Uniform01&) { return std::min(z, 1.0); },
                        [z](const Exponential1&) { return -std::expm1(-z); },
                        [z](const HalfNormal& d) { return 1.0 - 2.0 * std_normal_cdf(-z / d.sigma); },
                        [z](const TruncatedGaussianPositive& d) {
                          const double s = std::sqrt(d.variance);
                          const double lo = std_normal_cdf(-d.mean / s);
                          return (std_normal_cdf((z - d.mean) / s) - lo) / trunc_gauss_mass(d);
                        },
                        [&dist, z](const GeneralizedInverseGaussian& d) {
                          const double mode = gig_mode(d.p, d.a, d.b);
                          std::vector<double> bp{0.0};
                          for (double f : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
                            if (f * mode < z) bp.push_back(f * mode);
                          }
                          bp.push_back(z);
                          auto pdf = [&dist](double t) { return density(dist, t); };
                          return std::min(1.0, numerics::integrate(pdf, std::span<const double>(bp)).value);
                        },
                        [z](const Degenerate& d) { return z >= d.z0 ? 1.0 : 0.0; },
                    },
                    dist.family());
}

double sample(const StepSizeDistribution& dist, Rng& rng) {
  return std::visit(
      Overloaded{
          [&rng](const Uniform01&) { return rng.uniform(); },
          [&rng](const Exponential1&) { return -std::log(rng.uniform()); },
          [&rng](const HalfNormal& d) {
            double z = 0.0;
            while (z == 0.0) z = std::abs(rng.normal());
            return d.sigma * z;
          },
          [&rng](const TruncatedGaussianPositive& d) {
            const double s = std::sqrt(d.variance);
            const double alpha = -d.mean / s;  // standardized lower bound
            if (alpha < 0.5) {
              for (;;) {
                const double x = rng.normal();
                if (x > alpha) return d.mean + s * x;
              }
            }
            // Robert (1995) exponential proposal for the far tail.
            const double lambda = 0.5 * (alpha + std::sqrt(alpha * alpha + 4.0));
            for (;;) {
              const double x = alpha - std::log(rng.uniform()) / lambda;
              const double r = x - lambda;
              if (rng.uniform() <= std::exp(-0.5 * r * r)) return d.mean + s * x;
            }
          },
          [&rng](const GeneralizedInverseGaussian& d) {
            // Ratio of uniforms on the unnormalized density, scaled so its
            // maximum is 1.
            const double mode = gig_mode(d.p, d.a, d.b);
            const double log_peak = gig_log_kernel(d, mode);
            const double mode2 = gig_mode(d.p + 2.0, d.a, d.b);
            const double v_max = mode2 * std::exp(0.5 * (gig_log_kernel(d, mode2) - log_peak));
            for (;;) {
              const double u = rng.uniform();
              const double z = v_max * rng.uniform() / u;
              if (2.0 * std::log(u) <= gig_log_kernel(d, z) - log_peak) return z;
            }
          },
          [](const Degenerate& d) { return d.z0; },
      },
      dist.family());
}

std::vector<double> default_certificate_h_grid() { return {1.0, 2.0, 5.0, 10.0, 100.0, 1000.0}; }

std::vector<double> default_certificate_z_grid(const StepSizeDistribution& dist) {
  std::vector<double> grid;
  const double lo = std::log(1e-4);
  const double hi = std::log(10.0);
  for (int i = 0; i < 200; ++i) {
    const double z = std::exp(lo + (hi - lo) * i / 199.0);
    if (z <= dist.support_upper()) grid.push_back(z);
  }
  return grid;
}

double assumption1_certificate(const StepSizeDistribution& dist, std::span<const double> h_grid,
                               std::span<const double> z_grid) {
  if (!dist.has_density()) throw std::invalid_argument("assumption1_certificate: point mass has no density");
  if (h_grid.empty() || z_grid.empty()) throw std::invalid_argument("assumption1_certificate: empty grid");
  double lowest = kInf;
  for (double h : h_grid) {
    if (!(h >= 1.0) || !std::isfinite(h)) throw std::invalid_argument("assumption1_certificate: need finite h >= 1");
    for (double z : z_grid) {
      const double base = log_density(dist, z);
      if (base == -kInf) continue;
      lowest = std::min(lowest, std::exp(log_density(dist, z / h) - base));
    }
  }
  if (lowest == kInf) throw std::invalid_argument("assumption1_certificate: grid misses the support");
  return lowest;
}

double assumption1_certificate(const StepSizeDistribution& dist) {
  const auto hs = default_certificate_h_grid();
  const auto zs = default_certificate_z_grid(dist);
  return assumption1_certificate(dist, hs, zs);
}

}  // namespace rss
