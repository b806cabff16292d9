#include "rss/experiments/config.hpp"

#include <cstdio>
#include <stdexcept>

namespace rss {

using nlohmann::json;

std::string to_string(Wrapper w) {
  switch (w) {
    case Wrapper::None: return "none";
    case Wrapper::Auxiliary: return "auxiliary";
    case Wrapper::Marginalized: return "marginalized";
  }
  return "none";
}

Wrapper wrapper_from_string(const std::string& name) {
  if (name == "none") return Wrapper::None;
  if (name == "auxiliary") return Wrapper::Auxiliary;
  if (name == "marginalized") return Wrapper::Marginalized;
  throw std::invalid_argument("unknown wrapper: " + name);
}

std::string to_string(StepConvention c) { return c == StepConvention::Step ? "step" : "scale"; }

StepConvention convention_from_string(const std::string& name) {
  if (name == "step") return StepConvention::Step;
  if (name == "scale") return StepConvention::Scale;
  throw std::invalid_argument("unknown convention: " + name);
}

StepSizeDistribution parse_step_distribution(const json& spec) {
  const auto name = spec.at("name").get<std::string>();
  const json params = spec.value("params", json::object());
  using F = StepSizeDistribution::Family;
  if (name == "uniform") return F{Uniform01{}};
  if (name == "exponential") return F{Exponential1{}};
  if (name == "half_normal") return F{HalfNormal{params.value("sigma", 1.0)}};
  if (name == "trunc_gaussian") {
    if (params.contains("sigma")) return F{TruncatedGaussianPositive::from_sigma(params.at("sigma").get<double>())};
    return F{TruncatedGaussianPositive{params.value("mean", 0.0), params.value("variance", 1.0)}};
  }
  if (name == "gig") return F{GeneralizedInverseGaussian{params.value("p", 1.0), params.value("a", 1.0), params.value("b", 1.0)}};
  if (name == "degenerate") return F{Degenerate{params.value("z0", 1.0)}};
  throw std::invalid_argument("unknown step-size distribution: " + name);
}

json to_json(const StepSizeDistribution& mu) {
  json params = json::object();
  if (const auto* d = std::get_if<HalfNormal>(&mu.family())) params = {{"sigma", d->sigma}};
  if (const auto* d = std::get_if<TruncatedGaussianPositive>(&mu.family())) {
    params = {{"mean", d->mean}, {"variance", d->variance}};
  }
  if (const auto* d = std::get_if<GeneralizedInverseGaussian>(&mu.family())) {
    params = {{"p", d->p}, {"a", d->a}, {"b", d->b}};
  }
  if (const auto* d = std::get_if<Degenerate>(&mu.family())) params = {{"z0", d->z0}};
  return {{"name", mu.name()}, {"params", params}};
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  ExperimentConfig c;
  c.seed = j.value("seed", c.seed);
  if (j.contains("target")) c.target = j.at("target");
  if (!c.target.contains("params")) c.target["params"] = json::object();
  if (j.contains("kernel")) {
    const auto& k = j.at("kernel");
    c.kernel = proposal_kind_from_string(k.at("name").get<std::string>());
    c.leapfrog_steps = k.value("params", json::object()).value("L", c.leapfrog_steps);
  }
  c.wrapper = wrapper_from_string(j.value("wrapper", std::string("none")));
  if (j.contains("mu") && !j.at("mu").is_null()) c.mu = parse_step_distribution(j.at("mu"));
  c.convention = convention_from_string(j.value("convention", std::string("step")));
  c.h0 = j.value("h0", c.h0);
  c.n_iterations = j.value("n_iterations", c.n_iterations);
  c.burn_in = j.value("burn_in", c.burn_in);
  if (j.contains("adaptation")) {
    const auto& a = j.at("adaptation");
    c.adaptation.enabled = a.value("enabled", c.adaptation.enabled);
    c.adaptation.beta = a.value("beta", c.adaptation.beta);
    if (a.contains("alpha_star") && !a.at("alpha_star").is_null()) c.adaptation.alpha_star = a.at("alpha_star").get<double>();
    c.adaptation.freeze_after_burn_in = a.value("freeze_after_burn_in", c.adaptation.freeze_after_burn_in);
  }
  c.replications = j.value("replications", c.replications);
  if (j.contains("tracked_coordinates")) c.tracked_coordinates = j.at("tracked_coordinates").get<std::vector<Index>>();
  c.thin = j.value("thin", c.thin);
  c.initial_scale = j.value("initial_scale", c.initial_scale);
  c.output_path = j.value("output_path", c.output_path);

  if (!(c.h0 > 0.0)) throw std::invalid_argument("h0 must be positive");
  if (c.n_iterations < 1) throw std::invalid_argument("n_iterations must be positive");
  if (c.burn_in < 0 || c.burn_in >= c.n_iterations) throw std::invalid_argument("need 0 <= burn_in < n_iterations");
  if (!(c.adaptation.beta > 0.5 && c.adaptation.beta <= 1.0)) throw std::invalid_argument("beta must lie in (0.5, 1]");
  if (c.adaptation.alpha_star && !(*c.adaptation.alpha_star > 0.0 && *c.adaptation.alpha_star < 1.0)) {
    throw std::invalid_argument("alpha_star must lie in (0, 1)");
  }
  if (c.replications < 1) throw std::invalid_argument("replications must be positive");
  if (c.thin < 1) throw std::invalid_argument("thin must be positive");
  if (c.leapfrog_steps < 1) throw std::invalid_argument("L must be positive");
  if (!(c.initial_scale > 0.0)) throw std::invalid_argument("initial_scale must be positive");
  if (c.wrapper != Wrapper::None && !c.mu) throw std::invalid_argument("a randomized wrapper needs mu");
  if (c.wrapper == Wrapper::Marginalized && c.kernel != ProposalKind::Mala) {
    throw std::invalid_argument("the marginalized wrapper is implemented for MALA only");
  }
  for (Index i : c.tracked_coordinates) {
    if (i < 0) throw std::invalid_argument("tracked coordinates are 0-based and nonnegative");
  }
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["target"] = c.target;
  j["kernel"] = {{"name", to_string(c.kernel)}, {"params", {{"L", c.leapfrog_steps}}}};
  j["wrapper"] = to_string(c.wrapper);
  j["mu"] = c.mu ? to_json(*c.mu) : json(nullptr);
  j["convention"] = to_string(c.convention);
  j["h0"] = c.h0;
  j["n_iterations"] = c.n_iterations;
  j["burn_in"] = c.burn_in;
  j["adaptation"] = {{"enabled", c.adaptation.enabled},
                     {"beta", c.adaptation.beta},
                     {"alpha_star", c.adaptation.alpha_star ? json(*c.adaptation.alpha_star) : json(nullptr)},
                     {"freeze_after_burn_in", c.adaptation.freeze_after_burn_in}};
  j["replications"] = c.replications;
  j["tracked_coordinates"] = c.tracked_coordinates;
  j["thin"] = c.thin;
  j["initial_scale"] = c.initial_scale;
  j["output_path"] = c.output_path;
  return j;
}

bool equivalent(const ExperimentConfig& a, const ExperimentConfig& b) { return to_json(a) == to_json(b); }

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double default_alpha_star(const ExperimentConfig& c) {
  const bool randomized = c.wrapper != Wrapper::None && c.mu;
  const bool uniform = randomized && c.mu->is<Uniform01>();
  const bool exponential = randomized && c.mu->is<Exponential1>();
  switch (c.kernel) {
    case ProposalKind::GaussianRwm:
    case ProposalKind::RademacherRwm:
      return 0.234;
    case ProposalKind::Mala:
      if (uniform) return 0.680;
      if (exponential) return 0.687;
      return 0.574;
    case ProposalKind::Barker:
    case ProposalKind::RademacherBarker:
      return 0.574;
    case ProposalKind::Hmc:
      if (uniform) return 0.750;
      if (exponential) return 0.737;
      return 0.651;
  }
  return 0.574;
}

double target_acceptance(const ExperimentConfig& c) {
  return c.adaptation.alpha_star ? *c.adaptation.alpha_star : default_alpha_star(c);
}

Kernel build_kernel(const ExperimentConfig& c, TargetPtr target) {
  ProposalKernel base;
  base.kind = c.kernel;
  base.target = target;
  base.leapfrog_steps = c.leapfrog_steps;
  base.convention = c.convention;
  switch (c.wrapper) {
    case Wrapper::None: return FixedStepKernel{base, c.h0};
    case Wrapper::Auxiliary: return AuxiliaryKernel{base, *c.mu, c.h0};
    case Wrapper::Marginalized: return make_marginalized_mala(std::move(target), *c.mu, c.h0, c.convention);
  }
  throw std::logic_error("unreachable");
}

}  // namespace rss
