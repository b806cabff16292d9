#pragma once

#include "rss/randomized_kernels.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rss {

enum class Wrapper { None, Auxiliary, Marginalized };

std::string to_string(Wrapper w);
Wrapper wrapper_from_string(const std::string& name);
std::string to_string(StepConvention c);
StepConvention convention_from_string(const std::string& name);

/// {"name": "exponential", "params": {...}} <-> StepSizeDistribution.
StepSizeDistribution parse_step_distribution(const nlohmann::json& spec);
nlohmann::json to_json(const StepSizeDistribution& mu);

struct AdaptationConfig {
  bool enabled = true;
  double beta = 0.6;
  /// Target acceptance; when absent the kernel's optimal rate is used.
  std::optional<double> alpha_star;
  /// Stop adapting once burn-in ends. Off by default: adaptation runs for
  /// the whole chain.
  bool freeze_after_burn_in = false;

  bool operator==(const AdaptationConfig&) const = default;
};

/// One single-chain experiment, possibly replicated.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  nlohmann::json target = {{"name", "std_normal"}, {"params", {{"d", 1}}}};
  ProposalKind kernel = ProposalKind::Mala;
  int leapfrog_steps = 10;
  Wrapper wrapper = Wrapper::None;
  std::optional<StepSizeDistribution> mu;
  StepConvention convention = StepConvention::Step;
  double h0 = 1.0;
  long n_iterations = 10000;
  long burn_in = 1000;
  AdaptationConfig adaptation;
  int replications = 1;
  /// 0-based coordinates written to the trace.
  std::vector<Index> tracked_coordinates{0};
  long thin = 1;
  /// X0 ~ N(0, initial_scale^2 I).
  double initial_scale = 1.0;
  std::string output_path = "out";
};

/// Throws std::invalid_argument on missing or inconsistent fields.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);
/// Field-by-field semantic equality (mu compared through its JSON form).
bool equivalent(const ExperimentConfig& a, const ExperimentConfig& b);

/// 16 hex digits of FNV-1a over the canonical JSON dump.
std::string config_hash(const ExperimentConfig& config);

/// Optimal acceptance rate of the configured kernel: 0.234 (RWM), 0.574
/// (MALA, Barker), 0.651 (HMC); for MALA/HMC randomized by a uniform or
/// exponential law, the randomized optimum (0.680 / 0.687, 0.750 / 0.737).
double default_alpha_star(const ExperimentConfig& config);
double target_acceptance(const ExperimentConfig& config);

Kernel build_kernel(const ExperimentConfig& config, TargetPtr target);

}  // namespace rss
