#pragma once

#include "rss/experiments/config.hpp"
#include "rss/targets.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rss {

/// log h_{i+1} = log h_i + i^{-beta} (alpha_i - alpha_star).
double adapt_step(double h, long i, double alpha, double alpha_star, double beta);

/// One iteration of a chain, as written to the trace.
struct ChainRecord {
  long iteration = 0;
  std::vector<double> tracked;
  double alpha = 0.0;
  bool accepted = false;
  double h = 0.0;  // step used for this iteration
  double z = 1.0;
  double log_density = 0.0;
};

/// Thrown when the chain reaches a non-finite state. `last_records` holds up
/// to ten iterations before the failure, oldest first.
class ChainAbort : public std::runtime_error {
 public:
  ChainAbort(const std::string& what, std::vector<ChainRecord> last, Vector state)
      : std::runtime_error(what), last_records(std::move(last)), failing_state(std::move(state)) {}
  std::vector<ChainRecord> last_records;
  Vector failing_state;
};

struct ChainOptions {
  bool record_log_density = false;
  /// Keep only tracked coordinates and scalars; the full state is never stored.
  bool keep_trace = true;
};

/// Column-major record of a finished chain. Row i (0-based) is iteration
/// i + 1; coordinates[k] is the column of tracked_coordinates[k].
struct ChainRun {
  ExperimentConfig config;
  int replication = 0;
  std::uint64_t stream_seed = 0;
  std::string kernel_label;
  std::string target_name;
  nlohmann::json target_params;
  std::vector<std::vector<double>> coordinates;
  std::vector<double> alpha;
  std::vector<unsigned char> accepted;
  std::vector<double> h;
  std::vector<double> z;
  std::vector<double> log_density;  // empty unless recorded
  Vector final_state;
  double final_h = 0.0;
  double mean_acceptance = 0.0;  // mean alpha after burn-in
  double wall_seconds = 0.0;
  bool overflow_guard_triggered = false;

  long size() const { return static_cast<long>(alpha.size()); }
  ChainRecord record(long row) const;
};

/// Replication r runs on Rng(derive_seed(config.seed, r)), starting from
/// X0 ~ N(0, initial_scale^2 I).
ChainRun run_chain(const ExperimentConfig& config, int replication = 0, const ChainOptions& options = {});
ChainRun run_chain(const ExperimentConfig& config, TargetPtr target, int replication,
                   const ChainOptions& options = {});

/// All replications, run concurrently; results are ordered by replication.
std::vector<ChainRun> run_replications(const ExperimentConfig& config, int threads,
                                       const ChainOptions& options = {});

std::string code_version();

/// Header: iteration, x<k> for each tracked coordinate k (0-based), alpha,
/// accepted, h, z[, log_density]. Rows with iteration % thin == 0.
void write_trace_csv(std::ostream& os, const ChainRun& run, long thin);

/// Summary and provenance: mean acceptance, final h, wall time, config hash,
/// seeds, code version, target and kernel identity, plus `tails` as given.
nlohmann::json summary_json(const ChainRun& run, const nlohmann::json& tails = nlohmann::json::array());

/// Writes <stem>.csv and <stem>.json under `dir`; returns the JSON summary.
nlohmann::json write_run_artifact(const ChainRun& run, const std::filesystem::path& dir, const std::string& stem,
                                  const nlohmann::json& tails = nlohmann::json::array());

/// Throws std::invalid_argument unless every summary has the same target
/// name, target parameters and kernel label.
void ensure_aggregatable(const std::vector<nlohmann::json>& summaries);

}  // namespace rss
