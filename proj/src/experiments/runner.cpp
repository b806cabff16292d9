#include "rss/experiments/runner.hpp"

#include "rss/csv.hpp"
#include "rss/parallel.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#ifndef RSS_VERSION
#define RSS_VERSION "0.0.0"
#endif

namespace rss {

double adapt_step(double h, long i, double alpha, double alpha_star, double beta) {
  if (i < 1) throw std::invalid_argument("adapt_step: iteration index starts at 1");
  return std::exp(std::log(h) + std::pow(static_cast<double>(i), -beta) * (alpha - alpha_star));
}

std::string code_version() { return RSS_VERSION; }

ChainRecord ChainRun::record(long row) const {
  ChainRecord r;
  r.iteration = row + 1;
  for (const auto& col : coordinates) r.tracked.push_back(col[row]);
  r.alpha = alpha[row];
  r.accepted = accepted[row] != 0;
  r.h = h[row];
  r.z = z[row];
  if (!log_density.empty()) r.log_density = log_density[row];
  return r;
}

namespace {

std::vector<ChainRecord> tail_records(const ChainRun& run, long rows) {
  std::vector<ChainRecord> out;
  for (long r = std::max(0L, rows - 10); r < rows; ++r) out.push_back(run.record(r));
  return out;
}

}  // namespace

ChainRun run_chain(const ExperimentConfig& config, int replication, const ChainOptions& options) {
  return run_chain(config, make_target(config.target), replication, options);
}

ChainRun run_chain(const ExperimentConfig& config, TargetPtr target, int replication,
                   const ChainOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const Index d = target->dimension();
  for (Index k : config.tracked_coordinates) {
    if (k >= d) throw std::invalid_argument("tracked coordinate out of range for the target dimension");
  }

  ChainRun run;
  run.config = config;
  run.replication = replication;
  run.stream_seed = derive_seed(config.seed, static_cast<std::uint64_t>(replication));
  run.target_name = target->name();
  run.target_params = target->params();

  Kernel kernel = build_kernel(config, target);
  run.kernel_label = label(kernel);
  Rng rng(run.stream_seed);
  Vector x = config.initial_scale * rng.normal_vector(d);

  const long n = config.n_iterations;
  const long rows = options.keep_trace ? n : std::min(n, 10L);
  run.coordinates.assign(config.tracked_coordinates.size(), {});
  for (auto& col : run.coordinates) col.reserve(rows);
  run.alpha.reserve(rows);
  run.accepted.reserve(rows);
  run.h.reserve(rows);
  run.z.reserve(rows);
  if (options.record_log_density) run.log_density.reserve(rows);

  const double alpha_star = target_acceptance(config);
  double h = config.h0;
  double alpha_sum = 0.0;
  long stored = 0;
  auto push = [&](double alpha, bool acc, double hi, double zi, const Vector& state) {
    if (!options.keep_trace && stored == 10) {
      for (auto& col : run.coordinates) col.erase(col.begin());
      run.alpha.erase(run.alpha.begin());
      run.accepted.erase(run.accepted.begin());
      run.h.erase(run.h.begin());
      run.z.erase(run.z.begin());
      if (options.record_log_density) run.log_density.erase(run.log_density.begin());
      --stored;
    }
    for (std::size_t k = 0; k < config.tracked_coordinates.size(); ++k) {
      run.coordinates[k].push_back(state[config.tracked_coordinates[k]]);
    }
    run.alpha.push_back(alpha);
    run.accepted.push_back(acc ? 1 : 0);
    run.h.push_back(hi);
    run.z.push_back(zi);
    if (options.record_log_density) run.log_density.push_back(target->log_density(state));
    ++stored;
  };

  for (long i = 1; i <= n; ++i) {
    TransitionOutcome out;
    try {
      out = transition(kernel, x, rng);
    } catch (const NonFiniteError& e) {
      throw ChainAbort(std::string("chain aborted at iteration ") + std::to_string(i) + ": " + e.what(),
                       tail_records(run, stored), e.state);
    }
    if (!out.next_state.allFinite()) {
      throw ChainAbort("chain aborted at iteration " + std::to_string(i) + ": non-finite state",
                       tail_records(run, stored), out.next_state);
    }
    x = std::move(out.next_state);
    push(out.acceptance_prob, out.accepted, h, out.multiplier, x);
    if (i > config.burn_in) alpha_sum += out.acceptance_prob;

    const bool adapting = config.adaptation.enabled && !(config.adaptation.freeze_after_burn_in && i > config.burn_in);
    if (adapting) {
      h = adapt_step(h, i, out.acceptance_prob, alpha_star, config.adaptation.beta);
      kernel = with_step_size(kernel, h);
    }
  }

  run.final_state = x;
  run.final_h = h;
  run.mean_acceptance = alpha_sum / static_cast<double>(n - config.burn_in);
  if (const auto* p = dynamic_cast<const PoissonPosterior*>(target.get())) {
    run.overflow_guard_triggered = p->overflow_guard_triggered();
  }
  run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

std::vector<ChainRun> run_replications(const ExperimentConfig& config, int threads, const ChainOptions& options) {
  std::vector<ChainRun> runs(config.replications);
  parallel_for(config.replications, threads, [&](std::size_t r) {
    runs[r] = run_chain(config, static_cast<int>(r), options);
  });
  return runs;
}

void write_trace_csv(std::ostream& os, const ChainRun& run, long thin) {
  if (thin < 1) throw std::invalid_argument("thin must be positive");
  csv::Writer w(os);
  w.field("iteration");
  for (Index k : run.config.tracked_coordinates) w.field("x" + std::to_string(k));
  w.field("alpha").field("accepted").field("h").field("z");
  const bool with_lp = !run.log_density.empty();
  if (with_lp) w.field("log_density");
  w.end_row();
  // Rows hold iterations n - size() + 1 .. n (all of them unless the trace
  // was truncated).
  const long offset = run.config.n_iterations - run.size();
  for (long r = 0; r < run.size(); ++r) {
    const long it = offset + r + 1;
    if (it % thin != 0) continue;
    w.field(it);
    for (const auto& col : run.coordinates) w.field(col[r]);
    w.field(run.alpha[r]).field(run.accepted[r] != 0).field(run.h[r]).field(run.z[r]);
    if (with_lp) w.field(run.log_density[r]);
    w.end_row();
  }
}

nlohmann::json summary_json(const ChainRun& run, const nlohmann::json& tails) {
  nlohmann::json j;
  j["mean_acceptance"] = run.mean_acceptance;
  j["final_h"] = run.final_h;
  j["wall_seconds"] = run.wall_seconds;
  j["tail_estimates"] = tails;
  j["replication"] = run.replication;
  j["kernel"] = run.kernel_label;
  j["target"] = {{"name", run.target_name}, {"params", run.target_params}};
  j["overflow_guard_triggered"] = run.overflow_guard_triggered;
  j["provenance"] = {{"config_hash", config_hash(run.config)},
                     {"seed", run.config.seed},
                     {"stream_seed", run.stream_seed},
                     {"code_version", code_version()}};
  j["config"] = to_json(run.config);
  return j;
}

nlohmann::json write_run_artifact(const ChainRun& run, const std::filesystem::path& dir, const std::string& stem,
                                  const nlohmann::json& tails) {
  std::filesystem::create_directories(dir);
  const auto trace = dir / (stem + ".csv");
  {
    std::ofstream os(trace);
    if (!os) throw std::runtime_error("cannot open " + trace.string());
    write_trace_csv(os, run, run.config.thin);
  }
  nlohmann::json s = summary_json(run, tails);
  s["trace_file"] = trace.filename().string();
  std::ofstream js(dir / (stem + ".json"));
  if (!js) throw std::runtime_error("cannot open " + (dir / (stem + ".json")).string());
  js << s.dump(2) << '\n';
  return s;
}

void ensure_aggregatable(const std::vector<nlohmann::json>& summaries) {
  if (summaries.empty()) return;
  const auto& first = summaries.front();
  for (const auto& s : summaries) {
    if (s.at("target") != first.at("target")) {
      throw std::invalid_argument("cannot aggregate runs on different targets: " + s.at("target").dump() + " vs " +
                                  first.at("target").dump());
    }
    if (s.at("kernel") != first.at("kernel")) {
      throw std::invalid_argument("cannot aggregate runs of different kernels: " + s.at("kernel").dump() + " vs " +
                                  first.at("kernel").dump());
    }
  }
}

}  // namespace rss
