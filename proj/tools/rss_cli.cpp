#include "rss/experiments/experiments.hpp"
#include "rss/experiments/selftest.hpp"
#include "rss/parallel.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  int threads = rss::default_thread_count();
};

json load_config(const Globals& g) {
  if (g.config_path.empty()) return json::object();
  std::ifstream is(g.config_path);
  if (!is) throw std::runtime_error("cannot open config " + g.config_path);
  return json::parse(is);
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  body(os);
}

void apply_tail_overrides(rss::TailExperimentOptions& o, const json& j, const Globals& g) {
  o.replications = j.value("replications", o.replications);
  o.hist_iterations = j.value("hist_iterations", o.hist_iterations);
  if (j.contains("checkpoints")) o.checkpoints = j.at("checkpoints").get<std::vector<long>>();
  o.trace_thin = j.value("trace_thin", o.trace_thin);
  o.run_histograms = j.value("run_histograms", o.run_histograms);
  o.seed = g.seed.value_or(j.value("seed", o.seed));
  o.threads = g.threads;
}

int run_tail(rss::TailExperimentOptions o, const Globals& g) {
  apply_tail_overrides(o, load_config(g), g);
  const fs::path dir = fs::path(g.out) / o.name;
  const auto res = rss::tail_experiment(o, dir);
  std::cout << o.name << ": " << res.tails.size() << " tail estimates written to " << dir.string() << '\n';
  for (const auto& k : o.kernels) {
    const auto s = rss::summarize_tails(res.tails, k.label(), o.checkpoints.back());
    std::cout << "  " << k.label() << "  median estimate " << s.median_estimate << "  median |error| "
              << s.median_abs_error << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metropolis-Hastings with randomized step sizes: experiments and checks"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "JSON configuration file");
  app.add_option("--seed", g.seed, "Master seed (overrides the config)");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.fallthrough();

  auto* sweep = app.add_subcommand("esjd-sweep", "Rao-Blackwellized ESJD against the step size");
  long sweep_n = 0;
  int sweep_points = 0;
  sweep->add_option("--n", sweep_n, "Samples per grid point");
  sweep->add_option("--grid-points", sweep_points, "Number of log-spaced step sizes");

  auto* funnel = app.add_subcommand("funnel", "Funnel histograms, Q-Q data and tail box plots");
  auto* rosen = app.add_subcommand("rosenbrock", "Rosenbrock histograms, Q-Q data and tail box plots");
  auto* poisson = app.add_subcommand("poisson", "Poisson regression started in the tails");
  long poisson_n = 0;
  poisson->add_option("--n", poisson_n, "Iterations per chain");
  auto* table = app.add_subcommand("table1", "Optimal acceptance rates and efficiency ratios");
  auto* run = app.add_subcommand("run", "Single-chain run from --config");
  auto* self = app.add_subcommand("selftest", "Invariant suites");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sweep) {
      const json j = load_config(g);
      rss::EsjdSweepOptions o;
      o.n_samples = sweep_n > 0 ? sweep_n : j.value("n_samples", o.n_samples);
      const int points = sweep_points > 0 ? sweep_points : j.value("grid_points", 40);
      o.h_grid = rss::log_spaced(j.value("h_min", 1e-2), j.value("h_max", 1e4), points);
      if (j.contains("targets")) o.targets = j.at("targets").get<std::vector<std::string>>();
      o.seed = g.seed.value_or(j.value("seed", o.seed));
      o.threads = g.threads;
      const auto rows = rss::esjd_sweep(o);
      const fs::path path = fs::path(g.out) / "esjd_sweep.csv";
      write_file(path, [&](std::ostream& os) { rss::write_esjd_csv(os, rows); });
      std::cout << rows.size() << " rows written to " << path.string() << '\n';
      return 0;
    }
    if (*funnel) return run_tail(rss::funnel_options(), g);
    if (*rosen) return run_tail(rss::rosenbrock_options(), g);
    if (*poisson) {
      const json j = load_config(g);
      rss::PoissonOptions o;
      o.n_iterations = poisson_n > 0 ? poisson_n : j.value("n_iterations", o.n_iterations);
      o.replications = j.value("replications", o.replications);
      o.data_seed = j.value("data_seed", o.data_seed);
      o.seed = g.seed.value_or(j.value("seed", o.seed));
      o.threads = g.threads;
      const fs::path dir = fs::path(g.out) / "poisson";
      const auto res = rss::poisson_experiment(o, dir);
      for (const auto& [label, count] : res.sign_counts) {
        std::cout << label << ": hitting time <= mala in " << count << "/" << o.replications << " runs\n";
      }
      return 0;
    }
    if (*table) {
      const auto rows = rss::table1();
      write_file(fs::path(g.out) / "table1.csv", [&](std::ostream& os) { rss::write_table1_csv(os, rows); });
      rss::print_table1(std::cout, rows);
      return 0;
    }
    if (*run) {
      if (g.config_path.empty()) throw std::invalid_argument("run needs --config");
      auto cfg = rss::parse_config(load_config(g));
      if (g.seed) cfg.seed = *g.seed;
      const auto runs = rss::run_replications(cfg, g.threads);
      const fs::path dir = fs::path(g.out) / cfg.output_path;
      for (const auto& r : runs) {
        rss::write_run_artifact(r, dir, "run_r" + std::to_string(r.replication));
        std::cout << "replication " << r.replication << ": mean acceptance " << r.mean_acceptance << ", final h "
                  << r.final_h << '\n';
      }
      return 0;
    }
    if (*self) {
      bool ok = true;
      for (const auto& r : rss::run_selftest(g.seed.value_or(1))) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << "  " << r.detail << '\n';
        ok = ok && r.passed;
      }
      return ok ? 0 : 1;
    }
  } catch (const rss::ChainAbort& e) {
    std::cerr << "error: " << e.what() << "\nlast records:\n";
    for (const auto& r : e.last_records) {
      std::cerr << "  iteration " << r.iteration << " alpha " << r.alpha << " h " << r.h << " z " << r.z << '\n';
    }
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
