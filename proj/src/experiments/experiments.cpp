#include "rss/experiments/experiments.hpp"

#include "rss/csv.hpp"
#include "rss/parallel.hpp"
#include "rss/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <stdexcept>

namespace rss {

namespace {

using Family = StepSizeDistribution::Family;

KernelChoice choice(Wrapper w, std::optional<StepSizeDistribution> mu) { return {w, std::move(mu)}; }

double median(std::vector<double> v) { return empirical_quantile(std::move(v), 0.5); }

void open_and_write(const std::filesystem::path& path, const auto& writer) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  writer(os);
}

}  // namespace

std::string KernelChoice::label() const {
  switch (wrapper) {
    case Wrapper::None: return "mala";
    case Wrapper::Auxiliary: return "aux-mala-" + mu->name();
    case Wrapper::Marginalized: return "marg-mala-" + mu->name();
  }
  return "mala";
}

std::vector<KernelChoice> sweep_kernels() {
  return {choice(Wrapper::None, std::nullopt),
          choice(Wrapper::Auxiliary, Family{Uniform01{}}),
          choice(Wrapper::Auxiliary, Family{Exponential1{}}),
          choice(Wrapper::Marginalized, Family{Uniform01{}}),
          choice(Wrapper::Marginalized, Family{Exponential1{}})};
}

std::vector<KernelChoice> chain_kernels() {
  return {choice(Wrapper::None, std::nullopt),
          choice(Wrapper::Auxiliary, Family{Uniform01{}}),
          choice(Wrapper::Auxiliary, Family{Exponential1{}})};
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (n < 2 || !(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("log_spaced: need 0 < lo < hi and n >= 2");
  std::vector<double> out(n);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < n; ++i) out[i] = std::pow(10.0, a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

// ---------------------------------------------------------------------------

std::vector<EsjdRow> esjd_sweep(const EsjdSweepOptions& o) {
  struct Task {
    std::string target;
    const KernelChoice* kernel;
    double h;
  };
  std::vector<Task> tasks;
  for (const auto& t : o.targets) {
    for (const auto& k : o.kernels) {
      for (double h : o.h_grid) tasks.push_back({t, &k, h});
    }
  }
  std::vector<EsjdRow> rows(tasks.size());
  parallel_for(tasks.size(), o.threads, [&](std::size_t i) {
    const Task& task = tasks[i];
    TargetPtr target = make_target({{"name", task.target}, {"params", {{"d", 1}}}});
    if (target->dimension() != 1) throw std::invalid_argument("esjd_sweep: 1-d targets only");
    ExperimentConfig cfg;
    cfg.target = {{"name", task.target}, {"params", target->params()}};
    cfg.kernel = ProposalKind::Mala;
    cfg.wrapper = task.kernel->wrapper;
    cfg.mu = task.kernel->mu;
    cfg.h0 = task.h;
    Rng rng(derive_seed(o.seed, i));
    const auto est = esjd_rb(build_kernel(cfg, target), o.n_samples, rng);
    rows[i] = {task.target, task.kernel->label(), to_string(task.kernel->wrapper),
               task.kernel->mu ? task.kernel->mu->name() : "none", task.h, est.value, est.std_error, est.n_samples};
  });
  return rows;
}

void write_esjd_csv(std::ostream& os, const std::vector<EsjdRow>& rows) {
  csv::Writer w(os);
  w.field("target").field("kernel").field("wrapper").field("mu").field("h").field("esjd").field("se").field("n");
  w.end_row();
  for (const auto& r : rows) {
    w.field(r.target).field(r.kernel).field(r.wrapper).field(r.mu).field(r.h).field(r.esjd).field(r.se).field(r.n);
    w.end_row();
  }
}

// ---------------------------------------------------------------------------

TailExperimentOptions funnel_options() {
  TailExperimentOptions o;
  o.name = "funnel";
  o.hist_target = {{"name", "funnel"}, {"params", {{"d", 10}, {"sigma2", 9.0}}}};
  o.tail_target = {{"name", "funnel"}, {"params", {{"d", 10}, {"sigma2", 4.0}}}};
  o.hist_iterations = 1000000;
  o.checkpoints = {10000, 100000, 500000, 1000000};
  o.threshold = 2.0 * std_normal_quantile(0.05);
  o.direction = TailDirection::Below;
  o.truth = 0.05;
  return o;
}

TailExperimentOptions rosenbrock_options() {
  TailExperimentOptions o;
  o.name = "rosenbrock";
  const double a = 0.5;
  o.hist_target = {{"name", "rosenbrock"}, {"params", {{"a", a}, {"b", 50.0}}}};
  o.tail_target = o.hist_target;
  o.hist_iterations = 2000000;
  o.checkpoints = {10000, 100000, 500000, 1000000, 2000000};
  o.threshold = std_normal_quantile(0.95) * std::sqrt(1.0 / (2.0 * a));
  o.direction = TailDirection::AboveAbs;
  o.truth = 0.10;
  return o;
}

ExperimentConfig tail_run_config(const TailExperimentOptions& o, const KernelChoice& k, const nlohmann::json& target,
                                 long n, std::uint64_t seed) {
  ExperimentConfig c;
  c.seed = seed;
  c.target = target;
  c.kernel = ProposalKind::Mala;
  c.wrapper = k.wrapper;
  c.mu = k.mu;
  c.h0 = 1.0;
  c.n_iterations = n;
  c.burn_in = n / 10;
  c.adaptation = AdaptationConfig{};
  c.replications = o.replications;
  c.tracked_coordinates = {0};
  c.thin = o.trace_thin;
  c.initial_scale = 1.0;
  c.output_path = o.name;
  return c;
}

TailExperimentResult tail_experiment(const TailExperimentOptions& o,
                                     const std::optional<std::filesystem::path>& out_dir) {
  if (o.checkpoints.empty()) throw std::invalid_argument("tail_experiment: no checkpoints");
  if (!std::is_sorted(o.checkpoints.begin(), o.checkpoints.end()) || o.checkpoints.front() < 10) {
    throw std::invalid_argument("tail_experiment: checkpoints must be increasing and at least 10");
  }
  const long n_tail = o.checkpoints.back();
  const std::size_t nk = o.kernels.size();
  const std::size_t n_reps = static_cast<std::size_t>(o.replications);
  const std::size_t n_tail_tasks = nk * n_reps;
  const std::size_t n_tasks = n_tail_tasks + (o.run_histograms ? nk : 0);

  struct TaskOut {
    std::vector<TailRow> tails;
    std::vector<HistogramRow> hist;
    std::vector<QqRow> qq;
    nlohmann::json summary;
  };
  std::vector<TaskOut> outs(n_tasks);

  parallel_for(n_tasks, o.threads, [&](std::size_t t) {
    TaskOut& out = outs[t];
    if (t < n_tail_tasks) {
      const std::size_t j = t / n_reps;
      const int r = static_cast<int>(t % n_reps);
      const auto& k = o.kernels[j];
      const auto cfg = tail_run_config(o, k, o.tail_target, n_tail, derive_seed(o.seed, j));
      const ChainRun run = run_chain(cfg, r);
      nlohmann::json tails = nlohmann::json::array();
      for (long cp : o.checkpoints) {
        const auto est = tail_probability(std::span<const double>(run.coordinates[0].data(), cp), o.threshold,
                                          o.direction, cp / 10);
        out.tails.push_back({k.label(), r, cp, est.probability, o.truth});
        tails.push_back({{"checkpoint", cp}, {"probability", est.probability}, {"threshold", o.threshold},
                         {"n_states", est.n_iterations}});
      }
      out.summary = summary_json(run, tails);
      return;
    }
    const std::size_t j = t - n_tail_tasks;
    const auto& k = o.kernels[j];
    const auto cfg = tail_run_config(o, k, o.hist_target, o.hist_iterations, derive_seed(o.seed, 1000 + j));
    const TargetPtr target = make_target(cfg.target);
    const ChainRun run = run_chain(cfg, target, 0);
    const std::vector<double> kept(run.coordinates[0].begin() + cfg.burn_in, run.coordinates[0].end());
    const auto law = target->first_marginal();
    if (!law) throw std::logic_error("tail_experiment: target has no analytic first marginal");
    const double lo = law->quantile(0.001);
    const double hi = law->quantile(0.999);
    const double width = (hi - lo) / o.histogram_bins;
    std::vector<long> counts(o.histogram_bins, 0);
    for (double v : kept) {
      const double b = std::floor((v - lo) / width);
      if (b >= 0.0 && b < o.histogram_bins) ++counts[static_cast<std::size_t>(b)];
    }
    for (int b = 0; b < o.histogram_bins; ++b) {
      const double a = lo + b * width;
      out.hist.push_back({k.label(), a, a + width, counts[b] / (static_cast<double>(kept.size()) * width),
                          law->pdf(a + 0.5 * width)});
    }
    const auto qq = qq_data(kept, [&](double p) { return law->quantile(p); }, o.qq_points);
    for (int i = 0; i < o.qq_points; ++i) {
      out.qq.push_back({k.label(), (i + 0.5) / o.qq_points, qq[i].first, qq[i].second});
    }
    if (out_dir) {
      out.summary = write_run_artifact(run, *out_dir / "runs", o.name + "_hist_" + k.label());
    } else {
      out.summary = summary_json(run);
    }
  });

  TailExperimentResult res;
  for (auto& out : outs) {
    res.tails.insert(res.tails.end(), out.tails.begin(), out.tails.end());
    res.histogram.insert(res.histogram.end(), out.hist.begin(), out.hist.end());
    res.qq.insert(res.qq.end(), out.qq.begin(), out.qq.end());
    res.summaries.push_back(std::move(out.summary));
  }
  for (std::size_t j = 0; j < nk; ++j) {
    ensure_aggregatable({res.summaries.begin() + j * n_reps, res.summaries.begin() + (j + 1) * n_reps});
  }

  if (out_dir) {
    open_and_write(*out_dir / (o.name + "_tails.csv"), [&](std::ostream& os) { write_tail_csv(os, res.tails); });
    if (o.run_histograms) {
      open_and_write(*out_dir / (o.name + "_histogram.csv"),
                     [&](std::ostream& os) { write_histogram_csv(os, res.histogram); });
      open_and_write(*out_dir / (o.name + "_qq.csv"), [&](std::ostream& os) { write_qq_csv(os, res.qq); });
    }
    for (std::size_t t = 0; t < n_tail_tasks; ++t) {
      const auto& s = res.summaries[t];
      open_and_write(*out_dir / "runs" /
                         (o.name + "_tail_" + s.at("kernel").get<std::string>() + "_r" +
                          std::to_string(s.at("replication").get<int>()) + ".json"),
                     [&](std::ostream& os) { os << s.dump(2) << '\n'; });
    }
  }
  return res;
}

void write_tail_csv(std::ostream& os, const std::vector<TailRow>& rows) {
  csv::Writer w(os);
  w.field("kernel").field("replication").field("checkpoint").field("estimate").field("truth");
  w.end_row();
  for (const auto& r : rows) {
    w.field(r.kernel).field(r.replication).field(r.checkpoint).field(r.estimate).field(r.truth);
    w.end_row();
  }
}

void write_histogram_csv(std::ostream& os, const std::vector<HistogramRow>& rows) {
  csv::Writer w(os);
  w.field("kernel").field("bin_lo").field("bin_hi").field("density").field("reference");
  w.end_row();
  for (const auto& r : rows) {
    w.field(r.kernel).field(r.bin_lo).field(r.bin_hi).field(r.density).field(r.reference);
    w.end_row();
  }
}

void write_qq_csv(std::ostream& os, const std::vector<QqRow>& rows) {
  csv::Writer w(os);
  w.field("kernel").field("p").field("theoretical").field("empirical");
  w.end_row();
  for (const auto& r : rows) {
    w.field(r.kernel).field(r.p).field(r.theoretical).field(r.empirical);
    w.end_row();
  }
}

TailSummary summarize_tails(const std::vector<TailRow>& rows, const std::string& kernel, long checkpoint) {
  std::vector<double> err;
  std::vector<double> est;
  for (const auto& r : rows) {
    if (r.kernel != kernel || r.checkpoint != checkpoint) continue;
    err.push_back(std::abs(r.estimate - r.truth));
    est.push_back(r.estimate);
  }
  if (err.empty()) throw std::invalid_argument("summarize_tails: no rows for " + kernel);
  return {median(err), median(est)};
}

// ---------------------------------------------------------------------------

std::optional<long> bulk_hitting_time(const std::vector<double>& lp, double level) {
  for (std::size_t i = 0; i < lp.size(); ++i) {
    if (lp[i] >= level) return static_cast<long>(i) + 1;
  }
  return std::nullopt;
}

PoissonResult poisson_experiment(const PoissonOptions& o, const std::optional<std::filesystem::path>& out_dir) {
  const nlohmann::json target = {{"name", "poisson_reg"},
                                 {"params", {{"d", o.d}, {"seed", o.data_seed}}}};
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    const auto data = simulate_poisson_data(o.d, o.data_seed);
    write_poisson_data(data, *out_dir / "poisson_data.csv", *out_dir / "poisson_data.json");
  }
  const std::size_t nk = o.kernels.size();
  const std::size_t n_reps = static_cast<std::size_t>(o.replications);
  std::vector<HittingRow> rows(nk * n_reps);
  std::vector<ChainRun> runs(nk * n_reps);
  ChainOptions opts;
  opts.record_log_density = true;
  parallel_for(nk * n_reps, o.threads, [&](std::size_t t) {
    const std::size_t j = t / n_reps;
    const auto& k = o.kernels[j];
    ExperimentConfig c;
    c.seed = derive_seed(o.seed, j);
    c.target = target;
    c.kernel = ProposalKind::Mala;
    c.wrapper = k.wrapper;
    c.mu = k.mu;
    c.h0 = 1.0;
    c.n_iterations = o.n_iterations;
    c.burn_in = o.n_iterations / 10;
    c.replications = o.replications;
    c.tracked_coordinates = {0, 1};
    c.initial_scale = o.initial_scale;
    c.output_path = "poisson";
    runs[t] = run_chain(c, static_cast<int>(t % n_reps), opts);
  });

  const double band = 2.0 * static_cast<double>(o.d);
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& run : runs) top = std::max(top, *std::max_element(run.log_density.begin(), run.log_density.end()));
  const double level = top - band;
  std::vector<nlohmann::json> summaries(runs.size());
  for (std::size_t t = 0; t < runs.size(); ++t) {
    const auto& run = runs[t];
    const auto hit = bulk_hitting_time(run.log_density, level);
    rows[t] = {run.kernel_label, run.replication, hit.value_or(o.n_iterations + 1), hit.has_value(),
               *std::max_element(run.log_density.begin(), run.log_density.end())};
    const nlohmann::json extra = {
        {"hitting_time", rows[t].hitting_time}, {"reached_bulk", rows[t].reached}, {"bulk_level", level}};
    if (out_dir && run.replication == 0) {
      summaries[t] = write_run_artifact(run, *out_dir / "runs", "poisson_" + run.kernel_label, extra);
    } else {
      summaries[t] = summary_json(run, extra);
    }
  }

  PoissonResult res;
  res.hitting = rows;
  res.bulk_level = level;
  res.summaries = summaries;
  std::optional<std::size_t> base;
  for (std::size_t j = 0; j < nk; ++j) {
    if (o.kernels[j].wrapper == Wrapper::None) base = j;
  }
  if (base) {
    for (std::size_t j = 0; j < nk; ++j) {
      if (j == *base) continue;
      int count = 0;
      for (std::size_t r = 0; r < n_reps; ++r) {
        count += rows[j * n_reps + r].hitting_time <= rows[*base * n_reps + r].hitting_time;
      }
      res.sign_counts.emplace_back(o.kernels[j].label(), count);
    }
  }
  if (out_dir) {
    open_and_write(*out_dir / "poisson_hitting.csv", [&](std::ostream& os) { write_hitting_csv(os, rows); });
    for (std::size_t t = 0; t < rows.size(); ++t) {
      if (rows[t].replication == 0) continue;
      open_and_write(*out_dir / "runs" /
                         ("poisson_" + rows[t].kernel + "_r" + std::to_string(rows[t].replication) + ".json"),
                     [&](std::ostream& os) { os << summaries[t].dump(2) << '\n'; });
    }
  }
  return res;
}

void write_hitting_csv(std::ostream& os, const std::vector<HittingRow>& rows) {
  csv::Writer w(os);
  w.field("kernel").field("replication").field("hitting_time").field("reached").field("max_log_density");
  w.end_row();
  for (const auto& r : rows) {
    w.field(r.kernel).field(r.replication).field(r.hitting_time).field(r.reached).field(r.max_log_density);
    w.end_row();
  }
}

// ---------------------------------------------------------------------------

std::vector<Table1Row> table1() {
  std::vector<Table1Row> rows;
  const std::vector<std::pair<std::string, double>> base{{"rwm", 1.0}, {"mala", 1.0 / 3.0}, {"hmc", 0.25}};
  for (const auto& [name, c] : base) {
    const auto opt = optimize_base(ScalingModel{c, 1.0, std::nullopt});
    rows.push_back({name, c, "none", opt.acceptance_at_opt, 1.0, opt.ell_opt});
  }
  for (const auto& [name, c] : {base[1], base[2]}) {
    for (const StepSizeDistribution mu : {StepSizeDistribution(Family{Uniform01{}}),
                                          StepSizeDistribution(Family{Exponential1{}})}) {
      const ScalingModel model{c, 1.0, mu};
      const auto opt = optimize_bar(model);
      rows.push_back({name, c, mu.name(), opt.acceptance_at_opt, efficiency_ratio(model), opt.ell_opt});
    }
  }
  return rows;
}

void write_table1_csv(std::ostream& os, const std::vector<Table1Row>& rows) {
  csv::Writer w(os);
  w.field("sampler").field("c").field("mu").field("acceptance").field("efficiency_ratio").field("ell_opt");
  w.end_row();
  for (const auto& r : rows) {
    w.field(r.sampler).field(r.c).field(r.mu).field(r.acceptance).field(r.efficiency_ratio).field(r.ell_opt);
    w.end_row();
  }
}

void print_table1(std::ostream& os, const std::vector<Table1Row>& rows) {
  const auto flags = os.flags();
  os << std::left << std::setw(8) << "sampler" << std::setw(8) << "c" << std::setw(14) << "mu" << std::setw(12)
     << "acceptance" << "eff. ratio\n";
  for (const auto& r : rows) {
    os << std::left << std::setw(8) << r.sampler << std::setw(8) << std::setprecision(3) << std::fixed << r.c
       << std::setw(14) << r.mu << std::setw(12) << r.acceptance << r.efficiency_ratio << '\n';
  }
  os.flags(flags);
}

}  // namespace rss
