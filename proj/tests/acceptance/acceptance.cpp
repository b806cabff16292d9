// Acceptance suite: one PASS/FAIL line per criterion. Run everything, or a
// single criterion with --only <id>.

#include "rss/diagnostics.hpp"
#include "rss/experiments/experiments.hpp"
#include "rss/parallel.hpp"
#include "rss/scaling_theory.hpp"
#include "rss/special_functions.hpp"

#include "oracles.hpp"
#include "test_support.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

using namespace rss;
using Family = StepSizeDistribution::Family;

namespace {

int g_threads = 1;

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
  }
};

std::string num(double v, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

ProposalKernel base(ProposalKind kind, TargetPtr t, StepConvention conv = StepConvention::Step) {
  ProposalKernel k;
  k.kind = kind;
  k.target = std::move(t);
  k.convention = conv;
  return k;
}

testing::OracleMu oracle_mu(MarginalMu m) {
  return m == MarginalMu::Uniform01 ? testing::OracleMu::Uniform : testing::OracleMu::Exponential;
}

// ---------------------------------------------------------------------------

Outcome table1_reproduction() {
  Outcome o;
  struct Row {
    const char* name;
    double c;
    StepSizeDistribution mu;
    double acceptance;
    double ratio;
  };
  const std::vector<Row> rows{{"MALA/Uniform", 1.0 / 3.0, Family{Uniform01{}}, 0.680, 1.342},
                              {"MALA/Exponential", 1.0 / 3.0, Family{Exponential1{}}, 0.687, 1.758},
                              {"HMC/Uniform", 0.25, Family{Uniform01{}}, 0.750, 1.387},
                              {"HMC/Exponential", 0.25, Family{Exponential1{}}, 0.737, 1.889}};
  for (const auto& r : rows) {
    const ScalingModel m{r.c, 1.0, r.mu};
    const double a = optimize_bar(m).acceptance_at_opt;
    const double e = efficiency_ratio(m);
    o.check(std::abs(a - r.acceptance) <= 0.001,
            std::string(r.name) + " acceptance " + num(a) + " vs " + num(r.acceptance) + " +-0.001");
    o.check(std::abs(e - r.ratio) <= 0.01,
            std::string(r.name) + " efficiency ratio " + num(e) + " vs " + num(r.ratio) + " +-0.01");
  }
  return o;
}

Outcome classical_rates() {
  Outcome o;
  for (auto [c, want] : {std::pair{1.0, 0.234}, std::pair{1.0 / 3.0, 0.574}, std::pair{0.25, 0.651}}) {
    const double a = optimize_base(ScalingModel{c, 1.0, std::nullopt}).acceptance_at_opt;
    o.check(std::abs(a - want) <= 0.001, "c = " + num(c, 4) + ": " + num(a) + " vs " + num(want) + " +-0.001");
  }
  return o;
}

Outcome robustness_calculator() {
  Outcome o;
  auto expc = [](double x) { return std::exp(x); };
  const StepSizeDistribution hn(Family{HalfNormal{1.0}});
  for (double h : {0.5, 1.0, 2.0, 5.0}) {
    const double want = 1.0 / (2.0 * std::exp(0.5 * h * h) * 0.5 * std::erfc(h / std::sqrt(2.0)));
    const double got = c_star(expc, hn, h);
    const double rel = std::abs(got - want) / want;
    o.check(rel <= 1e-6, "h = " + num(h) + ": c* " + num(got, 12) + ", closed form " + num(want, 12) +
                             ", rel " + num(rel, 3));
  }
  const double r = c_star(expc, hn, 20.0) / (20.0 * std::sqrt(std::numbers::pi / 2.0));
  o.check(r >= 0.99 && r <= 1.01, "c*(20) / (20 sqrt(pi/2)) = " + num(r, 8) + " in [0.99, 1.01]");
  return o;
}

Outcome marginal_density() {
  Outcome o;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (Index d : {1, 3}) {
    for (auto mu : {MarginalMu::Uniform01, MarginalMu::Exponential1}) {
      auto target = d == 1 ? make_student_t5_1d() : make_funnel(3, 1.0);
      Rng rng(derive_seed(101, static_cast<std::uint64_t>(d) * 2 + (mu == MarginalMu::Uniform01)));
      double worst = 0.0;
      int floored = 0;
      bool ok = true;
      for (int i = 0; i < 50; ++i) {
        const double h = std::exp(1.5 * rng.normal());
        auto k = make_marginalized_mala(target, step_distribution(mu), h);
        const Vector x = rng.normal_vector(d);
        const Vector y = transition(k, x, rng).proposal;
        if (y == x) continue;
        const double fwd = log_marginal_mala_density(k, x, y).log_magnitude;
        const double bwd = log_marginal_mala_density(k, y, x).log_magnitude;
        const double want = testing::oracle_log_marginal_mala(oracle_mu(mu), x, target->grad_log_density(x), y, h) -
                            testing::oracle_log_marginal_mala(oracle_mu(mu), y, target->grad_log_density(y), x, h);
        const double err = std::abs((fwd - bwd) - want);
        // Far in the tails log Qbar reaches 1e9..1e12, where 1e-6 is below
        // a few ulps of the values themselves.
        const double floor = 16.0 * eps * std::max(std::abs(fwd), std::abs(bwd));
        if (floor > 1e-6) ++floored;
        ok = ok && std::isfinite(err) && err <= std::max(1e-6, floor);
        if (floor <= 1e-6) worst = std::max(worst, err);
      }
      o.check(ok, "d = " + std::to_string(d) + ", mu = " + to_string(mu) + ": max |log-ratio error| " + num(worst, 3) +
                      " over well-scaled configs; " + std::to_string(floored) +
                      " of 50 with |log Qbar| > 2.8e8 judged at 16 ulp");
    }
  }
  return o;
}

Outcome equivalences() {
  Outcome o;
  {
    const double h = 2.5;
    AuxiliaryKernel aux{base(ProposalKind::RademacherRwm, make_std_normal(1), StepConvention::Scale),
                        Family{HalfNormal{1.0}}, h};
    Rng rng(202);
    std::vector<double> w(1'000'000);
    for (auto& v : w) v = aux_step(aux, Vector::Constant(1, 0.4), rng).proposal[0] - 0.4;
    const double ks = testing::ks_distance(w, [&](double v) { return std_normal_cdf(v / std::sqrt(h)); });
    o.check(ks <= 0.002, "Rademacher RWM increments vs N(0, h): KS " + num(ks, 4) + " <= 0.002 (1e6 draws)");
  }
  {
    auto target = make_student_t5_1d();
    AuxiliaryKernel aux{base(ProposalKind::RademacherBarker, target, StepConvention::Scale), Family{HalfNormal{1.0}},
                        1.0};
    const auto barker = base(ProposalKind::Barker, target);
    double worst = 0.0;
    double worst_mass = 0.0;
    for (double h : {0.3, 1.0, 6.0}) {
      aux.h = h;
      for (double x : {-2.0, 0.0, 0.5, 3.0}) {
        for (double w = -5.0; w <= 5.0; w += 0.13) {
          const double want =
              std::exp(log_proposal_density(barker, Vector::Constant(1, x), Vector::Constant(1, x + w), h));
          worst = std::max(worst, std::abs(auxiliary_increment_density(aux, x, w) - want));
        }
        auto f = [&](double w) { return auxiliary_increment_density(aux, x, w); };
        using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
        const double mass = GK::integrate(f, -60.0, 0.0, 15, 1e-12) + GK::integrate(f, 0.0, 60.0, 15, 1e-12);
        worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
      }
    }
    o.check(worst <= 1e-8, "Rademacher Barker marginal vs Barker closed form: max abs error " + num(worst, 3));
    o.check(worst_mass <= 1e-8, "Rademacher Barker marginal integrates to 1 by quadrature: " + num(worst_mass, 3));
  }
  return o;
}

Outcome proposition1_ordering() {
  Outcome o;
  auto target = make_std_normal(1);
  const TestFunction f = [](const Vector& x) { return x[0]; };
  std::uint64_t s = 0;
  for (double h : {0.1, 1.0, 10.0, 100.0}) {
    const Kernel marg = make_marginalized_mala(target, Family{Exponential1{}}, h);
    const Kernel aux = AuxiliaryKernel{base(ProposalKind::Mala, target), Family{Exponential1{}}, h};
    const auto em = dirichlet_rb_sharded(marg, f, 1'000'000, derive_seed(303, s++), 64, g_threads);
    const auto ea = dirichlet_rb_sharded(aux, f, 1'000'000, derive_seed(303, s++), 64, g_threads);
    const double se = std::hypot(em.std_error, ea.std_error);
    o.check(em.value >= ea.value - 3.0 * se, "h = " + num(h) + ": E(M) " + num(em.value) + " >= E(Pbar) " +
                                                 num(ea.value) + " - 3 SE (" + num(se, 3) + ")");
  }
  return o;
}

Outcome fig1_shape() {
  Outcome o;
  EsjdSweepOptions opt;
  opt.h_grid = {1e-2, 1e2, 1e3, 1e4};
  opt.targets = {"std_normal"};
  opt.n_samples = 100000;
  opt.seed = 404;
  opt.threads = g_threads;
  const auto rows = esjd_sweep(opt);
  auto at = [&](const std::string& kernel, double h) {
    for (const auto& r : rows) {
      if (r.kernel == kernel && r.h == h) return r.esjd;
    }
    throw std::logic_error("missing sweep row");
  };
  const std::vector<std::string> randomized{"aux-mala-uniform", "aux-mala-exponential", "marg-mala-uniform",
                                            "marg-mala-exponential"};
  double lo = INFINITY, hi = 0.0;
  for (const auto& k : sweep_kernels()) {
    const double v = at(k.label(), 1e-2);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    o.lines.push_back("      h = 1e-2 " + k.label() + ": " + num(v));
  }
  o.check(hi / lo <= 1.1, "(a) all five within 10% at h = 1e-2: max/min = " + num(hi / lo, 4));
  const double mala3 = at("mala", 1e3);
  for (const auto& k : randomized) {
    const double v = at(k, 1e3);
    o.check(v >= 10.0 * mala3, "(b) " + k + " at h = 1e3: " + num(v) + " >= 10 x mala " + num(mala3));
  }
  for (const auto& k : randomized) {
    const double decay = at(k, 1e2) / at(k, 1e4);
    o.check(decay <= 1e3, "(c) " + k + " ESJD(1e2)/ESJD(1e4) = " + num(decay) + " <= 1e3");
  }
  const double mala_decay = at("mala", 1e2) / at("mala", 1e4);
  o.check(mala_decay >= 1e4, "(c) mala ESJD(1e2)/ESJD(1e4) = " + num(mala_decay) + " >= 1e4");
  return o;
}

Outcome stationarity() {
  Outcome o;
  auto target = make_std_normal(1);
  std::vector<Kernel> kernels;
  for (auto kind : {ProposalKind::GaussianRwm, ProposalKind::Mala, ProposalKind::Barker, ProposalKind::RademacherRwm,
                    ProposalKind::RademacherBarker, ProposalKind::Hmc}) {
    kernels.push_back(FixedStepKernel{base(kind, target), 1.5});
  }
  for (auto kind : {ProposalKind::GaussianRwm, ProposalKind::Mala, ProposalKind::Barker, ProposalKind::Hmc}) {
    kernels.push_back(AuxiliaryKernel{base(kind, target), Family{Uniform01{}}, 1.5});
    kernels.push_back(AuxiliaryKernel{base(kind, target), Family{Exponential1{}}, 1.5});
  }
  for (auto kind : {ProposalKind::RademacherRwm, ProposalKind::RademacherBarker}) {
    kernels.push_back(AuxiliaryKernel{base(kind, target, StepConvention::Scale), Family{HalfNormal{1.0}}, 1.5});
  }
  kernels.push_back(make_marginalized_mala(target, Family{Uniform01{}}, 1.5));
  kernels.push_back(make_marginalized_mala(target, Family{Exponential1{}}, 1.5));

  std::vector<Outcome> parts(kernels.size());
  parallel_for(kernels.size(), g_threads, [&](std::size_t i) {
    Rng rng(derive_seed(505, i));
    std::vector<double> d1(100000), d2(100000);
    for (std::size_t j = 0; j < d1.size(); ++j) {
      const Vector x = target->sample(rng);
      const double v = transition(kernels[i], x, rng).next_state[0];
      d1[j] = v - x[0];
      d2[j] = v * v - x[0] * x[0];
    }
    const auto a = testing::mean_se(d1), b = testing::mean_se(d2);
    parts[i].check(std::abs(a.mean) <= 3.0 * a.se && std::abs(b.mean) <= 3.0 * b.se,
                   label(kernels[i]) + ": E[X'-X] = " + num(a.mean, 3) + " (SE " + num(a.se, 3) + "), E[X'^2-X^2] = " +
                       num(b.mean, 3) + " (SE " + num(b.se, 3) + ")");
  });
  for (const auto& p : parts) {
    o.pass = o.pass && p.pass;
    o.lines.insert(o.lines.end(), p.lines.begin(), p.lines.end());
  }

  Rng rng(506);
  double worst = 0.0;
  int floored = 0;
  bool ok = true;
  auto t2 = make_funnel(3, 1.0);
  for (auto kind : {ProposalKind::GaussianRwm, ProposalKind::Mala, ProposalKind::Barker}) {
    const auto k = base(kind, t2);
    for (int i = 0; i < 200; ++i) {
      const double h = std::exp(rng.normal());
      const Vector x = 0.7 * rng.normal_vector(3);
      const Proposal fwd = propose(k, x, h, rng);
      Proposal back;
      back.y = x;
      const double terms[] = {t2->log_density(x),     log_proposal_density(k, x, fwd.y, h), log_acceptance(k, x, fwd, h),
                              t2->log_density(fwd.y), log_proposal_density(k, fwd.y, x, h), log_acceptance(k, fwd.y, back, h)};
      const double defect = std::abs(terms[0] + terms[1] + terms[2] - terms[3] - terms[4] - terms[5]);
      // Proposals deep into the funnel neck give terms near 1e16, whose ulp
      // alone exceeds 1e-10.
      double big = 0.0;
      for (double v : terms) big = std::max(big, std::abs(v));
      const double floor = 16.0 * std::numeric_limits<double>::epsilon() * big;
      if (floor > 1e-10) ++floored;
      ok = ok && std::isfinite(defect) && defect <= std::max(1e-10, floor);
      if (floor <= 1e-10) worst = std::max(worst, defect);
    }
  }
  o.check(ok, "detailed balance, RWM / MALA / Barker: max log defect " + num(worst, 3) + " over well-scaled draws; " +
                  std::to_string(floored) + " of 600 with terms > 2.8e4 judged at 16 ulp");
  worst = 0.0;
  for (auto mu : {MarginalMu::Uniform01, MarginalMu::Exponential1}) {
    for (int i = 0; i < 100; ++i) {
      const double h = std::exp(rng.normal());
      auto k = make_marginalized_mala(t2, step_distribution(mu), h);
      const Vector x = 0.7 * rng.normal_vector(3);
      const Vector y = transition(k, x, rng).proposal;
      if (y == x) continue;
      const double qxy = testing::oracle_log_marginal_mala(oracle_mu(mu), x, t2->grad_log_density(x), y, h);
      const double qyx = testing::oracle_log_marginal_mala(oracle_mu(mu), y, t2->grad_log_density(y), x, h);
      const double lhs = t2->log_density(x) + qxy + log_marginal_acceptance(k, x, y);
      const double rhs = t2->log_density(y) + qyx + log_marginal_acceptance(k, y, x);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  o.check(worst <= 1e-10, "detailed balance, marginalized MALA with oracle density: max log defect " + num(worst, 3));
  return o;
}

Outcome adaptation() {
  Outcome o;
  ExperimentConfig c;
  c.seed = 606;
  c.target = {{"name", "std_normal"}, {"params", {{"d", 10}}}};
  c.n_iterations = 100000;
  c.burn_in = 90000;
  c.adaptation.alpha_star = 0.574;
  const auto run = run_chain(c);
  o.check(std::abs(run.mean_acceptance - 0.574) <= 0.05,
          "mean acceptance over the last 1e4 of 1e5 iterations " + num(run.mean_acceptance) + " (final h " +
              num(run.final_h) + ")");
  return o;
}

Outcome funnel() {
  Outcome o;
  auto opt = funnel_options();
  opt.checkpoints = {100000};
  opt.replications = 20;
  opt.run_histograms = false;
  opt.seed = 707;
  opt.threads = g_threads;
  const auto res = tail_experiment(opt);
  const auto mala = summarize_tails(res.tails, "mala", 100000);
  for (const std::string k : {"aux-mala-uniform", "aux-mala-exponential"}) {
    const auto s = summarize_tails(res.tails, k, 100000);
    o.check(s.median_abs_error < mala.median_abs_error, k + " median |P - 0.05| " + num(s.median_abs_error, 4) +
                                                            " < mala " + num(mala.median_abs_error, 4));
  }
  o.check(mala.median_estimate <= 0.01, "mala median estimate " + num(mala.median_estimate, 4) + " <= 0.01");
  return o;
}

Outcome gradients() {
  Outcome o;
  const std::vector<nlohmann::json> specs{
      {{"name", "std_normal"}, {"params", {{"d", 5}}}},
      {{"name", "laplace"}, {"params", nlohmann::json::object()}},
      {{"name", "student_t5"}, {"params", nlohmann::json::object()}},
      {{"name", "funnel"}, {"params", {{"d", 10}, {"sigma2", 9.0}}}},
      {{"name", "funnel"}, {"params", {{"d", 10}, {"sigma2", 4.0}}}},
      {{"name", "rosenbrock"}, {"params", {{"a", 0.5}, {"b", 50.0}}}},
      {{"name", "poisson_reg"}, {"params", {{"d", 50}, {"seed", 2024}}}}};
  Rng rng(808);
  for (const auto& spec : specs) {
    const auto t = make_target(spec);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Vector x = rng.normal_vector(t->dimension());
      const Vector fd = testing::central_difference_gradient([&](const Vector& v) { return t->log_density(v); }, x);
      worst = std::max(worst, testing::max_relative_error(fd, t->grad_log_density(x)));
    }
    o.check(worst <= 1e-5, spec.at("name").get<std::string>() + " " + spec.at("params").dump() +
                               ": max relative error " + num(worst, 3) + " at 100 points");
  }
  return o;
}

Outcome determinism() {
  Outcome o;
  auto both = [&](const std::function<std::string(int)>& produce, const std::string& what) {
    const std::string a = produce(1), b = produce(1), c = produce(4);
    o.check(a == b && a == c && !a.empty(), what + ": identical bytes on rerun and with 1 vs 4 threads (" +
                                                std::to_string(a.size()) + " bytes)");
  };
  both(
      [](int threads) {
        EsjdSweepOptions s;
        s.h_grid = {0.05, 5.0, 500.0};
        s.n_samples = 5000;
        s.seed = 909;
        s.threads = threads;
        std::ostringstream os;
        write_esjd_csv(os, esjd_sweep(s));
        return os.str();
      },
      "esjd sweep CSV");
  both(
      [](int threads) {
        auto t = funnel_options();
        t.checkpoints = {1000, 5000};
        t.hist_iterations = 5000;
        t.replications = 3;
        t.histogram_bins = 30;
        t.qq_points = 30;
        t.seed = 910;
        t.threads = threads;
        const auto r = tail_experiment(t);
        std::ostringstream os;
        write_tail_csv(os, r.tails);
        write_histogram_csv(os, r.histogram);
        write_qq_csv(os, r.qq);
        return os.str();
      },
      "funnel tail, histogram and Q-Q CSVs");
  both(
      [](int threads) {
        PoissonOptions p;
        p.d = 10;
        p.n_iterations = 1000;
        p.replications = 3;
        p.seed = 911;
        p.threads = threads;
        std::ostringstream os;
        write_hitting_csv(os, poisson_experiment(p).hitting);
        return os.str();
      },
      "poisson hitting-time CSV");
  both(
      [](int threads) {
        ExperimentConfig c;
        c.seed = 912;
        c.target = {{"name", "rosenbrock"}, {"params", {{"a", 0.5}, {"b", 50.0}}}};
        c.wrapper = Wrapper::Auxiliary;
        c.mu = StepSizeDistribution(Family{Exponential1{}});
        c.n_iterations = 5000;
        c.burn_in = 500;
        c.replications = 4;
        c.tracked_coordinates = {0, 1};
        std::ostringstream os;
        for (const auto& r : run_replications(c, threads)) write_trace_csv(os, r, 1);
        return os.str();
      },
      "replicated chain traces");
  return o;
}

struct Criterion {
  const char* id;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {"table1", table1_reproduction},
    {"classical_rates", classical_rates},
    {"robustness_calculator", robustness_calculator},
    {"marginal_density", marginal_density},
    {"equivalences", equivalences},
    {"proposition1_ordering", proposition1_ordering},
    {"fig1_shape", fig1_shape},
    {"stationarity_detailed_balance", stationarity},
    {"adaptation", adaptation},
    {"funnel", funnel},
    {"gradients", gradients},
    {"determinism", determinism},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string only;
  bool list = false;
  g_threads = default_thread_count();
  app.add_option("--only", only, "Run a single criterion");
  app.add_option("--threads", g_threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--list", list, "List criterion ids");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& c : kCriteria) std::cout << c.id << '\n';
    return 0;
  }
  bool all_pass = true;
  bool found = false;
  for (const auto& c : kCriteria) {
    if (!only.empty() && only != c.id) continue;
    found = true;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& line : out.lines) std::cout << "    " << line << '\n';
    std::cout << (out.pass ? "PASS " : "FAIL ") << c.id << " (" << num(secs, 3) << " s)" << std::endl;
    all_pass = all_pass && out.pass;
  }
  if (!found) {
    std::cerr << "unknown criterion: " << only << '\n';
    return 2;
  }
  return all_pass ? 0 : 1;
}
