// rangeband command-line front end.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <thread>

#include "rangeband/rangeband.hpp"

namespace {

using namespace rangeband;

void print_table(const RegretTable& t) {
  std::printf("%-24s %8s %14s %10s %10s\n", "policy", "scale", "regret/scale", "stderr", "s/run");
  for (const auto& r : t.rows) {
    std::printf("%-24s %8g %14.3f %10.3f %10.4f", r.policy.c_str(), r.scale, r.rescaled_regret, r.stderr_, r.runtime_s);
    if (r.failures) std::printf("  [%zu failed: %s]", r.failures, r.first_error.c_str());
    std::printf("\n");
  }
}

void emit(const RegretTable& t, const std::string& out) {
  print_table(t);
  if (!out.empty()) {
    write_results(t, out);
    std::printf("wrote %s\n", out.c_str());
  }
}

std::vector<PolicyDescriptor> desk_policies() {
  std::vector<PolicyDescriptor> p;
  for (double s : {0.001, 0.01, 0.1, 1.0, 10.0}) p.push_back(PolicyDescriptor::ucb(s));
  p.push_back(PolicyDescriptor::range_ucb());
  p.push_back(PolicyDescriptor::ftl());
  p.push_back(PolicyDescriptor::random());
  p.push_back(PolicyDescriptor::ahb(0.5));
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rangeband: scale-free bandit strategies and Monte Carlo benchmarks"};
  app.require_subcommand(1);

  std::string config, out;
  unsigned threads = 0;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "run an experiment described by a JSON config");
  run->add_option("--config", config, "experiment config (JSON)")->required();
  run->add_option("--out", out, "CSV output path");
  auto* run_threads = run->add_option("--threads", threads, "worker threads");
  auto* run_seed_opt = run->add_option("--seed", seed, "base seed (overrides the config)");

  std::string variance = "high";
  std::uint64_t horizon = 20000, runs = 50;
  auto* ref = app.add_subcommand("paper-experiment", "ten-armed truncated-Gaussian benchmark over four payoff scales");
  ref->add_option("--variance", variance, "variance regime")->check(CLI::IsMember({"high", "low"}));
  ref->add_option("--scale-T", horizon, "horizon T");
  ref->add_option("--runs", runs, "runs per (policy, scale)");
  ref->add_option("--out", out, "CSV output path");
  ref->add_option("--threads", threads, "worker threads");
  ref->add_option("--seed", seed, "base seed");

  auto* cert = app.add_subcommand("certify-tradeoff", "evaluate the trade-off certificate on paired simulations");
  cert->add_option("--config", config, "certificate config (JSON)")->required();

  auto* lin = app.add_subcommand("run-linear", "play the linear learner on a fixed payoff sequence");
  lin->add_option("--config", config, "linear config (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  try {
    if (*run) {
      ExperimentConfig cfg = config_from_json(load_json(config));
      if (*run_threads) cfg.threads = threads;
      if (*run_seed_opt) cfg.seed = seed;
      if (out.empty()) out = cfg.out;
      emit(run_experiment(cfg), out);
    } else if (*ref) {
      ExperimentConfig cfg;
      cfg.problem = paper_problem(1.0, variance == "high" ? kHighVariance : kLowVariance);
      cfg.scales = {0.01, 0.1, 1.0, 10.0};
      cfg.policies = desk_policies();
      cfg.horizon = horizon;
      cfg.runs = runs;
      cfg.seed = seed;
      cfg.threads = threads ? threads : hw;
      emit(run_experiment(cfg), out);
    } else if (*cert) {
      const TradeoffConfig c = tradeoff_config_from_json(load_json(config));
      const auto rep = certify_tradeoff(c.problem, c.arm, c.eps, c.policy, c.horizon, c.runs, c.seed, c.threads);
      std::printf("policy        %s\n", c.policy.id().c_str());
      std::printf("arm           %zu  (gap %g)\n", c.arm, c.problem.gaps().at(c.arm));
      std::printf("epsilon       %g\n", c.eps);
      std::printf("E[N]/T        %.6f\n", rep.cert.fraction);
      std::printf("E'[N]/T       %.6f\n", rep.cert.alt_fraction);
      std::printf("lhs           %.6f\n", rep.cert.lhs);
      std::printf("rhs           %.6f\n", rep.cert.rhs);
      std::printf("certificate   %s\n", rep.valid ? "holds" : "VIOLATED");
      return rep.valid ? 0 : 2;
    } else if (*lin) {
      const LinearConfig c = linear_config_from_json(load_json(config));
      if (c.sequence.empty()) throw std::invalid_argument("run-linear: config has no 'sequence'");
      const LinearSequence seq(c.sequence, c.range, c.actions);
      const auto rec = run_linear(c.actions, seq, c.seed, c.form);
      std::printf("rounds        %zu\n", seq.horizon());
      std::printf("best total    %.6f\n", rec.best_total);
      std::printf("regret        %.6f\n", rec.regret);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "rangeband: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
