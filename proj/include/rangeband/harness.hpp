#pragma once

// Monte Carlo experiment driver: seeded single runs, rescaled-regret
// aggregation over (policy, scale) cells, CSV persistence, and paired
// simulations for the trade-off certificate.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rangeband/analysis.hpp"
#include "rangeband/policy.hpp"
#include "rangeband/problem.hpp"

namespace rangeband {

/// Ten truncated-Gaussian arms: arm 0 is scale * clip(N(0.6, V), 0, 1.2),
/// the others scale * clip(N(0.5, V), 0, 1). Range [0, 1.2 scale].
inline BanditProblem paper_problem(double scale, double variance) {
  if (!(scale > 0.0)) throw std::invalid_argument("paper_problem: scale must be positive");
  if (!(variance > 0.0)) throw std::invalid_argument("paper_problem: variance must be positive");
  std::vector<ArmDistribution> arms;
  arms.push_back(truncated_gaussian(0.6, variance, 0.0, 1.2, scale));
  for (int a = 1; a < 10; ++a) arms.push_back(truncated_gaussian(0.5, variance, 0.0, 1.0, scale));
  return BanditProblem(std::move(arms));
}

inline constexpr double kHighVariance = 0.25;
inline constexpr double kLowVariance = 0.01;

/// Called after every observe with (round index from 0, action, reward, policy).
using StepHook = std::function<void(std::size_t, const Action&, double, const Policy&)>;

/// Plays T rounds. Rewards and the policy's own randomization come from two
/// child streams of `seed`, so reward draws do not depend on the policy.
inline RunRecord run_single(const PolicyDescriptor& desc, const BanditProblem& problem, std::uint64_t horizon,
                            std::uint64_t seed, const StepHook& hook = {}) {
  const std::size_t k = problem.num_arms();
  Stream master(seed);
  Stream reward_rng = master.split();
  Stream policy_rng = master.split();

  RunRecord rec;
  rec.seed = seed;
  rec.counts.assign(k, 0);
  rec.actions.reserve(horizon);
  rec.regret.reserve(horizon);
  double regret = 0.0;

  if (k == 1) {
    // Nothing to choose; the only arm is optimal.
    for (std::uint64_t t = 0; t < horizon; ++t) {
      (void)problem.sample(0, reward_rng);
      rec.actions.push_back(0);
      rec.regret.push_back(0.0);
    }
    rec.counts[0] = horizon;
    return rec;
  }

  Policy policy = make_policy(desc.resolved(problem.range().hi), k, horizon);
  for (std::uint64_t t = 0; t < horizon; ++t) {
    const Action a = policy.act(policy_rng);
    const double y = problem.sample(a.arm, reward_rng);
    policy.observe(a.arm, y);
    if (hook) hook(static_cast<std::size_t>(t), a, y, policy);
    ++rec.counts[a.arm];
    regret += problem.gaps()[a.arm];
    rec.actions.push_back(static_cast<std::uint32_t>(a.arm));
    rec.regret.push_back(regret);
  }
  return rec;
}

/// Plays a fixed payoff table; returns the action drawn each round together
/// with the distribution it was drawn from.
inline std::vector<Action> play_sequence(const PolicyDescriptor& desc, const ObliviousSequence& seq,
                                         std::uint64_t seed) {
  Stream master(seed);
  (void)master.split();  // keep the policy stream aligned with run_single
  Stream policy_rng = master.split();
  Policy policy = make_policy(desc.resolved(seq.range().hi), seq.num_arms(), seq.horizon());
  std::vector<Action> out;
  out.reserve(seq.horizon());
  for (std::size_t t = 0; t < seq.horizon(); ++t) {
    Action a = policy.act(policy_rng);
    policy.observe(a.arm, seq.payoff(t, a.arm));
    out.push_back(std::move(a));
  }
  return out;
}

/// (T mu* - sum_t mu_{A_t}) / scale, i.e. pseudo-regret per unit of scale.
inline double rescaled_regret(const RunRecord& record, const BanditProblem& problem, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("rescaled_regret: scale must be positive");
  return pseudo_regret(problem, record.counts) / scale;
}

struct ExperimentConfig {
  BanditProblem problem = paper_problem(1.0, kHighVariance);  // scale-1 problem
  std::vector<double> scales{1.0};
  std::vector<PolicyDescriptor> policies;
  std::uint64_t horizon = 20000;
  std::uint64_t runs = 50;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool couple_scales = true;  // same seeds across scales
  std::string out;

  void validate() const {
    if (horizon < 1) throw std::invalid_argument("config: horizon must be >= 1");
    if (runs < 1) throw std::invalid_argument("config: runs must be >= 1");
    if (scales.empty()) throw std::invalid_argument("config: at least one scale is required");
    for (double s : scales)
      if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("config: scales must be positive");
    if (policies.empty()) throw std::invalid_argument("config: at least one policy is required");
  }
};

/// Seed of one run: base XOR hash(policy id, scale index, run index).
inline std::uint64_t run_seed(std::uint64_t base, const std::string& policy_id, std::size_t scale_index,
                              std::uint64_t run_index) {
  std::uint64_t h = mix64(fnv1a(policy_id));
  h = mix64(h ^ (0x51ed27ULL + scale_index));
  h = mix64(h ^ run_index);
  return base ^ h;
}

struct RegretRow {
  std::string policy;
  double scale = 1.0;
  double rescaled_regret = 0.0;
  double stderr_ = 0.0;
  double runtime_s = 0.0;  // mean wall time per run
  std::size_t failures = 0;
  std::string first_error;
};

struct RegretTable {
  std::vector<RegretRow> rows;

  const RegretRow* find(const std::string& policy, double scale) const {
    for (const auto& r : rows)
      if (r.policy == policy && r.scale == scale) return &r;
    return nullptr;
  }
};

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Sample mean and sample standard deviation / sqrt(n); zero error for n = 1.
inline MeanStderr mean_stderr(const std::vector<double>& xs) {
  MeanStderr out;
  if (xs.empty()) return out;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) out.mean += x;
  out.mean /= n;
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.stderr_ = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return out;
}

namespace detail {

/// Runs job(i) for i in [0, n) on `threads` workers.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& job) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) job(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace detail

/// N independent runs per (policy, scale). Output rows follow the config
/// order (policies outer, scales inner) and do not depend on thread count.
inline RegretTable run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t np = cfg.policies.size(), ns = cfg.scales.size();
  const std::size_t cells = np * ns;
  const std::size_t jobs = cells * cfg.runs;

  std::vector<BanditProblem> problems;
  problems.reserve(ns);
  for (double s : cfg.scales) problems.push_back(cfg.problem.scaled(s));
  std::vector<std::string> ids;
  for (const auto& p : cfg.policies) ids.push_back(p.id());

  struct Outcome {
    double value = 0.0;
    double seconds = 0.0;
    bool ok = false;
    std::string error;
  };
  std::vector<Outcome> outcomes(jobs);

  detail::parallel_for(jobs, cfg.threads, [&](std::size_t j) {
    const std::size_t cell = j / cfg.runs;
    const std::uint64_t run = j % cfg.runs;
    const std::size_t pi = cell / ns, si = cell % ns;
    Outcome& o = outcomes[j];
    const auto start = std::chrono::steady_clock::now();
    try {
      const std::uint64_t seed = run_seed(cfg.seed, ids[pi], cfg.couple_scales ? 0 : si, run);
      const RunRecord rec = run_single(cfg.policies[pi], problems[si], cfg.horizon, seed);
      o.value = rescaled_regret(rec, problems[si], cfg.scales[si]);
      o.ok = true;
    } catch (const std::exception& e) {
      o.error = e.what();
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });

  RegretTable table;
  table.rows.reserve(cells);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    RegretRow row;
    row.policy = ids[cell / ns];
    row.scale = cfg.scales[cell % ns];
    std::vector<double> values;
    double seconds = 0.0;
    for (std::uint64_t r = 0; r < cfg.runs; ++r) {
      const Outcome& o = outcomes[cell * cfg.runs + r];
      seconds += o.seconds;
      if (o.ok) {
        values.push_back(o.value);
      } else {
        if (row.failures++ == 0) row.first_error = o.error;
      }
    }
    const MeanStderr ms = mean_stderr(values);
    row.rescaled_regret = values.empty() ? std::nan("") : ms.mean;
    row.stderr_ = ms.stderr_;
    row.runtime_s = seconds / static_cast<double>(cfg.runs);
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline constexpr const char* kCsvHeader = "policy,scale,rescaled_regret,stderr,runtime_s";

namespace detail {
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace detail

inline void write_results(const RegretTable& table, std::ostream& os) {
  os << kCsvHeader << '\n';
  for (const auto& r : table.rows) {
    if (r.policy.find_first_of(",\"\n") != std::string::npos)
      throw std::invalid_argument("write_results: policy id '" + r.policy + "' is not CSV-safe");
    os << r.policy << ',' << detail::fmt17(r.scale) << ',' << detail::fmt17(r.rescaled_regret) << ','
       << detail::fmt17(r.stderr_) << ',' << detail::fmt17(r.runtime_s) << '\n';
  }
}

inline void write_results(const RegretTable& table, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_results: cannot open '" + path + "' for writing");
  write_results(table, f);
  f.flush();
  if (!f) throw std::runtime_error("write_results: write to '" + path + "' failed");
}

inline RegretTable read_results(std::istream& is, const std::string& origin = "<stream>") {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader)
    throw std::runtime_error("read_results: " + origin + ": missing or unexpected header");
  RegretTable table;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    if (cols.size() != 5)
      throw std::runtime_error("read_results: " + origin + ":" + std::to_string(lineno) + ": expected 5 columns");
    RegretRow r;
    r.policy = cols[0];
    try {
      r.scale = std::stod(cols[1]);
      r.rescaled_regret = std::stod(cols[2]);
      r.stderr_ = std::stod(cols[3]);
      r.runtime_s = std::stod(cols[4]);
    } catch (const std::exception&) {
      throw std::runtime_error("read_results: " + origin + ":" + std::to_string(lineno) + ": malformed number");
    }
    table.rows.push_back(std::move(r));
  }
  return table;
}

inline RegretTable read_results(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_results: cannot open '" + path + "'");
  return read_results(f, path);
}

/// Paired simulations on nu and its alternative for one suboptimal arm:
/// expected pull fractions are estimated by averaging over runs with shared
/// seeds, then fed to certificate_check.
struct TradeoffReport {
  TradeoffCertificate cert;
  double pulls = 0.0;  // mean N_a(T) under nu
  bool valid = false;
};

inline TradeoffReport certify_tradeoff(const BanditProblem& problem, std::size_t arm, double eps,
                                       const PolicyDescriptor& policy, std::uint64_t horizon, std::uint64_t runs,
                                       std::uint64_t seed, unsigned threads = 1) {
  if (runs < 1 || horizon < 1) throw std::invalid_argument("certify_tradeoff: runs and horizon must be >= 1");
  const BanditProblem alt = alternative_problem(problem, arm, eps);
  std::vector<double> n_orig(runs), n_alt(runs);
  const std::string id = policy.id();
  detail::parallel_for(runs, threads, [&](std::size_t r) {
    const std::uint64_t s = run_seed(seed, id, 0, r);
    n_orig[r] = static_cast<double>(run_single(policy, problem, horizon, s).counts[arm]);
    n_alt[r] = static_cast<double>(run_single(policy, alt, horizon, s).counts[arm]);
  });
  TradeoffReport rep;
  rep.pulls = mean_stderr(n_orig).mean;
  rep.cert.eps = eps;
  rep.cert.fraction = rep.pulls / static_cast<double>(horizon);
  rep.cert.alt_fraction = mean_stderr(n_alt).mean / static_cast<double>(horizon);
  rep.valid = certificate_check(rep.cert, rep.pulls, horizon);
  return rep;
}

}  // namespace rangeband
