#pragma once

// JSON configuration for problems, policies and experiments.

#include <fstream>
#include <stdexcept>
#include <type_traits>
#include <variant>
#include <string>
#include <vector>

#include <json.hpp>

#include "rangeband/harness.hpp"
#include "rangeband/linear.hpp"

namespace rangeband {

using json = nlohmann::json;

namespace detail {

inline const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(where + ": missing field '" + key + "'");
  return j.at(key);
}

inline double number(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number()) throw std::invalid_argument(where + ": field '" + key + "' must be a number");
  return v.get<double>();
}

inline std::vector<double> numbers(const json& v, const std::string& where) {
  if (!v.is_array()) throw std::invalid_argument(where + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw std::invalid_argument(where + ": expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

inline std::uint64_t count(const json& j, const char* key, std::uint64_t fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
    throw std::invalid_argument(where + ": field '" + std::string(key) + "' must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

}  // namespace detail

inline ArmDistribution distribution_from_json(const json& j) {
  const std::string where = "distribution";
  const std::string kind = detail::require(j, "kind", where).get<std::string>();
  if (kind == "truncated_gaussian") {
    const auto clip = detail::numbers(detail::require(j, "clip", where), where + ".clip");
    if (clip.size() != 2) throw std::invalid_argument("distribution.clip: expected [lo, hi]");
    const double scale = j.contains("scale") ? detail::number(j, "scale", where) : 1.0;
    return truncated_gaussian(detail::number(j, "loc", where), detail::number(j, "variance", where), clip[0], clip[1],
                              scale);
  }
  if (kind == "point_mass") return point_mass(detail::number(j, "value", where));
  if (kind == "finite_support")
    return finite_support(detail::numbers(detail::require(j, "atoms", where), where + ".atoms"),
                          detail::numbers(detail::require(j, "probs", where), where + ".probs"));
  if (kind == "mixture") {
    const json& comps = detail::require(j, "components", where);
    if (!comps.is_array()) throw std::invalid_argument("distribution.components: expected an array");
    std::vector<ArmDistribution> parts;
    for (const auto& c : comps) parts.push_back(distribution_from_json(c));
    return mixture(std::move(parts), detail::numbers(detail::require(j, "weights", where), where + ".weights"));
  }
  throw std::invalid_argument("distribution: unknown kind '" + kind + "'");
}

inline json distribution_to_json(const ArmDistribution& d) {
  return std::visit(
      [](const auto& law) -> json {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, TruncatedGaussian>) {
          return {{"kind", "truncated_gaussian"}, {"loc", law.loc},       {"variance", law.variance},
                  {"clip", {law.clip_lo, law.clip_hi}}, {"scale", law.scale}};
        } else if constexpr (std::is_same_v<T, PointMass>) {
          return {{"kind", "point_mass"}, {"value", law.value}};
        } else if constexpr (std::is_same_v<T, FiniteSupport>) {
          return {{"kind", "finite_support"}, {"atoms", law.atoms}, {"probs", law.probs}};
        } else {
          json comps = json::array();
          for (const auto& c : law.components) comps.push_back(distribution_to_json(c));
          return {{"kind", "mixture"}, {"components", comps}, {"weights", law.weights}};
        }
      },
      d.law);
}

inline BanditProblem problem_from_json(const json& j) {
  const json& arms = detail::require(j, "arms", "problem");
  if (!arms.is_array() || arms.empty()) throw std::invalid_argument("problem.arms: expected a non-empty array");
  std::vector<ArmDistribution> out;
  for (const auto& a : arms) out.push_back(distribution_from_json(a));
  return BanditProblem(std::move(out));
}

inline json problem_to_json(const BanditProblem& p) {
  json arms = json::array();
  for (const auto& a : p.arms()) arms.push_back(distribution_to_json(a));
  return {{"arms", arms}};
}

inline PolicyDescriptor policy_from_json(const json& j) {
  const std::string where = "policy";
  const std::string kind = detail::require(j, "kind", where).get<std::string>();
  if (kind == "ahb") return PolicyDescriptor::ahb(j.contains("alpha") ? detail::number(j, "alpha", where) : 0.5);
  if (kind == "known_m_adahedge" || kind == "known_m_tsallis") {
    std::optional<double> m;
    if (j.contains("M")) m = detail::number(j, "M", where);
    return kind == "known_m_adahedge" ? PolicyDescriptor::known_m_adahedge(m) : PolicyDescriptor::known_m_tsallis(m);
  }
  if (kind == "ucb") return PolicyDescriptor::ucb(detail::number(j, "sigma", where));
  if (kind == "range_ucb") return PolicyDescriptor::range_ucb();
  if (kind == "inflated_ucb") return PolicyDescriptor::inflated_ucb();
  if (kind == "ftl") return PolicyDescriptor::ftl();
  if (kind == "random") return PolicyDescriptor::random();
  throw std::invalid_argument("policy: unknown kind '" + kind + "'");
}

/// Either "problem": {"arms": [...]} or "paper_problem": {"variance": V}.
inline BanditProblem experiment_problem_from_json(const json& j) {
  if (j.contains("problem") && j.contains("paper_problem"))
    throw std::invalid_argument("config: give either 'problem' or 'paper_problem', not both");
  if (j.contains("problem")) return problem_from_json(j.at("problem"));
  if (j.contains("paper_problem")) {
    const json& pp = j.at("paper_problem");
    return paper_problem(1.0, detail::number(pp, "variance", "paper_problem"));
  }
  throw std::invalid_argument("config: missing 'problem' or 'paper_problem'");
}

inline ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  ExperimentConfig cfg;
  cfg.problem = experiment_problem_from_json(j);
  if (j.contains("scales")) cfg.scales = detail::numbers(j.at("scales"), "config.scales");
  const json& pols = detail::require(j, "policies", "config");
  if (!pols.is_array()) throw std::invalid_argument("config.policies: expected an array");
  cfg.policies.clear();
  for (const auto& p : pols) cfg.policies.push_back(policy_from_json(p));
  cfg.horizon = detail::count(j, "horizon", cfg.horizon, "config");
  cfg.runs = detail::count(j, "runs", cfg.runs, "config");
  cfg.seed = detail::count(j, "seed", cfg.seed, "config");
  cfg.threads = static_cast<unsigned>(detail::count(j, "threads", cfg.threads, "config"));
  if (j.contains("couple_scales")) cfg.couple_scales = j.at("couple_scales").get<bool>();
  if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
  cfg.validate();
  return cfg;
}

inline json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("'" + path + "': " + e.what());
  }
}

struct TradeoffConfig {
  BanditProblem problem = paper_problem(1.0, kHighVariance);
  std::size_t arm = 1;
  double eps = 0.5;
  PolicyDescriptor policy = PolicyDescriptor::ahb(0.5);
  std::uint64_t horizon = 1000;
  std::uint64_t runs = 20;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

inline TradeoffConfig tradeoff_config_from_json(const json& j) {
  TradeoffConfig c;
  c.problem = experiment_problem_from_json(j);
  c.arm = detail::count(j, "arm", c.arm, "config");
  if (j.contains("epsilon")) c.eps = detail::number(j, "epsilon", "config");
  if (j.contains("policy")) c.policy = policy_from_json(j.at("policy"));
  c.horizon = detail::count(j, "horizon", c.horizon, "config");
  c.runs = detail::count(j, "runs", c.runs, "config");
  c.seed = detail::count(j, "seed", c.seed, "config");
  c.threads = static_cast<unsigned>(detail::count(j, "threads", c.threads, "config"));
  return c;
}

/// {"actions": [[...], ...], "range": [m, M], "sequence": [[...], ...]}
struct LinearConfig {
  ActionSet actions = ActionSet::basis(1);
  Interval range{0.0, 1.0};
  std::vector<Eigen::VectorXd> sequence;
  LinearRateForm form = LinearRateForm::Printed;
  std::uint64_t seed = 0;
};

inline LinearConfig linear_config_from_json(const json& j) {
  LinearConfig c;
  const json& acts = detail::require(j, "actions", "linear");
  if (!acts.is_array()) throw std::invalid_argument("linear.actions: expected an array of vectors");
  std::vector<std::vector<double>> rows;
  for (const auto& a : acts) rows.push_back(detail::numbers(a, "linear.actions"));
  c.actions = ActionSet::from_vectors(rows);
  const auto r = detail::numbers(detail::require(j, "range", "linear"), "linear.range");
  if (r.size() != 2 || !(r[0] <= r[1])) throw std::invalid_argument("linear.range: expected [m, M] with m <= M");
  c.range = {r[0], r[1]};
  if (j.contains("sequence")) {
    for (const auto& y : j.at("sequence")) {
      const auto v = detail::numbers(y, "linear.sequence");
      c.sequence.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
  }
  if (j.contains("rate_form")) {
    const auto f = j.at("rate_form").get<std::string>();
    if (f == "printed") c.form = LinearRateForm::Printed;
    else if (f == "outer") c.form = LinearRateForm::Outer;
    else throw std::invalid_argument("linear.rate_form: expected 'printed' or 'outer'");
  }
  c.seed = detail::count(j, "seed", c.seed, "linear");
  return c;
}

}  // namespace rangeband
