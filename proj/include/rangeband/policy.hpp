#pragma once

// One act/observe interface over every strategy, plus the descriptor that
// names a strategy in configs and result tables.

#include <cstdio>
#include <optional>
#include <string>
#include <variant>

#include "rangeband/baselines.hpp"
#include "rangeband/policies.hpp"

namespace rangeband {

enum class PolicyKind { Ahb, KnownMAdaHedge, KnownMTsallis, Ucb, RangeUcb, InflatedUcb, Ftl, Random };

struct PolicyDescriptor {
  PolicyKind kind = PolicyKind::Ahb;
  double alpha = 0.5;           // Ahb
  std::optional<double> upper;  // known-M bound; unset means "use the problem's upper range end"
  double sigma = 1.0;           // Ucb

  static PolicyDescriptor ahb(double alpha) { return {PolicyKind::Ahb, alpha, std::nullopt, 1.0}; }
  static PolicyDescriptor known_m_adahedge(std::optional<double> m = std::nullopt) {
    return {PolicyKind::KnownMAdaHedge, 0.5, m, 1.0};
  }
  static PolicyDescriptor known_m_tsallis(std::optional<double> m = std::nullopt) {
    return {PolicyKind::KnownMTsallis, 0.5, m, 1.0};
  }
  static PolicyDescriptor ucb(double sigma) { return {PolicyKind::Ucb, 0.5, std::nullopt, sigma}; }
  static PolicyDescriptor range_ucb() { return {PolicyKind::RangeUcb, 0.5, std::nullopt, 1.0}; }
  static PolicyDescriptor inflated_ucb() { return {PolicyKind::InflatedUcb, 0.5, std::nullopt, 1.0}; }
  static PolicyDescriptor ftl() { return {PolicyKind::Ftl, 0.5, std::nullopt, 1.0}; }
  static PolicyDescriptor random() { return {PolicyKind::Random, 0.5, std::nullopt, 1.0}; }

  bool is_known_m() const { return kind == PolicyKind::KnownMAdaHedge || kind == PolicyKind::KnownMTsallis; }

  /// Fills in an unset known-M bound.
  PolicyDescriptor resolved(double problem_upper) const {
    PolicyDescriptor d = *this;
    if (d.is_known_m() && !d.upper) d.upper = problem_upper;
    return d;
  }

  /// Stable row key, e.g. "ahb(alpha=0.5)" or "ucb(sigma=0.01)".
  std::string id() const {
    auto num = [](double x) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%g", x);
      return std::string(buf);
    };
    switch (kind) {
      case PolicyKind::Ahb: return "ahb(alpha=" + num(alpha) + ")";
      case PolicyKind::KnownMAdaHedge: return upper ? "known_m_adahedge(M=" + num(*upper) + ")" : "known_m_adahedge";
      case PolicyKind::KnownMTsallis: return upper ? "known_m_tsallis(M=" + num(*upper) + ")" : "known_m_tsallis";
      case PolicyKind::Ucb: return "ucb(sigma=" + num(sigma) + ")";
      case PolicyKind::RangeUcb: return "range_ucb";
      case PolicyKind::InflatedUcb: return "inflated_ucb";
      case PolicyKind::Ftl: return "ftl";
      case PolicyKind::Random: return "random";
    }
    return "unknown";
  }
};

class Policy {
 public:
  using Variant = std::variant<AhbPolicy, KnownMPolicy, IndexPolicy, RandomPolicy>;

  explicit Policy(Variant v) : impl_(std::move(v)) {}

  Action act(Stream& rng) {
    return std::visit([&](auto& p) { return p.act(rng); }, impl_);
  }
  void observe(std::size_t arm, double reward) {
    std::visit([&](auto& p) { p.observe(arm, reward); }, impl_);
  }
  std::size_t round() const {
    return std::visit([](const auto& p) -> std::size_t { return p.round(); }, impl_);
  }
  /// Engine diagnostics of the last observe, for engine-backed strategies.
  const StepTrace* last_step() const {
    if (auto* a = std::get_if<AhbPolicy>(&impl_)) return &a->last_step();
    if (auto* k = std::get_if<KnownMPolicy>(&impl_)) return &k->last_step();
    return nullptr;
  }

  template <class T>
  const T* as() const {
    return std::get_if<T>(&impl_);
  }

 private:
  Variant impl_;
};

inline Policy make_policy(const PolicyDescriptor& d, std::size_t k, std::uint64_t horizon) {
  if (k < 2) throw std::invalid_argument("make_policy: K must be >= 2");
  switch (d.kind) {
    case PolicyKind::Ahb:
      return Policy(AhbPolicy(k, d.alpha));
    case PolicyKind::KnownMAdaHedge:
    case PolicyKind::KnownMTsallis:
      if (!d.upper) throw std::invalid_argument("make_policy: known-M policy needs a bound M");
      return Policy(KnownMPolicy(k, *d.upper,
                                 d.kind == PolicyKind::KnownMAdaHedge ? Regularizer::Entropic : Regularizer::Tsallis));
    case PolicyKind::Ucb:
      return Policy(IndexPolicy(k, IndexPolicy::Rule::Sigma, horizon, d.sigma));
    case PolicyKind::RangeUcb:
      return Policy(IndexPolicy(k, IndexPolicy::Rule::Range, horizon));
    case PolicyKind::InflatedUcb:
      return Policy(IndexPolicy(k, IndexPolicy::Rule::Inflated, horizon));
    case PolicyKind::Ftl:
      return Policy(IndexPolicy(k, IndexPolicy::Rule::Leader, horizon));
    case PolicyKind::Random:
      return Policy(RandomPolicy(k));
  }
  throw std::invalid_argument("make_policy: unknown policy kind");
}

}  // namespace rangeband
