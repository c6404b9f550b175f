#pragma once

// Range-adaptive bandit strategies built on the hedge engines:
//  - AhbPolicy: AdaHedge with K warm-up pulls, centered importance
//    estimates and uniform extra-exploration gamma_t.
//  - KnownMPolicy: AdaHedge or 1/2-Tsallis AdaFTRL fed with estimates
//    centered at a known payoff upper bound M, no mixing.
// Arms are 0-based. All policies follow a strict act/observe alternation.

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rangeband/distributions.hpp"
#include "rangeband/hedge.hpp"
#include "rangeband/rng.hpp"

namespace rangeband {

struct Action {
  std::size_t arm = 0;
  std::vector<double> probs;  // distribution the arm was drawn from
};

/// Per-round engine diagnostics, filled by engine-backed policies.
struct StepTrace {
  bool engine_step = false;
  double gap = 0.0;
  double rate = kInfiniteRate;
  double chosen_prob = 1.0;
  double payoff = 0.0;
  std::vector<double> estimates;
};

namespace detail {

/// Enforces act -> observe -> act ...; violations are programming errors.
class Alternation {
 public:
  void on_act(std::size_t arm) {
    if (awaiting_) throw std::logic_error("act called twice without observe");
    awaiting_ = true;
    arm_ = arm;
  }
  void on_observe(std::size_t arm) {
    if (!awaiting_) throw std::logic_error("observe called without a pending act");
    if (arm != arm_) throw std::logic_error("observe called with an arm other than the one acted");
    awaiting_ = false;
  }
  bool awaiting() const { return awaiting_; }

 private:
  bool awaiting_ = false;
  std::size_t arm_ = 0;
};

inline std::vector<double> one_hot(std::size_t k, std::size_t a) {
  std::vector<double> p(k, 0.0);
  p[a] = 1.0;
  return p;
}

}  // namespace detail

/// gamma_t = min{1/2, sqrt(5 (1 - alpha) K ln K) / t^alpha}.
inline double ahb_exploration_rate(std::size_t t, double alpha, std::size_t k) {
  if (t == 0) throw std::invalid_argument("exploration rate: rounds start at 1");
  const double kd = static_cast<double>(k);
  const double v = std::sqrt(5.0 * (1.0 - alpha) * kd * std::log(kd)) / std::pow(static_cast<double>(t), alpha);
  return std::min(0.5, v);
}

/// Centered importance-weighted estimate: center everywhere except the
/// chosen arm, which gets (observed - center) / p_chosen + center.
inline std::vector<double> importance_estimate(double observed, std::size_t chosen, std::span<const double> probs,
                                               double center) {
  if (chosen >= probs.size()) throw std::out_of_range("importance_estimate: arm index out of range");
  if (!(probs[chosen] > 0.0)) throw std::invalid_argument("importance_estimate: chosen arm has zero probability");
  std::vector<double> est(probs.size(), center);
  est[chosen] = (observed - center) / probs[chosen] + center;
  return est;
}

class AhbPolicy {
 public:
  AhbPolicy(std::size_t k, double alpha) : k_(k), alpha_(alpha) {
    if (k < 2) throw std::invalid_argument("AHB needs K >= 2");
    if (!(alpha >= 0.5 && alpha < 1.0)) throw std::invalid_argument("AHB: alpha must lie in [1/2, 1)");
  }

  Action act(Stream& rng) {
    Action out;
    if (t_ <= k_) {
      out.arm = t_ - 1;
      out.probs = detail::one_hot(k_, out.arm);
    } else {
      q_ = adahedge_weights(*engine_);
      gamma_ = ahb_exploration_rate(t_, alpha_, k_);
      out.probs.resize(k_);
      for (std::size_t a = 0; a < k_; ++a)
        out.probs[a] = (1.0 - gamma_) * q_[a] + gamma_ / static_cast<double>(k_);
      out.arm = detail::draw_index(out.probs, rng);
    }
    guard_.on_act(out.arm);
    p_ = out.probs;
    return out;
  }

  void observe(std::size_t arm, double reward) {
    guard_.on_observe(arm);
    last_ = StepTrace{};
    last_.payoff = reward;
    last_.chosen_prob = p_[arm];
    if (t_ <= k_) {
      warm_sum_ += reward;
      if (t_ == k_) {
        center_ = warm_sum_ / static_cast<double>(k_);
        engine_.emplace(Regularizer::Entropic, k_);
      }
    } else {
      last_.estimates = importance_estimate(reward, arm, p_, center_);
      // The gap is taken against the pre-mix weights q_t.
      const HedgeStep step = advance_with(*engine_, q_, last_.estimates);
      last_.engine_step = true;
      last_.gap = step.gap;
      last_.rate = step.rate;
    }
    ++t_;
  }

  std::size_t num_arms() const { return k_; }
  double alpha() const { return alpha_; }
  /// Index of the next round to be played (1-based).
  std::size_t round() const { return t_; }
  bool warmed_up() const { return engine_.has_value(); }
  double center() const { return center_; }
  const std::optional<HedgeState>& engine() const { return engine_; }
  /// gamma_t and q_t of the most recent main-phase act.
  double last_gamma() const { return gamma_; }
  const std::vector<double>& last_pre_mix() const { return q_; }
  const StepTrace& last_step() const { return last_; }

 private:
  std::size_t k_;
  double alpha_;
  std::size_t t_ = 1;
  double warm_sum_ = 0.0;
  double center_ = 0.0;
  double gamma_ = 0.0;
  std::optional<HedgeState> engine_;
  std::vector<double> q_, p_;
  detail::Alternation guard_;
  StepTrace last_;
};

/// AdaHedge (entropic) or AdaFTRL (1/2-Tsallis) with a known upper bound M
/// on the payoffs: estimates are centered at M and arms are drawn from the
/// engine weights directly.
class KnownMPolicy {
 public:
  KnownMPolicy(std::size_t k, double upper, Regularizer kind) : upper_(upper), engine_(kind, k) {
    if (k < 2) throw std::invalid_argument("known-M policy needs K >= 2");
    if (!std::isfinite(upper)) throw std::invalid_argument("known-M policy: M must be finite");
  }

  Action act(Stream& rng) {
    Action out;
    out.probs = hedge_weights(engine_);
    out.arm = detail::draw_index(out.probs, rng);
    guard_.on_act(out.arm);
    p_ = out.probs;
    return out;
  }

  void observe(std::size_t arm, double reward) {
    guard_.on_observe(arm);
    last_ = StepTrace{};
    last_.payoff = reward;
    last_.chosen_prob = p_[arm];
    last_.estimates = importance_estimate(reward, arm, p_, upper_);
    const HedgeStep step = advance_with(engine_, p_, last_.estimates);
    last_.engine_step = true;
    last_.gap = step.gap;
    last_.rate = step.rate;
    ++t_;
  }

  std::size_t num_arms() const { return engine_.num_arms(); }
  double upper() const { return upper_; }
  Regularizer kind() const { return engine_.kind; }
  std::size_t round() const { return t_; }
  const HedgeState& engine() const { return engine_; }
  const StepTrace& last_step() const { return last_; }

 private:
  double upper_;
  HedgeState engine_;
  std::size_t t_ = 1;
  std::vector<double> p_;
  detail::Alternation guard_;
  StepTrace last_;
};

}  // namespace rangeband
