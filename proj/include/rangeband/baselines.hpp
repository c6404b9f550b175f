#pragma once

// Comparison strategies: UCB(sigma), range-estimating UCB, UCB with an
// inflated exploration function, follow-the-leader, uniform random play.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rangeband/policies.hpp"

namespace rangeband {

/// mean + 1.2 sigma sqrt(2 ln T / N), T the fixed horizon.
inline double ucb_index(double mean_est, std::uint64_t count, std::uint64_t horizon, double sigma) {
  if (count == 0) throw std::invalid_argument("ucb_index: arm never pulled");
  return mean_est + 1.2 * sigma * std::sqrt(2.0 * std::log(static_cast<double>(horizon)) / static_cast<double>(count));
}

/// mean + r sqrt(2 ln T / N) with r the observed payoff range.
inline double range_ucb_index(double mean_est, std::uint64_t count, std::uint64_t horizon, double range_est) {
  if (count == 0) throw std::invalid_argument("range_ucb_index: arm never pulled");
  return mean_est + range_est * std::sqrt(2.0 * std::log(static_cast<double>(horizon)) / static_cast<double>(count));
}

/// mean + sqrt(phi(t) / N).
inline double inflated_ucb_index(double mean_est, std::uint64_t count, double t,
                                 const std::function<double(double)>& phi) {
  if (count == 0) throw std::invalid_argument("inflated_ucb_index: arm never pulled");
  return mean_est + std::sqrt(phi(t) / static_cast<double>(count));
}

/// Default exploration function (ln t)^2: grows faster than ln t, slower than t.
inline double log_squared(double t) {
  const double l = std::log(t);
  return l * l;
}

/// Pull counts, payoff sums and the pooled min/max of everything observed.
struct UcbBookkeeping {
  std::vector<std::uint64_t> counts;
  std::vector<double> sums;
  double min_seen = std::numeric_limits<double>::infinity();
  double max_seen = -std::numeric_limits<double>::infinity();

  explicit UcbBookkeeping(std::size_t k) : counts(k, 0), sums(k, 0.0) {}

  void record(std::size_t arm, double y) {
    ++counts[arm];
    sums[arm] += y;
    min_seen = std::min(min_seen, y);
    max_seen = std::max(max_seen, y);
  }
  double mean(std::size_t arm) const {
    if (counts[arm] == 0) throw std::logic_error("empirical mean of an unpulled arm");
    return sums[arm] / static_cast<double>(counts[arm]);
  }
  double range_estimate() const { return max_seen >= min_seen ? max_seen - min_seen : 0.0; }
};

/// Index policies and FTL: one forced pull per arm in index order, then the
/// argmax of the index with ties broken toward the lowest arm.
class IndexPolicy {
 public:
  enum class Rule { Sigma, Range, Inflated, Leader };

  IndexPolicy(std::size_t k, Rule rule, std::uint64_t horizon, double sigma = 1.0,
              std::function<double(double)> phi = log_squared)
      : rule_(rule), horizon_(horizon), sigma_(sigma), phi_(std::move(phi)), book_(k) {
    if (k < 2) throw std::invalid_argument("index policy needs K >= 2");
    if ((rule == Rule::Sigma || rule == Rule::Range) && horizon < 2)
      throw std::invalid_argument("index policy: horizon must be >= 2");
    if (rule == Rule::Sigma && !(sigma >= 0.0 && std::isfinite(sigma)))
      throw std::invalid_argument("ucb: sigma must be finite and nonnegative");
  }

  double index(std::size_t a) const {
    const double mu = book_.mean(a);
    switch (rule_) {
      case Rule::Sigma:
        return ucb_index(mu, book_.counts[a], horizon_, sigma_);
      case Rule::Range:
        return range_ucb_index(mu, book_.counts[a], horizon_, book_.range_estimate());
      case Rule::Inflated:
        return inflated_ucb_index(mu, book_.counts[a], static_cast<double>(t_), phi_);
      case Rule::Leader:
        return mu;
    }
    return mu;
  }

  Action act(Stream&) {
    const std::size_t k = book_.counts.size();
    std::size_t arm = 0;
    if (t_ <= k) {
      arm = t_ - 1;
    } else {
      double best = index(0);
      for (std::size_t a = 1; a < k; ++a) {
        const double v = index(a);
        if (v > best) {
          best = v;
          arm = a;
        }
      }
    }
    guard_.on_act(arm);
    return {arm, detail::one_hot(k, arm)};
  }

  void observe(std::size_t arm, double reward) {
    guard_.on_observe(arm);
    book_.record(arm, reward);
    ++t_;
  }

  Rule rule() const { return rule_; }
  std::size_t round() const { return t_; }
  const UcbBookkeeping& book() const { return book_; }

 private:
  Rule rule_;
  std::uint64_t horizon_;
  double sigma_;
  std::function<double(double)> phi_;
  UcbBookkeeping book_;
  std::uint64_t t_ = 1;
  detail::Alternation guard_;
};

class RandomPolicy {
 public:
  explicit RandomPolicy(std::size_t k) : k_(k) {
    if (k < 1) throw std::invalid_argument("random policy needs K >= 1");
  }

  Action act(Stream& rng) {
    const std::size_t arm = rng.index(k_);
    guard_.on_act(arm);
    return {arm, std::vector<double>(k_, 1.0 / static_cast<double>(k_))};
  }

  void observe(std::size_t arm, double) {
    guard_.on_observe(arm);
    ++t_;
  }

  std::size_t round() const { return t_; }

 private:
  std::size_t k_;
  std::size_t t_ = 1;
  detail::Alternation guard_;
};

}  // namespace rangeband
