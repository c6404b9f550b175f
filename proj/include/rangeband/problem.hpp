#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rangeband/distributions.hpp"

namespace rangeband {

/// A K-vector of arm laws with its derived means, gaps and common range.
class BanditProblem {
 public:
  explicit BanditProblem(std::vector<ArmDistribution> arms) : arms_(std::move(arms)) {
    if (arms_.empty()) throw std::invalid_argument("bandit problem needs at least one arm");
    means_.reserve(arms_.size());
    range_ = {INFINITY, -INFINITY};
    for (const auto& a : arms_) {
      validate(a);
      means_.push_back(arm_mean(a));
      const Interval s = support(a);
      range_.lo = std::min(range_.lo, s.lo);
      range_.hi = std::max(range_.hi, s.hi);
    }
    best_mean_ = *std::max_element(means_.begin(), means_.end());
    gaps_.reserve(means_.size());
    for (double m : means_) gaps_.push_back(best_mean_ - m);
  }

  std::size_t num_arms() const { return arms_.size(); }
  const std::vector<ArmDistribution>& arms() const { return arms_; }
  const ArmDistribution& arm(std::size_t a) const { return arms_.at(a); }
  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& gaps() const { return gaps_; }
  double best_mean() const { return best_mean_; }
  /// Smallest interval containing every arm's support. May be degenerate
  /// (lo == hi) when all arms are the same point mass.
  Interval range() const { return range_; }

  std::vector<std::size_t> optimal_arms() const {
    std::vector<std::size_t> out;
    for (std::size_t a = 0; a < gaps_.size(); ++a)
      if (gaps_[a] == 0.0) out.push_back(a);
    return out;
  }

  double sample(std::size_t a, Stream& rng) const { return sample_arm(arms_.at(a), rng); }

  /// Every payoff multiplied by c > 0.
  BanditProblem scaled(double c) const {
    std::vector<ArmDistribution> out;
    out.reserve(arms_.size());
    for (const auto& a : arms_) out.push_back(rangeband::scaled(a, c));
    return BanditProblem(std::move(out));
  }

 private:
  std::vector<ArmDistribution> arms_;
  std::vector<double> means_;
  std::vector<double> gaps_;
  double best_mean_ = 0.0;
  Interval range_;
};

inline Interval support_range(const BanditProblem& p) { return p.range(); }

/// Sum over arms of gap times pull count.
inline double pseudo_regret(const BanditProblem& p, std::span<const std::uint64_t> counts) {
  if (counts.size() != p.num_arms()) throw std::invalid_argument("pseudo_regret: count vector has wrong length");
  double r = 0.0;
  for (std::size_t a = 0; a < counts.size(); ++a) r += p.gaps()[a] * static_cast<double>(counts[a]);
  return r;
}

/// Payoff table fixed before play: row t is the vector y_t.
class ObliviousSequence {
 public:
  ObliviousSequence(std::vector<std::vector<double>> rows, Interval range) : rows_(std::move(rows)), range_(range) {
    if (rows_.empty()) throw std::invalid_argument("oblivious sequence: horizon must be >= 1");
    if (!(range_.lo <= range_.hi)) throw std::invalid_argument("oblivious sequence: empty range");
    const std::size_t k = rows_.front().size();
    if (k == 0) throw std::invalid_argument("oblivious sequence: rows must be nonempty");
    for (const auto& r : rows_) {
      if (r.size() != k) throw std::invalid_argument("oblivious sequence: ragged rows");
      for (double y : r)
        if (!range_.contains(y)) throw std::invalid_argument("oblivious sequence: payoff outside declared range");
    }
  }

  std::size_t horizon() const { return rows_.size(); }
  std::size_t num_arms() const { return rows_.front().size(); }
  Interval range() const { return range_; }
  const std::vector<double>& row(std::size_t t) const { return rows_.at(t); }
  double payoff(std::size_t t, std::size_t a) const { return rows_[t][a]; }

  ObliviousSequence affine(double c, double b) const {
    if (!(c > 0.0)) throw std::invalid_argument("affine map needs a positive factor");
    auto rows = rows_;
    for (auto& r : rows)
      for (double& y : r) y = c * y + b;
    return ObliviousSequence(std::move(rows), {c * range_.lo + b, c * range_.hi + b});
  }

 private:
  std::vector<std::vector<double>> rows_;
  Interval range_;
};

/// Trajectory of one simulated run.
struct RunRecord {
  std::vector<std::uint32_t> actions;
  std::vector<std::uint64_t> counts;
  std::vector<double> regret;  // pseudo-regret after each round
  std::uint64_t seed = 0;

  std::size_t horizon() const { return actions.size(); }
  double final_regret() const { return regret.empty() ? 0.0 : regret.back(); }
};

}  // namespace rangeband
