#pragma once

// Adversarial linear bandits over a finite action set in R^d: G-optimal
// exploration design, least-squares payoff estimates and AdaHedge with
// design-mixed exploration.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rangeband/distributions.hpp"
#include "rangeband/hedge.hpp"
#include "rangeband/policies.hpp"
#include "rangeband/rng.hpp"

namespace rangeband {

/// K actions in R^d, stored one per row. Must span R^d.
class ActionSet {
 public:
  explicit ActionSet(Eigen::MatrixXd rows) : rows_(std::move(rows)) {
    if (rows_.rows() == 0 || rows_.cols() == 0) throw std::invalid_argument("action set: empty");
    if (!rows_.allFinite()) throw std::invalid_argument("action set: non-finite coordinates");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(rows_);
    lu.setThreshold(1e-10);
    if (lu.rank() < rows_.cols())
      throw std::invalid_argument("action set: actions span a space of dimension " + std::to_string(lu.rank()) +
                                  " < d = " + std::to_string(rows_.cols()));
  }

  static ActionSet from_vectors(const std::vector<std::vector<double>>& v) {
    if (v.empty()) throw std::invalid_argument("action set: empty");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.front().size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i].size() != v.front().size()) throw std::invalid_argument("action set: ragged action vectors");
      for (std::size_t j = 0; j < v[i].size(); ++j)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i][j];
    }
    return ActionSet(std::move(m));
  }

  /// Standard basis of R^d.
  static ActionSet basis(std::size_t d) {
    return ActionSet(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
  }

  std::size_t size() const { return static_cast<std::size_t>(rows_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(rows_.cols()); }
  Eigen::VectorXd action(std::size_t i) const { return rows_.row(static_cast<Eigen::Index>(i)).transpose(); }
  const Eigen::MatrixXd& matrix() const { return rows_; }

 private:
  Eigen::MatrixXd rows_;
};

/// sum_x w(x) x x^T.
inline Eigen::MatrixXd design_matrix(const ActionSet& actions, const Eigen::VectorXd& weights) {
  if (static_cast<std::size_t>(weights.size()) != actions.size())
    throw std::invalid_argument("design_matrix: weight vector has wrong length");
  const Eigen::MatrixXd& x = actions.matrix();
  return x.transpose() * weights.asDiagonal() * x;
}

struct DesignDistribution {
  Eigen::VectorXd weights;
  Eigen::MatrixXd matrix;
  double gap = 0.0;  // max_x x^T M^-1 x
  std::size_t iterations = 0;
};

namespace detail {

inline Eigen::VectorXd leverages(const ActionSet& actions, const Eigen::LLT<Eigen::MatrixXd>& llt) {
  const Eigen::MatrixXd solved = llt.solve(actions.matrix().transpose());  // M^-1 X^T
  return (actions.matrix().array() * solved.transpose().array()).rowwise().sum();
}

}  // namespace detail

/// Frank-Wolfe on the log-det design criterion with the Kiefer-Wolfowitz
/// step size, started from uniform weights and stopped once
/// max_x x^T M(pi)^-1 x <= d (1 + tol).
inline DesignDistribution optimal_design(const ActionSet& actions, double tol = 0.01, std::size_t max_iter = 10000) {
  const std::size_t k = actions.size();
  const double d = static_cast<double>(actions.dim());
  DesignDistribution out;
  out.weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(k), 1.0 / static_cast<double>(k));
  for (std::size_t it = 0;; ++it) {
    out.matrix = design_matrix(actions, out.weights);
    Eigen::LLT<Eigen::MatrixXd> llt(out.matrix);
    if (llt.info() != Eigen::Success) throw std::runtime_error("optimal_design: design matrix lost definiteness");
    const Eigen::VectorXd g = detail::leverages(actions, llt);
    Eigen::Index j = 0;
    out.gap = g.maxCoeff(&j);
    out.iterations = it;
    if (out.gap <= d * (1.0 + tol)) return out;
    if (it == max_iter) throw std::runtime_error("optimal_design: no convergence within the iteration budget");
    const double step = (out.gap / d - 1.0) / (out.gap - 1.0);
    out.weights *= (1.0 - step);
    out.weights[j] += step;
  }
}

/// Least-squares estimate M(p)^-1 x_chosen <x_chosen, y>, given the observed payoff.
inline Eigen::VectorXd linear_estimate(const Eigen::VectorXd& mix_weights, const ActionSet& actions,
                                       std::size_t chosen, double payoff) {
  const Eigen::MatrixXd m = design_matrix(actions, mix_weights);
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw std::logic_error("linear_estimate: singular design matrix");
  return llt.solve(actions.action(chosen) * payoff);
}

enum class LinearRateForm {
  Printed,  // min{1/2, sqrt(2.5 d ln K t^-1/2)}
  Outer     // min{1/2, sqrt(2.5 d ln K) t^-1/2}
};

inline double linear_exploration_rate(std::size_t t, std::size_t d, std::size_t k,
                                      LinearRateForm form = LinearRateForm::Printed) {
  if (t == 0) throw std::invalid_argument("exploration rate: rounds start at 1");
  const double base = 2.5 * static_cast<double>(d) * std::log(static_cast<double>(k));
  const double td = static_cast<double>(t);
  const double v = form == LinearRateForm::Printed ? std::sqrt(base / std::sqrt(td)) : std::sqrt(base) / std::sqrt(td);
  return std::min(0.5, v);
}

/// Payoff vectors y_t with <x, y_t> in [m, M] for every action x.
class LinearSequence {
 public:
  LinearSequence(std::vector<Eigen::VectorXd> ys, Interval range, const ActionSet& actions)
      : ys_(std::move(ys)), range_(range) {
    if (ys_.empty()) throw std::invalid_argument("linear sequence: horizon must be >= 1");
    if (!(range_.lo <= 0.0 && 0.0 <= range_.hi)) throw std::invalid_argument("linear sequence: range must contain 0");
    for (const auto& y : ys_) {
      if (static_cast<std::size_t>(y.size()) != actions.dim())
        throw std::invalid_argument("linear sequence: payoff vector has wrong dimension");
      const Eigen::VectorXd proj = actions.matrix() * y;
      if (proj.minCoeff() < range_.lo || proj.maxCoeff() > range_.hi)
        throw std::invalid_argument("linear sequence: payoff outside declared range");
    }
  }

  std::size_t horizon() const { return ys_.size(); }
  Interval range() const { return range_; }
  const Eigen::VectorXd& at(std::size_t t) const { return ys_.at(t); }

 private:
  std::vector<Eigen::VectorXd> ys_;
  Interval range_;
};

/// AdaHedge over the actions fed with projected least-squares estimates;
/// arms are drawn from p_t = (1 - gamma_t) q_t + gamma_t pi.
class LinearAhbPolicy {
 public:
  LinearAhbPolicy(ActionSet actions, Eigen::VectorXd exploration, LinearRateForm form = LinearRateForm::Printed)
      : actions_(std::move(actions)),
        pi_(std::move(exploration)),
        form_(form),
        engine_(Regularizer::Entropic, actions_.size()) {
    if (static_cast<std::size_t>(pi_.size()) != actions_.size())
      throw std::invalid_argument("linear AHB: exploration distribution has wrong length");
  }

  /// Uses the G-optimal design as the exploration distribution.
  explicit LinearAhbPolicy(ActionSet actions, LinearRateForm form = LinearRateForm::Printed)
      : LinearAhbPolicy(actions, optimal_design(actions).weights, form) {}

  Action act(Stream& rng) {
    q_ = adahedge_weights(engine_);
    gamma_ = linear_exploration_rate(t_, actions_.dim(), actions_.size(), form_);
    Action out;
    out.probs.resize(q_.size());
    for (std::size_t a = 0; a < q_.size(); ++a)
      out.probs[a] = (1.0 - gamma_) * q_[a] + gamma_ * pi_[static_cast<Eigen::Index>(a)];
    out.arm = detail::draw_index(out.probs, rng);
    guard_.on_act(out.arm);
    p_ = out.probs;
    return out;
  }

  void observe(std::size_t chosen, double payoff) {
    guard_.on_observe(chosen);
    const Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(p_.data(), static_cast<Eigen::Index>(p_.size()));
    last_estimate_ = linear_estimate(p, actions_, chosen, payoff);
    const Eigen::VectorXd proj = actions_.matrix() * last_estimate_;
    last_ = StepTrace{};
    last_.payoff = payoff;
    last_.chosen_prob = p_[chosen];
    last_.estimates.assign(proj.data(), proj.data() + proj.size());
    const HedgeStep step = advance_with(engine_, q_, last_.estimates);
    last_.engine_step = true;
    last_.gap = step.gap;
    last_.rate = step.rate;
    ++t_;
  }

  const ActionSet& actions() const { return actions_; }
  const Eigen::VectorXd& exploration() const { return pi_; }
  const HedgeState& engine() const { return engine_; }
  std::size_t round() const { return t_; }
  double last_gamma() const { return gamma_; }
  const std::vector<double>& last_pre_mix() const { return q_; }
  const Eigen::VectorXd& last_estimate() const { return last_estimate_; }
  const StepTrace& last_step() const { return last_; }

 private:
  ActionSet actions_;
  Eigen::VectorXd pi_;
  LinearRateForm form_;
  HedgeState engine_;
  std::size_t t_ = 1;
  double gamma_ = 0.0;
  std::vector<double> q_, p_;
  Eigen::VectorXd last_estimate_;
  detail::Alternation guard_;
  StepTrace last_;
};

/// One pass over a fixed sequence.
struct LinearRunRecord {
  std::vector<std::uint32_t> actions;
  double regret = 0.0;       // best fixed action total minus expected total under p_t
  double best_total = 0.0;
};

inline LinearRunRecord run_linear(const ActionSet& actions, const LinearSequence& seq, std::uint64_t seed,
                                  LinearRateForm form = LinearRateForm::Printed) {
  LinearAhbPolicy policy(actions, form);
  Stream rng(seed);
  LinearRunRecord rec;
  rec.actions.reserve(seq.horizon());
  Eigen::VectorXd cumulative = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(actions.size()));
  double expected_total = 0.0;
  for (std::size_t t = 0; t < seq.horizon(); ++t) {
    const Eigen::VectorXd payoffs = actions.matrix() * seq.at(t);
    const Action a = policy.act(rng);
    for (std::size_t x = 0; x < a.probs.size(); ++x) expected_total += a.probs[x] * payoffs[static_cast<Eigen::Index>(x)];
    policy.observe(a.arm, payoffs[static_cast<Eigen::Index>(a.arm)]);
    cumulative += payoffs;
    rec.actions.push_back(static_cast<std::uint32_t>(a.arm));
  }
  rec.best_total = cumulative.maxCoeff();
  rec.regret = rec.best_total - expected_total;
  return rec;
}

}  // namespace rangeband
