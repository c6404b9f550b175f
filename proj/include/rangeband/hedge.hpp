#pragma once

// Full-information adaptive FTRL over the simplex, with the learning rate
// tuned from cumulative mixability gaps: eta = diameter / sum(gaps).
// Two regularizers: negentropy (AdaHedge) and the 1/2-Tsallis entropy.
// Payoffs are gains (larger is better).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rangeband {

enum class Regularizer { Entropic, Tsallis };

inline constexpr double kInfiniteRate = std::numeric_limits<double>::infinity();

/// Range of the regularizer over the simplex.
inline double regularizer_diameter(Regularizer kind, std::size_t k) {
  const double kd = static_cast<double>(k);
  return kind == Regularizer::Entropic ? std::log(kd) : 2.0 * (std::sqrt(kd) - 1.0);
}

struct HedgeState {
  Regularizer kind = Regularizer::Entropic;
  std::vector<double> totals;  // cumulative payoff vector S
  double cumulative_gap = 0.0;
  double diameter = 0.0;

  HedgeState() = default;
  HedgeState(Regularizer r, std::size_t k) : kind(r), totals(k, 0.0), diameter(regularizer_diameter(r, k)) {
    if (k == 0) throw std::invalid_argument("hedge state needs at least one arm");
  }

  std::size_t num_arms() const { return totals.size(); }
  /// +infinity until the first strictly positive gap.
  double rate() const { return cumulative_gap > 0.0 ? diameter / cumulative_gap : kInfiniteRate; }
};

namespace detail {

inline std::vector<double> uniform_over_argmax(std::span<const double> s) {
  const double best = *std::max_element(s.begin(), s.end());
  std::vector<double> w(s.size(), 0.0);
  const auto ties = static_cast<double>(std::count(s.begin(), s.end(), best));
  for (std::size_t a = 0; a < s.size(); ++a)
    if (s[a] == best) w[a] = 1.0 / ties;
  return w;
}

inline void check_finite(std::span<const double> z, const char* what) {
  for (double x : z)
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + ": non-finite input");
}

/// max_a z_a - <w, z> / sum(w), computed from z - max z so that constant
/// vectors give exactly zero.
inline double max_minus_mean(std::span<const double> w, std::span<const double> z) {
  const double zmax = *std::max_element(z.begin(), z.end());
  double num = 0.0, den = 0.0;
  for (std::size_t a = 0; a < z.size(); ++a) {
    num += w[a] * (zmax - z[a]);
    den += w[a];
  }
  return num / den;
}

}  // namespace detail

/// Exponential weights w_a proportional to exp(eta * S_a); uniform over the
/// argmax of S while eta is infinite.
inline std::vector<double> adahedge_weights(const HedgeState& s) {
  const double eta = s.rate();
  if (std::isinf(eta)) return detail::uniform_over_argmax(s.totals);
  const double smax = *std::max_element(s.totals.begin(), s.totals.end());
  std::vector<double> w(s.totals.size());
  double total = 0.0;
  for (std::size_t a = 0; a < w.size(); ++a) {
    w[a] = std::exp(eta * (s.totals[a] - smax));
    total += w[a];
  }
  for (double& x : w) x /= total;
  return w;
}

/// Closed-form mixability gap of the negentropy:
/// -<w,z> + log(sum_a w_a exp(eta z_a)) / eta, or max z - <w,z> at eta = inf.
inline double entropic_gap(std::span<const double> w, std::span<const double> z, double eta) {
  if (w.size() != z.size()) throw std::invalid_argument("entropic_gap: size mismatch");
  if (std::isinf(eta)) return std::max(0.0, detail::max_minus_mean(w, z));

  // Center at the weighted mean so the log term is the cumulant generating
  // function of a zero-mean variable; use expm1/log1p while it is small.
  double wsum = 0.0, zbar = 0.0;
  for (std::size_t a = 0; a < z.size(); ++a) {
    wsum += w[a];
    zbar += w[a] * z[a];
  }
  zbar /= wsum;
  const double zmax = *std::max_element(z.begin(), z.end());
  if (std::all_of(z.begin(), z.end(), [&](double x) { return x == zmax; })) return 0.0;

  double umax = -INFINITY;
  for (std::size_t a = 0; a < z.size(); ++a)
    if (w[a] > 0.0) umax = std::max(umax, eta * (z[a] - zbar));

  double cgf;
  if (umax <= 1.0) {
    double acc = 0.0;
    for (std::size_t a = 0; a < z.size(); ++a)
      if (w[a] > 0.0) acc += (w[a] / wsum) * std::expm1(eta * (z[a] - zbar));
    cgf = std::log1p(acc);
  } else {
    double acc = 0.0;
    for (std::size_t a = 0; a < z.size(); ++a)
      if (w[a] > 0.0) acc += (w[a] / wsum) * std::exp(eta * (z[a] - zbar) - umax);
    cgf = umax + std::log(acc);
  }
  return std::max(0.0, cgf / eta);
}

/// The constant c(z) > max z with sum_a (c - z_a)^-2 = 1. Safeguarded
/// Newton on the decreasing convex residual, bracketed by
/// [max z + 1, max z + sqrt(K)]; starting from the left end the Newton
/// iterates increase monotonically toward the root.
inline double solve_normalizer(std::span<const double> z) {
  if (z.empty()) throw std::invalid_argument("solve_normalizer: empty input");
  detail::check_finite(z, "solve_normalizer");
  const double zmax = *std::max_element(z.begin(), z.end());
  const double k = static_cast<double>(z.size());
  if (z.size() == 1) return zmax + 1.0;

  // Solved in coordinates shifted by the max, where the root lies in [1, sqrt K].
  std::vector<double> u(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) u[i] = z[i] - zmax;
  auto residual = [&](double c, double* slope) {
    double f = -1.0, fp = 0.0;
    for (double x : u) {
      const double inv = 1.0 / (c - x);
      f += inv * inv;
      fp -= 2.0 * inv * inv * inv;
    }
    if (slope) *slope = fp;
    return f;
  };

  double lo = 1.0;
  double hi = std::sqrt(k);
  if (residual(hi, nullptr) >= 0.0) return zmax + hi;  // all coordinates tied

  double c = lo;
  for (int it = 0; it < 200; ++it) {
    double fp = 0.0;
    const double f = residual(c, &fp);
    if (f == 0.0) break;
    if (f > 0.0)
      lo = c;
    else
      hi = c;
    double next = c - f / fp;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - c) <= 4.0 * std::numeric_limits<double>::epsilon() * c || hi - lo <= 0.0) {
      c = next;
      break;
    }
    c = next;
  }
  const double res = residual(c, nullptr);
  if (!(std::abs(res) <= 1e-12)) throw std::runtime_error("solve_normalizer: residual check failed");
  return zmax + c;
}

/// argmax over the simplex of <p, eta S> + sum 2 sqrt(p_a); uniform over the
/// argmax of S while eta is infinite.
inline std::vector<double> tsallis_weights(const HedgeState& s) {
  const double eta = s.rate();
  if (std::isinf(eta)) return detail::uniform_over_argmax(s.totals);
  const double smax = *std::max_element(s.totals.begin(), s.totals.end());
  std::vector<double> z(s.totals.size());
  for (std::size_t a = 0; a < z.size(); ++a) z[a] = eta * (s.totals[a] - smax);
  const double c = solve_normalizer(z);
  std::vector<double> p(z.size());
  double total = 0.0;
  for (std::size_t a = 0; a < z.size(); ++a) {
    const double r = c - z[a];
    p[a] = 1.0 / (r * r);
    total += p[a];
  }
  for (double& x : p) x /= total;
  return p;
}

/// Generalized mixability gap of the 1/2-Tsallis entropy at weights w:
///   max_p <w - p, -z> - B(p, w) / eta,
/// evaluated through the closed-form maximizer of <p, grad H(w) + eta z> - H(p).
/// With H(p) = -2 sum sqrt(p_a) that maximum is c + sum_a 1/(c - v_a),
/// v = -1/sqrt(w) + eta z, c = solve_normalizer(v).
inline double tsallis_gap(std::span<const double> w, std::span<const double> z, double eta) {
  if (w.size() != z.size()) throw std::invalid_argument("tsallis_gap: size mismatch");
  if (std::isinf(eta)) return std::max(0.0, detail::max_minus_mean(w, z));
  const double zmax = *std::max_element(z.begin(), z.end());
  if (std::all_of(z.begin(), z.end(), [&](double x) { return x == zmax; })) return 0.0;

  double wsum = 0.0, zbar = 0.0;
  for (std::size_t a = 0; a < z.size(); ++a) {
    if (!(w[a] > 0.0)) throw std::invalid_argument("tsallis_gap: weights must be positive when eta is finite");
    wsum += w[a];
    zbar += w[a] * z[a];
  }
  zbar /= wsum;

  // Translation by zbar leaves the gap unchanged and keeps eta*z small.
  std::vector<double> v(z.size());
  double root_sum = 0.0;
  for (std::size_t a = 0; a < z.size(); ++a) {
    const double p = w[a] / wsum;
    v[a] = -1.0 / std::sqrt(p) + eta * (z[a] - zbar);
    root_sum += std::sqrt(p);
  }
  const double c = solve_normalizer(v);
  double value = c - root_sum;
  for (double va : v) value += 1.0 / (c - va);
  return std::max(0.0, value / eta);
}

inline std::vector<double> hedge_weights(const HedgeState& s) {
  return s.kind == Regularizer::Entropic ? adahedge_weights(s) : tsallis_weights(s);
}

inline double mixability_gap(Regularizer kind, std::span<const double> w, std::span<const double> z, double eta) {
  return kind == Regularizer::Entropic ? entropic_gap(w, z, eta) : tsallis_gap(w, z, eta);
}

/// One engine step with its diagnostics.
struct HedgeStep {
  std::vector<double> weights;  // weights the gap was computed with
  double rate = kInfiniteRate;  // learning rate in force during the step
  double gap = 0.0;
};

/// Advances in place using precomputed current weights.
inline HedgeStep advance_with(HedgeState& s, std::vector<double> weights, std::span<const double> payoffs) {
  if (payoffs.size() != s.num_arms()) throw std::invalid_argument("engine advance: payoff vector has wrong length");
  detail::check_finite(payoffs, "engine advance");
  HedgeStep step{std::move(weights), s.rate(), 0.0};
  step.gap = mixability_gap(s.kind, step.weights, payoffs, step.rate);
  for (std::size_t a = 0; a < payoffs.size(); ++a) s.totals[a] += payoffs[a];
  s.cumulative_gap += step.gap;
  return step;
}

inline HedgeStep advance_in_place(HedgeState& s, std::span<const double> payoffs) {
  return advance_with(s, hedge_weights(s), payoffs);
}

/// Pure form: returns the successor state.
inline HedgeState engine_advance(HedgeState s, std::span<const double> payoffs) {
  advance_in_place(s, payoffs);
  return s;
}

}  // namespace rangeband
