#pragma once

// Runtime versions of the lower-bound constructions: Bernoulli and discrete
// KL divergences, the alternative problem that makes one suboptimal arm
// optimal through a far atom, the vanishing-K_inf witness, and the
// distribution-free rate and trade-off floor formulas.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "rangeband/distributions.hpp"
#include "rangeband/problem.hpp"

namespace rangeband {

namespace detail {
/// x ln(x / y) with 0 ln 0 = 0 and x ln(x / 0) = +inf for x > 0.
inline double xlogxy(double x, double y) {
  if (x == 0.0) return 0.0;
  if (y == 0.0) return std::numeric_limits<double>::infinity();
  return x * std::log(x / y);
}
}  // namespace detail

inline double kl_bernoulli(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0))
    throw std::invalid_argument("kl_bernoulli: parameters must lie in [0, 1]");
  return detail::xlogxy(p, q) + detail::xlogxy(1.0 - p, 1.0 - q);
}

/// KL(nu, nu') for finitely supported laws; atoms within merge_tol are identified.
inline double kl_discrete(const FiniteSupport& nu, const FiniteSupport& nu_alt, double merge_tol = 1e-12) {
  const auto p = atomic_form(ArmDistribution{nu}, merge_tol);
  const auto q = atomic_form(ArmDistribution{nu_alt}, merge_tol);
  double kl = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < p->atoms.size(); ++i) {
    while (j < q->atoms.size() && q->atoms[j] < p->atoms[i] - merge_tol) ++j;
    const bool matched = j < q->atoms.size() && std::abs(q->atoms[j] - p->atoms[i]) <= merge_tol;
    kl += detail::xlogxy(p->probs[i], matched ? q->probs[j] : 0.0);
  }
  return std::max(0.0, kl);
}

/// (1 - eps) nu_a + eps * delta at mu_a + 2 Delta_a / eps, replacing arm a.
inline BanditProblem alternative_problem(const BanditProblem& problem, std::size_t arm, double eps) {
  if (arm >= problem.num_arms()) throw std::out_of_range("alternative_problem: arm index out of range");
  if (!(eps > 0.0 && eps <= 0.5)) throw std::invalid_argument("alternative_problem: epsilon must lie in (0, 1/2]");
  const double gap = problem.gaps()[arm];
  if (!(gap > 0.0)) throw std::invalid_argument("alternative_problem: arm is optimal");
  const double atom = problem.means()[arm] + 2.0 * gap / eps;
  std::vector<ArmDistribution> arms = problem.arms();
  arms[arm] = mixture({problem.arm(arm), point_mass(atom)}, {1.0 - eps, eps});
  return BanditProblem(std::move(arms));
}

/// Witness law with mean above `target` at KL distance ln(1/(1-eps)) from nu:
/// (1 - eps) nu + eps * delta at mu + 2 (target - mu) / eps.
/// The KL is evaluated on atoms when nu is atomic, and from the density
/// ratio 1/(1 - eps) on supp(nu) otherwise.
inline std::pair<ArmDistribution, double> kinf_witness(const ArmDistribution& nu, double target, double eps) {
  const double mu = arm_mean(nu);
  if (!(target > mu)) throw std::invalid_argument("kinf_witness: target must exceed the mean");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("kinf_witness: epsilon must lie in (0, 1)");
  const double atom = mu + 2.0 * (target - mu) / eps;
  if (!(atom > support(nu).hi))
    throw std::invalid_argument("kinf_witness: epsilon too large, the added atom must lie beyond supp(nu)");
  ArmDistribution witness = mixture({nu, point_mass(atom)}, {1.0 - eps, eps});
  double kl;
  if (auto atoms = atomic_form(nu)) {
    kl = kl_discrete(*atoms, *atomic_form(witness));
  } else {
    kl = -std::log1p(-eps);
  }
  return {std::move(witness), kl};
}

/// (3 + 5/sqrt(1-alpha)) L sqrt(K ln K) T^max(alpha, 1-alpha) + 10 L K ln K.
inline double phi_adv(double horizon, double alpha, std::size_t k, double range_len) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("phi_adv: alpha must lie in (0, 1)");
  const double kd = static_cast<double>(k);
  const double klk = kd * std::log(kd);
  return (3.0 + 5.0 / std::sqrt(1.0 - alpha)) * range_len * std::sqrt(klk) * std::pow(horizon, std::max(alpha, 1.0 - alpha)) +
         10.0 * range_len * klk;
}

/// Closed form stated for alpha = 1/2: 7 L sqrt(T K ln K) + 10 L K ln K.
/// Note the general form above gives 3 + 5 sqrt(2) ~ 10.07 in place of 7 there.
inline double phi_adv_half(double horizon, std::size_t k, double range_len) {
  const double kd = static_cast<double>(k);
  const double klk = kd * std::log(kd);
  return 7.0 * range_len * std::sqrt(horizon * klk) + 10.0 * range_len * klk;
}

/// (1/16) sum_a Delta_a * T / Phi_free(T).
inline double tradeoff_floor(const BanditProblem& problem, double phi_free_at_t, double horizon) {
  if (!(phi_free_at_t > 0.0)) throw std::invalid_argument("tradeoff_floor: rate value must be positive");
  double gaps = 0.0;
  for (double g : problem.gaps()) gaps += g;
  return gaps / 16.0 * horizon / phi_free_at_t;
}

struct TradeoffCertificate {
  double eps = 0.5;
  double fraction = 0.0;      // E_nu[N_a] / T
  double alt_fraction = 0.0;  // E_nu'[N_a] / T
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Evaluates both sides of
///   (1 - f) ln(1 / (1 - f')) - ln 2 <= 2 ln 2 * eps * E_nu[N_a]
/// and reports whether the inequality holds up to 1e-9.
inline bool certificate_check(TradeoffCertificate& cert, double pulls, std::uint64_t horizon) {
  if (!(pulls >= 0.0 && pulls <= static_cast<double>(horizon)))
    throw std::invalid_argument("certificate_check: pull count must lie in [0, T]");
  if (!(cert.fraction >= 0.0 && cert.fraction <= 1.0 && cert.alt_fraction >= 0.0 && cert.alt_fraction <= 1.0))
    throw std::invalid_argument("certificate_check: fractions must lie in [0, 1]");
  if (!(cert.eps > 0.0 && cert.eps <= 0.5)) throw std::invalid_argument("certificate_check: epsilon must lie in (0, 1/2]");
  const double keep = 1.0 - cert.fraction;
  const double log_term = cert.alt_fraction >= 1.0 ? std::numeric_limits<double>::infinity() : -std::log1p(-cert.alt_fraction);
  cert.lhs = (keep == 0.0 ? 0.0 : keep * log_term) - std::log(2.0);
  cert.rhs = 2.0 * std::log(2.0) * cert.eps * pulls;
  return cert.lhs <= cert.rhs + 1e-9;
}

}  // namespace rangeband
