#pragma once

// Reward laws for a single arm.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rangeband/rng.hpp"

namespace rangeband {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// scale * clip(Y, clip_lo, clip_hi) with Y ~ N(loc, variance).
struct TruncatedGaussian {
  double loc = 0.0;
  double variance = 1.0;
  double clip_lo = 0.0;
  double clip_hi = 1.0;
  double scale = 1.0;
};

struct PointMass {
  double value = 0.0;
};

struct FiniteSupport {
  std::vector<double> atoms;
  std::vector<double> probs;
};

struct ArmDistribution;

struct Mixture {
  std::vector<ArmDistribution> components;
  std::vector<double> weights;
};

struct ArmDistribution {
  std::variant<TruncatedGaussian, PointMass, FiniteSupport, Mixture> law;
};

namespace detail {

inline constexpr double kSimplexTol = 1e-12;

inline void check_simplex(const std::vector<double>& w, const char* what) {
  if (w.empty()) throw std::invalid_argument(std::string(what) + ": empty weight vector");
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x))
      throw std::invalid_argument(std::string(what) + ": weights must be finite and nonnegative");
    total += x;
  }
  if (std::abs(total - 1.0) > kSimplexTol)
    throw std::invalid_argument(std::string(what) + ": weights must sum to 1");
}

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double std_normal_pdf(double x) {
  constexpr double inv_sqrt_2pi = 0.398942280401432677939946059934;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

/// Draw an index from a weight vector with a single uniform.
inline std::size_t draw_index(const std::vector<double>& w, Stream& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    if (u < acc) return i;
  }
  // u landed in the rounding slack above the last partial sum.
  for (std::size_t i = w.size(); i-- > 0;)
    if (w[i] > 0.0) return i;
  return w.size() - 1;
}

}  // namespace detail

inline void validate(const ArmDistribution& d);

inline void validate(const TruncatedGaussian& g) {
  if (!std::isfinite(g.loc) || !std::isfinite(g.variance) || g.variance < 0.0)
    throw std::invalid_argument("truncated_gaussian: loc must be finite and variance >= 0");
  if (!(g.clip_lo < g.clip_hi)) throw std::invalid_argument("truncated_gaussian: clip_lo must be < clip_hi");
  if (!(g.scale > 0.0) || !std::isfinite(g.scale))
    throw std::invalid_argument("truncated_gaussian: scale must be positive");
}

inline void validate(const FiniteSupport& f) {
  if (f.atoms.size() != f.probs.size())
    throw std::invalid_argument("finite_support: atoms and probs differ in length");
  for (double a : f.atoms)
    if (!std::isfinite(a)) throw std::invalid_argument("finite_support: atoms must be finite");
  detail::check_simplex(f.probs, "finite_support");
}

inline void validate(const Mixture& m) {
  if (m.components.size() != m.weights.size())
    throw std::invalid_argument("mixture: components and weights differ in length");
  detail::check_simplex(m.weights, "mixture");
  for (const auto& c : m.components) validate(c);
}

inline void validate(const ArmDistribution& d) {
  std::visit(
      [](const auto& law) {
        using L = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<L, PointMass>) {
          if (!std::isfinite(law.value)) throw std::invalid_argument("point_mass: value must be finite");
        } else {
          validate(law);
        }
      },
      d.law);
}

inline ArmDistribution point_mass(double value) {
  ArmDistribution d{PointMass{value}};
  validate(d);
  return d;
}

inline ArmDistribution truncated_gaussian(double loc, double variance, double clip_lo, double clip_hi,
                                          double scale = 1.0) {
  ArmDistribution d{TruncatedGaussian{loc, variance, clip_lo, clip_hi, scale}};
  validate(d);
  return d;
}

inline ArmDistribution finite_support(std::vector<double> atoms, std::vector<double> probs) {
  ArmDistribution d{FiniteSupport{std::move(atoms), std::move(probs)}};
  validate(d);
  return d;
}

inline ArmDistribution mixture(std::vector<ArmDistribution> components, std::vector<double> weights) {
  ArmDistribution d{Mixture{std::move(components), std::move(weights)}};
  validate(d);
  return d;
}

/// Exact expectation. The clipped Gaussian uses the closed form
/// lo*P(Y<lo) + hi*P(Y>hi) + E[Y; lo<=Y<=hi].
inline double arm_mean(const ArmDistribution& d) {
  return std::visit(
      [](const auto& law) -> double {
        using L = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<L, PointMass>) {
          return law.value;
        } else if constexpr (std::is_same_v<L, TruncatedGaussian>) {
          if (law.variance == 0.0) return law.scale * std::clamp(law.loc, law.clip_lo, law.clip_hi);
          const double sd = std::sqrt(law.variance);
          const double a = (law.clip_lo - law.loc) / sd;
          const double b = (law.clip_hi - law.loc) / sd;
          const double below = detail::std_normal_cdf(a);
          const double above = detail::std_normal_cdf(-b);
          const double inner = law.loc * (1.0 - below - above) +
                               sd * (detail::std_normal_pdf(a) - detail::std_normal_pdf(b));
          return law.scale * (law.clip_lo * below + law.clip_hi * above + inner);
        } else if constexpr (std::is_same_v<L, FiniteSupport>) {
          return std::inner_product(law.atoms.begin(), law.atoms.end(), law.probs.begin(), 0.0);
        } else {
          double m = 0.0;
          for (std::size_t i = 0; i < law.components.size(); ++i) m += law.weights[i] * arm_mean(law.components[i]);
          return m;
        }
      },
      d.law);
}

/// One draw. Consumes a fixed number of stream draws per law shape, so
/// rescaled copies of a law stay coupled under a shared seed.
inline double sample_arm(const ArmDistribution& d, Stream& rng) {
  return std::visit(
      [&rng](const auto& law) -> double {
        using L = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<L, PointMass>) {
          return law.value;
        } else if constexpr (std::is_same_v<L, TruncatedGaussian>) {
          const double y = law.loc + std::sqrt(law.variance) * rng.normal();
          return law.scale * std::clamp(y, law.clip_lo, law.clip_hi);
        } else if constexpr (std::is_same_v<L, FiniteSupport>) {
          return law.atoms[detail::draw_index(law.probs, rng)];
        } else {
          return sample_arm(law.components[detail::draw_index(law.weights, rng)], rng);
        }
      },
      d.law);
}

/// Smallest closed interval containing the support (zero-weight pieces ignored).
inline Interval support(const ArmDistribution& d) {
  return std::visit(
      [](const auto& law) -> Interval {
        using L = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<L, PointMass>) {
          return {law.value, law.value};
        } else if constexpr (std::is_same_v<L, TruncatedGaussian>) {
          if (law.variance == 0.0) {
            const double v = law.scale * std::clamp(law.loc, law.clip_lo, law.clip_hi);
            return {v, v};
          }
          return {law.scale * law.clip_lo, law.scale * law.clip_hi};
        } else if constexpr (std::is_same_v<L, FiniteSupport>) {
          Interval r{INFINITY, -INFINITY};
          for (std::size_t i = 0; i < law.atoms.size(); ++i) {
            if (law.probs[i] <= 0.0) continue;
            r.lo = std::min(r.lo, law.atoms[i]);
            r.hi = std::max(r.hi, law.atoms[i]);
          }
          return r;
        } else {
          Interval r{INFINITY, -INFINITY};
          for (std::size_t i = 0; i < law.components.size(); ++i) {
            if (law.weights[i] <= 0.0) continue;
            const Interval c = support(law.components[i]);
            r.lo = std::min(r.lo, c.lo);
            r.hi = std::max(r.hi, c.hi);
          }
          return r;
        }
      },
      d.law);
}

/// Law of c * X for c > 0.
inline ArmDistribution scaled(const ArmDistribution& d, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("scaled: factor must be positive");
  return std::visit(
      [c](const auto& law) -> ArmDistribution {
        using L = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<L, PointMass>) {
          return {PointMass{c * law.value}};
        } else if constexpr (std::is_same_v<L, TruncatedGaussian>) {
          L g = law;
          g.scale *= c;
          return {g};
        } else if constexpr (std::is_same_v<L, FiniteSupport>) {
          L f = law;
          for (double& a : f.atoms) a *= c;
          return {f};
        } else {
          Mixture m;
          m.weights = law.weights;
          for (const auto& comp : law.components) m.components.push_back(scaled(comp, c));
          return {m};
        }
      },
      d.law);
}

/// Flattens point masses, finite supports and mixtures thereof into a single
/// finite support with merged duplicate atoms (atoms closer than `merge_tol`
/// are identified). Returns nullopt when a continuous part is present.
inline std::optional<FiniteSupport> atomic_form(const ArmDistribution& d, double merge_tol = 1e-12) {
  std::vector<std::pair<double, double>> pieces;
  bool atomic = true;
  auto collect = [&](const auto& self, const ArmDistribution& x, double w) -> void {
    std::visit(
        [&](const auto& law) {
          using L = std::decay_t<decltype(law)>;
          if constexpr (std::is_same_v<L, PointMass>) {
            pieces.emplace_back(law.value, w);
          } else if constexpr (std::is_same_v<L, TruncatedGaussian>) {
            if (law.variance == 0.0)
              pieces.emplace_back(law.scale * std::clamp(law.loc, law.clip_lo, law.clip_hi), w);
            else
              atomic = false;
          } else if constexpr (std::is_same_v<L, FiniteSupport>) {
            for (std::size_t i = 0; i < law.atoms.size(); ++i) pieces.emplace_back(law.atoms[i], w * law.probs[i]);
          } else {
            for (std::size_t i = 0; i < law.components.size(); ++i) self(self, law.components[i], w * law.weights[i]);
          }
        },
        x.law);
  };
  collect(collect, d, 1.0);
  if (!atomic) return std::nullopt;

  std::sort(pieces.begin(), pieces.end());
  FiniteSupport out;
  for (const auto& [atom, w] : pieces) {
    if (w <= 0.0) continue;
    if (!out.atoms.empty() && std::abs(atom - out.atoms.back()) <= merge_tol) {
      out.probs.back() += w;
    } else {
      out.atoms.push_back(atom);
      out.probs.push_back(w);
    }
  }
  return out;
}

}  // namespace rangeband
