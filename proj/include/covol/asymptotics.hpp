#pragma once

// Exact finite-sample variance of the drift-free estimator, the C1 bracket
// statistic, asymptotic variances for bipower variation, Gaussian moment
// functionals, rate functions and speed-condition checkers.
//
// The variance of V_n over a design (I-hat, J) is
//   sum_{i,j} nu1(Ih_i) nu2(J_j) K_ij + sum_i nu^2(Ih_i) + sum_j nu^2(J_j)
//     - sum_{i,j} nu^2(Ih_i ∩ J_j),
// and by construction of the merged partition the same four-term bracket
// evaluated on the raw pair (I, J) is equal as a real number. Both are
// computed by one kernel here; an independent Isserlis (Gaussian fourth
// moment) oracle cross-checks the formula from pairwise increment
// covariances alone.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "covol/design.hpp"
#include "covol/estimators.hpp"
#include "covol/grid.hpp"
#include "covol/interval.hpp"
#include "covol/model.hpp"
#include "covol/quadrature.hpp"
#include "covol/stats.hpp"

namespace covol {

/// nu(I) = integral over I of sigma1 sigma2 rho.
inline double nu(const Interval& iv, const ModelSpec& model, const QuadratureSpec& quad = {}) {
  if (!(iv.lo >= 0.0 && iv.hi <= model.horizon))
    throw std::invalid_argument("nu: interval must lie within (0, T]");
  return integrate(
      [&](double t) { return model.sigma1(t) * model.sigma2(t) * model.rho(t); }, iv.lo, iv.hi,
      quad, model.breakpoints);
}

/// nu_l(I) = integral over I of sigma_l^2.
inline double nu_ell(int ell, const Interval& iv, const ModelSpec& model,
                     const QuadratureSpec& quad = {}) {
  if (ell != 1 && ell != 2) throw std::invalid_argument("nu_ell: ell is 1 or 2");
  if (!(iv.lo >= 0.0 && iv.hi <= model.horizon))
    throw std::invalid_argument("nu_ell: interval must lie within (0, T]");
  const auto& sigma = (ell == 1) ? model.sigma1 : model.sigma2;
  return integrate([&](double t) { const double s = sigma(t); return s * s; }, iv.lo, iv.hi,
                   quad, model.breakpoints);
}

namespace detail {

/// The four-term bracket over an ordered disjoint cover `iparts` of (0,T]
/// and the intervals of gridJ, with K built by a two-pointer sweep.
inline double covolatility_bracket(std::span<const Interval> iparts,
                                   const ObservationGrid& gridJ, const ModelSpec& model,
                                   const QuadratureSpec& quad) {
  const std::size_t m = gridJ.interval_count();
  std::vector<double> nu2_j(m), nu_j_sq(m);
  for (std::size_t j = 0; j < m; ++j) {
    const Interval J = gridJ.interval(j);
    nu2_j[j] = nu_ell(2, J, model, quad);
    const double nj = nu(J, model, quad);
    nu_j_sq[j] = nj * nj;
  }

  KahanAccumulator term_cross, term_i, term_j, term_meet;
  for (double v : nu_j_sq) term_j.add(v);

  std::size_t j_lo = 0;
  for (const Interval& I : iparts) {
    const double nu1_i = nu_ell(1, I, model, quad);
    const double nu_i = nu(I, model, quad);
    term_i.add(nu_i * nu_i);
    while (j_lo < m && gridJ.interval(j_lo).hi <= I.lo) ++j_lo;
    for (std::size_t j = j_lo; j < m && gridJ.interval(j).lo < I.hi; ++j) {
      term_cross.add(nu1_i * nu2_j[j]);
      const auto meet = intersect(I, gridJ.interval(j));
      if (meet) {
        const double nm = nu(*meet, model, quad);
        term_meet.add(nm * nm);
      }
    }
  }
  return term_cross.value() + term_i.value() + term_j.value() - term_meet.value();
}

}  // namespace detail

/// Exact Var(V_n) from the 2-dependent representation over the reduced
/// design; strictly positive whenever sigma1 sigma2 > 0 somewhere.
inline double variance_Vn(const ReducedDesign& design, const ObservationGrid& gridJ,
                          const ModelSpec& model, const QuadratureSpec& quad = {}) {
  return detail::covolatility_bracket(design.i_hat, gridJ, model, quad);
}

/// The C1 bracket evaluated on the raw grid pair. Equal (as a real number)
/// to variance_Vn of the reduced design built from the same pair; dividing
/// by c_n gives the finite-n variance proxy whose limit is the asymptotic
/// variance.
inline double c1_statistic(const ObservationGrid& gridI, const ObservationGrid& gridJ,
                           const ModelSpec& model, const QuadratureSpec& quad = {}) {
  if (gridI.horizon() != gridJ.horizon())
    throw std::invalid_argument("c1_statistic: grids have different horizons");
  return detail::covolatility_bracket(gridI.intervals(), gridJ, model, quad);
}

/// Independent verification oracle for Var(V_n): expand the raw double sum
/// and apply E[abcd] = E[ab]E[cd] + E[ac]E[bd] + E[ad]E[bc] to the Gaussian
/// increments, using only pairwise covariances. O(n^2 m^2) in the number of
/// overlapping pairs, hence the size cap.
inline double isserlis_variance_oracle(const ObservationGrid& gridI,
                                       const ObservationGrid& gridJ, const ModelSpec& model,
                                       const QuadratureSpec& quad = {},
                                       std::size_t max_total_intervals = 200) {
  const std::size_t n = gridI.interval_count();
  const std::size_t m = gridJ.interval_count();
  if (n + m > max_total_intervals)
    throw std::invalid_argument("isserlis_variance_oracle: size cap exceeded (" +
                                std::to_string(n + m) + " > " +
                                std::to_string(max_total_intervals) + " intervals)");

  std::vector<double> nu1_i(n), nu2_j(m);
  for (std::size_t i = 0; i < n; ++i) nu1_i[i] = nu_ell(1, gridI.interval(i), model, quad);
  for (std::size_t j = 0; j < m; ++j) nu2_j[j] = nu_ell(2, gridJ.interval(j), model, quad);

  // nu over every nonempty I_i ∩ J_j
  std::vector<std::vector<double>> nu_meet(n, std::vector<double>(m, 0.0));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // K_ij = 1
  for (std::size_t i = 0; i < n; ++i) {
    const Interval I = gridI.interval(i);
    for (std::size_t j = 0; j < m; ++j) {
      const Interval J = gridJ.interval(j);
      if (overlap(I, J)) {
        pairs.emplace_back(i, j);
        const auto meet = intersect(I, J);
        nu_meet[i][j] = meet ? nu(*meet, model, quad) : 0.0;
      }
    }
  }

  // Var = sum_{K_ij=1} nu1_i nu2_j
  //     + sum over pairs of pairs of nu(I_i ∩ J_{j'}) nu(I_{i'} ∩ J_j).
  KahanAccumulator acc;
  for (const auto& [i, j] : pairs) acc.add(nu1_i[i] * nu2_j[j]);
  for (const auto& [i, j] : pairs)
    for (const auto& [i2, j2] : pairs) acc.add(nu_meet[i][j2] * nu_meet[i2][j]);
  return acc.value();
}

/// r-th absolute moment of the standard normal: 2^{r/2} Gamma((r+1)/2) / sqrt(pi).
inline double abs_moment(double r) {
  if (r < 0.0) throw std::invalid_argument("abs_moment: r must be >= 0");
  return std::pow(2.0, 0.5 * r) * std::tgamma(0.5 * (r + 1.0)) /
         std::sqrt(std::numbers::pi);
}

/// Sigma_sigma(f) = E f(sigma Z), Z standard normal. Three routes:
/// closed-form moments when f = |x|^r; for other declared-even f the folded
/// half-axis integral 2 * int_0^inf f(sigma z) phi(z) dz by adaptive panels
/// (Gauss-Hermite stalls on the |x|^r-style kink at zero, the folded
/// integrand is smooth there); plain Gauss-Hermite (default 64 nodes) for
/// everything else.
inline double gaussian_functional(const FunctionSpec& f, double sigma,
                                  std::size_t nodes = 64) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("gaussian_functional: sigma must be >= 0");
  if (f.abs_power) {
    const double r = *f.abs_power;
    return r == 0.0 ? 1.0 : std::pow(sigma, r) * abs_moment(r);
  }
  if (f.declared_even) {
    // phi(z) < 1e-350 beyond z = 40; polynomial growth cannot bring it back
    QuadratureSpec quad;
    quad.abs_tol = 1e-13;
    return 2.0 * integrate(
                     [&](double z) {
                       const double v = f(sigma * z);
                       if (!std::isfinite(v))
                         throw NumericalError(
                             "gaussian_functional: non-finite value at z = " +
                             std::to_string(z));
                       return v * normal_pdf(z);
                     },
                     0.0, 40.0, quad);
  }
  const GaussHermiteRule& rule = GaussHermiteRule::cached(nodes);
  const double scale = sigma * std::numbers::sqrt2;
  KahanAccumulator acc;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double v = f(scale * rule.nodes[i]);
    if (!std::isfinite(v))
      throw NumericalError("gaussian_functional: non-finite value at node " +
                           std::to_string(rule.nodes[i]));
    acc.add(rule.weights[i] * v);
  }
  return acc.value() / std::sqrt(std::numbers::pi);
}

struct BipowerAsymptotics {
  double variance = 0.0;  // CLT / MDP variance of sqrt(n)(V^n - limit)
  double limit = 0.0;     // integral of Sigma_sigma(g) Sigma_sigma(h)
};

/// Asymptotic variance of generalised bipower variation for even g, h:
///   integral of Sigma(g^2)Sigma(h^2) + 2 Sigma(g)Sigma(h)Sigma(gh)
///     - 3 Sigma^2(g)Sigma^2(h) over [0, T],
/// together with the probability limit from the same sweep.
inline BipowerAsymptotics sigma_bipower(const FunctionSpec& g, const FunctionSpec& h,
                                        const ModelSpec& model, int ell = 1,
                                        const QuadratureSpec& quad = {},
                                        std::size_t gh_nodes = 64) {
  g.check_even();
  h.check_even();
  if (ell != 1 && ell != 2) throw std::invalid_argument("sigma_bipower: ell is 1 or 2");
  const auto& sigma = (ell == 1) ? model.sigma1 : model.sigma2;

  FunctionSpec g2, h2, gh;
  if (g.abs_power && h.abs_power) {
    g2 = FunctionSpec::abs_power_fn(2.0 * *g.abs_power);
    h2 = FunctionSpec::abs_power_fn(2.0 * *h.abs_power);
    gh = FunctionSpec::abs_power_fn(*g.abs_power + *h.abs_power);
  } else {
    g2.f = [&g](double x) { const double v = g(x); return v * v; };
    g2.declared_even = true;
    g2.growth_degree = 2.0 * g.growth_degree;
    h2.f = [&h](double x) { const double v = h(x); return v * v; };
    h2.declared_even = true;
    h2.growth_degree = 2.0 * h.growth_degree;
    gh.f = [&g, &h](double x) { return g(x) * h(x); };
    gh.declared_even = true;
    gh.growth_degree = g.growth_degree + h.growth_degree;
  }

  BipowerAsymptotics out;
  out.variance = integrate(
      [&](double s) {
        const double sig = sigma(s);
        const double Sg = gaussian_functional(g, sig, gh_nodes);
        const double Sh = gaussian_functional(h, sig, gh_nodes);
        const double Sg2 = gaussian_functional(g2, sig, gh_nodes);
        const double Sh2 = gaussian_functional(h2, sig, gh_nodes);
        const double Sgh = gaussian_functional(gh, sig, gh_nodes);
        return Sg2 * Sh2 + 2.0 * Sg * Sh * Sgh - 3.0 * Sg * Sg * Sh * Sh;
      },
      0.0, model.horizon, quad, model.breakpoints);
  out.limit = integrate(
      [&](double s) {
        const double sig = sigma(s);
        return gaussian_functional(g, sig, gh_nodes) * gaussian_functional(h, sig, gh_nodes);
      },
      0.0, model.horizon, quad, model.breakpoints);
  return out;
}

/// Quadratic rate function x^2 / (2 Sigma).
inline double rate_function(double x, double Sigma) {
  if (!(Sigma > 0.0)) throw std::invalid_argument("rate_function: Sigma must be > 0");
  return x * x / (2.0 * Sigma);
}

enum class SamplingScheme { synchronous, alternating, poisson };

inline std::string to_string(SamplingScheme s) {
  switch (s) {
    case SamplingScheme::synchronous: return "sync";
    case SamplingScheme::alternating: return "alt";
    case SamplingScheme::poisson: return "poisson";
  }
  return "?";
}

/// Power-family speed: b_n = n^alpha, c_n = n^{-beta}.
struct SpeedSpec {
  double alpha = 0.1;
  double beta = 1.0;

  [[nodiscard]] double b(double n) const { return std::pow(n, alpha); }
  [[nodiscard]] double c(double n) const { return std::pow(n, -beta); }
};

/// Closed-form admissibility verdicts for power-family speeds. Limits reduce
/// to exponent arithmetic; the reported witnesses are the limiting exponents
/// of b_n, b_n sqrt(c_n), b_n/(sqrt(c_n) log n), r_n^2/c_n and b_n/sqrt(n).
struct SpeedVerdict {
  bool bn_to_infinity = false;        // b_n -> infinity
  bool bn_sqrt_cn_to_zero = false;    // b_n sqrt(c_n) -> 0
  bool bn_over_sqrt_cn_log = false;   // b_n / (sqrt(c_n) log n) -> infinity
  bool mesh_condition = false;        // r_n^2 / c_n -> 0
  bool bipower_speed = false;         // b_n -> infinity and b_n/sqrt(n) -> 0
  bool heuristic = false;             // random-mesh scheme: order-of-magnitude only
  double exp_bn = 0.0, exp_bn_sqrt_cn = 0.0, exp_ratio = 0.0, exp_mesh = 0.0;

  [[nodiscard]] bool admissible_drift_free() const {
    return bn_to_infinity && bn_sqrt_cn_to_zero && bn_over_sqrt_cn_log;
  }
  [[nodiscard]] bool admissible_full() const {
    return admissible_drift_free() && mesh_condition;
  }
};

inline SpeedVerdict check_speed(const SpeedSpec& spec, SamplingScheme scheme) {
  if (!std::isfinite(spec.alpha) || !std::isfinite(spec.beta))
    throw std::invalid_argument("check_speed: exponents must be finite");
  SpeedVerdict v;
  v.exp_bn = spec.alpha;
  v.exp_bn_sqrt_cn = spec.alpha - 0.5 * spec.beta;
  v.exp_ratio = spec.alpha + 0.5 * spec.beta;
  v.bn_to_infinity = spec.alpha > 0.0;
  v.bn_sqrt_cn_to_zero = v.exp_bn_sqrt_cn < 0.0;
  // at exponent exactly 0 the ratio is 1/log n -> 0, so strict inequality
  v.bn_over_sqrt_cn_log = v.exp_ratio > 0.0;
  // deterministic schemes have r_n of order 1/n; the poisson scheme's
  // expected max gap is of order log(n)/n, reported as heuristic
  v.exp_mesh = spec.beta - 2.0;
  v.mesh_condition = v.exp_mesh < 0.0;
  v.heuristic = (scheme == SamplingScheme::poisson);
  v.bipower_speed = spec.alpha > 0.0 && spec.alpha < 0.5;
  return v;
}

namespace detail {

// Trend probes over the last few decades. The margins are deliberately mild
// (slowly varying admissible speeds like log n move only 1.5x per three
// decades); a plateau or reversal is what gets refused.

template <typename Fn>
bool probe_vanishes(Fn&& f, std::span<const double> ns) {
  for (std::size_t k = ns.size() - 4; k + 1 < ns.size(); ++k)
    if (!(f(ns[k + 1]) < f(ns[k]))) return false;
  return f(ns.back()) < 0.8 * f(ns[ns.size() - 4]);
}

template <typename Fn>
bool probe_diverges(Fn&& f, std::span<const double> ns) {
  for (std::size_t k = ns.size() - 4; k + 1 < ns.size(); ++k)
    if (!(f(ns[k + 1]) > f(ns[k]))) return false;
  return f(ns.back()) > 1.25 * f(ns[ns.size() - 4]);
}

}  // namespace detail

/// Numeric fallback for arbitrary user-supplied sequences b_n, c_n: the
/// defining ratios are probed along n = 10^2 .. 10^9 and judged by their
/// trend. Always labeled heuristic — a finite probe cannot certify a limit,
/// it can only refuse obviously inadmissible speeds.
template <typename BFn, typename CFn>
SpeedVerdict check_speed_numeric(BFn&& b_of_n, CFn&& c_of_n, SamplingScheme scheme) {
  std::vector<double> ns;
  for (double n = 1e2; n <= 1e9; n *= 10.0) ns.push_back(n);
  for (double n : ns) {
    if (!(b_of_n(n) > 0.0) || !(c_of_n(n) > 0.0))
      throw std::invalid_argument("check_speed_numeric: sequences must be positive");
  }
  SpeedVerdict v;
  v.heuristic = true;
  v.bn_to_infinity = detail::probe_diverges(b_of_n, ns);
  v.bn_sqrt_cn_to_zero =
      detail::probe_vanishes([&](double n) { return b_of_n(n) * std::sqrt(c_of_n(n)); }, ns);
  v.bn_over_sqrt_cn_log = detail::probe_diverges(
      [&](double n) { return b_of_n(n) / (std::sqrt(c_of_n(n)) * std::log(n)); }, ns);
  const double mesh_power = (scheme == SamplingScheme::poisson) ? 1.0 : 0.0;
  v.mesh_condition = detail::probe_vanishes(
      [&](double n) {
        const double r = std::pow(std::log(n), mesh_power) / n;
        return r * r / c_of_n(n);
      },
      ns);
  v.bipower_speed = v.bn_to_infinity &&
                    detail::probe_vanishes(
                        [&](double n) { return b_of_n(n) / std::sqrt(n); }, ns);
  return v;
}

}  // namespace covol
