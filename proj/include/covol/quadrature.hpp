#pragma once

// Deterministic one-dimensional quadrature used for every nu / nu_ell
// integral and for the per-interval covariances of the path simulator, so
// that closed-form variance formulas and simulated increments share a single
// definition of those integrals.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "covol/errors.hpp"
#include "covol/stats.hpp"

namespace covol {

enum class QuadratureMethod { gauss_legendre_panels, trapezoid_on_mesh };

struct QuadratureSpec {
  QuadratureMethod method = QuadratureMethod::gauss_legendre_panels;
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_depth = 48;           // adaptive bisection depth per panel
  std::size_t mesh_cells = 4096;  // trapezoid_on_mesh resolution

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol >= 0.0))
      throw std::invalid_argument("QuadratureSpec: tolerances must be positive");
    if (max_depth < 1) throw std::invalid_argument("QuadratureSpec: max_depth must be >= 1");
    if (mesh_cells < 1) throw std::invalid_argument("QuadratureSpec: mesh_cells must be >= 1");
  }
};

namespace detail {

/// Nodes/weights of the k-point Gauss-Legendre rule on [-1,1], from Newton
/// iteration on the Legendre recurrence.
inline void legendre_rule(int k, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(k), 0.0);
  weights.assign(static_cast<std::size_t>(k), 0.0);
  const int mid = (k + 1) / 2;
  for (int i = 0; i < mid; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (k + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= k; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = k * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[static_cast<std::size_t>(i)] = -x;
    nodes[static_cast<std::size_t>(k - 1 - i)] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(k - 1 - i)] = w;
  }
}

struct Gl15 {
  std::array<double, 15> x{}, w{};
  Gl15() {
    std::vector<double> n, ww;
    legendre_rule(15, n, ww);
    for (std::size_t i = 0; i < 15; ++i) {
      x[i] = n[i];
      w[i] = ww[i];
    }
  }
};

inline const Gl15& gl15() {
  static const Gl15 rule;
  return rule;
}

template <typename F>
double gl15_panel(F&& f, double lo, double hi) {
  const auto& rule = gl15();
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  double acc = 0.0;
  for (std::size_t i = 0; i < 15; ++i) acc += rule.w[i] * f(c + h * rule.x[i]);
  return acc * h;
}

template <typename F>
double adaptive_gl(F&& f, double lo, double hi, double whole, double tol, int depth,
                   int max_depth) {
  const double mid = 0.5 * (lo + hi);
  const double left = gl15_panel(f, lo, mid);
  const double right = gl15_panel(f, mid, hi);
  const double err = std::abs(left + right - whole);
  if (err <= tol) return left + right;
  if (depth >= max_depth)
    throw NumericalError("quadrature: tolerance not achieved at max refinement on [" +
                         std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return adaptive_gl(f, lo, mid, left, 0.5 * tol, depth + 1, max_depth) +
         adaptive_gl(f, mid, hi, right, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace detail

/// Integrate f over [lo, hi]. Interior breakpoints (integrand kinks or jumps)
/// pre-split the panel list so piecewise-smooth coefficients integrate to
/// full accuracy.
template <typename F>
double integrate(F&& f, double lo, double hi, const QuadratureSpec& spec = {},
                 std::span<const double> breakpoints = {}) {
  spec.validate();
  if (!(lo <= hi)) throw std::invalid_argument("integrate: lo must be <= hi");
  if (lo == hi) return 0.0;

  std::vector<double> cuts;
  cuts.push_back(lo);
  for (double b : breakpoints) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());

  KahanAccumulator total;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s], b = cuts[s + 1];
    if (a == b) continue;
    if (spec.method == QuadratureMethod::trapezoid_on_mesh) {
      const std::size_t cells = spec.mesh_cells;
      KahanAccumulator acc;
      double prev = f(a);
      for (std::size_t i = 1; i <= cells; ++i) {
        const double t = a + (b - a) * static_cast<double>(i) / static_cast<double>(cells);
        const double cur = f(t);
        acc.add(0.5 * (prev + cur) * ((b - a) / static_cast<double>(cells)));
        prev = cur;
      }
      total.add(acc.value());
    } else {
      const double whole = detail::gl15_panel(f, a, b);
      const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(whole));
      total.add(detail::adaptive_gl(f, a, b, whole, tol, 0, spec.max_depth));
    }
  }
  return total.value();
}

/// Gauss-Hermite rule for integrals against exp(-x^2); nodes via Newton on
/// the orthonormal Hermite recurrence.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussHermiteRule(std::size_t n) {
    if (n < 1) throw std::invalid_argument("GaussHermiteRule: need n >= 1");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const double pim4 = 0.7511255444649425;  // pi^{-1/4}
    const std::size_t m = (n + 1) / 2;
    double z = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == 0) {
        z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
      } else if (i == 1) {
        z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
      } else if (i == 2) {
        z = 1.86 * z - 0.86 * nodes[n - 1];
      } else if (i == 3) {
        z = 1.91 * z - 0.91 * nodes[n - 2];
      } else {
        z = 2.0 * z - nodes[n + 1 - i];
      }
      double pp = 0.0;
      for (int it = 0; it < 200; ++it) {
        double p1 = pim4, p2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
               std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
        }
        pp = std::sqrt(2.0 * n) * p2;
        const double dz = p1 / pp;
        z -= dz;
        if (std::abs(dz) <= 1e-15) break;
      }
      nodes[n - 1 - i] = z;
      nodes[i] = -z;
      weights[i] = 2.0 / (pp * pp);
      weights[n - 1 - i] = weights[i];
    }
  }

  static const GaussHermiteRule& cached(std::size_t n) {
    static const GaussHermiteRule rule64(64);
    if (n == 64) return rule64;
    thread_local GaussHermiteRule rule(n);
    if (rule.nodes.size() != n) rule = GaussHermiteRule(n);
    return rule;
  }
};

}  // namespace covol
