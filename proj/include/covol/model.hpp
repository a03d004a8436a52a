#pragma once

// The bivariate diffusion model: deterministic volatilities sigma_1, sigma_2,
// deterministic instantaneous correlation rho in [0,1], optional state
// drifts b_l(t, x1, x2), horizon T. Arbitrary function objects are accepted
// through this API; the CLI exposes the named presets below.

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace covol {

struct ModelSpec {
  using Coefficient = std::function<double(double)>;
  using Drift = std::function<double(double, double, double)>;  // (t, x1, x2)

  Coefficient sigma1;
  Coefficient sigma2;
  Coefficient rho;
  Drift drift1;  // empty => zero drift
  Drift drift2;
  double horizon = 1.0;
  // Interior times where a coefficient jumps or kinks; quadrature panels are
  // pre-split here so piecewise coefficients integrate at full accuracy.
  std::vector<double> breakpoints;

  [[nodiscard]] bool has_drift() const {
    return static_cast<bool>(drift1) || static_cast<bool>(drift2);
  }

  /// Check sigma_l >= 0 and rho in [0,1] at the probe times (the master grid).
  void validate(std::span<const double> probe_times) const {
    if (!(horizon > 0.0)) throw std::invalid_argument("ModelSpec: horizon must be > 0");
    if (!sigma1 || !sigma2 || !rho)
      throw std::invalid_argument("ModelSpec: sigma1, sigma2 and rho are required");
    for (double t : probe_times) {
      const double s1 = sigma1(t), s2 = sigma2(t), r = rho(t);
      if (!std::isfinite(s1) || s1 < 0.0)
        throw std::invalid_argument("ModelSpec: sigma1(" + std::to_string(t) +
                                    ") must be finite and >= 0");
      if (!std::isfinite(s2) || s2 < 0.0)
        throw std::invalid_argument("ModelSpec: sigma2(" + std::to_string(t) +
                                    ") must be finite and >= 0");
      if (!std::isfinite(r) || r < 0.0 || r > 1.0)
        throw std::invalid_argument("ModelSpec: rho(" + std::to_string(t) +
                                    ") must lie in [0,1]");
    }
  }

  static ModelSpec constant(double s1, double s2, double r, double T = 1.0) {
    ModelSpec m;
    m.sigma1 = [s1](double) { return s1; };
    m.sigma2 = [s2](double) { return s2; };
    m.rho = [r](double) { return r; };
    m.horizon = T;
    return m;
  }

  /// Piecewise-constant volatilities with a single jump at T/2.
  static ModelSpec piecewise(double s1_lo, double s1_hi, double s2_lo, double s2_hi, double r,
                             double T = 1.0) {
    ModelSpec m;
    const double split = 0.5 * T;
    m.sigma1 = [=](double t) { return t < split ? s1_lo : s1_hi; };
    m.sigma2 = [=](double t) { return t < split ? s2_lo : s2_hi; };
    m.rho = [r](double) { return r; };
    m.horizon = T;
    m.breakpoints = {split};
    return m;
  }

  /// sigma_l(t) = a_l + b_l sin(2 pi t / T); requires a_l >= |b_l|.
  static ModelSpec sine(double a1, double b1, double a2, double b2, double r, double T = 1.0) {
    if (a1 < std::abs(b1) || a2 < std::abs(b2))
      throw std::invalid_argument("ModelSpec::sine: need a >= |b| to keep sigma >= 0");
    ModelSpec m;
    m.sigma1 = [=](double t) { return a1 + b1 * std::sin(2.0 * std::acos(-1.0) * t / T); };
    m.sigma2 = [=](double t) { return a2 + b2 * std::sin(2.0 * std::acos(-1.0) * t / T); };
    m.rho = [r](double) { return r; };
    m.horizon = T;
    return m;
  }
};

}  // namespace covol
