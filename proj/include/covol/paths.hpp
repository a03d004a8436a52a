#pragma once

// Simulation of the bivariate diffusion on a fine master grid. Martingale
// increments are exact joint Gaussians (their per-interval covariance comes
// from the same quadrature the variance formulas use), so only the drift
// carries Euler error. The initial value defaults to 0; every estimator in
// this library is a function of increments only, so x0 never enters any
// statistic.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "covol/errors.hpp"
#include "covol/grid.hpp"
#include "covol/model.hpp"
#include "covol/quadrature.hpp"
#include "covol/rng.hpp"

namespace covol {

struct PathPair {
  std::vector<double> master_grid;  // 0 = u_0 < ... < u_N = T
  std::vector<double> x1, x2;       // process values
  std::vector<double> m1, m2;       // martingale parts
  std::vector<double> a1, a2;       // drift parts (all zero when drift absent)
  std::uint64_t seed = 0;
};

/// Precomputes per-interval covariance Cholesky factors once, so Monte Carlo
/// replicates over a fixed (model, grid) pair only draw Gaussians.
class CorrelatedIncrementSampler {
 public:
  CorrelatedIncrementSampler(const ModelSpec& model, std::span<const double> grid_times,
                             const QuadratureSpec& quad = {}) {
    if (grid_times.size() < 2)
      throw std::invalid_argument("correlated_increments: grid needs at least two times");
    if (grid_times.front() < 0.0 || grid_times.back() > model.horizon)
      throw std::invalid_argument("correlated_increments: grid must lie within [0, T]");
    for (std::size_t i = 1; i < grid_times.size(); ++i)
      if (!(grid_times[i] > grid_times[i - 1]))
        throw std::invalid_argument("correlated_increments: grid must be strictly increasing");
    model.validate(grid_times);

    const std::size_t n = grid_times.size() - 1;
    l11_.resize(n);
    l21_.resize(n);
    l22_.resize(n);
    var1_.resize(n);
    var2_.resize(n);
    cov_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double lo = grid_times[k], hi = grid_times[k + 1];
      const double v1 =
          integrate([&](double t) { const double s = model.sigma1(t); return s * s; }, lo, hi,
                    quad, model.breakpoints);
      const double v2 =
          integrate([&](double t) { const double s = model.sigma2(t); return s * s; }, lo, hi,
                    quad, model.breakpoints);
      const double c =
          integrate([&](double t) { return model.sigma1(t) * model.sigma2(t) * model.rho(t); },
                    lo, hi, quad, model.breakpoints);
      if (v1 < 0.0 || v2 < 0.0 || c * c > v1 * v2)
        throw NumericalError(
            "correlated_increments: per-interval covariance not positive semidefinite on (" +
            std::to_string(lo) + ", " + std::to_string(hi) +
            "]; quadrature tolerance too loose");
      var1_[k] = v1;
      var2_[k] = v2;
      cov_[k] = c;
      l11_[k] = std::sqrt(v1);
      l21_[k] = l11_[k] > 0.0 ? c / l11_[k] : 0.0;
      const double rem = v2 - l21_[k] * l21_[k];
      l22_[k] = rem > 0.0 ? std::sqrt(rem) : 0.0;
    }
  }

  [[nodiscard]] std::size_t interval_count() const { return l11_.size(); }
  [[nodiscard]] const std::vector<double>& var1() const { return var1_; }
  [[nodiscard]] const std::vector<double>& var2() const { return var2_; }
  [[nodiscard]] const std::vector<double>& cov() const { return cov_; }

  void sample(std::uint64_t seed, std::span<double> d1, std::span<double> d2) const {
    CounterRng rng(seed);
    for (std::size_t k = 0; k < l11_.size(); ++k) {
      const double z1 = rng.normal();
      const double z2 = rng.normal();
      d1[k] = l11_[k] * z1;
      d2[k] = l21_[k] * z1 + l22_[k] * z2;
    }
  }

  [[nodiscard]] std::pair<std::vector<double>, std::vector<double>> sample(
      std::uint64_t seed) const {
    std::vector<double> d1(interval_count()), d2(interval_count());
    sample(seed, d1, d2);
    return {std::move(d1), std::move(d2)};
  }

 private:
  std::vector<double> l11_, l21_, l22_;
  std::vector<double> var1_, var2_, cov_;
};

/// One-shot form: jointly Gaussian martingale increments over each grid
/// interval, independent across intervals, deterministic in (seed, grid).
inline std::pair<std::vector<double>, std::vector<double>> correlated_increments(
    const ModelSpec& model, std::span<const double> grid_times, std::uint64_t seed,
    const QuadratureSpec& quad = {}) {
  return CorrelatedIncrementSampler(model, grid_times, quad).sample(seed);
}

/// Simulation against a prebuilt sampler (Monte Carlo fast path; the sampler
/// must have been built on the same master grid).
inline PathPair simulate_paths_with(const CorrelatedIncrementSampler& sampler,
                                    const ModelSpec& model, std::vector<double> master_grid,
                                    std::uint64_t seed, double x0_1 = 0.0, double x0_2 = 0.0) {
  if (master_grid.size() < 2 || master_grid.front() != 0.0 ||
      master_grid.back() != model.horizon)
    throw std::invalid_argument("simulate_paths: master grid must cover [0, T]");
  if (sampler.interval_count() + 1 != master_grid.size())
    throw std::invalid_argument("simulate_paths: sampler does not match master grid");

  PathPair p;
  p.seed = seed;
  const std::size_t n = master_grid.size() - 1;
  p.master_grid = std::move(master_grid);
  p.m1.assign(n + 1, 0.0);
  p.m2.assign(n + 1, 0.0);
  p.a1.assign(n + 1, 0.0);
  p.a2.assign(n + 1, 0.0);
  p.x1.assign(n + 1, 0.0);
  p.x2.assign(n + 1, 0.0);

  std::vector<double> d1(n), d2(n);
  sampler.sample(seed, d1, d2);
  for (std::size_t k = 0; k < n; ++k) {
    p.m1[k + 1] = p.m1[k] + d1[k];
    p.m2[k + 1] = p.m2[k] + d2[k];
  }

  p.x1[0] = x0_1;
  p.x2[0] = x0_2;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = p.master_grid[k];
    const double dt = p.master_grid[k + 1] - t;
    if (model.has_drift()) {
      // explicit Euler with the left-endpoint state
      const double b1 = model.drift1 ? model.drift1(t, p.x1[k], p.x2[k]) : 0.0;
      const double b2 = model.drift2 ? model.drift2(t, p.x1[k], p.x2[k]) : 0.0;
      if (!std::isfinite(b1) || !std::isfinite(b2))
        throw NumericalError("simulate_paths: non-finite drift at t = " + std::to_string(t));
      p.a1[k + 1] = p.a1[k] + b1 * dt;
      p.a2[k + 1] = p.a2[k] + b2 * dt;
    }
    p.x1[k + 1] = x0_1 + p.m1[k + 1] + p.a1[k + 1];
    p.x2[k + 1] = x0_2 + p.m2[k + 1] + p.a2[k + 1];
  }
  return p;
}

inline PathPair simulate_paths(const ModelSpec& model, std::vector<double> master_grid,
                               std::uint64_t seed, const QuadratureSpec& quad = {},
                               double x0_1 = 0.0, double x0_2 = 0.0) {
  const CorrelatedIncrementSampler sampler(model, master_grid, quad);
  return simulate_paths_with(sampler, model, std::move(master_grid), seed, x0_1, x0_2);
}

/// Master grid covering both observation grids: their union, with each gap
/// subdivided `substeps` times for the Euler drift integration.
inline std::vector<double> master_grid_for(const ObservationGrid& a, const ObservationGrid& b,
                                           int substeps = 8) {
  if (substeps < 1) throw std::invalid_argument("master_grid_for: substeps must be >= 1");
  const std::vector<double> u = union_times(a, b);
  std::vector<double> out;
  out.reserve(u.size() * static_cast<std::size_t>(substeps));
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    out.push_back(u[i]);
    for (int s = 1; s < substeps; ++s) {
      const double t = u[i] + (u[i + 1] - u[i]) * static_cast<double>(s) /
                                  static_cast<double>(substeps);
      if (t > out.back() && t < u[i + 1]) out.push_back(t);
    }
  }
  out.push_back(u.back());
  return out;
}

enum class PathComponent { full, martingale };

namespace detail {

inline std::vector<std::size_t> grid_positions(const std::vector<double>& master,
                                               const std::vector<double>& times) {
  std::vector<std::size_t> idx;
  idx.reserve(times.size());
  std::size_t pos = 0;
  for (double t : times) {
    while (pos < master.size() && master[pos] < t) ++pos;
    if (pos >= master.size() || master[pos] != t)
      throw std::invalid_argument("restrict: observation time " + std::to_string(t) +
                                  " is not a master-grid time");
    idx.push_back(pos);
  }
  return idx;
}

}  // namespace detail

/// Series-l values at the observation times, which must be master-grid times
/// exactly; no interpolation, ever. The component selects X or the
/// martingale part M.
inline std::vector<double> restrict_series(const PathPair& path, int series,
                                           const ObservationGrid& grid,
                                           PathComponent which = PathComponent::full) {
  if (series != 1 && series != 2) throw std::invalid_argument("restrict_series: series is 1 or 2");
  const std::vector<double>& src =
      (series == 1) ? (which == PathComponent::full ? path.x1 : path.m1)
                    : (which == PathComponent::full ? path.x2 : path.m2);
  const auto idx = detail::grid_positions(path.master_grid, grid.times());
  std::vector<double> out;
  out.reserve(idx.size());
  for (std::size_t k : idx) out.push_back(src[k]);
  return out;
}

}  // namespace covol
