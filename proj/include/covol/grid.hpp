#pragma once

// Observation grids 0 = t_0 < t_1 < ... < t_n = T and the deterministic and
// random sampling schemes used in experiments. Times are exact floats; all
// endpoint comparisons across grids are exact floating comparisons, so the
// constructors use integer arithmetic followed by a single division.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "covol/interval.hpp"
#include "covol/rng.hpp"

namespace covol {

class ObservationGrid {
 public:
  explicit ObservationGrid(std::vector<double> times) : times_(std::move(times)) {
    if (times_.size() < 2) throw std::invalid_argument("ObservationGrid: need at least {0, T}");
    if (times_.front() != 0.0)
      throw std::invalid_argument("ObservationGrid: first time must be 0");
    for (std::size_t i = 1; i < times_.size(); ++i) {
      if (!(times_[i] > times_[i - 1]))
        throw std::invalid_argument("ObservationGrid: times must be strictly increasing (index " +
                                    std::to_string(i) + ")");
    }
    if (!(times_.back() > 0.0))
      throw std::invalid_argument("ObservationGrid: horizon must be > 0");
  }

  [[nodiscard]] const std::vector<double>& times() const { return times_; }
  [[nodiscard]] double horizon() const { return times_.back(); }
  [[nodiscard]] std::size_t interval_count() const { return times_.size() - 1; }

  /// i-th interval (0-based): (t_i, t_{i+1}].
  [[nodiscard]] Interval interval(std::size_t i) const {
    return Interval{times_[i], times_[i + 1]};
  }

  [[nodiscard]] std::vector<Interval> intervals() const {
    std::vector<Interval> out;
    out.reserve(interval_count());
    for (std::size_t i = 0; i + 1 < times_.size(); ++i) out.push_back(Interval{times_[i], times_[i + 1]});
    return out;
  }

  [[nodiscard]] double max_spacing() const {
    double m = 0.0;
    for (std::size_t i = 1; i < times_.size(); ++i) m = std::max(m, times_[i] - times_[i - 1]);
    return m;
  }

 private:
  std::vector<double> times_;
};

/// Equidistant grid {i T / n}.
inline ObservationGrid synchronous_grid(std::size_t n, double T) {
  if (n < 1) throw std::invalid_argument("synchronous_grid: n must be >= 1");
  if (!(T > 0.0)) throw std::invalid_argument("synchronous_grid: T must be > 0");
  std::vector<double> times(n + 1);
  for (std::size_t i = 0; i < n; ++i)
    times[i] = static_cast<double>(i) * T / static_cast<double>(n);
  times[n] = T;
  return ObservationGrid(std::move(times));
}

/// Alternating nonsynchronous scheme: the first series is observed at odd
/// times (2k-1)T/(2n), k = 1..n, the second at even times kT/n, k = 1..n-1;
/// both grids carry the endpoints 0 and T.
inline std::pair<ObservationGrid, ObservationGrid> alternating_grids(std::size_t n, double T) {
  if (n < 1) throw std::invalid_argument("alternating_grids: n must be >= 1");
  if (!(T > 0.0)) throw std::invalid_argument("alternating_grids: T must be > 0");
  std::vector<double> odd;
  odd.reserve(n + 2);
  odd.push_back(0.0);
  for (std::size_t k = 1; k <= n; ++k)
    odd.push_back(static_cast<double>(2 * k - 1) * T / static_cast<double>(2 * n));
  odd.push_back(T);
  std::vector<double> even;
  even.reserve(n + 1);
  even.push_back(0.0);
  for (std::size_t k = 1; k + 1 <= n; ++k)
    even.push_back(static_cast<double>(k) * T / static_cast<double>(n));
  even.push_back(T);
  return {ObservationGrid(std::move(odd)), ObservationGrid(std::move(even))};
}

namespace detail {

inline ObservationGrid poisson_grid_one(double rate, double T, CounterRng& rng) {
  std::vector<double> times;
  times.push_back(0.0);
  double t = rng.exponential(rate);
  while (t < T) {
    if (t > times.back()) times.push_back(t);  // collisions have measure zero
    t += rng.exponential(rate);
  }
  times.push_back(T);
  return ObservationGrid(std::move(times));
}

}  // namespace detail

/// Interior observation times are a homogeneous Poisson process on (0,T),
/// one independent stream per series; deterministic in the seed.
inline std::pair<ObservationGrid, ObservationGrid> poisson_grids(double rate1, double rate2,
                                                                 double T, std::uint64_t seed) {
  if (!(rate1 > 0.0) || !(rate2 > 0.0))
    throw std::invalid_argument("poisson_grids: rates must be > 0");
  if (!(T > 0.0)) throw std::invalid_argument("poisson_grids: T must be > 0");
  CounterRng rng1(seed, 0);
  CounterRng rng2(seed, 1);
  return {detail::poisson_grid_one(rate1, T, rng1), detail::poisson_grid_one(rate2, T, rng2)};
}

/// Largest interval length over both grids (the mesh r_{n,m}).
inline double mesh(const ObservationGrid& a, const ObservationGrid& b) {
  return std::max(a.max_spacing(), b.max_spacing());
}

/// Sorted union of the two grids' times (exact float comparisons).
inline std::vector<double> union_times(const ObservationGrid& a, const ObservationGrid& b) {
  std::vector<double> u;
  u.reserve(a.times().size() + b.times().size());
  std::merge(a.times().begin(), a.times().end(), b.times().begin(), b.times().end(),
             std::back_inserter(u));
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

}  // namespace covol
