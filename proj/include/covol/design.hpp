#pragma once

// Reduced design over a pair of observation grids: every maximal run of
// consecutive I-intervals contained in one and the same J-interval is merged
// into a single interval, intervals contained in no J pass through, and the
// result is re-labeled left to right. In the merged partition each J
// contains at most one whole interval, which makes the Hayashi-Yoshida
// summands 2-dependent. The tau/sigma stopping-time recursion and the
// counters n0, n_hat are computed alongside.

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "covol/grid.hpp"
#include "covol/interval.hpp"

namespace covol {

struct ReducedDesign {
  std::vector<Interval> i_hat;  // merged partition of (0, T], left to right
  // For each merged interval: the inclusive range of original I indices
  // (0-based) it merges, and the inclusive range of J indices (0-based) it
  // overlaps. Overlap sets are contiguous, so ranges store the whole K row.
  std::vector<std::pair<std::size_t, std::size_t>> i_runs;
  std::vector<std::pair<std::size_t, std::size_t>> j_ranges;
  std::vector<std::size_t> tau;          // realized finite tau_k (1-based interval indices)
  std::vector<std::size_t> sigma_stops;  // matching sigma_k values (1-based)
  std::size_t n0 = 0;                    // sup{k : tau_k < +inf}
  std::size_t n_hat = 0;                 // number of merged intervals

  [[nodiscard]] bool k_matrix_entry(std::size_t i, std::size_t j) const {
    return j >= j_ranges[i].first && j <= j_ranges[i].second;
  }
};

namespace detail {

/// For each I-interval, the index of the J-interval containing it, or npos.
/// J intervals are disjoint, so the candidate is unique.
inline std::vector<std::size_t> containment_map(const ObservationGrid& gridI,
                                                const ObservationGrid& gridJ) {
  constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  const std::size_t n = gridI.interval_count();
  const std::size_t m = gridJ.interval_count();
  std::vector<std::size_t> owner(n, npos);
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Interval I = gridI.interval(i);
    while (j < m && gridJ.interval(j).hi <= I.lo) ++j;  // first J with hi > I.lo
    if (j < m && contained_in(I, gridJ.interval(j))) owner[i] = j;
  }
  return owner;
}

}  // namespace detail

inline ReducedDesign build_reduced_design(const ObservationGrid& gridI,
                                          const ObservationGrid& gridJ) {
  if (gridI.horizon() != gridJ.horizon())
    throw std::invalid_argument("build_reduced_design: grids have different horizons");
  constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  const std::size_t n = gridI.interval_count();
  const std::size_t m = gridJ.interval_count();

  ReducedDesign d;
  const std::vector<std::size_t> owner = detail::containment_map(gridI, gridJ);

  // Merge maximal runs of consecutive I's owned by the same J.
  std::size_t i = 0;
  while (i < n) {
    std::size_t last = i;
    if (owner[i] != npos) {
      while (last + 1 < n && owner[last + 1] == owner[i]) ++last;
    }
    d.i_hat.push_back(Interval{gridI.interval(i).lo, gridI.interval(last).hi});
    d.i_runs.emplace_back(i, last);
    i = last + 1;
  }
  d.n_hat = d.i_hat.size();

  // Contiguous K rows: J^j overlaps by the half-open rule.
  d.j_ranges.reserve(d.n_hat);
  std::size_t j = 0;
  for (const Interval& ih : d.i_hat) {
    while (j < m && gridJ.interval(j).hi <= ih.lo) ++j;
    std::size_t first = j;
    std::size_t lastj = j;
    while (lastj + 1 < m && gridJ.interval(lastj + 1).lo < ih.hi) ++lastj;
    d.j_ranges.emplace_back(first, lastj);
  }

  // tau/sigma recursion, 1-based as stated: tau_0 = 0, sigma_0 = 1,
  //   tau_k   = inf{tau_{k-1} < i <= n : I^i not contained in J^{sigma_{k-1}}}
  //   sigma_k = sup{sigma_{k-1} < j <= m : I^{tau_k} overlaps J^j}
  // with inf(empty) = +inf, sup(empty) = 0; n0 counts the finite taus.
  // J^0 contains nothing, so a zero sigma makes the next tau advance by one.
  std::size_t tau_prev = 0;   // tau_{k-1}
  std::size_t sig_prev = 1;   // sigma_{k-1}
  while (true) {
    std::size_t tau_k = npos;
    for (std::size_t ii = tau_prev + 1; ii <= n; ++ii) {
      const Interval I = gridI.interval(ii - 1);
      const bool inside = sig_prev >= 1 && sig_prev <= m &&
                          contained_in(I, gridJ.interval(sig_prev - 1));
      if (!inside) {
        tau_k = ii;
        break;
      }
    }
    if (tau_k == npos) break;
    std::size_t sig_k = 0;
    const Interval I = gridI.interval(tau_k - 1);
    for (std::size_t jj = sig_prev + 1; jj <= m; ++jj) {
      if (overlap(I, gridJ.interval(jj - 1))) sig_k = jj;
      else if (sig_k != 0) break;  // overlap run is contiguous
    }
    d.tau.push_back(tau_k);
    d.sigma_stops.push_back(sig_k);
    tau_prev = tau_k;
    sig_prev = sig_k;
  }
  d.n0 = d.tau.size();
  return d;
}

/// Mirror construction merging J's contained in I's; the returned design's
/// i_hat is the merged J partition and its j_ranges index the I intervals.
inline ReducedDesign dual_reduced_design(const ObservationGrid& gridI,
                                         const ObservationGrid& gridJ) {
  return build_reduced_design(gridJ, gridI);
}

}  // namespace covol
