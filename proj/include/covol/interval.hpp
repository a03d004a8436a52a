#pragma once

// Half-open interval algebra. All observation intervals are (lo, hi], so two
// intervals touching at an endpoint do not overlap.

#include <optional>
#include <stdexcept>

namespace covol {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] double length() const { return hi - lo; }
  [[nodiscard]] bool valid() const { return lo < hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

inline Interval make_interval(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("Interval: requires lo < hi");
  return Interval{lo, hi};
}

/// (a.lo, a.hi] and (b.lo, b.hi] share a point iff a.lo < b.hi and b.lo < a.hi.
inline bool overlap(const Interval& a, const Interval& b) {
  return a.lo < b.hi && b.lo < a.hi;
}

/// Subset test a ⊆ b with exact endpoint comparisons.
inline bool contained_in(const Interval& a, const Interval& b) {
  return b.lo <= a.lo && a.hi <= b.hi;
}

inline std::optional<Interval> intersect(const Interval& a, const Interval& b) {
  const double lo = a.lo > b.lo ? a.lo : b.lo;
  const double hi = a.hi < b.hi ? a.hi : b.hi;
  if (lo < hi) return Interval{lo, hi};
  return std::nullopt;
}

}  // namespace covol
