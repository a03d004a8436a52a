#pragma once

// Shared numeric helpers: compensated summation, sample moments, normal and
// Student-t distribution functions, Kolmogorov-Smirnov distance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace covol {

/// Kahan-Neumaier compensated accumulator. Summation order is part of the
/// contract wherever cross-mode agreement at 1e-12 relative is asserted.
class KahanAccumulator {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean: empty sample");
  KahanAccumulator acc;
  for (double x : xs) acc.add(x);
  return acc.value() / static_cast<double>(xs.size());
}

/// Unbiased sample variance (ddof = 1).
inline double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("sample_variance: need at least 2 points");
  const double mu = mean(xs);
  KahanAccumulator acc;
  for (double x : xs) acc.add((x - mu) * (x - mu));
  return acc.value() / static_cast<double>(xs.size() - 1);
}

struct MomentSummary {
  double mean = 0.0;
  double variance = 0.0;    // ddof = 1
  double m2 = 0.0;          // central second moment (ddof = 0)
  double m4 = 0.0;          // central fourth moment
  std::size_t count = 0;

  /// Standard error of the sample mean.
  [[nodiscard]] double se_mean() const { return std::sqrt(variance / static_cast<double>(count)); }
  /// Standard error of the sample variance, sqrt((m4 - m2^2)/n).
  [[nodiscard]] double se_variance() const {
    return std::sqrt(std::max(0.0, m4 - m2 * m2) / static_cast<double>(count));
  }
};

inline MomentSummary summarize(std::span<const double> xs) {
  MomentSummary s;
  s.count = xs.size();
  s.mean = mean(xs);
  KahanAccumulator a2, a4;
  for (double x : xs) {
    const double d = x - s.mean;
    a2.add(d * d);
    a4.add(d * d * d * d);
  }
  s.m2 = a2.value() / static_cast<double>(xs.size());
  s.m4 = a4.value() / static_cast<double>(xs.size());
  s.variance = a2.value() / static_cast<double>(xs.size() - 1);
  return s;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Upper tail P(Z > x) of the standard normal.
inline double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

/// log P(Z > x), valid far beyond where the survival probability itself
/// underflows. Below the crossover it is log(erfc); above, the standard
/// asymptotic expansion phi(x)/x (1 - 1/x^2 + 3/x^4 - 15/x^6 + ...), whose
/// truncation error at the crossover is below 1e-12 relative.
inline double normal_log_sf(double x) {
  if (x < 33.0) return std::log(normal_sf(x));
  const double inv2 = 1.0 / (x * x);
  const double series = -inv2 * (1.0 - 3.0 * inv2 * (1.0 - 5.0 * inv2));
  return -0.5 * x * x - std::log(x) - 0.5 * std::log(2.0 * std::numbers::pi) +
         std::log1p(series);
}

/// Inverse standard normal CDF (Acklam's rational approximation, relative
/// error below 1.2e-9 — ample for Monte Carlo sampling).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must be in (0,1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

/// Upper tail P(T > x) of Student's t with integer dof, via the closed
/// trigonometric forms for P(|T| <= x) (finite cosine series).
inline double student_t_sf(double x, int dof) {
  if (dof < 1) throw std::invalid_argument("student_t_sf: dof must be >= 1");
  if (x < 0.0) return 1.0 - student_t_sf(-x, dof);
  const double theta = std::atan(x / std::sqrt(static_cast<double>(dof)));
  const double cs = std::cos(theta);
  const double sn = std::sin(theta);
  double two_sided;  // P(|T| <= x)
  if (dof % 2 == 1) {
    // odd dof: (2/pi)(theta + sin*sum), terms cos^{2k+1} with ratio 2k/(2k+1)
    double term = cs;
    double sum = (dof > 1) ? cs : 0.0;
    for (int k = 1; 2 * k + 1 <= dof - 2; ++k) {
      term *= cs * cs * (2.0 * k) / (2.0 * k + 1.0);
      sum += term;
    }
    two_sided = (2.0 / std::numbers::pi) * (theta + sn * sum);
  } else {
    // even dof: sin*sum, terms cos^{2k} with ratio (2k-1)/(2k)
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; 2 * k <= dof - 2; ++k) {
      term *= cs * cs * (2.0 * k - 1.0) / (2.0 * k);
      sum += term;
    }
    two_sided = sn * sum;
  }
  return std::clamp(0.5 * (1.0 - two_sided), 0.0, 1.0);
}

/// Kolmogorov-Smirnov distance between an (already standardized) sample and
/// the standard normal distribution.
inline double ks_distance_standard_normal(std::vector<double> sample) {
  if (sample.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = normal_cdf(sample[i]);
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

}  // namespace covol
