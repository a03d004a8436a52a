#pragma once

// Monte Carlo laboratory for moderate-deviation behavior: m-dependent
// synthetic sequences built as moving averages, the blocking decomposition
// with its exact variance gap, Chen-Ledoux tail statistics, empirical
// rescaled log-tail experiments against the quadratic rate function, and a
// CLT sanity check underneath it all.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "covol/asymptotics.hpp"
#include "covol/design.hpp"
#include "covol/errors.hpp"
#include "covol/estimators.hpp"
#include "covol/grid.hpp"
#include "covol/model.hpp"
#include "covol/parallel.hpp"
#include "covol/paths.hpp"
#include "covol/rng.hpp"
#include "covol/stats.hpp"

namespace covol {

enum class BaseDistribution { gaussian, bounded, heavy_tail_t };

inline std::string to_string(BaseDistribution b) {
  switch (b) {
    case BaseDistribution::gaussian: return "gaussian";
    case BaseDistribution::bounded: return "bounded";
    case BaseDistribution::heavy_tail_t: return "t";
  }
  return "?";
}

/// m-dependent sequence X_k = sum_{j=0..m} c_j e_{k+j} over an iid base.
/// The bounded base is uniform on [-sqrt(3), sqrt(3)] (unit variance); the
/// heavy-tail base is Student t with integer dof.
struct MDepSequenceSpec {
  std::size_t m = 0;
  std::vector<double> coefficients = {1.0};  // window of length m+1
  BaseDistribution base = BaseDistribution::gaussian;
  int t_dof = 3;

  void validate() const {
    if (coefficients.size() != m + 1)
      throw std::invalid_argument("MDepSequenceSpec: window length must be m+1");
    if (base == BaseDistribution::heavy_tail_t && t_dof < 1)
      throw std::invalid_argument("MDepSequenceSpec: t_dof must be >= 1");
  }

  [[nodiscard]] double base_variance() const {
    switch (base) {
      case BaseDistribution::gaussian: return 1.0;
      case BaseDistribution::bounded: return 1.0;
      case BaseDistribution::heavy_tail_t:
        if (t_dof <= 2)
          throw std::invalid_argument("MDepSequenceSpec: t base has no variance for dof <= 2");
        return static_cast<double>(t_dof) / (t_dof - 2.0);
    }
    return 1.0;
  }

  /// gamma(h) = base variance * sum_j c_j c_{j+h}, zero beyond lag m.
  [[nodiscard]] double autocovariance(std::size_t lag) const {
    if (lag > m) return 0.0;
    double s = 0.0;
    for (std::size_t j = 0; j + lag <= m; ++j) s += coefficients[j] * coefficients[j + lag];
    return base_variance() * s;
  }

  /// lim Var(S_n)/n = gamma(0) + 2 sum_{h=1..m} gamma(h).
  [[nodiscard]] double long_run_variance() const {
    double s = autocovariance(0);
    for (std::size_t h = 1; h <= m; ++h) s += 2.0 * autocovariance(h);
    return s;
  }

  /// Support bound for the bounded base: |X_k| <= sqrt(3) sum |c_j|.
  [[nodiscard]] double support_bound() const {
    double s = 0.0;
    for (double c : coefficients) s += std::abs(c);
    return std::sqrt(3.0) * s;
  }

  /// Per-index log-tail log P(|X_k| > x), -infinity when the probability is
  /// exactly zero. Kept on the log scale because the Chen-Ledoux statistic
  /// probes thresholds where the probability itself underflows. Exact for
  /// the gaussian base and for the m = 0 t base; an upper bound (Hoeffding /
  /// union) otherwise, which is the right direction for checking the
  /// condition.
  [[nodiscard]] double log_tail(double x) const {
    constexpr double minus_inf = -std::numeric_limits<double>::infinity();
    if (x <= 0.0) return 0.0;
    switch (base) {
      case BaseDistribution::gaussian: {
        const double sd = std::sqrt(autocovariance(0));
        if (sd == 0.0) return minus_inf;
        return std::log(2.0) + normal_log_sf(x / sd);
      }
      case BaseDistribution::bounded: {
        if (x >= support_bound()) return minus_inf;
        double c2 = 0.0;
        for (double c : coefficients) c2 += c * c;
        return std::min(0.0, std::log(2.0) - x * x / (6.0 * c2));
      }
      case BaseDistribution::heavy_tail_t: {
        if (m == 0)
          return std::log(2.0 * student_t_sf(x / std::abs(coefficients[0]), t_dof));
        double p = 0.0;
        const double w = static_cast<double>(m + 1);
        for (double c : coefficients) {
          if (c != 0.0) p += 2.0 * student_t_sf(x / (w * std::abs(c)), t_dof);
        }
        return std::min(0.0, std::log(p));
      }
    }
    return 0.0;
  }

  [[nodiscard]] double tail(double x) const { return std::exp(log_tail(x)); }
};

namespace detail {

inline double draw_base(CounterRng& rng, const MDepSequenceSpec& spec) {
  switch (spec.base) {
    case BaseDistribution::gaussian: return rng.normal();
    case BaseDistribution::bounded: return std::sqrt(3.0) * (2.0 * rng.uniform01() - 1.0);
    case BaseDistribution::heavy_tail_t: return rng.student_t(spec.t_dof);
  }
  return 0.0;
}

}  // namespace detail

inline std::vector<double> generate_mdependent(const MDepSequenceSpec& spec, std::size_t n,
                                               std::uint64_t seed) {
  spec.validate();
  CounterRng rng(seed);
  std::vector<double> eps(n + spec.m);
  for (double& e : eps) e = detail::draw_base(rng, spec);
  std::vector<double> x(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= spec.m; ++j) acc += spec.coefficients[j] * eps[k + j];
    x[k] = acc;
  }
  return x;
}

/// n = k_n p + remainder with big blocks Y_k summing the indices strictly
/// between consecutive multiples of p; the multiples themselves and the
/// final indices are kept separately so S_n is reconstructed exactly.
/// (`remainder`, not r_n: that name belongs to the grid mesh.)
struct BlockDecomposition {
  std::vector<double> block_sums;  // Y_k, k = 1..k_n
  std::vector<double> boundary;    // X_{l p}, l = 1..k_n
  std::vector<double> tail;        // X_j past the last full block
  std::size_t k_n = 0, remainder = 0, p = 0;
};

inline BlockDecomposition block_decompose(std::span<const double> seq, std::size_t p) {
  if (p <= 1) throw std::invalid_argument("block_decompose: p must be > 1");
  const std::size_t n = seq.size();
  BlockDecomposition d;
  d.p = p;
  d.k_n = n / p;
  d.remainder = n - d.k_n * p;
  d.block_sums.reserve(d.k_n);
  d.boundary.reserve(d.k_n);
  for (std::size_t k = 1; k <= d.k_n; ++k) {
    KahanAccumulator acc;
    for (std::size_t j = (k - 1) * p + 1; j < k * p; ++j) acc.add(seq[j - 1]);
    d.block_sums.push_back(acc.value());
    d.boundary.push_back(seq[k * p - 1]);
  }
  d.tail.assign(seq.begin() + static_cast<std::ptrdiff_t>(d.k_n * p), seq.end());
  return d;
}

/// Exact Delta_n / n = (Var S_n - Var sum Y_k) / n from the closed-form
/// moving-average covariances; the lag-pair counts over the blocked index
/// set are computed by integer arithmetic.
inline double blocking_variance_gap(const MDepSequenceSpec& spec, std::size_t n, std::size_t p) {
  if (p <= 1) throw std::invalid_argument("blocking_variance_gap: p must be > 1");
  spec.validate();
  const std::size_t k_n = n / p;
  const std::size_t K = k_n * p;

  double var_s = static_cast<double>(n) * spec.autocovariance(0);
  for (std::size_t h = 1; h <= spec.m && h < n; ++h)
    var_s += 2.0 * static_cast<double>(n - h) * spec.autocovariance(h);

  // B = {1..K} minus multiples of p; N(h) = #{j : j, j+h both in B}
  double var_y = spec.autocovariance(0) * static_cast<double>(K - k_n);
  for (std::size_t h = 1; h <= spec.m && h < K; ++h) {
    const std::size_t M = K - h;
    std::size_t count = M - M / p - ((M + h) / p - h / p);
    if (h % p == 0) count += M / p;
    var_y += 2.0 * spec.autocovariance(h) * static_cast<double>(count);
  }
  return (var_s - var_y) / static_cast<double>(n);
}

inline constexpr double kMinusInfinity = -std::numeric_limits<double>::infinity();

/// Chen-Ledoux tail statistic (1/b_n^2) log(n max_i P(|X_i| > b_n sqrt(n)))
/// from the analytic per-index log-tails; -infinity when the tail is exactly
/// zero (bounded support beyond its bound).
inline double chen_ledoux_statistic(const MDepSequenceSpec& spec, std::size_t n, double b_n) {
  if (!(b_n > 0.0)) throw std::invalid_argument("chen_ledoux_statistic: b_n must be > 0");
  const double log_p = spec.log_tail(b_n * std::sqrt(static_cast<double>(n)));
  if (log_p == kMinusInfinity) return kMinusInfinity;
  return (std::log(static_cast<double>(n)) + log_p) / (b_n * b_n);
}

struct ChenLedouxEstimate {
  double statistic = 0.0;
  bool upper_bound = false;  // no exceedance observed; statistic uses 1/R
  std::size_t max_count = 0;
  std::size_t replicates = 0;
};

/// Estimated mode: per-index exceedance frequencies over R independent
/// sequences; a zero count is reported as an upper bound via 1/R.
inline ChenLedouxEstimate chen_ledoux_estimate(const MDepSequenceSpec& spec, std::size_t n,
                                               double b_n, std::size_t replicates,
                                               std::uint64_t seed) {
  if (replicates == 0) throw std::invalid_argument("chen_ledoux_estimate: need replicates");
  const double threshold = b_n * std::sqrt(static_cast<double>(n));
  std::vector<std::size_t> counts(n, 0);
  for (std::size_t r = 0; r < replicates; ++r) {
    const std::vector<double> x = generate_mdependent(spec, n, derive_seed(seed, r));
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(x[i]) > threshold) ++counts[i];
  }
  ChenLedouxEstimate out;
  out.replicates = replicates;
  out.max_count = *std::max_element(counts.begin(), counts.end());
  const double phat = out.max_count > 0
                          ? static_cast<double>(out.max_count) / static_cast<double>(replicates)
                          : 1.0 / static_cast<double>(replicates);
  out.upper_bound = (out.max_count == 0);
  out.statistic = (std::log(static_cast<double>(n)) + std::log(phat)) / (b_n * b_n);
  return out;
}

struct ChenLedouxVerdict {
  std::vector<std::size_t> n_list;
  std::vector<double> statistics;
  bool holds = false;
  double divergence_threshold = -10.0;
};

/// Divergence check along a run of n values with b_n = n^alpha: the
/// condition is judged to hold when the statistic is nonincreasing along the
/// run and its final value sits below the (clearly separated) threshold.
inline ChenLedouxVerdict chen_ledoux_verdict(const MDepSequenceSpec& spec,
                                             std::vector<std::size_t> n_list, double alpha,
                                             double divergence_threshold = -10.0) {
  if (n_list.size() < 2)
    throw std::invalid_argument("chen_ledoux_verdict: need at least two n values");
  ChenLedouxVerdict v;
  v.n_list = std::move(n_list);
  v.divergence_threshold = divergence_threshold;
  for (std::size_t n : v.n_list)
    v.statistics.push_back(
        chen_ledoux_statistic(spec, n, std::pow(static_cast<double>(n), alpha)));
  bool nonincreasing = true;
  for (std::size_t i = 1; i < v.statistics.size(); ++i)
    if (v.statistics[i] > v.statistics[i - 1]) nonincreasing = false;
  v.holds = nonincreasing && v.statistics.back() <= divergence_threshold;
  return v;
}

enum class MdpTarget { HY_V, HY_U, Bipower, MDepSynthetic };

inline std::string to_string(MdpTarget t) {
  switch (t) {
    case MdpTarget::HY_V: return "hy_v";
    case MdpTarget::HY_U: return "hy_u";
    case MdpTarget::Bipower: return "bipower";
    case MdpTarget::MDepSynthetic: return "mdep";
  }
  return "?";
}

struct MdpExperimentConfig {
  MdpTarget target = MdpTarget::MDepSynthetic;
  ModelSpec model = ModelSpec::constant(1.0, 1.0, 0.5);
  SamplingScheme scheme = SamplingScheme::synchronous;
  double poisson_rate1 = 100.0, poisson_rate2 = 100.0;
  MDepSequenceSpec mdep;
  FunctionSpec g = FunctionSpec::abs_power_fn(1.0);
  FunctionSpec h = FunctionSpec::abs_power_fn(1.0);
  BipowerRange range = BipowerRange::full;
  std::vector<std::size_t> n_list = {100, 1000};
  SpeedSpec speed;
  std::vector<double> deltas = {1.0};
  std::size_t replicates = 1000;
  std::uint64_t seed = 1;
  int substeps = 8;
  std::size_t workers = 0;  // 0 = hardware concurrency
  bool force = false;       // run even if the speed verdict is inadmissible

  void validate() const {
    if (replicates < 1000)
      throw std::invalid_argument("MdpExperimentConfig: need at least 1000 replicates");
    if (n_list.empty()) throw std::invalid_argument("MdpExperimentConfig: empty n list");
    for (std::size_t i = 1; i < n_list.size(); ++i)
      if (n_list[i] <= n_list[i - 1])
        throw std::invalid_argument("MdpExperimentConfig: n list must be increasing");
    if (deltas.empty()) throw std::invalid_argument("MdpExperimentConfig: empty delta list");
    for (double d : deltas)
      if (!(d > 0.0)) throw std::invalid_argument("MdpExperimentConfig: deltas must be > 0");
    if (target == MdpTarget::MDepSynthetic) mdep.validate();
  }

  [[nodiscard]] bool speed_admissible() const {
    const SpeedVerdict v = check_speed(speed, scheme);
    switch (target) {
      case MdpTarget::HY_V: return v.admissible_drift_free();
      case MdpTarget::HY_U: return v.admissible_full();
      case MdpTarget::Bipower:
      case MdpTarget::MDepSynthetic: return v.bipower_speed;
    }
    return false;
  }
};

struct MdpCell {
  std::size_t n = 0;
  double b_n = 0.0;
  double delta = 0.0;
  std::size_t count = 0;
  std::size_t replicates = 0;
  double phat = 0.0;
  double rescaled = 0.0;  // -(1/b_n^2) log(phat); a lower bound when count = 0
  double se_band = 0.0;   // one-SE half width of `rescaled` (binomial, delta method)
  double L_theory = 0.0;
  bool lower_bound = false;
};

struct MdpReport {
  std::vector<MdpCell> cells;
  std::vector<std::pair<std::size_t, double>> sigma_per_n;
  bool speed_admissible = true;
};

namespace detail {

struct TargetRun {
  std::function<double(std::uint64_t)> raw;  // replicate seed -> raw statistic
  double center = 0.0;                        // subtracted before rescaling
  double denom = 1.0;                         // (raw - center)/denom is the MDP statistic
  double sigma = 0.0;                         // variance in L(x) = x^2 / (2 sigma)
};

inline TargetRun prepare_target(const MdpExperimentConfig& cfg, std::size_t n,
                                std::size_t n_index, const QuadratureSpec& quad) {
  TargetRun run;
  const double b_n = cfg.speed.b(static_cast<double>(n));
  switch (cfg.target) {
    case MdpTarget::MDepSynthetic: {
      auto spec = std::make_shared<MDepSequenceSpec>(cfg.mdep);
      run.raw = [spec, n](std::uint64_t s) {
        const std::vector<double> x = generate_mdependent(*spec, n, s);
        KahanAccumulator acc;
        for (double v : x) acc.add(v);
        return acc.value();
      };
      run.center = 0.0;
      run.denom = b_n * std::sqrt(static_cast<double>(n));
      run.sigma = spec->long_run_variance();
      return run;
    }
    case MdpTarget::Bipower: {
      const ObservationGrid grid = synchronous_grid(
          cfg.range == BipowerRange::full ? n + 1 : n, cfg.model.horizon);
      auto sampler =
          std::make_shared<CorrelatedIncrementSampler>(cfg.model, grid.times(), quad);
      auto g = std::make_shared<FunctionSpec>(cfg.g);
      auto h = std::make_shared<FunctionSpec>(cfg.h);
      const BipowerRange range = cfg.range;
      const std::size_t intervals = grid.interval_count();
      run.raw = [sampler, g, h, n, range, intervals](std::uint64_t s) {
        std::vector<double> d1(intervals), d2(intervals);
        sampler->sample(s, d1, d2);
        const double root_n = std::sqrt(static_cast<double>(n));
        const std::size_t terms = (range == BipowerRange::full) ? n : n - 1;
        KahanAccumulator acc;
        for (std::size_t i = 0; i < terms; ++i)
          acc.add((*g)(root_n * d1[i]) * (*h)(root_n * d1[i + 1]));
        return acc.value() / static_cast<double>(n);
      };
      const BipowerAsymptotics asy = sigma_bipower(cfg.g, cfg.h, cfg.model, 1, quad);
      run.center = asy.limit;
      run.denom = b_n / std::sqrt(static_cast<double>(n));
      run.sigma = asy.variance;
      return run;
    }
    case MdpTarget::HY_V:
    case MdpTarget::HY_U: {
      ObservationGrid gridI = synchronous_grid(n, cfg.model.horizon);
      ObservationGrid gridJ = gridI;
      if (cfg.scheme == SamplingScheme::alternating) {
        auto pair = alternating_grids(n, cfg.model.horizon);
        gridI = std::move(pair.first);
        gridJ = std::move(pair.second);
      } else if (cfg.scheme == SamplingScheme::poisson) {
        auto pair = poisson_grids(cfg.poisson_rate1, cfg.poisson_rate2, cfg.model.horizon,
                                  derive_seed(cfg.seed, 1000 + n_index));
        gridI = std::move(pair.first);
        gridJ = std::move(pair.second);
      }
      const bool with_drift = (cfg.target == MdpTarget::HY_U) && cfg.model.has_drift();
      const int substeps = with_drift ? cfg.substeps : 1;
      auto master = std::make_shared<std::vector<double>>(
          master_grid_for(gridI, gridJ, substeps));
      auto sampler =
          std::make_shared<CorrelatedIncrementSampler>(cfg.model, *master, quad);
      auto design = std::make_shared<ReducedDesign>(build_reduced_design(gridI, gridJ));
      auto posI = std::make_shared<std::vector<std::size_t>>(
          detail::grid_positions(*master, gridI.times()));
      auto posJ = std::make_shared<std::vector<std::size_t>>(
          detail::grid_positions(*master, gridJ.times()));

      const double sigma_n =
          c1_statistic(gridI, gridJ, cfg.model, quad) / cfg.speed.c(static_cast<double>(n));
      run.sigma = sigma_n;
      run.center = nu(Interval{0.0, cfg.model.horizon}, cfg.model, quad);
      run.denom = b_n * std::sqrt(cfg.speed.c(static_cast<double>(n)));

      if (!with_drift) {
        run.raw = [sampler, design, posI, posJ, master](std::uint64_t s) {
          const std::size_t cells = sampler->interval_count();
          std::vector<double> d1(cells), d2(cells);
          sampler->sample(s, d1, d2);
          std::vector<double> c1(cells + 1, 0.0), c2(cells + 1, 0.0);
          for (std::size_t k = 0; k < cells; ++k) {
            c1[k + 1] = c1[k] + d1[k];
            c2[k + 1] = c2[k] + d2[k];
          }
          std::vector<double> o1(posI->size()), o2(posJ->size());
          for (std::size_t k = 0; k < posI->size(); ++k) o1[k] = c1[(*posI)[k]];
          for (std::size_t k = 0; k < posJ->size(); ++k) o2[k] = c2[(*posJ)[k]];
          return hayashi_yoshida_reduced(*design, o1, o2);
        };
      } else {
        auto model = std::make_shared<ModelSpec>(cfg.model);
        run.raw = [sampler, design, posI, posJ, master, model](std::uint64_t s) {
          PathPair p = simulate_paths_with(*sampler, *model, *master, s);
          std::vector<double> o1(posI->size()), o2(posJ->size());
          for (std::size_t k = 0; k < posI->size(); ++k) o1[k] = p.x1[(*posI)[k]];
          for (std::size_t k = 0; k < posJ->size(); ++k) o2[k] = p.x2[(*posJ)[k]];
          return hayashi_yoshida_reduced(*design, o1, o2);
        };
      }
      return run;
    }
  }
  throw std::invalid_argument("prepare_target: unknown target");
}

inline std::vector<double> run_replicates(const TargetRun& run, std::size_t replicates,
                                          std::uint64_t seed, std::size_t n_index,
                                          std::size_t workers) {
  const std::uint64_t base = derive_seed(seed, n_index);
  return parallel_map(replicates, workers, [&](std::size_t r) {
    const std::uint64_t rep_seed = derive_seed(base, r);
    const double value = run.raw(rep_seed);
    if (!std::isfinite(value))
      throw NumericalError("mdp experiment: non-finite statistic, replicate seed " +
                           std::to_string(rep_seed));
    return value;
  });
}

}  // namespace detail

/// For each n: simulate R replicates, rescale, count two-sided exceedances
/// |statistic| > delta, and report the rescaled empirical log-tail
/// -(1/b_n^2) log(phat) next to the theoretical L(delta) = delta^2/(2 Sigma).
/// A zero count is reported as the lower bound -(1/b_n^2) log(1/R) with a
/// flag rather than smoothed: no invented probability mass.
inline MdpReport run_mdp_experiment(const MdpExperimentConfig& cfg,
                                    const QuadratureSpec& quad = {}) {
  cfg.validate();
  MdpReport report;
  report.speed_admissible = cfg.speed_admissible();
  if (!report.speed_admissible && !cfg.force)
    throw std::invalid_argument(
        "run_mdp_experiment: inadmissible speed (set force to run anyway)");

  for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
    const std::size_t n = cfg.n_list[ni];
    const double b_n = cfg.speed.b(static_cast<double>(n));
    const detail::TargetRun run = detail::prepare_target(cfg, n, ni, quad);
    const std::vector<double> raw =
        detail::run_replicates(run, cfg.replicates, cfg.seed, ni, cfg.workers);
    report.sigma_per_n.emplace_back(n, run.sigma);

    for (double delta : cfg.deltas) {
      MdpCell cell;
      cell.n = n;
      cell.b_n = b_n;
      cell.delta = delta;
      cell.replicates = cfg.replicates;
      for (double v : raw)
        if (std::abs((v - run.center) / run.denom) > delta) ++cell.count;
      cell.phat = static_cast<double>(cell.count) / static_cast<double>(cfg.replicates);
      cell.lower_bound = (cell.count == 0);
      const double p_for_log =
          cell.lower_bound ? 1.0 / static_cast<double>(cfg.replicates) : cell.phat;
      cell.rescaled = -std::log(p_for_log) / (b_n * b_n);
      cell.se_band = std::sqrt(p_for_log * (1.0 - p_for_log) /
                               static_cast<double>(cfg.replicates)) /
                     (p_for_log * b_n * b_n);
      cell.L_theory = rate_function(delta, run.sigma);
      report.cells.push_back(cell);
    }
  }
  return report;
}

struct CltResult {
  double ks_distance = 0.0;
  bool pass = false;
  std::size_t replicates = 0;
  std::size_t n = 0;
};

/// Kolmogorov-Smirnov distance of the standardized replicate statistics
/// (largest n in the config) against the standard normal.
inline CltResult clt_check(const MdpExperimentConfig& cfg, double ks_threshold = 0.02,
                           const QuadratureSpec& quad = {}) {
  cfg.validate();
  if (cfg.replicates < 10000)
    throw std::invalid_argument("clt_check: need at least 10^4 replicates");
  const std::size_t ni = cfg.n_list.size() - 1;
  const std::size_t n = cfg.n_list[ni];
  const detail::TargetRun run = detail::prepare_target(cfg, n, ni, quad);
  std::vector<double> raw = detail::run_replicates(run, cfg.replicates, cfg.seed, ni, cfg.workers);

  const MomentSummary s = summarize(raw);
  const double sd = std::sqrt(s.variance);
  if (!(sd > 0.0)) throw std::invalid_argument("clt_check: degenerate statistic (zero variance)");
  for (double& v : raw) v = (v - s.mean) / sd;

  CltResult out;
  out.replicates = cfg.replicates;
  out.n = n;
  out.ks_distance = ks_distance_standard_normal(std::move(raw));
  out.pass = out.ks_distance < ks_threshold;
  return out;
}

}  // namespace covol
