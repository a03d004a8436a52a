#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "covol/asymptotics.hpp"
#include "covol/grid.hpp"

using namespace covol;

namespace {

double rel_gap(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(a)); }

}  // namespace

TEST(Nu, ConstantAndDegenerateCases) {
  const ModelSpec model = ModelSpec::constant(1.0, 1.0, 0.5);
  EXPECT_NEAR(nu({0.0, 1.0}, model), 0.5, 1e-13);
  const ModelSpec zero = ModelSpec::constant(1.0, 1.0, 0.0);
  EXPECT_NEAR(nu({0.0, 1.0}, zero), 0.0, 1e-15);
  EXPECT_NEAR(nu_ell(1, {0.0, 0.5}, model), 0.5, 1e-13);
  EXPECT_NEAR(nu_ell(2, {0.25, 0.5}, model), 0.25, 1e-13);
}

// Closed form for a time-varying volatility: integral of t over (0,1].
TEST(Nu, LinearVolatilityClosedForm) {
  ModelSpec model = ModelSpec::constant(1.0, 1.0, 1.0);
  model.sigma1 = [](double t) { return t; };
  EXPECT_NEAR(nu({0.0, 1.0}, model), 0.5, 1e-13);
  EXPECT_NEAR(nu_ell(1, {0.0, 1.0}, model), 1.0 / 3.0, 1e-13);
}

TEST(Nu, RejectsIntervalOutsideHorizon) {
  const ModelSpec model = ModelSpec::constant(1.0, 1.0, 0.5);
  EXPECT_THROW(nu({0.0, 2.0}, model), std::invalid_argument);
  EXPECT_THROW(nu_ell(3, {0.0, 1.0}, model), std::invalid_argument);
}

// Term-by-term reduction for synchronous equidistant constant coefficients:
// Var = (1 + rho^2)/n, so 0.125 at n = 10, rho = 0.5.
TEST(VarianceVn, SynchronousClosedForm) {
  const ModelSpec model = ModelSpec::constant(1.0, 1.0, 0.5);
  const ObservationGrid g = synchronous_grid(10, 1.0);
  const ReducedDesign d = build_reduced_design(g, g);
  const double var = variance_Vn(d, g, model);
  EXPECT_NEAR(var, 0.125, 1e-12);
  // independent route: Gaussian fourth-moment expansion
  EXPECT_LE(rel_gap(var, isserlis_variance_oracle(g, g, model)), 1e-10);
}

TEST(VarianceVn, ZeroRhoKeepsOnlyCrossTerm) {
  const ModelSpec model = ModelSpec::constant(1.0, 2.0, 0.0);
  const ObservationGrid g = synchronous_grid(10, 1.0);
  const ReducedDesign d = build_reduced_design(g, g);
  // only sum nu1 nu2 K survives: n * (1/n)(4/n) = 4/n
  EXPECT_NEAR(variance_Vn(d, g, model), 0.4, 1e-12);
}

// Worked 3x2 grids with rho = 1: hand reduction of the four terms gives
// 2/3 + 1/3 + 1/2 - 5/18 = 11/9, confirmed by the Isserlis oracle.
TEST(VarianceVn, WorkedGridsMatchHandValueAndOracle) {
  const ModelSpec model = ModelSpec::constant(1.0, 1.0, 1.0);
  const ObservationGrid gridI({0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0});
  const ObservationGrid gridJ({0.0, 0.5, 1.0});
  const ReducedDesign d = build_reduced_design(gridI, gridJ);
  const double var = variance_Vn(d, gridJ, model);
  EXPECT_NEAR(var, 11.0 / 9.0, 1e-12);
  EXPECT_LE(rel_gap(var, isserlis_variance_oracle(gridI, gridJ, model)), 1e-12);
}

TEST(VarianceVn, OracleAgreesOnRandomPairs) {
  const ModelSpec model = ModelSpec::sine(1.0, 0.4, 1.5, 0.5, 0.6);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto [gridI, gridJ] = poisson_grids(12.0, 9.0, 1.0, seed);
    const ReducedDesign d = build_reduced_design(gridI, gridJ);
    EXPECT_LE(rel_gap(variance_Vn(d, gridJ, model),
                      isserlis_variance_oracle(gridI, gridJ, model)),
              1e-10)
        << "seed " << seed;
  }
}

// Monte Carlo route on a genuinely nonsynchronous design: the sample
// variance of V_n on alternating grids must match the formula within 4 SE.
TEST(VarianceVn, MonteCarloAgreesOnAlternatingGrids) {
  const ModelSpec model = ModelSpec::constant(1.0, 1.0, 0.5);
  const auto [gridI, gridJ] = alternating_grids(40, 1.0);
  const ReducedDesign design = build_reduced_design(gridI, gridJ);
  const double want = variance_Vn(design, gridJ, model);

  const std::vector<double> master = master_grid_for(gridI, gridJ, 1);
  const CorrelatedIncrementSampler sampler(model, master);
  const auto posI = detail::grid_positions(master, gridI.times());
  const auto posJ = detail::grid_positions(master, gridJ.times());
  const std::size_t cells = sampler.interval_count();
  const int reps = 20000;
  std::vector<double> values(reps);
  for (int r = 0; r < reps; ++r) {
    std::vector<double> d1(cells), d2(cells);
    sampler.sample(derive_seed(909, r), d1, d2);
    std::vector<double> c1v(cells + 1, 0.0), c2v(cells + 1, 0.0);
    for (std::size_t k = 0; k < cells; ++k) {
      c1v[k + 1] = c1v[k] + d1[k];
      c2v[k + 1] = c2v[k] + d2[k];
    }
    std::vector<double> o1(posI.size()), o2(posJ.size());
    for (std::size_t k = 0; k < posI.size(); ++k) o1[k] = c1v[posI[k]];
    for (std::size_t k = 0; k < posJ.size(); ++k) o2[k] = c2v[posJ[k]];
    values[static_cast<std::size_t>(r)] = hayashi_yoshida_reduced(design, o1, o2);
  }
  const MomentSummary s = summarize(values);
  EXPECT_NEAR(s.variance, want, 4.0 * s.se_variance());
  // mean identity: E V_n is the integrated covolatility
  EXPECT_NEAR(s.mean, 0.5, 4.0 * s.se_mean());
}

// The merged partition covers (0, T], so the nu values of its intervals sum
// to the full integrated covolatility.
TEST(VarianceVn, ReducedDesignNuValuesSumToTotal) {
  const ModelSpec model = ModelSpec::sine(1.0, 0.5, 2.0, 0.3, 0.8);
  const auto [gridI, gridJ] = poisson_grids(18.0, 11.0, 1.0, 77);
  const ReducedDesign d = build_reduced_design(gridI, gridJ);
  KahanAccumulator acc;
  for (const Interval& iv : d.i_hat) acc.add(nu(iv, model));
  EXPECT_NEAR(acc.value(), nu({0.0, 1.0}, model), 1e-12);
}

TEST(Isserlis, SizeCapEnforced) {
  const ModelSpec model = ModelSpec::constant(1.0, 1.0, 0.5);
  const ObservationGrid g = synchronous_grid(150, 1.0);
  EXPECT_THROW(isserlis_variance_oracle(g, g, model), std::invalid_argument);
}

TEST(C1Statistic, SynchronousClosedFormAndSigmaRecovery) {
  // sync n = 10, T = 1, rho = 0: bracket = T^2/n * sigma1^2 sigma2^2 = 0.1
  const ModelSpec zero_rho = ModelSpec::constant(1.0, 1.0, 0.0);
  const ObservationGrid g = synchronous_grid(10, 1.0);
  EXPECT_NEAR(c1_statistic(g, g, zero_rho), 0.1, 1e-13);

  // with c_n = 1/n the bracket recovers sigma1^2 sigma2^2 (1 + rho^2) T^2
  const double s1 = 1.0, s2 = 1.5, rho = 0.5;
  const ModelSpec model = ModelSpec::constant(s1, s2, rho);
  const double sigma_limit = s1 * s1 * s2 * s2 * (1.0 + rho * rho);
  for (std::size_t n : {10u, 40u}) {
    const ObservationGrid grid = synchronous_grid(n, 1.0);
    const double got = c1_statistic(grid, grid, model) * static_cast<double>(n);
    EXPECT_NEAR(got, sigma_limit, 1e-10) << "n " << n;
  }
}

// The bracket computed on the raw pair equals the bracket on the merged
// design (the variance), as real numbers; 1e-12 relative covers the
// different summation orders.
TEST(C1Statistic, ReducedDesignSubstitutionInvariance) {
  const ModelSpec model = ModelSpec::sine(1.0, 0.4, 2.0, 0.7, 0.8);
  {
    const ObservationGrid gridI({0.0, 0.1, 0.2, 1.0});
    const ObservationGrid gridJ({0.0, 0.25, 1.0});
    const ReducedDesign d = build_reduced_design(gridI, gridJ);
    EXPECT_LE(rel_gap(c1_statistic(gridI, gridJ, model), variance_Vn(d, gridJ, model)), 1e-12);
  }
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const auto [gridI, gridJ] = poisson_grids(25.0, 8.0, 1.0, seed);
    const ReducedDesign d = build_reduced_design(gridI, gridJ);
    EXPECT_LE(rel_gap(c1_statistic(gridI, gridJ, model), variance_Vn(d, gridJ, model)), 1e-12)
        << "seed " << seed;
  }
}

// Alternating sampling: bracket/c_n approaches (sigma1 sigma2)^2 (2 + 1.5 rho^2).
TEST(C1Statistic, AlternatingSchemeLimit) {
  const double rho = 0.5;
  const ModelSpec model = ModelSpec::constant(1.0, 1.0, rho);
  const double limit = 2.0 + 1.5 * rho * rho;
  const auto [gridI, gridJ] = alternating_grids(200, 1.0);
  const double got = c1_statistic(gridI, gridJ, model) * 200.0;
  EXPECT_NEAR(got, limit, 0.02 * limit);
}

TEST(AbsMoment, KnownValuesAndQuadratureOracle) {
  EXPECT_NEAR(abs_moment(2.0), 1.0, 1e-14);
  EXPECT_NEAR(abs_moment(4.0), 3.0, 1e-13);
  EXPECT_NEAR(abs_moment(0.0), 1.0, 1e-14);
  // 64-node Gauss-Hermite oracle, exact for even powers
  const GaussHermiteRule& rule = GaussHermiteRule::cached(64);
  for (double r : {0.0, 2.0, 4.0}) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      acc += rule.weights[i] * std::pow(std::abs(std::numbers::sqrt2 * rule.nodes[i]), r);
    acc /= std::sqrt(std::numbers::pi);
    EXPECT_NEAR(abs_moment(r), acc, 1e-12) << "r " << r;
  }
  // odd powers kink at zero where Gauss-Hermite places no node, so the
  // 1e-12 oracle folds to the half axis where z^r phi(z) is smooth
  QuadratureSpec tight;
  tight.abs_tol = 1e-14;
  for (double r : {1.0, 3.0}) {
    const double folded =
        2.0 * integrate([r](double z) { return std::pow(z, r) * normal_pdf(z); }, 0.0, 40.0,
                        tight);
    EXPECT_NEAR(abs_moment(r), folded, 1e-12) << "r " << r;
  }
  EXPECT_NEAR(abs_moment(1.0), std::sqrt(2.0 / std::numbers::pi), 1e-14);
  EXPECT_THROW(abs_moment(-0.5), std::invalid_argument);
}

TEST(GaussianFunctional, BasicValues) {
  FunctionSpec square;
  square.f = [](double x) { return x * x; };
  square.declared_even = true;
  EXPECT_NEAR(gaussian_functional(square, 2.0), 4.0, 1e-12);

  FunctionSpec one;
  one.f = [](double) { return 1.0; };
  one.declared_even = true;
  EXPECT_NEAR(gaussian_functional(one, 3.0), 1.0, 1e-13);

  EXPECT_NEAR(gaussian_functional(FunctionSpec::abs_power_fn(1.0), 1.0), abs_moment(1.0),
              1e-14);
}

// Closed-form moment path against the Gauss-Hermite path for |x|^r.
TEST(GaussianFunctional, ClosedFormMatchesQuadraturePath) {
  for (double r : {0.0, 1.0, 2.0, 3.0, 4.0}) {
    FunctionSpec untagged;
    untagged.f = [r](double x) { return r == 0.0 ? 1.0 : std::pow(std::abs(x), r); };
    untagged.declared_even = true;
    untagged.growth_degree = r;
    for (double sigma : {0.5, 1.0, 2.0}) {
      const double closed = gaussian_functional(FunctionSpec::abs_power_fn(r), sigma);
      const double quad = gaussian_functional(untagged, sigma);
      EXPECT_LE(std::abs(closed - quad), 1e-10 * (1.0 + std::abs(closed)))
          << "r " << r << " sigma " << sigma;
    }
  }
}

TEST(GaussianFunctional, NonFiniteValueThrows) {
  FunctionSpec bad;
  bad.f = [](double x) { return 1.0 / (x - x); };
  EXPECT_THROW(gaussian_functional(bad, 1.0), NumericalError);
}

// Moment arithmetic from the closed forms:
// r = q = 1: mu2^2 + 2 mu1^2 mu2 - 3 mu1^4 = 1 + 4/pi - 12/pi^2 ~ 1.05739.
// g = x^2, h = 1: mu4 + 2 mu2^2 - 3 mu2^2 = 2.
TEST(SigmaBipower, MomentFormulaCases) {
  const ModelSpec unit = ModelSpec::constant(1.0, 1.0, 0.0);
  const double mu1 = abs_moment(1.0);
  const BipowerAsymptotics b11 =
      sigma_bipower(FunctionSpec::abs_power_fn(1.0), FunctionSpec::abs_power_fn(1.0), unit);
  const double want11 = 1.0 + 2.0 * mu1 * mu1 - 3.0 * mu1 * mu1 * mu1 * mu1;
  EXPECT_NEAR(b11.variance, want11, 1e-10);
  EXPECT_NEAR(b11.variance, 1.05739, 2e-5);
  EXPECT_NEAR(b11.limit, 2.0 / std::numbers::pi, 1e-12);

  const BipowerAsymptotics b20 =
      sigma_bipower(FunctionSpec::abs_power_fn(2.0), FunctionSpec::abs_power_fn(0.0), unit);
  EXPECT_NEAR(b20.variance, 2.0, 1e-10);
  EXPECT_NEAR(b20.limit, 1.0, 1e-12);
}

// Realized-volatility case equals 2 * integral of sigma^4 for every preset.
// Oracles: hand arithmetic for the constant and piecewise presets, the
// trapezoid route for the smooth sine preset.
TEST(SigmaBipower, QuadraticCaseEqualsTwiceIntegratedQuarticity) {
  const FunctionSpec g2 = FunctionSpec::abs_power_fn(2.0);
  const FunctionSpec one = FunctionSpec::abs_power_fn(0.0);

  const double c = 1.3;
  EXPECT_NEAR(sigma_bipower(g2, one, ModelSpec::constant(c, 1.0, 0.2)).variance,
              2.0 * c * c * c * c, 1e-10);

  // piecewise 0.8 then 1.4: integral of sigma^4 = (0.8^4 + 1.4^4)/2 = 2.1256
  EXPECT_NEAR(sigma_bipower(g2, one, ModelSpec::piecewise(0.8, 1.4, 1.0, 1.0, 0.3)).variance,
              2.0 * 2.1256, 1e-10);

  const ModelSpec sine = ModelSpec::sine(1.2, 0.5, 1.0, 0.0, 0.4);
  QuadratureSpec trap;
  trap.method = QuadratureMethod::trapezoid_on_mesh;
  trap.mesh_cells = 200000;
  const double quarticity =
      integrate([&](double t) { return std::pow(sine.sigma1(t), 4.0); }, 0.0, 1.0, trap);
  EXPECT_NEAR(sigma_bipower(g2, one, sine).variance, 2.0 * quarticity, 1e-6);
}

TEST(SigmaBipower, RejectsUndeclaredEvenness) {
  const ModelSpec unit = ModelSpec::constant(1.0, 1.0, 0.0);
  FunctionSpec odd;
  odd.f = [](double x) { return x; };
  odd.declared_even = true;  // declared but false
  odd.growth_degree = 1.0;
  EXPECT_THROW(sigma_bipower(odd, FunctionSpec::abs_power_fn(1.0), unit),
               std::invalid_argument);
}

TEST(RateFunction, ValuesAndMonotonicity) {
  EXPECT_DOUBLE_EQ(rate_function(0.0, 3.0), 0.0);
  EXPECT_DOUBLE_EQ(rate_function(1.0, 2.0), 0.25);
  const ModelSpec unit = ModelSpec::constant(1.0, 1.0, 0.0);
  const BipowerAsymptotics b11 =
      sigma_bipower(FunctionSpec::abs_power_fn(1.0), FunctionSpec::abs_power_fn(1.0), unit);
  EXPECT_NEAR(rate_function(1.0, b11.variance), 1.0 / (2.0 * 1.05739), 1e-4);
  EXPECT_THROW(rate_function(1.0, 0.0), std::invalid_argument);
  // even in x, decreasing in Sigma
  for (double x : {0.3, 1.0, 2.5}) {
    EXPECT_DOUBLE_EQ(rate_function(x, 1.7), rate_function(-x, 1.7));
    EXPECT_GT(rate_function(x, 1.0), rate_function(x, 2.0));
  }
}

TEST(CheckSpeed, PowerFamilyVerdicts) {
  // alpha = 0.3, beta = 1: all of the drift-free conditions hold
  const SpeedVerdict ok = check_speed({0.3, 1.0}, SamplingScheme::synchronous);
  EXPECT_TRUE(ok.admissible_drift_free());
  EXPECT_TRUE(ok.admissible_full());
  EXPECT_TRUE(ok.bipower_speed);
  EXPECT_FALSE(ok.heuristic);

  // alpha = 0.6 breaks b_n sqrt(c_n) -> 0
  const SpeedVerdict fast = check_speed({0.6, 1.0}, SamplingScheme::synchronous);
  EXPECT_FALSE(fast.bn_sqrt_cn_to_zero);
  EXPECT_FALSE(fast.admissible_drift_free());

  // alpha = 0 breaks b_n -> infinity
  const SpeedVerdict flat = check_speed({0.0, 1.0}, SamplingScheme::synchronous);
  EXPECT_FALSE(flat.bn_to_infinity);
  EXPECT_FALSE(flat.admissible_drift_free());

  // beta = 2 breaks the mesh condition r_n^2/c_n -> 0
  const SpeedVerdict mesh = check_speed({0.3, 2.0}, SamplingScheme::alternating);
  EXPECT_FALSE(mesh.mesh_condition);
  EXPECT_TRUE(mesh.bn_sqrt_cn_to_zero);

  // random grids only get order-of-magnitude verdicts
  EXPECT_TRUE(check_speed({0.3, 1.0}, SamplingScheme::poisson).heuristic);
}

// The numeric fallback reproduces the closed-form verdicts on power
// sequences and handles a genuinely non-power speed; always flagged
// heuristic.
TEST(CheckSpeed, NumericProbeMode) {
  const auto ok = check_speed_numeric([](double n) { return std::pow(n, 0.3); },
                                      [](double n) { return 1.0 / n; },
                                      SamplingScheme::synchronous);
  EXPECT_TRUE(ok.heuristic);
  EXPECT_TRUE(ok.admissible_drift_free());
  EXPECT_TRUE(ok.admissible_full());
  EXPECT_TRUE(ok.bipower_speed);

  const auto fast = check_speed_numeric([](double n) { return std::pow(n, 0.6); },
                                        [](double n) { return 1.0 / n; },
                                        SamplingScheme::synchronous);
  EXPECT_FALSE(fast.bn_sqrt_cn_to_zero);

  // b_n = log n grows too slowly against c_n = 1/n's log-corrected ratio?
  // no: log(n)/(sqrt(1/n) log n) = sqrt(n) diverges, and log n sqrt(1/n)
  // vanishes, so this non-power speed is admissible for the drift-free MDP
  const auto slow = check_speed_numeric([](double n) { return std::log(n); },
                                        [](double n) { return 1.0 / n; },
                                        SamplingScheme::synchronous);
  EXPECT_TRUE(slow.admissible_drift_free());

  EXPECT_THROW(check_speed_numeric([](double) { return -1.0; },
                                   [](double n) { return 1.0 / n; },
                                   SamplingScheme::synchronous),
               std::invalid_argument);
}
