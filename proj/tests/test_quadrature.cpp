#include <gtest/gtest.h>

#include <cmath>

#include "covol/errors.hpp"
#include "covol/quadrature.hpp"

using namespace covol;

TEST(Quadrature, PolynomialsExactUnderGaussLegendre) {
  // a single 15-point panel integrates degree <= 29 exactly
  for (int k : {0, 2, 5, 11, 20}) {
    const double got = integrate([k](double t) { return std::pow(t, k); }, 0.0, 1.0);
    EXPECT_NEAR(got, 1.0 / (k + 1.0), 1e-14) << "degree " << k;
  }
}

TEST(Quadrature, LinearIntegrandClosedForm) {
  EXPECT_NEAR(integrate([](double t) { return t; }, 0.0, 1.0), 0.5, 1e-14);
}

TEST(Quadrature, OscillatoryIntegrandConverges) {
  const double got = integrate([](double t) { return std::sin(50.0 * t); }, 0.0, 1.0);
  const double want = (1.0 - std::cos(50.0)) / 50.0;
  EXPECT_NEAR(got, want, 1e-11);
}

TEST(Quadrature, BreakpointsMakeJumpsExact) {
  // step function: exact once the jump is a panel boundary
  auto f = [](double t) { return t < 0.5 ? 1.0 : 3.0; };
  const std::vector<double> brk = {0.5};
  const double got = integrate(f, 0.0, 1.0, {}, brk);
  EXPECT_NEAR(got, 2.0, 1e-13);
}

TEST(Quadrature, MaxRefinementFailureThrows) {
  QuadratureSpec spec;
  spec.max_depth = 3;
  spec.abs_tol = 1e-15;
  spec.rel_tol = 0.0;
  // integrable endpoint singularity cannot reach 1e-15 in 3 levels
  EXPECT_THROW(integrate([](double t) { return 1.0 / std::sqrt(t + 1e-300); }, 0.0, 1.0, spec),
               NumericalError);
}

TEST(Quadrature, TrapezoidMethodApproximates) {
  QuadratureSpec spec;
  spec.method = QuadratureMethod::trapezoid_on_mesh;
  spec.mesh_cells = 20000;
  const double got = integrate([](double t) { return t * t; }, 0.0, 1.0, spec);
  EXPECT_NEAR(got, 1.0 / 3.0, 1e-8);
}

TEST(Quadrature, SpecValidation) {
  QuadratureSpec spec;
  spec.abs_tol = 0.0;
  EXPECT_THROW(integrate([](double) { return 1.0; }, 0.0, 1.0, spec), std::invalid_argument);
}

TEST(Quadrature, GaussHermiteIntegratesMoments) {
  // against exp(-x^2): integral of x^{2k} = Gamma(k + 1/2)
  const GaussHermiteRule& rule = GaussHermiteRule::cached(64);
  for (int k : {0, 1, 2, 5}) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      acc += rule.weights[i] * std::pow(rule.nodes[i], 2 * k);
    EXPECT_NEAR(acc, std::tgamma(k + 0.5), 1e-12 * std::tgamma(k + 0.5)) << "k=" << k;
  }
}
