#include <gtest/gtest.h>

#include <cmath>

#include "nlsregime/rectify.hpp"

using namespace nlsr;

namespace {
DispersionModel model(const std::string& f) {
  FamilySpec s;
  s.family = f;
  return make_synthetic({s});
}
}  // namespace

TEST(GammaPoly, SqrtSecondOrder) {
  const DispersionModel m = model("sqrt");
  const TaylorJet j = jet_at(m, 1, 1.0);
  // sqrt2 * (1 + 0.1/2 + (1/2)(1/(2 sqrt2))*sqrt2*0.01) = sqrt2 * 1.05125
  EXPECT_NEAR(gamma_poly(j, 2, 0.1), std::sqrt(2.0) * 1.05125, 1e-14);
}

TEST(GammaPoly, ConstantTerm) {
  const DispersionModel m = model("2-cos");
  const TaylorJet j = jet_at(m, 1, 0.9);
  for (int nu = 1; nu <= 4; ++nu) EXPECT_DOUBLE_EQ(gamma_poly(j, nu, 0.0), m.omega(1, 0.9));
}

TEST(GammaPoly, QuadraticFamilyExact) {
  const DispersionModel m = model("k2");
  const TaylorJet j = jet_at(m, 1, 1.0);
  for (double e : {-0.3, 0.01, 0.2}) EXPECT_NEAR(gamma_poly(j, 2, e), m.omega(1, 1.0 + e), 1e-15);
}

TEST(YInverse, FirstOrderSqrt) {
  const DispersionModel m = model("sqrt");
  const TaylorJet j = jet_at(m, 1, 1.0);
  const double xi = y_inverse(m, j, 1, 0.1);
  EXPECT_NEAR(xi, (std::sqrt(2.21) - std::sqrt(2.0)) * std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(gamma_poly(j, 1, xi), m.omega(1, 1.1), 1e-14);
}

TEST(YInverse, IdentityForQuadraticFamily) {
  const DispersionModel m = model("k2");
  const TaylorJet j = jet_at(m, 1, 1.0);
  for (double e : {-0.09, -0.01, 0.02, 0.08}) EXPECT_NEAR(y_inverse(m, j, 2, e), e, 1e-14);
}

TEST(YInverse, SecondOrderRadicalTendsToFirstOrder) {
  // cospoly with a small cos^2 term: omega'' -> 0 at k* = pi/2 as the coefficient shrinks
  double prev = 1.0;
  for (double eps : {1e-4, 1e-6, 1e-8}) {
    FamilySpec f;
    f.family = "cospoly";
    f.coeffs = {2.0, -1.0, eps};
    const DispersionModel m = make_synthetic({f});
    const TaylorJet j = jet_at(m, 1, kPi / 2);
    const double d = std::abs(y_inverse(m, j, 2, 0.05) - y_inverse(m, j, 1, 0.05));
    EXPECT_LT(d, prev);
    prev = d;
  }
  EXPECT_LT(prev, 1e-9);
}

TEST(YForward, RoundTripAndFixedPoint) {
  const DispersionModel m = model("2-cos");
  const TaylorJet j = jet_at(m, 1, kPi / 3);
  for (int nu = 1; nu <= 4; ++nu) {
    EXPECT_NEAR(y_forward(m, j, nu, 0.0), 0.0, 1e-15);
    for (int i = -10; i <= 10; ++i) {
      const double eta = 0.01 * i;
      EXPECT_NEAR(y_forward(m, j, nu, y_inverse(m, j, nu, eta)), eta, 1e-10);
    }
  }
}

TEST(YForward, TwoMinusCosResidual) {
  const DispersionModel m = model("2-cos");
  const TaylorJet j = jet_at(m, 1, kPi / 3);
  const double eta = y_forward(m, j, 2, 0.05);
  EXPECT_LE(std::abs(m.omega(1, kPi / 3 + eta) - gamma_poly(j, 2, 0.05)), 1e-10);
}

TEST(RectifyMap, ResidualBelowTolerance) {
  for (const std::string f : {"2-cos", "sqrt"}) {
    const DispersionModel m = model(f);
    const TaylorJet j = jet_at(m, 1, 1.0);
    for (int nu = 1; nu <= 4; ++nu) {
      const RectifyMap map(m, j, nu, 0.1);
      const RectifyResidual r = rectify_residual(map);
      EXPECT_LE(r.max_residual, 1e-10) << f << " nu=" << nu;
      EXPECT_LE(r.max_roundtrip, 1e-10);
    }
  }
}

TEST(RectifyMap, DoubletAntisymmetry) {
  const DispersionModel m = model("sqrt");
  const RectifyMap map(m, jet_at(m, 1, 1.0), 3, 0.1);
  for (double xi : {-0.07, 0.03, 0.09}) {
    EXPECT_NEAR(map.forward_signed(-1, xi), -map.forward(-xi), 1e-12);
    EXPECT_NEAR(map.inverse_signed(-1, map.forward_signed(-1, xi)), xi, 1e-12);
  }
}

TEST(RectifyMap, IdentitySwitch) {
  const DispersionModel m = model("sqrt");
  const RectifyMap map(m, jet_at(m, 1, 1.0), 2, 0.1, true);
  EXPECT_DOUBLE_EQ(map.inverse(0.04), 0.04);
  EXPECT_DOUBLE_EQ(map.forward(0.04), 0.04);
}

// |Y^{-1}(eta) - eta| ~ eta^{nu+1}
TEST(YInverseOffset, SlopeNuPlusOne) {
  const DispersionModel m = model("sqrt");
  const TaylorJet j = jet_at(m, 1, 1.0);
  const rvec etas = geomspace(1e-3, 1e-1, 7);
  for (int nu = 1; nu <= 4; ++nu) {
    rvec off;
    for (double e : etas) off.push_back(std::abs(y_inverse_offset(m, j, nu, e)));
    const SlopeFit f = fit_loglog(etas, off);
    EXPECT_NEAR(f.slope, nu + 1.0, 0.3) << "nu=" << nu;
  }
}

TEST(SafeguardedNewton, FallsBackToBisection) {
  // derivative deliberately wrong: Newton alone would stall
  const double x = safeguarded_newton([](double x) { return x * x * x - 0.125; }, [](double) { return 1e-9; },
                                      0.9, 0.0, 1.0);
  EXPECT_NEAR(x, 0.5, 1e-10);
}
