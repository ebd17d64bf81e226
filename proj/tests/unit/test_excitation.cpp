#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "nlsregime/excitation.hpp"

using namespace nlsr;

namespace {

struct Setup {
  DispersionModel model;
  RectifyMap rect;
  DoubletExcitation exc;
};

Setup setup(double k_star = 1.0) {
  FamilySpec f;
  f.family = "sqrt";
  DispersionModel m = make_synthetic({f});
  RectifyMap r(m, jet_at(m, 1, k_star), 2, 0.1);
  DoubletExcitation e;
  e.beta = 0.05;
  e.rho = 0.0025;
  e.k_star = k_star;
  e.h.shift = 0.2;  // asymmetric so the conjugation check is not trivially real
  return {m, r, e};
}

}  // namespace

TEST(Envelope, RampAndBump) {
  EnvelopeSpec env{0.1};
  EXPECT_EQ(env.psi(-0.01), 0.0);
  EXPECT_EQ(env.psi(0.1), 1.0);
  EXPECT_EQ(env.psi0(0.15), 0.0);
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate([&](double t) { return env.psi0(t); }, 0.0, 0.1);
  EXPECT_NEAR(integral, 1.0, 1e-10);
  EXPECT_NEAR(env.psi(0.05), 0.5, 1e-12);
}

TEST(Envelope, CutoffShape) {
  EXPECT_EQ(cutoff(0.04, 0.1), 1.0);
  EXPECT_EQ(cutoff(0.1, 0.1), 0.0);
  EXPECT_EQ(cutoff(-0.07, 0.1), cutoff(0.07, 0.1));
  EXPECT_GT(cutoff(0.07, 0.1), 0.0);
  EXPECT_LT(cutoff(0.07, 0.1), 1.0);
}

TEST(Profile, GaussianTransformPair) {
  Profile p;  // e^{-q^2} -> sqrt(pi) e^{-y^2/4}
  EXPECT_NEAR(std::abs(p.h(1.0) - std::sqrt(kPi) * std::exp(-0.25)), 0.0, 1e-12);
}

TEST(Current, VanishesOutsideSupport) {
  auto s = setup();
  EXPECT_EQ(current_amplitude(s.exc, s.rect, 1, 1.0, 1.5 * s.exc.tau0), 0.0);
  EXPECT_EQ(current_amplitude(s.exc, s.rect, 1, 1.0 + 0.11, 0.05), 0.0);
  EXPECT_NE(current_amplitude(s.exc, s.rect, 1, 1.0 + 0.001, 0.05), 0.0);
}

TEST(Current, RealityPairing) {
  auto s = setup();
  for (double eta : {-0.08, -0.01, 0.0, 0.005, 0.06})
    for (double tau : {0.02, 0.05, 0.08}) {
      const cplx a = current_amplitude(s.exc, s.rect, 1, s.exc.k_star + eta, tau);
      const cplx b = current_amplitude(s.exc, s.rect, -1, -s.exc.k_star - eta, tau);
      EXPECT_NEAR(std::abs(b - std::conj(a)), 0.0, 1e-12 * std::max(1.0, std::abs(a)));
    }
}

TEST(LinearResponse, FrozenAfterRamp) {
  auto s = setup();
  const double k = s.exc.k_star + 0.003;
  EXPECT_EQ(linear_response(s.exc, s.rect, 1, k, 0.1), linear_response(s.exc, s.rect, 1, k, 0.7));
}

TEST(LinearResponse, GaussianTailOutsideBetaWindow) {
  auto s = setup();
  s.exc.h.shift = 0.0;
  EXPECT_LT(std::abs(linear_response(s.exc, s.rect, 1, s.exc.k_star + 10.5 * s.exc.beta, 0.5)), 1e-12);
}

TEST(LinearResponse, EqualsMinusIntegratedCurrent) {
  auto s = setup();
  const double k = s.exc.k_star + 0.01;
  for (double tau : {0.03, 0.06, 0.2}) {
    const double hi = std::min(tau, s.exc.tau0);
    const cplx integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double t) { return current_amplitude(s.exc, s.rect, 1, k, t).real(); }, 0.0, hi, 10, 1e-13);
    const cplx integral_im = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double t) { return current_amplitude(s.exc, s.rect, 1, k, t).imag(); }, 0.0, hi, 10, 1e-13);
    const cplx u = linear_response(s.exc, s.rect, 1, k, tau);
    // u^(0) = -(1/rho) int j; the current carries the rho factor
    EXPECT_NEAR(std::abs(u + (integral + kI * integral_im) / s.exc.rho), 0.0, 1e-9 * std::abs(u));
  }
}

TEST(CorrectiveCurrent, ZeroAlphaAndAfterRamp) {
  auto s = setup();
  auto zero = [](double) { return cplx(0.0); };
  auto one = [](double) { return cplx(1.0); };
  EXPECT_EQ(corrective_current(s.exc, s.rect, 1, 1.0, 0.05, zero, zero), 0.0);
  EXPECT_EQ(corrective_current(s.exc, s.rect, 1, 1.0, s.exc.tau0, one, one), 0.0);
  EXPECT_EQ(corrective_current(s.exc, s.rect, 1, 1.0, 0.3, one, one), 0.0);
}

TEST(CorrectiveCurrent, NoNonlinearSourceLeavesRampTerm) {
  auto s = setup();
  auto z1 = [](double xi) { return cplx(1.0 + xi, 0.5); };
  auto none = [](double) { return cplx(0.0); };
  const double tau = 0.04, k = s.exc.k_star + 0.002;
  const cplx j = corrective_current(s.exc, s.rect, 1, k, tau, z1, none);
  const double xi = s.rect.inverse(0.002);
  EXPECT_NEAR(std::abs(j - (-s.exc.rho * s.exc.env().psi0(tau) * z1(xi))), 0.0, 1e-15);
}

TEST(Bidirectional, ZeroBackwardReducesToUnidirectional) {
  auto s = setup();
  DoubletExcitation bwd = s.exc;
  bwd.k_star = -s.exc.k_star;
  bwd.h.amp = 0.0;
  const RectifyMap rb(s.model, jet_at(s.model, 1, -s.exc.k_star), 2, 0.1);
  for (double eta : {-0.05, 0.0, 0.03})
    for (int sg : {1, -1}) {
      const double k = sg * s.exc.k_star + eta;
      EXPECT_EQ(bidirectional_current(s.exc, s.rect, bwd, rb, sg, k, 0.05),
                current_amplitude(s.exc, s.rect, sg, k, 0.05));
    }
}

TEST(Bidirectional, DisjointSupports) {
  auto s = setup();
  DoubletExcitation bwd = s.exc;
  bwd.k_star = -s.exc.k_star;
  const RectifyMap rb(s.model, jet_at(s.model, 1, -s.exc.k_star), 2, 0.1);
  const double k = -s.exc.k_star + 0.01;
  // at k near -k*, the (+) branch sees only the backward doublet
  EXPECT_EQ(bidirectional_current(s.exc, s.rect, bwd, rb, 1, k, 0.05), current_amplitude(bwd, rb, 1, k, 0.05));
  EXPECT_EQ(current_amplitude(s.exc, s.rect, 1, k, 0.05), 0.0);
}

TEST(Bidirectional, RejectsOverlappingCutoffs) {
  auto s = setup(0.05);
  DoubletExcitation bwd = s.exc;
  bwd.k_star = -0.05;
  EXPECT_THROW(bidirectional_current(s.exc, s.rect, bwd, s.rect, 1, 0.0, 0.05), Error);
}

TEST(Bandwidth, StableAcrossRho) {
  EnvelopeSpec env{0.1};
  const double c1 = bandwidth_constant(env, 1e-3, 2.0), c2 = bandwidth_constant(env, 1e-2, 2.0),
               c3 = bandwidth_constant(env, 1e-1, 2.0);
  EXPECT_NEAR(c2 / c1, 1.0, 0.1);
  EXPECT_NEAR(c3 / c1, 1.0, 0.1);
}
