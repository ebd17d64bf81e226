#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "nlsregime/interaction.hpp"

using namespace nlsr;

namespace {

DispersionModel two_cos() {
  FamilySpec f;
  f.family = "2-cos";
  return make_synthetic({f});
}

DispersionModel sqrt_model(std::shared_ptr<const Susceptibility> q = nullptr) {
  FamilySpec f;
  f.family = "sqrt";
  DispersionModel m = make_synthetic({f});
  if (!q) q = std::make_shared<SeparableSusceptibility>(m.bands_ptr(), SeparableSusceptibility::Params{});
  m.set_overlap(q);
  return m;
}

// Mode with frequency sign zeta in the doublet varsigma: quasimomentum varsigma zeta k*.
ModeIndex mode(int zeta, int varsigma, double ks) { return {zeta, 1, varsigma * zeta * ks}; }

}  // namespace

TEST(Phase, FmQuadrupletIsZero) {
  const DispersionModel m = two_cos();
  const double ks = kPi / 3;
  for (int s : {1, -1}) {
    const Quadruplet q{{s, 1, s * ks}, {ModeIndex{s, 1, s * ks}, ModeIndex{s, 1, s * ks}, ModeIndex{-s, 1, -s * ks}}};
    EXPECT_NEAR(phase_value(m, q), 0.0, 1e-15);
  }
}

TEST(Phase, ThirdHarmonic) {
  const DispersionModel m = two_cos();
  const double ks = kPi / 3;
  const Quadruplet q{{1, 1, 3 * ks}, {ModeIndex{1, 1, ks}, ModeIndex{1, 1, ks}, ModeIndex{1, 1, ks}}};
  EXPECT_NEAR(phase_value(m, q), 3.0 - 4.5, 1e-14);
}

TEST(Phase, OriginSwapInvariant) {
  const DispersionModel m = two_cos();
  const Quadruplet a{{1, 1, 0.4}, {ModeIndex{1, 1, 0.1}, ModeIndex{-1, 1, 0.7}, ModeIndex{1, 1, -0.4}}};
  Quadruplet b = a;
  std::swap(b.origins[0], b.origins[2]);
  EXPECT_DOUBLE_EQ(phase_value(m, a), phase_value(m, b));
}

TEST(Classify, IntraDoubletIsFm) {
  const DispersionModel m = two_cos();
  const double ks = kPi / 3;
  const Quadruplet q{mode(1, 1, ks), {mode(1, 1, ks), mode(1, 1, ks), mode(-1, 1, ks)}};
  EXPECT_EQ(classify_quadruplet(m, ks, 1, q).cls, QuadClass::FM);
}

TEST(Classify, CrossDoubletOriginsViolateGroupVelocity) {
  const DispersionModel m = two_cos();
  const double ks = kPi / 3;
  const Quadruplet q{mode(1, 1, ks), {mode(1, -1, ks), mode(1, 1, ks), mode(-1, -1, ks)}};
  const Classification c = classify_quadruplet(m, ks, 1, q);
  EXPECT_EQ(c.cls, QuadClass::GVM_violating);
  EXPECT_NEAR(c.phi, 0.0, 1e-14);
}

TEST(Classify, OriginsFromOneDoubletEndInOtherIsNonFmOpposite) {
  const DispersionModel m = two_cos();
  const double ks = kPi / 3;
  // origin frequency signs (-, -, +) in the varsigma = + doublet, end (+) in the other
  const Quadruplet q{mode(1, -1, ks), {mode(-1, 1, ks), mode(-1, 1, ks), mode(1, 1, ks)}};
  const Classification c = classify_quadruplet(m, ks, 1, q);
  EXPECT_EQ(c.cls, QuadClass::nonFM_opposite);
  EXPECT_GT(std::abs(c.phi), 1.0);
}

TEST(Classify, LiteralMinusPlusPlusOriginsBreakPhaseMatching) {
  const DispersionModel m = two_cos();
  const double ks = kPi / 3;
  const Quadruplet q{mode(1, -1, ks), {mode(-1, 1, ks), mode(1, 1, ks), mode(1, 1, ks)}};
  EXPECT_EQ(classify_quadruplet(m, ks, 1, q).cls, QuadClass::inadmissible);
}

TEST(Classify, AllSameSignIsThirdHarmonic) {
  const DispersionModel m = two_cos();
  const double ks = kPi / 3;
  const Quadruplet q{{1, 1, wrap_zone(3 * ks)}, {mode(1, 1, ks), mode(1, 1, ks), mode(1, 1, ks)}};
  EXPECT_EQ(classify_quadruplet(m, ks, 1, q).cls, QuadClass::nonFM_third_harmonic);
}

TEST(CriticalPoint, QuadraticGradientVanishes) {
  const DispersionModel m = two_cos();
  const TaylorJet j = jet_at(m, 1, kPi / 3);
  for (double q : {0.0, 0.3, -1.1}) {
    const CriticalPoint c = critical_point(j, 2, 1, 0.05, q);
    EXPECT_LE(c.grad_residual, 1e-12);
  }
}

TEST(CriticalPoint, DeterminantTendsToMinusOne) {
  FamilySpec f;
  f.family = "k2";
  f.a = 0.5;
  const DispersionModel m = make_synthetic({f});
  const TaylorJet j = jet_at(m, 1, 1.0);
  for (double beta : {0.1, 0.01, 0.001}) EXPECT_NEAR(critical_point(j, 4, 1, beta, 0.0).det, -1.0, 1e-12);
  // cubic term: det approaches -omega''^2 as beta -> 0
  const DispersionModel s = sqrt_model();
  const TaylorJet js = jet_at(s, 1, 1.0);
  const double w2 = js.derivs[2];
  double prev = 1.0;
  for (double beta : {0.1, 0.01, 0.001}) {
    const double d = std::abs(critical_point(js, 3, 1, beta, 0.7).det + w2 * w2);
    EXPECT_LT(d, prev);
    prev = d;
  }
}

TEST(CriticalPoint, PerturbedStartConverges) {
  const DispersionModel m = sqrt_model();
  const TaylorJet j = jet_at(m, 1, 1.0);
  for (double q : {-0.05, 0.0, 0.03, 0.05}) {
    const Eigen::Vector2d x = find_critical(j, 4, 1, 0.05, q, Eigen::Vector2d(q + 0.04, q - 0.03));
    EXPECT_NEAR(x(0), q, 1e-10);
    EXPECT_NEAR(x(1), q, 1e-10);
  }
}

TEST(CriticalPoint, GradientBoundedBelowOffCentre) {
  const DispersionModel m = sqrt_model();
  const TaylorJet j = jet_at(m, 1, 1.0);
  const double q = 0.02;
  for (int i = 0; i < 16; ++i) {
    const double a = kTwoPi * i / 16;
    const double r = 0.05;
    const Eigen::Vector2d g = scaled_phase_gradient(j, 4, 1, 0.05, q, q + r * std::cos(a), q + r * std::sin(a));
    EXPECT_GT(g.norm(), 0.2 * r * j.derivs[2]);
  }
}

TEST(ScaledPhase, SwapSymmetric) {
  const DispersionModel m = sqrt_model();
  const TaylorJet j = jet_at(m, 1, 1.0);
  EXPECT_DOUBLE_EQ(scaled_fm_phase(m, j, 3, 1, 0.05, 0.2, 0.7, -0.4),
                   scaled_fm_phase(m, j, 3, 1, 0.05, 0.2, -0.4, 0.7));
}

TEST(Oscillatory2d, GaussianBilinearOracle) {
  const double theta = 0.1;
  const QuadValue v = oscillatory_2d([](double a, double b) { return 2 * a * b; },
                                     [](double a, double b) { return cplx(std::exp(-a * a - b * b)); }, theta);
  EXPECT_NEAR(std::abs(v.value), 0.3126003, 5e-7);
  EXPECT_NEAR(v.value.real(), kPi * theta / std::sqrt(1 + theta * theta), 1e-9);
}

TEST(Oscillatory2d, OddAmplitudeCancels) {
  const QuadValue v = oscillatory_2d([](double a, double b) { return a * a + b * b; },
                                     [](double a, double b) { return cplx(a * std::exp(-a * a - b * b)); }, 0.3);
  EXPECT_NEAR(std::abs(v.value), 0.0, 1e-10);
}

TEST(QuadOracle, ZeroPhaseFactorizes) {
  const EnvelopeSpec env{0.1};
  const double rho = 0.01, tau = 0.3;
  const auto vals = quad_oracle([](double, double) { return 0.0; },
                                [](double a, double b) { return cplx(std::exp(-a * a - b * b)); }, 1.0, rho, env,
                                {tau});
  const double ramp = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double t) { return std::pow(env.psi(t), 3); }, 0.0, 0.1, 10, 1e-14);
  const double want = (ramp + (tau - 0.1)) / rho * kPi;
  EXPECT_NEAR(vals[0].value.real(), want, 1e-7 * want);
}

TEST(SusceptibilityJet, SigmaZeroIsQ) {
  const DispersionModel m = sqrt_model();
  for (int s : {1, -1}) {
    const SusceptibilityJet j = susceptibility_jet(m, 1, 1.0, s);
    EXPECT_EQ(j.eval(0, 0.3, -0.2, 0.1), j.Q);
    EXPECT_NEAR(std::abs(j.Q - susceptibility_at(m, 1, 1.0, s, 0, 0, 0)), 0.0, 1e-15);
    const cplx lin = j.Q + j.a[0] * 0.01 + j.a[1] * 0.02 + j.a[2] * -0.01;
    EXPECT_NEAR(std::abs(j.eval(1, 0.01, 0.02, -0.01) - lin), 0.0, 1e-15);
    // first-order accuracy of p^[1] against the exact susceptibility
    const cplx ex = susceptibility_at(m, 1, 1.0, s, 0.01, 0.02, -0.01);
    EXPECT_LT(std::abs(j.eval(1, 0.01, 0.02, -0.01) - ex), std::abs(j.eval(0, 0, 0, 0) - ex));
    EXPECT_LT(std::abs(j.eval(2, 0.01, 0.02, -0.01) - ex), std::abs(j.eval(1, 0.01, 0.02, -0.01) - ex));
  }
}

TEST(SusceptibilityJet, ConstantKernelHasNoGradient) {
  const DispersionModel m = sqrt_model(make_constant_susceptibility(0.7));
  const SusceptibilityJet j = susceptibility_jet(m, 1, 1.0, 1);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(j.a[i], cplx(0.0));
    for (int k = 0; k < 3; ++k) EXPECT_EQ(j.H[i][k], cplx(0.0));
  }
  EXPECT_EQ(j.eval(1, 0.1, 0.2, 0.3), j.eval(0, 0.1, 0.2, 0.3));
}

TEST(RectifiedIntegral, ConstantKernelFirstOrderEqualsZerothOrder) {
  const DispersionModel m = sqrt_model(make_constant_susceptibility(0.7));
  const TaylorJet j = jet_at(m, 1, 1.0);
  DoubletExcitation exc;
  exc.beta = 0.1;
  exc.rho = 0.01;
  const auto a = rectified_integral(m, j, 3, exc, 0, 1, 0.2, {0.2});
  const auto b = rectified_integral(m, j, 3, exc, 1, 1, 0.2, {0.2});
  EXPECT_EQ(a[0].value, b[0].value);
}

TEST(WeakDispersion, ZeroExcitationAndBudget) {
  const DispersionModel m = sqrt_model();
  const TaylorJet j = jet_at(m, 1, 1.0);
  DoubletExcitation exc;
  exc.beta = 0.1;
  exc.rho = 0.01;
  exc.h.amp = 0.0;
  const WeakDispersionValue w = weak_dispersion_expand(m, j, 2, exc, 0, 1, 0.0, {0.2});
  EXPECT_EQ(std::abs(w.values[0].value), 0.0);
  EXPECT_NEAR(w.phase_budget, 0.1, 1e-15);  // beta^3 / beta^2
}

TEST(Sphm, LeadingTermAndCheckValue) {
  SphmInput in;
  in.hessian << 0, 2, 2, 0;
  in.derivs = gaussian_mixed_derivs();
  const SphmResult r = sphm_expand(in, 0.1, 0);
  EXPECT_NEAR(std::abs(r.value), kPi * 0.1, 1e-12);
  const double exact = kPi * 0.1 / std::sqrt(1.01);
  EXPECT_NEAR(std::abs(exact / std::abs(r.value) - 1.0), 4.96e-3, 0.05 * 4.96e-3);
}

TEST(Sphm, ConstantAmplitudeHasNoHigherTerms) {
  SphmInput in;
  in.hessian << 0, 2, 2, 0;
  in.derivs = [](int a, int b) { return cplx(a == 0 && b == 0 ? 1.0 : 0.0); };
  for (int m = 1; m <= 2; ++m) EXPECT_EQ(sphm_coefficient(in, m), cplx(0.0));
}

TEST(NonFm, DoublingPhaseHalvesK1) {
  // a(0) = 0 exactly, so |K1| = |a(tau)| / |phi|
  auto a = [](double t) { return cplx(t * std::exp(-(t - 0.5) * (t - 0.5) / 0.02)); };
  auto da = [](double t) { return cplx((1.0 - 2.0 * t * (t - 0.5) / 0.02) * std::exp(-(t - 0.5) * (t - 0.5) / 0.02)); };
  const NonFmEstimate e1 = nonfm_estimate(1.5, a, da, 0.01, 0.7);
  const NonFmEstimate e2 = nonfm_estimate(3.0, a, da, 0.01, 0.7);
  EXPECT_NEAR(std::abs(e2.K1) / std::abs(e1.K1), 0.5, 1e-12);
}

TEST(NonFm, PlateauHasNoSecondTerm) {
  auto a = [](double) { return cplx(2.0); };
  auto da = [](double) { return cplx(0.0); };
  const NonFmEstimate e = nonfm_estimate(1.5, a, da, 0.01, 0.7);
  EXPECT_EQ(std::abs(e.rhoK2), 0.0);
}

TEST(NonFm, EstimateMatchesDirectQuadrature) {
  auto a = [](double t) { return cplx(std::exp(-(t - 0.5) * (t - 0.5) / 0.02)); };
  auto da = [&](double t) { return -2.0 * (t - 0.5) / 0.02 * a(t); };
  for (double rho : {1e-3, 1e-2}) {
    const cplx d = nonfm_direct(1.5, a, rho, 0.7);
    const NonFmEstimate e = nonfm_estimate(1.5, a, da, rho, 0.7);
    EXPECT_LT(std::abs(e.total - d), 50 * rho * rho * std::abs(e.K1) / rho + 1e-12);
  }
}

TEST(NonFm, RejectsSmallPhase) {
  auto a = [](double) { return cplx(1.0); };
  EXPECT_THROW(nonfm_estimate(1e-4, a, a, 0.01, 0.5), Error);
}

TEST(Harmonic, ExponentialKernelCoefficients) {
  CausalKernel k;
  k.c = 1.0;
  const auto c = harmonic_expand(k, {0.0, 0.0, 0.0}, 1);
  for (const auto& h : c) {
    const int n = h.l[0] + h.l[1] + h.l[2];
    EXPECT_NEAR(std::abs(h.chi - cplx(n % 2 ? -1.0 : 1.0)), 0.0, 1e-15);
  }
}

TEST(Harmonic, TruncationSlopes) {
  CausalKernel k;
  const std::array<double, 3> om{1.2, 1.2, -1.2};
  auto a = [](double t) { return cplx(std::exp(-(t - 0.5) * (t - 0.5) / 0.02)); };
  auto da = [](int m, double t) -> cplx {
    const double u = (t - 0.5) / std::sqrt(0.02);
    return (m % 2 ? -1.0 : 1.0) * std::hermite(m, u) * std::exp(-u * u) / std::pow(0.02, 0.5 * m);
  };
  const std::array<std::function<cplx(double)>, 3> amps{a, a, a};
  const std::array<std::function<cplx(int, double)>, 3> ders{da, da, da};
  const auto c0 = harmonic_expand(k, om, 0);
  const rvec rhos = geomspace(1e-3, 2e-2, 5);
  rvec e0;
  for (double rho : rhos) {
    const cplx ex = causal_response(k, om, amps, rho, 0.45);
    e0.push_back(std::abs(harmonic_series(c0, ders, rho, 0.45) - ex) / std::abs(ex));
  }
  EXPECT_NEAR(fit_loglog(rhos, e0).slope, 1.0, 0.2);
}
