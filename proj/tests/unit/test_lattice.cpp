#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nlsregime/lattice.hpp"

using namespace nlsr;

namespace {

DispersionModel two_cos(double q0) {
  FamilySpec f;
  f.family = "2-cos";
  DispersionModel m = make_synthetic({f});
  m.set_overlap(make_constant_susceptibility(q0));
  return m;
}

}  // namespace

TEST(Symbol, ValuesAtZeroAndQuarterTurn) {
  const DispersionModel m = two_cos(1.0);
  const TaylorJet j = jet_at(m, 1, kPi / 3);
  EXPECT_NEAR(lattice_symbol(j, 0.0), 1.5, 1e-15);
  EXPECT_NEAR(lattice_symbol(j, kPi / 2), 1.5 + 0.5 + std::sqrt(3.0) / 2, 1e-15);
  EXPECT_NEAR(lattice_symbol(j, kPi / 2), 2.8660, 1e-4);
}

TEST(Symbol, DefectIsThirdOrder) {
  const DispersionModel m = two_cos(1.0);
  const TaylorJet j = jet_at(m, 1, kPi / 3);
  const rvec xs = geomspace(1e-3, 1e-1, 7);
  rvec d;
  for (double x : xs) d.push_back(std::abs(lattice_symbol(j, x) - gamma_poly(j, 2, x)));
  EXPECT_NEAR(fit_loglog(xs, d).slope, 3.0, 0.3);
}

TEST(Differences, PlaneWaveMultipliers) {
  const double xi = 0.7;
  cvec z(41), dm, dp;
  for (int m = 0; m < 41; ++m) z[m] = std::exp(kI * (xi * m));
  delta_minus(z, dm);
  delta_plus(z, dp);
  // exp(i xi m) carries ~m ulp of phase error
  for (int m = 1; m < 40; ++m) {
    EXPECT_NEAR(std::abs(dm[m] - std::sin(xi) * z[m]), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(dp[m] - std::cos(xi) * z[m]), 0.0, 1e-14);
  }
}

TEST(Integrate, LinearPlaneWave) {
  DispersionModel m = two_cos(1.0);
  const EnlsCoefficients c = extract_coeffs(m, jet_at(m, 1, kPi / 3), 2, 0.0);
  const double xi = 0.4;
  const int M = 200;
  LatticeState s = make_lattice_state(M, [](double) { return cplx(1.0); }, 1.0, Frame::lab);
  for (int k = -M; k <= M; ++k) s.z_plus[s.index(k)] = std::exp(kI * (xi * k));
  for (int k = -M; k <= M; ++k) s.z_minus[s.index(k)] = std::conj(s.z_plus[s.index(k)]);
  LatticeRunSpec spec;
  spec.dt = 0.01;
  spec.t_end = 5.0;
  spec.fail_on_leak = false;
  const LatticeResult r = integrate_lattice_nls(c, s, spec);
  const cplx ph = std::exp(-kI * lattice_symbol(jet_at(m, 1, kPi / 3), xi) * spec.t_end);
  for (int k = -50; k <= 50; ++k)
    EXPECT_NEAR(std::abs(r.state.z_plus[s.index(k)] - ph * std::exp(kI * (xi * k))), 0.0, 1e-8);
}

TEST(Integrate, NormConservedForRealCoefficient) {
  const double beta = 0.1;
  DispersionModel m = two_cos(0.5);
  const EnlsCoefficients c = extract_coeffs(m, jet_at(m, 1, kPi / 3), 2, beta * beta);
  ASSERT_TRUE(c.norm_conserving());
  const int M = 400;
  const LatticeState s = make_lattice_state(M, [](double y) { return cplx(std::exp(-0.5 * y * y)); }, beta);
  LatticeRunSpec spec;
  // RK4 is not unitary: the drift scales as dt^4 (2.2e-6 at dt = 0.05)
  spec.dt = 0.025;
  spec.t_end = 1.0 / (beta * beta);
  const LatticeResult r = integrate_lattice_nls(c, s, spec);
  EXPECT_LE(r.norm_drift, 1e-6);
}

TEST(Integrate, LeakDetected) {
  DispersionModel m = two_cos(0.0);
  const EnlsCoefficients c = extract_coeffs(m, jet_at(m, 1, kPi / 3), 2, 0.0);
  const LatticeState s = make_lattice_state(20, [](double y) { return cplx(std::exp(-0.5 * y * y)); }, 0.2);
  LatticeRunSpec spec;
  spec.t_end = 50.0;
  EXPECT_THROW(integrate_lattice_nls(c, s, spec), Error);
}

TEST(Fourier, DeltaIsFlat) {
  const int M = 10;
  cvec z(2 * M + 1, 0.0);
  z[M] = 1.0;
  for (const cplx& v : lattice_fourier(z, M, 64)) EXPECT_NEAR(std::abs(v - 1.0), 0.0, 1e-15);
}

TEST(Fourier, RoundTripRandom) {
  const int M = 15;
  std::mt19937 rng(7);
  std::normal_distribution<double> n;
  cvec z(2 * M + 1);
  for (auto& v : z) v = cplx(n(rng), n(rng));
  const cvec back = lattice_inverse(lattice_fourier(z, M, 2 * M + 1), M);
  for (int i = 0; i <= 2 * M; ++i) EXPECT_NEAR(std::abs(back[i] - z[i]), 0.0, 1e-12);
}

TEST(Fourier, GaussianSpectrumConcentrated) {
  const double beta = 0.05;
  const int M = 400;
  const LatticeState s = make_lattice_state(M, [](double y) { return cplx(std::exp(-0.5 * y * y)); }, beta);
  const cvec zb = lattice_fourier(s.z_plus, M, 1024);
  double in = 0.0, out = 0.0;
  for (int j = 0; j < 1024; ++j) {
    const double xi = -kPi + kTwoPi * j / 1024;
    (std::abs(xi) <= 10 * beta ? in : out) += std::norm(zb[j]);
  }
  EXPECT_LT(out, 1e-12 * in);
}

TEST(Fourier, InterpolationHitsSites) {
  const LatticeState s = make_lattice_state(30, [](double y) { return cplx(std::exp(-0.5 * y * y)); }, 0.2);
  for (int m : {-3, 0, 5}) EXPECT_NEAR(std::abs(lattice_interpolate(s.z_plus, 30, m) - s.z_plus[s.index(m)]), 0.0, 1e-12);
}

TEST(Continuum, DeviationShrinksWithBeta) {
  DispersionModel m = two_cos(0.01);
  rvec betas{0.2, 0.1}, dev;
  for (double beta : betas) {
    const EnlsCoefficients c = extract_coeffs(m, jet_at(m, 1, kPi / 3), 2, beta * beta);
    LatticeRunSpec spec;
    spec.t_end = 1.0 / (beta * beta);
    const int M = static_cast<int>(std::abs(c.gamma[1]) * spec.t_end + 20.0 / beta);
    dev.push_back(compare_lattice_continuum(c, M, [](double y) { return cplx(std::exp(-0.5 * y * y)); }, beta, spec).max_deviation);
  }
  EXPECT_LT(dev[1], dev[0]);
  EXPECT_GE(fit_loglog(betas, dev).slope, 0.8);
}
