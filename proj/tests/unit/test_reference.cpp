#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "nlsregime/reference.hpp"

using namespace nlsr;

namespace {

DispersionModel sqrt_model() {
  FamilySpec f;
  f.family = "sqrt";
  DispersionModel m = make_synthetic({f});
  m.set_overlap(std::make_shared<SeparableSusceptibility>(m.bands_ptr(), SeparableSusceptibility::Params{}));
  return m;
}

DispersionModel two_cos() {
  FamilySpec f;
  f.family = "2-cos";
  DispersionModel m = make_synthetic({f});
  m.set_overlap(std::make_shared<SeparableSusceptibility>(m.bands_ptr(), SeparableSusceptibility::Params{}));
  return m;
}

}  // namespace

TEST(ModalGrid, FftOrder) {
  const rvec k = modal_k_grid(8);
  EXPECT_EQ(k[0], 0.0);
  EXPECT_NEAR(k[1], kPi / 4, 1e-15);
  EXPECT_NEAR(k[4], -kPi, 1e-15);
  EXPECT_NEAR(k[7], -kPi / 4, 1e-15);
}

TEST(ModalSolver, RequiresSeparableSusceptibility) {
  FamilySpec f;
  f.family = "sqrt";
  DispersionModel m = make_synthetic({f});
  m.set_overlap(std::make_shared<CallableSusceptibility>([](const ModeIndex&, const Origins&, const Multi3&) { return cplx(1.0); }));
  EXPECT_THROW(ModalSolver(m, ModalConfig{}), Error);
}

TEST(ModalSolver, LinearRunFreezesAfterRamp) {
  const DispersionModel m = sqrt_model();
  ModalConfig mc;
  mc.n_k = 256;
  mc.alpha = 0.0;
  mc.rho = 0.01;
  mc.window_centers = {1.0};
  ModalSolver s(m, mc);
  ModalFields prof = s.zeros();
  for (int i = 0; i < mc.n_k; ++i) prof[0][i] = std::exp(-std::pow((s.k()[i] - 1.0) / 0.1, 2));
  const EnvelopeSpec env{0.1};
  auto cur = [&](double tau, long, ModalFields& j) {
    for (int i = 0; i < mc.n_k; ++i) j[0][i] = -mc.rho * env.psi0(tau) * prof[0][i];
  };
  const ModalField f1 = s.integrate(cur, 1e-3, 0.2);
  const ModalField f2 = s.integrate(cur, 1e-3, 0.5);
  for (int i = 0; i < mc.n_k; ++i) {
    EXPECT_NEAR(std::abs(f1.u[0][i] - prof[0][i]), 0.0, 1e-10);
    EXPECT_EQ(f1.u[0][i], f2.u[0][i]);
  }
}

TEST(ModalSolver, FnlrVanishesWithoutNonlinearity) {
  const DispersionModel m = two_cos();
  ModalConfig mc;
  mc.n_k = 128;
  mc.alpha = 0.0;
  mc.kernel = KernelMode::full;
  ModalSolver s(m, mc);
  ModalFields v = s.zeros();
  v[0][s.nearest_index(kPi / 3)] = 1.0;
  const ModalFields u = s.fnlr(v, EnvelopeSpec{0.1}, 0.2);
  for (const cplx& x : u[0]) EXPECT_EQ(x, cplx(0.0));
}

TEST(ModalSolver, FmOnlyRespectsWindow) {
  const DispersionModel m = sqrt_model();
  ModalConfig mc;
  mc.n_k = 256;
  mc.alpha = 0.01;
  mc.window_centers = {1.0};
  mc.pi0 = 0.2;
  ModalSolver s(m, mc);
  ModalFields v = s.zeros(), out;
  for (int i = 0; i < mc.n_k; ++i)
    if (std::abs(s.k()[i] - 1.0) < 0.1) v[0][i] = 1.0;
  s.nl0(v, 0.3, out);
  for (int i = 0; i < mc.n_k; ++i)
    if (std::abs(wrap_zone(s.k()[i] - 1.0)) >= 0.2) EXPECT_EQ(out[0][i], cplx(0.0));
}

// The FM response normalized by alpha/rho does not depend on the k-grid once resolved.
TEST(ModalSolver, FnlrGridConvergence) {
  const DispersionModel m = two_cos();
  auto fm = [&](int n_k) {
    ModalConfig mc;
    mc.n_k = n_k;
    mc.alpha = 1e-3;
    mc.rho = 0.01;
    mc.kernel = KernelMode::full;
    ModalSolver s(m, mc);
    ModalFields v = s.zeros();
    const double beta = 0.02;
    for (int i = 0; i < n_k; ++i) {
      const double eta = wrap_zone(s.k()[i] - kPi / 3);
      if (std::abs(eta) < 0.1) v[0][i] = cutoff(eta, 0.1) * std::exp(-(eta / beta) * (eta / beta)) / beta;
    }
    const ModalFields u = s.fnlr(v, EnvelopeSpec{0.1}, 0.2);
    double a = 0.0, b = 0.0;
    for (int i = 0; i < n_k; ++i)
      if (std::abs(wrap_zone(s.k()[i] - kPi / 3)) < 0.1) {
        a += std::norm(u[0][i]);
        b += std::norm(v[0][i]);
      }
    return std::sqrt(a / b);
  };
  const double a = fm(1024), b = fm(2048);
  EXPECT_NEAR(a / b, 1.0, 0.05);
}

TEST(EnvelopeToModal, GaussianTransformAtStart) {
  const DispersionModel m = sqrt_model();
  const TaylorJet jet = jet_at(m, 1, 1.0);
  const EnlsCoefficients c = extract_coeffs(m, jet, 2, 0.0);
  const RectifyMap id(m, jet, 2, 0.1, true);
  const double beta = 0.02;
  const EnvelopeState s = make_state(Grid::for_envelope(beta), [](double y) { return cplx(std::exp(-0.5 * y * y)); }, beta);
  const rvec k = modal_k_grid(4096);
  const cvec u = envelope_to_modal(s, c, id, 2, k, 0.1);
  for (size_t i = 0; i < k.size(); ++i) {
    const double eta = wrap_zone(k[i] - 1.0);
    if (std::abs(eta) >= 0.1) {
      EXPECT_EQ(u[i], cplx(0.0));
      continue;
    }
    const double want = cutoff(eta, 0.1) * std::exp(-0.5 * eta * eta / (beta * beta)) / (beta * std::sqrt(kTwoPi));
    EXPECT_NEAR(std::abs(u[i] - want), 0.0, 1e-10);
  }
}

TEST(ErrorNorm, IdenticalIsZero) {
  const DispersionModel m = sqrt_model();
  const TaylorJet jet = jet_at(m, 1, 1.0);
  const EnlsCoefficients c = extract_coeffs(m, jet, 2, 0.0);
  const RectifyMap rect(m, jet, 2, 0.1);
  const double beta = 0.05;
  const EnvelopeState s = make_state(Grid::for_envelope(beta), [](double y) { return cplx(std::exp(-0.5 * y * y)); }, beta);
  const rvec k = modal_k_grid(512);
  const ApproxSolution a = assemble_uz(s, c, rect, 2, k, 0.1);
  ModalField ref;
  ref.k = k;
  ref.bands = {1};
  ref.u = {a.direct};
  rvec window(k.size());
  for (size_t i = 0; i < k.size(); ++i) window[i] = std::abs(wrap_zone(k[i] - 1.0)) < 0.1 ? 1.0 : 0.0;
  const ErrorNorms e = error_norm(ref, a, window);
  EXPECT_EQ(e.direct, 0.0);
  EXPECT_EQ(e.total, 0.0);
  EXPECT_GT(e.reference_norm, 0.0);
}

TEST(Reconstruct, TrivialModeGivesCarrierTimesEnvelope) {
  const double beta = 0.05, ks = 1.0;
  const EnvelopeState s = make_state(Grid::for_envelope(beta), [](double y) { return cplx(std::exp(-0.5 * y * y)); }, beta);
  const rvec r{-7.3, 0.0, 2.5, 11.0};
  const auto out = reconstruct_space(s, ks, [](double, double) { return cplx(1.0); }, 0, r);
  for (size_t i = 0; i < r.size(); ++i) {
    const cplx z = std::exp(-0.5 * beta * beta * r[i] * r[i]);
    const cplx want = std::exp(kI * (ks * r[i])) * z;
    EXPECT_NEAR(std::abs(out[i].value - (want + std::conj(want))), 0.0, 1e-10);
  }
}

TEST(Reconstruct, FirstOrderCorrectionIsOrderBeta) {
  auto mode = [](double r, double k) { return cplx(1.0 + 0.3 * std::sin(k) * std::cos(kTwoPi * r)); };
  const rvec betas{0.1, 0.05, 0.025};
  rvec diff;
  for (double beta : betas) {
    const EnvelopeState s = make_state(Grid::for_envelope(beta), [](double y) { return cplx(std::exp(-0.5 * y * y)); }, beta);
    rvec r;
    for (int i = -20; i <= 20; ++i) r.push_back(i / (2.0 * beta) / 10.0 + 0.1);
    const auto a = reconstruct_space(s, 1.0, mode, 0, r), b = reconstruct_space(s, 1.0, mode, 1, r);
    double d = 0.0;
    for (size_t i = 0; i < r.size(); ++i) d = std::max(d, std::abs(a[i].value - b[i].value));
    diff.push_back(d);
  }
  EXPECT_NEAR(fit_loglog(betas, diff).slope, 1.0, 0.2);
}

TEST(Reconstruct, QuasiPeriodicity) {
  // a plane-wave envelope times a periodic mode picks up exactly e^{i k*} per cell
  const double ks = 0.8;
  Grid g{64.0, 64};
  EnvelopeState s = make_state(g, [](double) { return cplx(1.0); }, 1.0);
  auto mode = [](double r, double) { return cplx(1.0 + 0.5 * std::cos(kTwoPi * r), 0.2 * std::sin(kTwoPi * r)); };
  const auto a = reconstruct_space(s, ks, mode, 0, {0.3}), b = reconstruct_space(s, ks, mode, 0, {1.3});
  // only the e^{i k* r} half: remove the conjugate by using the analytic form
  const cplx ga = mode(0.3, ks) * std::exp(kI * (ks * 0.3));
  const cplx gb = mode(1.3, ks) * std::exp(kI * (ks * 1.3));
  EXPECT_NEAR(std::abs(gb / ga - std::exp(kI * ks)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(a[0].value - (ga + std::conj(ga))), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(b[0].value - (gb + std::conj(gb))), 0.0, 1e-12);
}

TEST(ModalCsv, Header) {
  ModalField f;
  f.k = {0.0, 0.5};
  f.bands = {1};
  f.u = {{cplx(1, 2), cplx(3, 4)}};
  std::ostringstream os;
  write_modal_csv(f, os);
  EXPECT_EQ(os.str().substr(0, 13), "k,band,re,im\n");
}
