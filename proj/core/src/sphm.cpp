#include <Eigen/Eigenvalues>
#include <cmath>

#include "nlsregime/interaction.hpp"
#include "nlsregime/quadrature.hpp"

namespace nlsr {

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace

cplx sphm_coefficient(const SphmInput& in, int m) {
  if (m < 0) throw Error("sphm_coefficient: negative order");
  if (2 * m > in.smoothness)
    throw Error("sphm_coefficient: order " + std::to_string(m) + " needs derivatives beyond the amplitude smoothness");
  const double det = in.hessian.determinant();
  if (std::abs(det) < 1e-14 * std::max(1.0, in.hessian.squaredNorm()))
    throw Error("sphm_coefficient: degenerate Hessian");
  const Eigen::Matrix2d hi = in.hessian.inverse();
  const double h11 = hi(0, 0), h12 = 0.5 * (hi(0, 1) + hi(1, 0)), h22 = hi(1, 1);
  // <H^-1 d, d>^m by the multinomial theorem
  cplx acc = 0.0;
  for (int i = 0; i <= m; ++i)
    for (int j = 0; i + j <= m; ++j) {
      const int l = m - i - j;
      const double coef = factorial(m) / (factorial(i) * factorial(j) * factorial(l)) *
                          std::pow(h11, i) * std::pow(2.0 * h12, j) * std::pow(h22, l);
      if (coef == 0.0) continue;
      acc += coef * in.derivs(2 * i + j, j + 2 * l);
    }
  return std::pow(0.5 * kI, m) / factorial(m) * acc;
}

SphmResult sphm_expand(const SphmInput& in, double theta, int n3) {
  if (!(theta > 0.0)) throw Error("sphm_expand: theta must be positive");
  const double det = in.hessian.determinant();
  if (std::abs(det) < 1e-14 * std::max(1.0, in.hessian.squaredNorm()))
    throw Error("sphm_expand: degenerate Hessian");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(0.5 * (in.hessian + in.hessian.transpose()));
  int sgn = 0;
  for (int i = 0; i < 2; ++i) sgn += es.eigenvalues()(i) > 0 ? 1 : -1;
  SphmResult r;
  r.prefactor = kTwoPi * theta / std::sqrt(std::abs(det)) * std::exp(kI * (kPi * sgn / 4.0)) *
                std::exp(kI * (in.phase0 / theta));
  for (int m = 0; m <= n3; ++m) {
    const cplx b = sphm_coefficient(in, m);
    r.b.push_back(b);
    r.terms.push_back(r.prefactor * std::pow(theta, m) * b);
    r.value += r.terms.back();
  }
  return r;
}

std::pair<cplx, double> sphm_time_integrated(const SphmInput& in, double theta, double rho,
                                             double beta, const EnvelopeSpec& env, double tau,
                                             int n3, double amp_mass, double kappa) {
  const double ts = std::min(tau, rho / std::pow(beta, kappa));
  auto f = [&](double t1) -> cplx {
    const double p = env.psi(t1);
    if (p == 0.0) return 0.0;
    return p * p * p * sphm_expand(in, theta / t1, n3).value;
  };
  cplx v = 0.0;
  if (tau > ts) v = adaptive_gk(f, ts, tau, 0.0, 1e-10, 20, {env.tau0}) / rho;
  const double ps = env.psi(ts);
  return {v, amp_mass * ps * ps * ps * ts / rho};
}

std::function<cplx(int, int)> mixed_derivs_fd(const Amp2& amp, double x1, double x2, double h) {
  // tensor product of central-difference stencils via binomial weights
  return [amp, x1, x2, h](int p1, int p2) {
    auto w = [](int p, int k) {  // coefficient of f(x + (p/2 - k) h) in the p-th difference
      double c = 1.0;
      for (int i = 0; i < k; ++i) c = c * (p - i) / (i + 1);
      return (k % 2 ? -1.0 : 1.0) * c;
    };
    cplx acc = 0.0;
    for (int a = 0; a <= p1; ++a)
      for (int b = 0; b <= p2; ++b)
        acc += w(p1, a) * w(p2, b) * amp(x1 + (0.5 * p1 - a) * h, x2 + (0.5 * p2 - b) * h);
    return acc / (std::pow(h, p1) * std::pow(h, p2));
  };
}

std::function<cplx(int, int)> gaussian_mixed_derivs() {
  auto d1 = [](int p) -> double {
    if (p % 2) return 0.0;
    const int k = p / 2;
    return (k % 2 ? -1.0 : 1.0) * std::tgamma(p + 1.0) / std::tgamma(k + 1.0);
  };
  return [d1](int p1, int p2) { return cplx(d1(p1) * d1(p2)); };
}

}  // namespace nlsr
