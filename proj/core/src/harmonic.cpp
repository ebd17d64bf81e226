#include <cmath>

#include "nlsregime/interaction.hpp"
#include "nlsregime/quadrature.hpp"

namespace nlsr {

namespace {

double kernel_support(const CausalKernel& k) {
  if (k.kind == "exponential") return 40.0 / k.c;
  if (!(k.support > 0.0)) throw Error("numeric causal kernel needs a positive support");
  return k.support;
}

double kernel_value(const CausalKernel& k, double s) {
  if (k.kind == "exponential") return std::exp(-k.c * s);
  if (!k.r) throw Error("numeric causal kernel has no response function");
  return k.r(s);
}

cplx slot_chi(const CausalKernel& k, double w, int l) {
  if (k.kind == "exponential") return (l % 2 ? -1.0 : 1.0) / std::pow(cplx(k.c, -w), l + 1);
  const double S = kernel_support(k);
  auto f = [&](double s) { return std::pow(-s, l) * kernel_value(k, s) * std::exp(kI * (w * s)); };
  QuadStats st;
  const cplx v = adaptive_gk(f, 0.0, S, 1e-15, 1e-12, 30, {}, &st) / std::tgamma(l + 1.0);
  if (st.error > 1e-8 * std::max(1.0, std::abs(v)))
    throw Error("harmonic_expand: numeric kernel transform did not converge");
  return v;
}

}  // namespace

std::vector<HarmonicCoefficient> harmonic_expand(const CausalKernel& k,
                                                 const std::array<double, 3>& omega, int n1) {
  if (k.kind != "exponential" && k.kind != "numeric")
    throw Error("harmonic_expand: unknown kernel kind '" + k.kind + "'");
  if (n1 < 0) throw Error("harmonic_expand: N1 must be non-negative");
  std::vector<HarmonicCoefficient> out;
  for (int total = 0; total <= n1; ++total)
    for (int a = total; a >= 0; --a)
      for (int b = total - a; b >= 0; --b) {
        const int c = total - a - b;
        HarmonicCoefficient h;
        h.l = {a, b, c};
        h.chi = k.R0 * slot_chi(k, omega[0], a) * slot_chi(k, omega[1], b) * slot_chi(k, omega[2], c);
        out.push_back(h);
      }
  return out;
}

cplx causal_response(const CausalKernel& k, const std::array<double, 3>& omega,
                     const std::array<std::function<cplx(double)>, 3>& a, double rho, double tau) {
  const double S = kernel_support(k);
  cplx v = k.R0;
  for (int j = 0; j < 3; ++j) {
    auto f = [&](double s) {
      return kernel_value(k, s) * std::exp(kI * (omega[j] * s)) * a[j](tau - rho * s);
    };
    v *= adaptive_gk(f, 0.0, S, 1e-300, 1e-14, 40, {0.25 * S, 0.5 * S});
  }
  return v;
}

cplx harmonic_series(const std::vector<HarmonicCoefficient>& coeffs,
                     const std::array<std::function<cplx(int, double)>, 3>& derivs, double rho,
                     double tau) {
  cplx acc = 0.0;
  for (const auto& c : coeffs) {
    cplx t = c.chi;
    for (int j = 0; j < 3; ++j) t *= std::pow(rho, c.l[j]) * derivs[j](c.l[j], tau);
    acc += t;
  }
  return acc;
}

}  // namespace nlsr
