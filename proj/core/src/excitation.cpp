#include "nlsregime/excitation.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "nlsregime/fft.hpp"

namespace nlsr {

namespace {

double raw_bump(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return std::exp(-1.0 / (x * (1.0 - x)));
}

double bump_norm() {
  static const double B = [] {
    using boost::math::quadrature::gauss_kronrod;
    return gauss_kronrod<double, 61>::integrate(raw_bump, 0.0, 1.0, 20, 1e-15);
  }();
  return B;
}

}  // namespace

double unit_bump(double x) { return raw_bump(x) / bump_norm(); }

double unit_ramp(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  using boost::math::quadrature::gauss;
  // two fixed 30-point panels on the shorter side; relative error ~1e-15
  auto side = [](double a, double b) {
    const double m = 0.5 * (a + b);
    return gauss<double, 30>::integrate(raw_bump, a, m) + gauss<double, 30>::integrate(raw_bump, m, b);
  };
  if (x <= 0.5) return side(0.0, x) / bump_norm();
  return 1.0 - side(x, 1.0) / bump_norm();
}

double EnvelopeSpec::psi0(double tau) const { return unit_bump(tau / tau0) / tau0; }
double EnvelopeSpec::psi(double tau) const { return unit_ramp(tau / tau0); }

double cutoff(double eta, double pi0) {
  const double a = std::abs(eta);
  if (a <= 0.5 * pi0) return 1.0;
  if (a >= pi0) return 0.0;
  return 1.0 - unit_ramp((a - 0.5 * pi0) / (0.5 * pi0));
}

cplx Profile::hhat(double q) const {
  const double u = (q - shift) / width;
  if (family == "gauss") return amp * std::exp(-u * u);
  if (family == "sech") return amp / std::cosh(u);
  if (family == "supergauss") return amp * std::exp(-u * u * u * u);
  throw Error("unknown profile family '" + family + "' (valid: gauss, sech, supergauss)");
}

cplx Profile::h(double y) const {
  const cplx ph = std::exp(kI * (shift * y));
  const double wy = width * y;
  if (family == "gauss") return amp * width * std::sqrt(kPi) * std::exp(-wy * wy / 4) * ph;
  if (family == "sech") return amp * width * kPi / std::cosh(kPi * wy / 2) * ph;
  if (family == "supergauss") {
    using boost::math::quadrature::gauss_kronrod;
    auto f = [&](double u) { return std::exp(-u * u * u * u) * std::cos(wy * u); };
    return amp * width * 2.0 * gauss_kronrod<double, 61>::integrate(f, 0.0, 7.0, 15, 1e-14) * ph;
  }
  throw Error("unknown profile family '" + family + "'");
}

Profile Profile::from_json(const nlohmann::json& j) {
  Profile p;
  p.family = j.value("family", p.family);
  p.amp = j.value("amp", p.amp);
  p.width = j.value("width", p.width);
  p.shift = j.value("shift", p.shift);
  p.hhat(0.0);  // validates the family
  return p;
}

nlohmann::json Profile::to_json() const {
  return {{"family", family}, {"amp", amp}, {"width", width}, {"shift", shift}};
}

cplx DoubletExcitation::hhat(int sign, double q) const {
  if (sign > 0) return h.hhat(q);
  if (h_minus) return h_minus->hhat(q);
  return std::conj(h.hhat(-q));
}

DoubletExcitation DoubletExcitation::from_json(const nlohmann::json& j) {
  DoubletExcitation e;
  if (j.contains("h")) e.h = Profile::from_json(j.at("h"));
  if (j.contains("h_minus") && !j.at("h_minus").is_null()) e.h_minus = Profile::from_json(j.at("h_minus"));
  e.alpha = j.value("alpha", e.alpha);
  e.beta = j.value("beta", e.beta);
  e.rho = j.value("rho", e.rho);
  e.tau0 = j.value("tau0", e.tau0);
  e.k_star = j.value("k_star", e.k_star);
  e.n0 = j.value("n0", e.n0);
  e.pi0 = j.value("pi0", e.pi0);
  return e;
}

nlohmann::json DoubletExcitation::to_json() const {
  nlohmann::json j{{"h", h.to_json()}, {"alpha", alpha}, {"beta", beta}, {"rho", rho},
                   {"tau0", tau0}, {"k_star", k_star}, {"n0", n0}, {"pi0", pi0}};
  j["h_minus"] = h_minus ? h_minus->to_json() : nlohmann::json(nullptr);
  return j;
}

namespace {

cplx profile_at(const DoubletExcitation& exc, const RectifyMap& rect, int sign, double eta) {
  const double xi = rect.inverse_signed(sign, eta);
  return cutoff(eta, exc.pi0) * exc.hhat(sign, xi / exc.beta) / exc.beta;
}

}  // namespace

cplx current_amplitude(const DoubletExcitation& exc, const RectifyMap& rect, int sign, double k,
                       double tau) {
  if (tau <= 0.0 || tau >= exc.tau0) return 0.0;
  const double eta = wrap_zone(k - sign * exc.k_star);
  if (std::abs(eta) >= exc.pi0) return 0.0;
  return -exc.rho * exc.env().psi0(tau) * profile_at(exc, rect, sign, eta);
}

cplx linear_response(const DoubletExcitation& exc, const RectifyMap& rect, int sign, double k,
                     double tau) {
  if (tau <= 0.0) return 0.0;
  const double eta = wrap_zone(k - sign * exc.k_star);
  if (std::abs(eta) >= exc.pi0) return 0.0;
  return exc.env().psi(tau) * profile_at(exc, rect, sign, eta);
}

cplx corrective_current(const DoubletExcitation& exc, const RectifyMap& rect, int sign, double k,
                        double tau, const std::function<cplx(double)>& z1_hat,
                        const std::function<cplx(double)>& n_hat) {
  if (tau <= 0.0 || tau >= exc.tau0) return 0.0;
  const double eta = wrap_zone(k - sign * exc.k_star);
  if (std::abs(eta) >= exc.pi0) return 0.0;
  const double xi = rect.inverse_signed(sign, eta);
  const EnvelopeSpec env = exc.env();
  const double p = env.psi(tau);
  return cutoff(eta, exc.pi0) *
         (-exc.rho * env.psi0(tau) * z1_hat(xi) - (p - p * p * p) * n_hat(xi));
}

cplx bidirectional_current(const DoubletExcitation& fwd, const RectifyMap& rect_fwd,
                           const DoubletExcitation& bwd, const RectifyMap& rect_bwd, int sign,
                           double k, double tau) {
  const double ks = std::abs(fwd.k_star);
  const double p = std::max(fwd.pi0, bwd.pi0);
  if (std::abs(fwd.k_star + bwd.k_star) > 1e-12)
    throw Error("bidirectional_current: doublets must sit at +k* and -k*");
  if (ks < p || kPi - ks < p)
    throw Error("bidirectional_current: cutoffs overlap (pi0 too large relative to |k*|)");
  return current_amplitude(fwd, rect_fwd, sign, k, tau) + current_amplitude(bwd, rect_bwd, sign, k, tau);
}

double bandwidth_constant(const EnvelopeSpec& env, double rho, double omega0, int n) {
  // sample the compact pulse over a window four times its support
  const double T = 4.0 * env.tau0 / rho;
  const double dt = T / n;
  cvec a(n);
  for (int i = 0; i < n; ++i) {
    const double t = i * dt;
    a[i] = env.psi0(rho * t) * std::exp(-kI * (omega0 * t));
  }
  Fft fft(n);
  const cvec A = fft.forward(a);
  const rvec w = fft_frequencies(n, dt);
  std::vector<std::pair<double, double>> e;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    e.emplace_back(std::abs(w[i] + omega0), std::norm(A[i]));
    total += std::norm(A[i]);
  }
  std::sort(e.begin(), e.end());
  double acc = 0.0;
  for (const auto& [d, en] : e) {
    acc += en;
    if (acc >= 0.99 * total) return d / rho;
  }
  return e.back().first / rho;
}

}  // namespace nlsr
