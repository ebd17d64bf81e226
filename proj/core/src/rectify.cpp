#include "nlsregime/rectify.hpp"

#include <array>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace nlsr {

namespace {

template <class T>
T poly_eval(const TaylorJet& jet, int nu, const T& x, int deriv) {
  static const double fact[5] = {1, 1, 2, 6, 24};
  T acc = 0;
  for (int j = nu; j >= deriv; --j) {
    const T c = T(jet.derivs[j]) / T(fact[j - deriv]);
    acc = acc * x + c;
  }
  return acc;
}

void check_nu(int nu) {
  if (nu < 1 || nu > 4) throw Error("rectify: nu must be 1..4");
}

}  // namespace

double gamma_poly(const TaylorJet& jet, int nu, double eta) {
  check_nu(nu);
  return poly_eval<double>(jet, nu, eta, 0);
}

double gamma_poly_deriv(const TaylorJet& jet, int nu, double eta, int order) {
  check_nu(nu);
  if (order > nu) return 0.0;
  return poly_eval<double>(jet, nu, eta, order);
}

double safeguarded_newton(const std::function<double(double)>& g,
                          const std::function<double(double)>& dg, double x0, double lo,
                          double hi, double tol, int max_iter) {
  double glo = g(lo), ghi = g(hi);
  const bool bracket = std::signbit(glo) != std::signbit(ghi);
  double x = x0;
  for (int it = 0; it < max_iter; ++it) {
    const double f = g(x);
    if (f == 0.0) return x;
    if (bracket) {
      if (std::signbit(f) == std::signbit(glo)) { lo = x; glo = f; } else { hi = x; }
    }
    const double d = dg(x);
    double xn = x - f / d;
    if (!std::isfinite(xn) || (bracket && (xn <= std::min(lo, hi) || xn >= std::max(lo, hi))))
      xn = bracket ? 0.5 * (lo + hi) : x - 0.5 * f / d;
    const double step = std::abs(xn - x);
    x = xn;
    if (step < tol) {
      const double f2 = g(x), d2 = dg(x);
      const double xp = x - f2 / d2;
      const bool inside = !bracket || (xp >= std::min(lo, hi) && xp <= std::max(lo, hi));
      if (d2 != 0.0 && std::isfinite(xp) && inside && std::abs(g(xp)) <= std::abs(f2)) x = xp;
      return x;
    }
  }
  throw Error("rectify: Newton iteration did not converge");
}

double y_inverse(const DispersionModel& model, const TaylorJet& jet, int nu, double eta) {
  check_nu(nu);
  const double w1 = jet.derivs[1];
  if (w1 == 0.0) throw Error("rectify: omega'(k_star) = 0 (non-generic jet)");
  const double delta = model.omega(jet.n0, jet.k_star + eta) - jet.derivs[0];
  if (nu == 1) return delta / w1;
  if (nu == 2) {
    const double w2 = jet.derivs[2];
    const double disc = 1.0 + 2.0 * w2 * delta / (w1 * w1);
    if (disc < 0.0) throw Error("rectify: negative discriminant in the nu = 2 radical (domain too large)");
    // xi = (w1/w2)(-1 + sqrt(disc)) written without cancellation
    return 2.0 * delta / (w1 * (1.0 + std::sqrt(disc)));
  }
  const double target = model.omega(jet.n0, jet.k_star + eta);
  auto g = [&](double x) { return gamma_poly(jet, nu, x) - target; };
  auto dg = [&](double x) { return gamma_poly_deriv(jet, nu, x, 1); };
  double w = std::max(std::abs(eta), 1e-3);
  for (int i = 0; i < 12 && std::signbit(g(eta - w)) == std::signbit(g(eta + w)); ++i) w *= 1.5;
  return safeguarded_newton(g, dg, eta, eta - w, eta + w);
}

double y_forward(const DispersionModel& model, const TaylorJet& jet, int nu, double xi) {
  check_nu(nu);
  const double target = gamma_poly(jet, nu, xi);
  auto g = [&](double e) { return model.omega(jet.n0, jet.k_star + e) - target; };
  auto dg = [&](double e) { return model.derivative(jet.n0, jet.k_star + e, 1); };
  double w = std::max(std::abs(xi), 1e-3);
  for (int i = 0; i < 12 && std::signbit(g(xi - w)) == std::signbit(g(xi + w)); ++i) w *= 1.5;
  return safeguarded_newton(g, dg, xi, xi - w, xi + w);
}

double y_inverse_offset(const DispersionModel& model, const TaylorJet& jet, int nu, double eta) {
  check_nu(nu);
  const BandStructure& b = model.bands();
  if (!b.has_hp()) return y_inverse(model, jet, nu, eta) - eta;
  // jet recomputed in 50 digits: the double jet's rounding (~1e-16 in omega(k*)) would
  // otherwise set the floor of the offset
  const mp50 ks(jet.k_star), h("1e-6");
  auto f = [&](int m) { return b.omega_hp(jet.n0, ks + h * m); };
  const mp50 f0 = f(0), f1 = f(1), fm1 = f(-1), f2 = f(2), fm2 = f(-2);
  std::array<mp50, 5> c;
  c[0] = f0;
  c[1] = (-f2 + 8 * f1 - 8 * fm1 + fm2) / (12 * h);
  c[2] = (-f2 + 16 * f1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h) / 2;
  c[3] = (f2 - 2 * f1 + 2 * fm1 - fm2) / (2 * h * h * h) / 6;
  c[4] = (f2 - 4 * f1 + 6 * f0 - 4 * fm1 + fm2) / (h * h * h * h) / 24;
  auto poly = [&](const mp50& x, int deriv) {
    mp50 acc = 0;
    for (int j = nu; j >= deriv; --j) {
      mp50 cj = c[j];
      for (int q = 0; q < deriv; ++q) cj *= (j - q);
      acc = acc * x + cj;
    }
    return acc;
  };
  const mp50 e(eta);
  const mp50 target = b.omega_hp(jet.n0, ks + e);
  mp50 d = mp50(y_inverse(model, jet, nu, eta) - eta);
  for (int it = 0; it < 60; ++it) {
    const mp50 x = e + d;
    const mp50 step = (poly(x, 0) - target) / poly(x, 1);
    d -= step;
    if (abs(step) <= abs(d) * mp50(1e-40) + mp50(1e-60)) break;
  }
  return static_cast<double>(d);
}

RectifyMap::RectifyMap(const DispersionModel& model, TaylorJet jet, int nu, double pi0, bool identity)
    : model_(std::make_shared<const DispersionModel>(model)),
      jet_(std::move(jet)),
      nu_(nu),
      pi0_(pi0),
      identity_(identity) {
  check_nu(nu);
  if (!(pi0 > 0.0)) throw Error("rectify: pi0 must be positive");
}

double RectifyMap::inverse(double eta) const {
  if (std::abs(eta) > pi0_ * (1 + 1e-12)) throw Error("rectify: |eta| exceeds pi0");
  if (identity_) return eta;
  return y_inverse(*model_, jet_, nu_, eta);
}

double RectifyMap::forward(double xi) const {
  if (std::abs(xi) > pi0_ * (1 + 1e-12) * 1.5) throw Error("rectify: |xi| outside the domain");
  if (identity_) return xi;
  return y_forward(*model_, jet_, nu_, xi);
}

RectifyResidual rectify_residual(const RectifyMap& map, int n_points) {
  RectifyResidual r;
  const double p = map.pi0();
  for (int i = 0; i < n_points; ++i) {
    const double s = -p + 2 * p * i / (n_points - 1);
    const double eta = map.forward(s);
    r.max_residual = std::max(
        r.max_residual,
        std::abs(map.model().omega(map.jet().n0, map.jet().k_star + eta) - map.gamma(s)));
    r.max_roundtrip = std::max(r.max_roundtrip, std::abs(map.forward(map.inverse(s)) - s));
  }
  return r;
}

void write_rectify_csv(const RectifyMap& map, int n_points, std::ostream& os) {
  os << "eta,xi,residual\n" << std::setprecision(17);
  const double p = map.pi0();
  for (int i = 0; i < n_points; ++i) {
    const double eta = -p + 2 * p * i / (n_points - 1);
    const double xi = map.inverse(eta);
    const double res = map.model().omega(map.jet().n0, map.jet().k_star + eta) - map.gamma(xi);
    os << eta << "," << xi << "," << res << "\n";
  }
}

}  // namespace nlsr
