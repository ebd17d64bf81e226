#include "nlsregime/interaction.hpp"

#include <algorithm>
#include <cmath>

#include "nlsregime/quadrature.hpp"
#include "nlsregime/rectify.hpp"

namespace nlsr {

std::string to_string(QuadClass c) {
  switch (c) {
    case QuadClass::FM: return "FM";
    case QuadClass::nonFM_opposite: return "nonFM-opposite";
    case QuadClass::nonFM_third_harmonic: return "nonFM-third-harmonic";
    case QuadClass::GVM_violating: return "GVM-violating";
    case QuadClass::inadmissible: return "inadmissible";
  }
  return "unknown";
}

double phase_value(const DispersionModel& model, const Quadruplet& quad) {
  double phi = quad.end.sign * model.omega(quad.end.band, wrap_zone(quad.end.k));
  for (const auto& o : quad.origins) phi -= o.sign * model.omega(o.band, wrap_zone(o.k));
  return phi;
}

Classification classify_quadruplet(const DispersionModel& model, double /*k_star*/, int n0,
                                   const Quadruplet& quad, double tol) {
  Classification c;
  double dk = quad.end.k;
  for (const auto& o : quad.origins) dk -= o.k;
  c.pm_residual = std::abs(wrap_zone(dk));
  c.phi = phase_value(model, quad);
  std::array<double, 3> gv{};
  for (int i = 0; i < 3; ++i) {
    const auto& o = quad.origins[i];
    gv[i] = o.sign * model.derivative(o.band, wrap_zone(o.k), 1);
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) c.gvm_margin = std::max(c.gvm_margin, std::abs(gv[i] - gv[j]));

  if (c.pm_residual > tol) {
    c.cls = QuadClass::inadmissible;
    return c;
  }
  const int zsum = quad.origins[0].sign + quad.origins[1].sign + quad.origins[2].sign;
  bool same_band = quad.end.band == n0;
  for (const auto& o : quad.origins) same_band = same_band && o.band == n0;
  if (!same_band || std::abs(zsum) == 3)
    c.cls = QuadClass::nonFM_third_harmonic;
  else if (zsum == -quad.end.sign)
    c.cls = QuadClass::nonFM_opposite;
  else if (c.gvm_margin > tol)
    c.cls = QuadClass::GVM_violating;
  else
    c.cls = QuadClass::FM;
  return c;
}

double scaled_fm_phase(const DispersionModel& model, const TaylorJet& jet, int nu, int sign,
                       double beta, double q, double q1, double q2) {
  auto g = [&](double x) {
    return nu == 0 ? model.omega(jet.n0, wrap_zone(jet.k_star + x)) : gamma_poly(jet, nu, x);
  };
  const double s = sign, q3 = q - q1 - q2;
  // subtract in a cancellation-friendly order
  const double a = g(s * beta * q) - g(s * beta * q1);
  const double b = g(-s * beta * q3) - g(s * beta * q2);
  return s * (a + b) / (beta * beta);
}

Eigen::Vector2d scaled_phase_gradient(const TaylorJet& jet, int nu, int sign, double beta,
                                      double q, double q1, double q2) {
  const double s = sign, q3 = q - q1 - q2;
  const double g3 = gamma_poly_deriv(jet, nu, -s * beta * q3, 1);
  return {(-gamma_poly_deriv(jet, nu, s * beta * q1, 1) + g3) / beta,
          (-gamma_poly_deriv(jet, nu, s * beta * q2, 1) + g3) / beta};
}

Eigen::Matrix2d scaled_phase_hessian(const TaylorJet& jet, int nu, int sign, double beta,
                                     double q, double q1, double q2) {
  const double s = sign, q3 = q - q1 - q2;
  const double g3 = gamma_poly_deriv(jet, nu, -s * beta * q3, 2);
  Eigen::Matrix2d h;
  h(0, 0) = s * (-gamma_poly_deriv(jet, nu, s * beta * q1, 2) + g3);
  h(1, 1) = s * (-gamma_poly_deriv(jet, nu, s * beta * q2, 2) + g3);
  h(0, 1) = h(1, 0) = s * g3;
  return h;
}

CriticalPoint critical_point(const TaylorJet& jet, int nu, int sign, double beta, double q,
                             double grad_tol) {
  CriticalPoint cp;
  cp.q_flat = {q, q, q, -q};
  cp.grad_residual = scaled_phase_gradient(jet, nu, sign, beta, q, q, q).norm();
  if (!(cp.grad_residual <= grad_tol))
    throw Error("critical_point: gradient residual " + std::to_string(cp.grad_residual) +
                " above tolerance; jet and rectifying map are inconsistent");
  cp.hessian = scaled_phase_hessian(jet, nu, sign, beta, q, q, q);
  cp.det = cp.hessian.determinant();
  return cp;
}

Eigen::Vector2d find_critical(const TaylorJet& jet, int nu, int sign, double beta, double q,
                              Eigen::Vector2d x, int max_iter) {
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::Vector2d g = scaled_phase_gradient(jet, nu, sign, beta, q, x(0), x(1));
    if (g.norm() < 1e-14) break;
    const Eigen::Matrix2d h = scaled_phase_hessian(jet, nu, sign, beta, q, x(0), x(1));
    const Eigen::Vector2d dx = h.fullPivLu().solve(g);
    x -= dx;
    if (dx.norm() < 1e-15 * (1.0 + x.norm())) break;
  }
  return x;
}

namespace {

struct Box {
  double radius = 0.0;
  double tail = 0.0;
};

Box truncation_box(const Amp2& amp, const QuadOptions& opt) {
  constexpr int kRays = 16;
  double ref = std::abs(amp(opt.center1, opt.center2));
  std::vector<std::pair<double, double>> samples;  // (r, |A|)
  for (double r = 0.05; r <= opt.max_radius; r *= 1.15)
    for (int d = 0; d < kRays; ++d) {
      const double th = kTwoPi * d / kRays;
      const double v = std::abs(amp(opt.center1 + r * std::cos(th), opt.center2 + r * std::sin(th)));
      ref = std::max(ref, v);
      samples.emplace_back(r, v);
    }
  Box b;
  if (ref == 0.0) return b;
  for (const auto& [r, v] : samples)
    if (v >= opt.amp_cut * ref) b.radius = std::max(b.radius, r);
  b.radius = std::min(opt.max_radius, b.radius * 1.15 + 0.05);
  for (const auto& [r, v] : samples)
    if (r >= b.radius) b.tail = std::max(b.tail, v);
  b.tail *= 4.0 * b.radius * b.radius;
  return b;
}

rvec graded_breaks(double centre, double theta, double radius) {
  rvec br;
  for (double d = 0.25 * theta; d < radius; d *= 2.0) {
    br.push_back(centre - d);
    br.push_back(centre + d);
  }
  br.push_back(centre);
  return br;
}

QuadValue oscillatory_2d_box(const Phase2& phase, const Amp2& amp, double theta,
                             const QuadOptions& opt, const Box& box) {
  QuadValue out;
  out.radius = box.radius;
  out.tail_bound = box.tail;
  if (box.radius == 0.0) return out;
  const double R = box.radius;
  long ev = 0;
  auto inner = [&](double q1) {
    return oscillatory_1d([&](double q2) { return phase(q1, q2); },
                          [&](double q2) { return amp(q1, q2); }, theta, opt.center2 - R,
                          opt.center2 + R, 0.5, &ev);
  };
  QuadStats st;
  out.value = adaptive_gk(inner, opt.center1 - R, opt.center1 + R, opt.abs_tol, opt.rel_tol, 30,
                          graded_breaks(opt.center1, theta, R), &st);
  out.evaluations = ev;
  return out;
}

}  // namespace

QuadValue oscillatory_2d(const Phase2& phase, const Amp2& amp, double theta,
                         const QuadOptions& opt) {
  if (!(theta > 0.0)) throw Error("oscillatory_2d: theta must be positive");
  const Box box = truncation_box(amp, opt);
  return oscillatory_2d_box(phase, amp, theta, opt, box);
}

std::vector<QuadValue> quad_oracle(const Phase2& phase, const Amp2& amp, double theta, double rho,
                                   const EnvelopeSpec& env, const rvec& tau_grid,
                                   const QuadOptions& opt) {
  if (!(theta > 0.0) || !(rho > 0.0)) throw Error("quad_oracle: theta and rho must be positive");
  const Box box = truncation_box(amp, opt);
  long ev = 0;
  auto f = [&](double t1) -> cplx {
    if (t1 <= 0.0) return 0.0;
    const double p = env.psi(t1);
    if (p == 0.0) return 0.0;
    QuadValue v = oscillatory_2d_box(phase, amp, theta / t1, opt, box);
    ev += v.evaluations;
    return p * p * p * v.value;
  };
  std::vector<QuadValue> out;
  cplx acc = 0.0;
  double prev = 0.0;
  for (double tau : tau_grid) {
    if (tau < prev) throw Error("quad_oracle: tau_grid must be ascending");
    if (tau > prev) acc += adaptive_gk(f, prev, tau, 0.0, opt.time_rel_tol, 20, {env.tau0});
    prev = tau;
    QuadValue q;
    q.value = acc / rho;
    q.radius = box.radius;
    q.tail_bound = box.tail * tau / rho;
    q.evaluations = ev;
    out.push_back(q);
  }
  return out;
}

cplx SusceptibilityJet::eval(int sigma, double s1, double s2, double s3) const {
  cplx v = Q;
  if (sigma >= 1) v += a[0] * s1 + a[1] * s2 + a[2] * s3;
  if (sigma >= 2) {
    const double s[3] = {s1, s2, s3};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) v += 0.5 * H[i][j] * s[i] * s[j];
  }
  return v;
}

cplx susceptibility_at(const DispersionModel& model, int n0, double k_star, int sign, double s1,
                       double s2, double s3) {
  const double ks = sign * k_star;
  ModeIndex end{sign, n0, wrap_zone(ks + s1 + s2 + s3)};
  Origins o{ModeIndex{sign, n0, wrap_zone(ks + s1)}, ModeIndex{sign, n0, wrap_zone(ks + s2)},
            ModeIndex{-sign, n0, wrap_zone(-ks + s3)}};
  return model.overlap().value(end, o);
}

SusceptibilityJet susceptibility_jet(const DispersionModel& model, int n0, double k_star,
                                     int sign, double h) {
  SusceptibilityJet j;
  j.sign = sign;
  auto P = [&](const std::array<double, 3>& s) {
    return susceptibility_at(model, n0, k_star, sign, s[0], s[1], s[2]);
  };
  j.Q = P({0, 0, 0});
  for (int i = 0; i < 3; ++i) {
    std::array<double, 3> p{}, m{};
    p[i] = h;
    m[i] = -h;
    const cplx fp = P(p), fm = P(m);
    j.a[i] = (fp - fm) / (2.0 * h);
    j.H[i][i] = (fp - 2.0 * j.Q + fm) / (h * h);
    for (int k = i + 1; k < 3; ++k) {
      std::array<double, 3> pp{}, pm{}, mp{}, mm{};
      pp[i] = h, pp[k] = h;
      pm[i] = h, pm[k] = -h;
      mp[i] = -h, mp[k] = h;
      mm[i] = -h, mm[k] = -h;
      j.H[i][k] = j.H[k][i] = (P(pp) - P(pm) - P(mp) + P(mm)) / (4.0 * h * h);
    }
  }
  return j;
}

FmIntegrand fm_integrand(const DispersionModel& model, const TaylorJet& jet, int nu,
                         const DoubletExcitation& exc, int sign, double q, int sigma,
                         const SusceptibilityJet* sjet) {
  if (sigma >= 0 && !sjet) throw Error("fm_integrand: polynomial amplitude needs a susceptibility jet");
  if (sigma >= 0 && nu >= 2 && sigma > nu - 2)
    throw Error("fm_integrand: sigma must not exceed nu - 2");
  const double beta = exc.beta;
  FmIntegrand f;
  const DispersionModel* m = &model;
  f.phase = [m, jet, nu, sign, beta, q](double q1, double q2) {
    return scaled_fm_phase(*m, jet, nu, sign, beta, q, q1, q2);
  };
  SusceptibilityJet sj = sjet ? *sjet : SusceptibilityJet{};
  f.amp = [m, jet, exc, sign, q, sigma, sj, beta](double q1, double q2) {
    const double q3 = q - q1 - q2;
    const cplx prof = exc.hhat(sign, q1) * exc.hhat(sign, q2) * exc.hhat(-sign, q3);
    if (prof == 0.0) return cplx(0.0);
    const cplx p = sigma < 0 ? susceptibility_at(*m, jet.n0, jet.k_star, sign, beta * q1, beta * q2, beta * q3)
                             : sj.eval(sigma, beta * q1, beta * q2, beta * q3);
    return p * prof;
  };
  return f;
}

std::vector<QuadValue> rectified_integral(const DispersionModel& model, const TaylorJet& jet,
                                          int nu, const DoubletExcitation& exc, int sigma,
                                          int sign, double q, const rvec& tau_grid,
                                          const QuadOptions& opt) {
  const SusceptibilityJet sj = susceptibility_jet(model, jet.n0, jet.k_star, sign);
  const FmIntegrand f = fm_integrand(model, jet, nu, exc, sign, q, sigma, &sj);
  QuadOptions o = opt;
  o.center1 = q;
  o.center2 = q;
  const double theta = exc.rho / (exc.beta * exc.beta);
  return quad_oracle(f.phase, f.amp, theta, exc.rho, exc.env(), tau_grid, o);
}

WeakDispersionValue weak_dispersion_expand(const DispersionModel& model, const TaylorJet& jet,
                                           int nu, const DoubletExcitation& exc, int sigma,
                                           int sign, double q, const rvec& tau_grid,
                                           double theta0, const QuadOptions& opt) {
  const double theta = exc.rho / (exc.beta * exc.beta);
  if (theta < theta0 * (1.0 - 1e-12)) throw Error("weak_dispersion_expand: theta below theta0");
  WeakDispersionValue w;
  w.values = rectified_integral(model, jet, nu, exc, sigma, sign, q, tau_grid, opt);
  w.phase_budget = std::pow(exc.beta, nu + 1) / exc.rho;
  w.amplitude_budget = std::pow(exc.beta, sigma + 1);
  return w;
}

NonFmEstimate nonfm_estimate(double phi, const std::function<cplx(double)>& a,
                             const std::function<cplx(double)>& da, double rho, double tau,
                             double phi_min) {
  if (std::abs(phi) < phi_min)
    throw Error("nonfm_estimate: |phi| = " + std::to_string(std::abs(phi)) + " below phi_min");
  const cplx iphi = kI * phi;
  const cplx e = std::exp(iphi * (tau / rho));
  NonFmEstimate r;
  r.K1 = (e * a(tau) - a(0.0)) / iphi;
  r.rhoK2 = -rho * (e * da(tau) - da(0.0)) / (iphi * iphi);
  r.total = r.K1 + r.rhoK2;
  return r;
}

cplx nonfm_direct(double phi, const std::function<cplx(double)>& a, double rho, double tau) {
  // one panel per half period keeps every GK panel non-oscillatory
  const double period = kTwoPi * rho / std::max(std::abs(phi), 1e-300);
  const int n = std::max(1, static_cast<int>(std::ceil(2.0 * tau / period)));
  cplx acc = 0.0;
  const double w = tau / n;
  auto f = [&](double t) { return std::exp(kI * (phi * t / rho)) * a(t); };
  for (int i = 0; i < n; ++i) acc += adaptive_gk(f, i * w, (i + 1) * w, 0.0, 1e-12, 12);
  return acc / rho;
}

NonFmEstimate nonfm_estimate(const DispersionModel& model, const Quadruplet& quad,
                             const DoubletExcitation& exc, double tau, double phi_min) {
  const double phi = phase_value(model, quad);
  const cplx q = model.overlap().value(quad.end, quad.origins);
  cplx prof = 1.0;
  for (const auto& o : quad.origins) prof *= exc.hhat(o.sign, 0.0);
  const EnvelopeSpec env = exc.env();
  auto a = [&](double t) { const double p = env.psi(t); return q * prof * (p * p * p); };
  auto da = [&](double t) { const double p = env.psi(t); return q * prof * (3.0 * p * p * env.psi0(t)); };
  return nonfm_estimate(phi, a, da, exc.rho, tau, phi_min);
}

}  // namespace nlsr
