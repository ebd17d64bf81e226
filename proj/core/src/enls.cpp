#include "nlsregime/enls.hpp"

#include <algorithm>
#include <cmath>

namespace nlsr {

std::string to_string(Frame f) {
  switch (f) {
    case Frame::lab: return "lab";
    case Frame::rotating: return "rotating";
    case Frame::comoving: return "comoving";
  }
  return "unknown";
}

Frame frame_from_string(const std::string& s) {
  if (s == "lab") return Frame::lab;
  if (s == "rotating") return Frame::rotating;
  if (s == "comoving") return Frame::comoving;
  throw Error("unknown frame '" + s + "' (expected lab, rotating or comoving)");
}

rvec Grid::x() const {
  rvec v(N);
  for (int j = 0; j < N; ++j) v[j] = (j - N / 2) * dx();
  return v;
}

rvec Grid::xi() const { return fft_frequencies(N, dx()); }

Grid Grid::for_envelope(double beta, double L_over_beta, int points_per_width) {
  Grid g;
  g.L = L_over_beta / beta;
  const double need = L_over_beta * points_per_width;
  g.N = 64;
  while (g.N < need) g.N *= 2;
  return g;
}

EnvelopeState make_state(const Grid& g, const std::function<cplx(double)>& h, double beta,
                         Frame frame) {
  EnvelopeState s;
  s.grid = g;
  s.frame = frame;
  const rvec x = g.x();
  s.z_plus.resize(g.N);
  s.z_minus.resize(g.N);
  for (int j = 0; j < g.N; ++j) {
    s.z_plus[j] = h(beta * x[j]);
    s.z_minus[j] = std::conj(s.z_plus[j]);
  }
  return s;
}

double EnlsCoefficients::gamma_poly(int nu_, double xi) const {
  double acc = 0.0, p = 1.0;
  for (int j = 0; j <= nu_; ++j, p *= xi) acc += gamma[j] * p;
  return acc;
}

double EnlsCoefficients::symbol(int s, double xi, Frame f, int nu_) const {
  double v = s * gamma_poly(nu_, s * xi);
  if (f == Frame::rotating || f == Frame::comoving) v -= s * gamma[0];
  if (f == Frame::comoving) v -= gamma[1] * xi;
  return v;
}

bool EnlsCoefficients::norm_conserving(double tol) const {
  for (const SignCoefficients* c : {&plus, &minus}) {
    const cplx q = kI * c->sjet.Q;
    const cplx d = kI * c->delta5;
    if (std::abs(q.imag()) > tol * std::max(1.0, std::abs(q))) return false;
    if (std::abs(d.imag()) > tol * std::max(1.0, std::abs(d))) return false;
  }
  return true;
}

namespace {

nlohmann::json cjson(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

nlohmann::json sign_json(const SignCoefficients& c) {
  nlohmann::json h = nlohmann::json::array();
  for (const auto& row : c.sjet.H) {
    nlohmann::json r = nlohmann::json::array();
    for (cplx v : row) r.push_back(cjson(v));
    h.push_back(r);
  }
  return {{"Q", cjson(c.sjet.Q)},
          {"a", {cjson(c.sjet.a[0]), cjson(c.sjet.a[1]), cjson(c.sjet.a[2])}},
          {"p2", h},
          {"delta1", cjson(c.delta1)},
          {"delta2", cjson(c.delta2)},
          {"Q5", cjson(c.Q5)},
          {"delta5", cjson(c.delta5)}};
}

}  // namespace

nlohmann::json EnlsCoefficients::to_json() const {
  return {{"nu", nu},
          {"n0", n0},
          {"k_star", k_star},
          {"gamma", gamma},
          {"alpha", alpha},
          {"alpha_pi", alpha_pi},
          {"plus", sign_json(plus)},
          {"minus", sign_json(minus)},
          {"has_q5", has_q5},
          {"delta_cross_minus", cjson(delta_cross_minus)},
          {"delta_cross_plus", cjson(delta_cross_plus)}};
}

cplx quintic_coefficient(const DispersionModel& model, int sign) {
  if (!model.q5) return 0.0;
  return 10.0 * std::pow(kTwoPi, -4) * (-kI * double(sign)) * *model.q5;
}

EnlsCoefficients extract_coeffs(const DispersionModel& model, const TaylorJet& jet, int nu,
                                double alpha, double h) {
  if (nu < 1 || nu > 4) throw Error("extract_coeffs: nu must be in 1..4");
  if (jet.order < nu) throw Error("extract_coeffs: jet order below nu");
  EnlsCoefficients c;
  c.nu = nu;
  c.n0 = jet.n0;
  c.k_star = jet.k_star;
  for (int j = 0; j <= std::min(4, jet.order); ++j) c.gamma[j] = jet.gamma(j);
  c.alpha = alpha;
  c.alpha_pi = alpha_pi(alpha);
  c.has_q5 = model.q5.has_value();
  const Susceptibility& q = model.overlap();
  const int n0 = jet.n0;
  const double ks = jet.k_star;
  for (int s : {1, -1}) {
    SignCoefficients& sc = s > 0 ? c.plus : c.minus;
    sc.sjet = susceptibility_jet(model, n0, ks, s, h);
    const ModeIndex end{s, n0, wrap_zone(s * ks)};
    const Origins o{ModeIndex{s, n0, wrap_zone(s * ks)}, ModeIndex{s, n0, wrap_zone(s * ks)},
                    ModeIndex{-s, n0, wrap_zone(-s * ks)}};
    sc.delta1 = -2.0 * q.value(end, o, {1, 0, 0});
    sc.delta2 = -q.value(end, o, {0, 0, 1});
    sc.Q5 = quintic_coefficient(model, s);
  }
  for (int s : {1, -1}) {
    SignCoefficients& sc = s > 0 ? c.plus : c.minus;
    const cplx q_other = (s > 0 ? c.minus : c.plus).sjet.Q;
    sc.delta5 = -sc.delta2 * q_other - sc.delta1 * sc.sjet.Q + sc.Q5;
  }
  const ModeIndex fwd_p{1, n0, wrap_zone(ks)}, fwd_m{-1, n0, wrap_zone(-ks)};
  const ModeIndex bwd_p{1, n0, wrap_zone(-ks)}, bwd_m{-1, n0, wrap_zone(ks)};
  c.delta_cross_minus = 3.0 * q.value(bwd_p, {fwd_m, fwd_m, fwd_p});
  c.delta_cross_plus = 3.0 * q.value(fwd_p, {bwd_m, bwd_m, bwd_p});
  return c;
}

EnlsNonlinearity::EnlsNonlinearity(const EnlsCoefficients& c, EnlsOrder order, const Grid& g)
    : c_(c), order_(order), xi_(g.xi()), fft_(g.N) {
  tmp_.resize(g.N);
  w1_.resize(g.N);
  w2_.resize(g.N);
  v1_.resize(g.N);
  v2_.resize(g.N);
}

void EnlsNonlinearity::mult(const cvec& in, int power, cvec& out) {
  fft_.forward(in.data(), tmp_.data());
  for (size_t j = 0; j < tmp_.size(); ++j) tmp_[j] *= std::pow(xi_[j], power);
  fft_.inverse(tmp_.data(), out.data());
}

void EnlsNonlinearity::apply(int s, const cvec& zs, const cvec& zm, cvec& out, bool cubic,
                             bool quintic) {
  const SignCoefficients& sc = c_.sign(s);
  const auto& J = sc.sjet;
  const size_t n = zs.size();
  out.assign(n, 0.0);
  const double ap = c_.alpha_pi;
  if (cubic) {
    const int sigma = order_.sigma;
    if (sigma >= 1) {
      mult(zs, 1, w1_);
      mult(zm, 1, v1_);
    }
    if (sigma >= 2) {
      mult(zs, 2, w2_);
      mult(zm, 2, v2_);
    }
    const cplx a12 = J.a[0] + J.a[1], a3 = J.a[2];
    const cplx h_w2 = 0.5 * (J.H[0][0] + J.H[1][1]), h_v2 = 0.5 * J.H[2][2];
    const cplx h_w1w1 = J.H[0][1], h_w1v1 = J.H[0][2] + J.H[1][2];
    for (size_t j = 0; j < n; ++j) {
      const cplx w0 = zs[j], v0 = zm[j];
      cplx v = J.Q * w0 * w0 * v0;
      if (sigma >= 1) v += a12 * w1_[j] * w0 * v0 + a3 * w0 * w0 * v1_[j];
      if (sigma >= 2)
        v += h_w2 * w2_[j] * w0 * v0 + h_v2 * w0 * w0 * v2_[j] + h_w1w1 * w1_[j] * w1_[j] * v0 +
             h_w1v1 * w1_[j] * w0 * v1_[j];
      out[j] = ap * v;
    }
  }
  if (quintic && order_.quintic) {
    const cplx q5 = ap * ap * sc.delta5;
    for (size_t j = 0; j < n; ++j) {
      const cplx w0 = zs[j], v0 = zm[j];
      out[j] += q5 * w0 * w0 * w0 * v0 * v0;
    }
  }
}

double EnlsNonlinearity::max_rate(int s, const cvec& zs, const cvec& zm) {
  const SignCoefficients& sc = c_.sign(s);
  const double ap = c_.alpha_pi;
  double m = 0.0;
  for (size_t j = 0; j < zs.size(); ++j) {
    const double p = std::abs(zs[j]) * std::abs(zm[j]);
    double r = ap * std::abs(sc.sjet.Q) * p;
    if (order_.quintic) r += ap * ap * std::abs(sc.delta5) * p * p;
    m = std::max(m, r);
  }
  return m;
}

namespace {

using Fields = std::vector<cvec>;
using Rhs = std::function<void(const Fields&, double, Fields&)>;

struct LinearPart {
  std::vector<rvec> symbol;  // per field, FFT order
};

class Integrator {
 public:
  Integrator(LinearPart lin, int n, double dt) : lin_(std::move(lin)), fft_(n), dt_(dt) {
    for (const auto& sym : lin_.symbol) {
      cvec h(n), f(n);
      for (int j = 0; j < n; ++j) {
        h[j] = std::exp(-kI * (sym[j] * 0.5 * dt));
        f[j] = h[j] * h[j];
      }
      half_.push_back(std::move(h));
      full_.push_back(std::move(f));
    }
    buf_.resize(n);
  }

  void apply(Fields& y, const std::vector<cvec>& mult) {
    for (size_t k = 0; k < y.size(); ++k) {
      fft_.forward(y[k].data(), buf_.data());
      for (size_t j = 0; j < buf_.size(); ++j) buf_[j] *= mult[k][j];
      fft_.inverse(buf_.data(), y[k].data());
    }
  }

  // Strang: half linear, nonlinear substep over dt, half linear.
  void strang(Fields& y, double t, const Rhs& f,
              const std::function<void(Fields&, double)>& exact) {
    apply(y, half_);
    if (exact) {
      exact(y, dt_);
    } else {
      Fields k1, k2, k3, k4, tmp = y;
      const double h = dt_;
      f(y, t, k1);
      axpy(tmp, y, 0.5 * h, k1);
      f(tmp, t + 0.5 * h, k2);
      axpy(tmp, y, 0.5 * h, k2);
      f(tmp, t + 0.5 * h, k3);
      axpy(tmp, y, h, k3);
      f(tmp, t + h, k4);
      for (size_t k = 0; k < y.size(); ++k)
        for (size_t j = 0; j < y[k].size(); ++j)
          y[k][j] += h / 6.0 * (k1[k][j] + 2.0 * k2[k][j] + 2.0 * k3[k][j] + k4[k][j]);
    }
    apply(y, half_);
  }

  void ifrk4(Fields& y, double t, const Rhs& f) {
    const double h = dt_;
    Fields k1, k2, k3, k4;
    f(y, t, k1);
    Fields a = y;
    for (size_t k = 0; k < y.size(); ++k)
      for (size_t j = 0; j < y[k].size(); ++j) a[k][j] += 0.5 * h * k1[k][j];
    apply(a, half_);
    f(a, t + 0.5 * h, k2);
    Fields e2y = y;
    apply(e2y, half_);
    Fields b = e2y;
    for (size_t k = 0; k < y.size(); ++k)
      for (size_t j = 0; j < y[k].size(); ++j) b[k][j] += 0.5 * h * k2[k][j];
    f(b, t + 0.5 * h, k3);
    Fields ey = e2y;
    apply(ey, half_);
    Fields e2k3 = k3;
    apply(e2k3, half_);
    Fields c = ey;
    for (size_t k = 0; k < y.size(); ++k)
      for (size_t j = 0; j < y[k].size(); ++j) c[k][j] += h * e2k3[k][j];
    f(c, t + h, k4);
    Fields ek1 = k1;
    apply(ek1, full_);
    Fields mid = k2;
    for (size_t k = 0; k < y.size(); ++k)
      for (size_t j = 0; j < y[k].size(); ++j) mid[k][j] += k3[k][j];
    apply(mid, half_);
    for (size_t k = 0; k < y.size(); ++k)
      for (size_t j = 0; j < y[k].size(); ++j)
        y[k][j] = ey[k][j] + h / 6.0 * (ek1[k][j] + 2.0 * mid[k][j] + k4[k][j]);
  }

 private:
  static void axpy(Fields& out, const Fields& y, double a, const Fields& k) {
    for (size_t i = 0; i < y.size(); ++i)
      for (size_t j = 0; j < y[i].size(); ++j) out[i][j] = y[i][j] + a * k[i][j];
  }
  LinearPart lin_;
  Fft fft_;
  double dt_;
  std::vector<cvec> half_, full_;
  cvec buf_;
};

rvec symbol_vec(const EnlsCoefficients& c, int s, Frame f, int nu, const rvec& xi) {
  rvec v(xi.size());
  for (size_t j = 0; j < xi.size(); ++j) v[j] = c.symbol(s, xi[j], f, nu);
  return v;
}

void check_finite(const cvec& z, const char* what) {
  for (const cplx& v : z)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw Error(std::string(what) + ": non-finite value in the field");
}

long step_count(double t_end, double dt) {
  if (!(dt > 0.0)) throw Error("time step must be positive");
  const double r = t_end / dt;
  const long n = std::lround(r);
  if (std::abs(r - n) > 1e-6 * std::max(1.0, r)) throw Error("t_end must be a multiple of dt");
  return n;
}

}  // namespace

EnvelopeState integrate_enls(const EnlsCoefficients& c, EnvelopeState state,
                             const EnlsRunSpec& spec) {
  const int nu = spec.order.nu;
  if (spec.order.sigma > 0 && spec.order.sigma > nu - 2)
    throw Error("integrate_enls: sigma must not exceed nu - 2");
  const Grid& g = state.grid;
  const rvec xi = g.xi();
  EnlsNonlinearity nl(c, spec.order, g);
  const long n = step_count(spec.t_end, spec.dt);

  LinearPart lin;
  lin.symbol.push_back(symbol_vec(c, 1, state.frame, nu, xi));
  if (!spec.reality) lin.symbol.push_back(symbol_vec(c, -1, state.frame, nu, xi));
  Integrator integ(lin, g.N, spec.dt);

  Fields y{state.z_plus};
  if (!spec.reality) y.push_back(state.z_minus);
  cvec conjbuf(g.N);
  Rhs rhs = [&](const Fields& f, double, Fields& out) {
    out.resize(f.size());
    if (spec.reality) {
      for (int j = 0; j < g.N; ++j) conjbuf[j] = std::conj(f[0][j]);
      nl.apply(1, f[0], conjbuf, out[0]);
    } else {
      nl.apply(1, f[0], f[1], out[0]);
      nl.apply(-1, f[1], f[0], out[1]);
    }
  };
  std::function<void(Fields&, double)> exact;
  if (spec.reality && spec.order.sigma == 0 && c.norm_conserving()) {
    const cplx a3 = c.alpha_pi * c.plus.sjet.Q;
    const cplx a5 = spec.order.quintic ? c.alpha_pi * c.alpha_pi * c.plus.delta5 : cplx(0.0);
    exact = [a3, a5](Fields& f, double h) {
      for (cplx& z : f[0]) {
        const double p = std::norm(z);
        z *= std::exp((a3 * p + a5 * p * p) * h);
      }
    };
  }

  auto sync = [&]() {
    state.z_plus = y[0];
    if (spec.reality) {
      for (int j = 0; j < g.N; ++j) state.z_minus[j] = std::conj(y[0][j]);
    } else {
      state.z_minus = y[1];
    }
  };
  const double t0 = state.t;
  if (spec.observer) spec.observer(state, 0);
  for (long i = 0; i < n; ++i) {
    const double t = t0 + i * spec.dt;
    if (spec.reality)
      for (int j = 0; j < g.N; ++j) conjbuf[j] = std::conj(y[0][j]);
    const cvec& zm = spec.reality ? conjbuf : y[1];
    if (nl.max_rate(1, y[0], zm) * spec.dt > spec.max_phase)
      throw Error("integrate_enls: step rejected, nonlinear phase per step above " +
                  std::to_string(spec.max_phase) + " rad");
    if (spec.stepper == Stepper::strang)
      integ.strang(y, t, rhs, exact);
    else
      integ.ifrk4(y, t, rhs);
    check_finite(y[0], "integrate_enls");
    state.t = t0 + (i + 1) * spec.dt;
    if (spec.observer && ((i + 1) % spec.observe_every == 0 || i + 1 == n)) {
      sync();
      spec.observer(state, i + 1);
    }
  }
  sync();
  return state;
}

BidirectionalResult integrate_bidirectional(const EnlsCoefficients& fwd,
                                            const EnlsCoefficients& bwd, EnvelopeState zf,
                                            EnvelopeState zb, const EnlsRunSpec& spec,
                                            bool coupled) {
  if (!spec.reality) throw Error("integrate_bidirectional: only the real reduction is supported");
  if (zf.grid.N != zb.grid.N || zf.grid.L != zb.grid.L)
    throw Error("integrate_bidirectional: forward and backward grids differ");
  if (zf.frame == Frame::comoving || zb.frame == Frame::comoving)
    throw Error("integrate_bidirectional: both fields must share a lab-space frame");
  const int nu = spec.order.nu;
  const Grid& g = zf.grid;
  const rvec xi = g.xi();
  const long n = step_count(spec.t_end, spec.dt);
  EnlsNonlinearity nlf(fwd, spec.order, g), nlb(bwd, spec.order, g);
  LinearPart lin;
  lin.symbol.push_back(symbol_vec(fwd, 1, zf.frame, nu, xi));
  lin.symbol.push_back(symbol_vec(bwd, 1, zb.frame, nu, xi));
  Integrator integ(lin, g.N, spec.dt);

  // carrier mismatch of the cross terms in the rotating frame
  const double w2 = (zf.frame == Frame::rotating ? 2.0 * fwd.gamma[0] : 0.0);
  const cplx cf = coupled ? fwd.alpha_pi * fwd.delta_cross_plus : cplx(0.0);
  const cplx cb = coupled ? fwd.alpha_pi * fwd.delta_cross_minus : cplx(0.0);
  cvec cj0(g.N), cj1(g.N), t0buf(g.N), t1buf(g.N);
  auto cross = [&](const cvec& other, const cplx& coef, cvec& out) {
    out.resize(other.size());
    for (size_t j = 0; j < other.size(); ++j) out[j] = coef * std::norm(other[j]) * std::conj(other[j]);
  };
  Rhs rhs = [&](const Fields& f, double t, Fields& out) {
    out.resize(2);
    for (int j = 0; j < g.N; ++j) {
      cj0[j] = std::conj(f[0][j]);
      cj1[j] = std::conj(f[1][j]);
    }
    nlf.apply(1, f[0], cj0, out[0]);
    nlb.apply(1, f[1], cj1, out[1]);
    if (coupled) {
      const cplx ph = std::exp(kI * (w2 * t));
      cross(f[1], cf * ph, t0buf);
      cross(f[0], cb * ph, t1buf);
      for (int j = 0; j < g.N; ++j) {
        out[0][j] += t0buf[j];
        out[1][j] += t1buf[j];
      }
    }
  };

  Fields y{zf.z_plus, zb.z_plus};
  cvec acc_f(g.N, 0.0), acc_b(g.N, 0.0), prev_f(g.N), prev_b(g.N), cur_f(g.N), cur_b(g.N);
  const double tstart = zf.t;
  cross(y[1], cf, prev_f);
  cross(y[0], cb, prev_b);
  // int over one step of e^{i w s} times the linear interpolant of F
  auto filon = [&](double t, double h, const cvec& F0, const cvec& F1, cvec& acc) {
    cplx e0, e1;
    cplx w0, w1;  // weights of F0 and F1
    if (std::abs(w2 * h) < 1e-3) {
      e0 = std::exp(kI * (w2 * t));
      w0 = w1 = 0.5 * h * e0 * std::exp(kI * (0.5 * w2 * h));
    } else {
      const cplx iw = kI * w2;
      e0 = std::exp(iw * t);
      e1 = std::exp(iw * (t + h));
      const cplx I0 = (e1 - e0) / iw;                       // int e^{iws}
      const cplx I1 = (e1 * h) / iw - (e1 - e0) / (iw * iw);  // int (s - t) e^{iws}
      w1 = I1 / h;
      w0 = I0 - w1;
    }
    for (size_t j = 0; j < acc.size(); ++j) acc[j] += w0 * F0[j] + w1 * F1[j];
  };
  for (long i = 0; i < n; ++i) {
    const double t = tstart + i * spec.dt;
    if (spec.stepper == Stepper::strang)
      integ.strang(y, t, rhs, nullptr);
    else
      integ.ifrk4(y, t, rhs);
    check_finite(y[0], "integrate_bidirectional");
    check_finite(y[1], "integrate_bidirectional");
    cross(y[1], cf, cur_f);
    cross(y[0], cb, cur_b);
    filon(t, spec.dt, prev_f, cur_f, acc_f);
    filon(t, spec.dt, prev_b, cur_b, acc_b);
    prev_f.swap(cur_f);
    prev_b.swap(cur_b);
  }
  BidirectionalResult r;
  zf.z_plus = y[0];
  zb.z_plus = y[1];
  for (int j = 0; j < g.N; ++j) {
    zf.z_minus[j] = std::conj(y[0][j]);
    zb.z_minus[j] = std::conj(y[1][j]);
  }
  zf.t = zb.t = tstart + n * spec.dt;
  r.forward = std::move(zf);
  r.backward = std::move(zb);
  r.cross_integral_forward = l2_norm(acc_f) * std::sqrt(g.dx());
  r.cross_integral_backward = l2_norm(acc_b) * std::sqrt(g.dx());
  return r;
}

SourceFormResult to_source_form(const EnlsCoefficients& c, const EnvelopeState& z0,
                                const EnvelopeSpec& env, double rho, const EnlsRunSpec& spec) {
  if (!spec.reality) throw Error("to_source_form: only the real reduction is supported");
  if (!(rho > 0.0)) throw Error("to_source_form: rho must be positive");
  const int nu = spec.order.nu;
  const Grid& g = z0.grid;
  const rvec xi = g.xi();
  const long n = step_count(spec.t_end, spec.dt);
  EnlsNonlinearity nl(c, spec.order, g);
  LinearPart lin;
  const rvec sym = symbol_vec(c, 1, z0.frame, nu, xi);
  lin.symbol = {sym, sym};
  Integrator integ(lin, g.N, spec.dt);
  cvec cz(g.N), cv(g.N), n3(g.N), n5(g.N);
  Rhs rhs = [&](const Fields& f, double t, Fields& out) {
    out.resize(2);
    for (int j = 0; j < g.N; ++j) {
      cz[j] = std::conj(f[0][j]);
      cv[j] = std::conj(f[1][j]);
    }
    nl.apply(1, f[0], cz, out[0]);
    nl.apply(1, f[1], cv, out[1]);
    const double tau = rho * t;
    const double p = env.psi(tau), p0 = env.psi0(tau);
    if (p == 1.0 && p0 == 0.0) return;
    nl.apply(1, f[0], cz, n3, true, false);
    nl.apply(1, f[0], cz, n5, false, true);
    const double p3 = p - p * p * p, p5 = p - p * p * p * p * p;
    for (int j = 0; j < g.N; ++j) out[1][j] += rho * p0 * f[0][j] + p3 * n3[j] + p5 * n5[j];
  };
  SourceFormResult r;
  Fields y{z0.z_plus, cvec(g.N, 0.0)};
  const double t_ramp = env.tau0 / rho;
  double t = z0.t;
  for (long i = 0; i < n; ++i) {
    integ.ifrk4(y, t, rhs);
    t = z0.t + (i + 1) * spec.dt;
    check_finite(y[1], "to_source_form");
    const double p = env.psi(rho * t);
    for (int j = 0; j < g.N; ++j) {
      const double d = std::abs(y[1][j] - p * y[0][j]);
      r.max_linear_mismatch = std::max(r.max_linear_mismatch, d);
      if (t >= t_ramp * (1.0 - 1e-12)) r.max_diff_after_ramp = std::max(r.max_diff_after_ramp, d);
    }
  }
  r.z = z0;
  r.z.z_plus = y[0];
  r.v = z0;
  r.v.z_plus = y[1];
  for (int j = 0; j < g.N; ++j) {
    r.z.z_minus[j] = std::conj(y[0][j]);
    r.v.z_minus[j] = std::conj(y[1][j]);
  }
  r.z.t = r.v.t = t;
  return r;
}

const ReducedTerm& ReducedEquation::term(const std::string& name) const {
  for (const auto& t : terms)
    if (t.name == name) return t;
  throw Error("ReducedEquation: no term '" + name + "'");
}

nlohmann::json ReducedEquation::to_json() const {
  nlohmann::json ts = nlohmann::json::array();
  for (const auto& t : terms) ts.push_back({{"name", t.name}, {"order", t.exponent}, {"kept", t.kept}});
  return {{"kappa0", kappa0}, {"kappa1", kappa1}, {"form", form}, {"terms", ts}};
}

ReducedEquation reduce_scaling(const EnlsCoefficients& /*c*/, double kappa1, double kappa0) {
  if (!(kappa1 > 0.0)) throw Error("reduce_scaling: kappa1 must be positive");
  if (kappa0 <= 0.0) kappa0 = kappa1;
  ReducedEquation r;
  r.kappa0 = kappa0;
  r.kappa1 = kappa1;
  auto add = [&](const std::string& name, double e, bool present = true) {
    if (present) r.terms.push_back({name, e, e <= kappa1 + 1e-12});
  };
  add("gamma1", 1.0);
  add("gamma2", 2.0);
  add("gamma3", 3.0);
  add("gamma4", 4.0);
  add("cubic", kappa0);
  add("susceptibility_gradient", kappa0 + 1.0);
  add("susceptibility_hessian", kappa0 + 2.0);
  add("frequency_derivative", kappa0 + kappa1);
  add("quintic", 2.0 * kappa0);
  add("cross_coupling", kappa0 + kappa1);
  if (!r.term("gamma2").kept)
    r.form = "transport";
  else if (std::abs(kappa1 - 2.0) < 1e-12)
    r.form = "NLS";
  else if (kappa1 > 2.0)
    r.form = "strong-dispersion";
  else
    r.form = "intermediate";
  return r;
}

double time_derivative_residual(const EnlsCoefficients& c, const EnvelopeState& s, EnlsOrder order) {
  const Grid& g = s.grid;
  const rvec xi = g.xi();
  EnlsNonlinearity nl(c, order, g);
  Fft fft(g.N);
  cvec zh = fft.forward(s.z_plus);
  for (int j = 0; j < g.N; ++j) zh[j] *= -kI * c.symbol(1, xi[j], Frame::rotating, order.nu);
  cvec dz = fft.inverse(zh);
  cvec n(g.N);
  nl.apply(1, s.z_plus, s.z_minus, n);
  double m = 0.0;
  const double ap = c.alpha_pi;
  const SignCoefficients& p = c.plus;
  for (int j = 0; j < g.N; ++j) {
    const cplx z = s.z_plus[j];
    const cplx d = dz[j] + n[j];
    const cplx dm = std::conj(d);
    const double a2 = std::norm(z);
    const cplx r = ap * (-p.delta1 * a2 * d - p.delta2 * z * z * dm) -
                   ap * ap * (p.delta5 - p.Q5) * a2 * a2 * z;
    m = std::max(m, std::abs(r));
  }
  return m;
}

}  // namespace nlsr
