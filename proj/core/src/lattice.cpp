#include "nlsregime/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "nlsregime/rectify.hpp"

namespace nlsr {

double lattice_symbol(const TaylorJet& jet, double xi, LatticeSymbolKind kind, int nu) {
  if (kind == LatticeSymbolKind::sin) return gamma_poly(jet, nu, std::sin(xi));
  if (jet.order < 2) throw Error("lattice_symbol: jet order must be at least 2");
  const double w = jet.derivs[0], w1 = jet.derivs[1], w2 = jet.derivs[2];
  return (w + w2) + w1 * std::sin(xi) - w2 * std::cos(xi);
}

LatticeState make_lattice_state(int M, const std::function<cplx(double)>& h, double beta,
                                Frame frame) {
  if (frame == Frame::comoving) throw Error("lattice states use the lab or rotating frame");
  LatticeState s;
  s.M = M;
  s.frame = frame;
  s.z_plus.resize(s.sites());
  s.z_minus.resize(s.sites());
  for (int m = -M; m <= M; ++m) {
    s.z_plus[s.index(m)] = h(beta * m);
    s.z_minus[s.index(m)] = std::conj(s.z_plus[s.index(m)]);
  }
  return s;
}

void delta_minus(const cvec& z, cvec& out) {
  const size_t n = z.size();
  out.resize(n);
  for (size_t j = 0; j < n; ++j) {
    const cplx up = j + 1 < n ? z[j + 1] : cplx(0.0);
    const cplx dn = j > 0 ? z[j - 1] : cplx(0.0);
    out[j] = (up - dn) / (2.0 * kI);
  }
}

void delta_plus(const cvec& z, cvec& out) {
  const size_t n = z.size();
  out.resize(n);
  for (size_t j = 0; j < n; ++j) {
    const cplx up = j + 1 < n ? z[j + 1] : cplx(0.0);
    const cplx dn = j > 0 ? z[j - 1] : cplx(0.0);
    out[j] = 0.5 * (up + dn);
  }
}

namespace {

class LatticeOperator {
 public:
  LatticeOperator(const EnlsCoefficients& c, const LatticeRunSpec& spec, Frame frame)
      : c_(c), spec_(spec), frame_(frame) {
    // gamma_j recovered from the coefficient record
    jet_.k_star = c.k_star;
    jet_.n0 = c.n0;
    jet_.order = 4;
    double f = 1.0;
    for (int j = 0; j <= 4; ++j) {
      if (j > 0) f *= j;
      jet_.derivs[j] = c.gamma[j] * f;
    }
  }

  // -i Gamma(D) z + nonlinearity
  void rhs(const cvec& z, cvec& out) {
    const size_t n = z.size();
    out.assign(n, 0.0);
    const double shift = frame_ == Frame::rotating ? c_.gamma[0] : 0.0;
    if (spec_.kind == LatticeSymbolKind::trig2) {
      delta_minus(z, a_);
      delta_plus(z, b_);
      const double w = jet_.derivs[0], w1 = jet_.derivs[1], w2 = jet_.derivs[2];
      for (size_t j = 0; j < n; ++j) out[j] = -kI * ((w + w2 - shift) * z[j] + w1 * a_[j] - w2 * b_[j]);
    } else {
      // Horner in D-: gamma_nu(D-) z
      cvec acc(n, 0.0);
      for (int k = spec_.nu; k >= 0; --k) {
        delta_minus(acc, a_);
        for (size_t j = 0; j < n; ++j) acc[j] = a_[j] + c_.gamma[k] * z[j];
      }
      for (size_t j = 0; j < n; ++j) out[j] = -kI * (acc[j] - shift * z[j]);
    }
    const cplx a3 = c_.alpha_pi * c_.plus.sjet.Q;
    for (size_t j = 0; j < n; ++j) out[j] += a3 * std::norm(z[j]) * z[j];
  }

  double max_rate(const cvec& z) const {
    double m = 0.0;
    for (const cplx& v : z) m = std::max(m, std::norm(v));
    return c_.alpha_pi * std::abs(c_.plus.sjet.Q) * m;
  }

 private:
  const EnlsCoefficients& c_;
  const LatticeRunSpec& spec_;
  Frame frame_;
  TaylorJet jet_;
  cvec a_, b_;
};

long lattice_steps(double t_end, double dt) {
  if (!(dt > 0.0)) throw Error("lattice: time step must be positive");
  const double r = t_end / dt;
  const long n = std::lround(r);
  if (std::abs(r - n) > 1e-6 * std::max(1.0, r)) throw Error("lattice: t_end must be a multiple of dt");
  return n;
}

}  // namespace

LatticeResult integrate_lattice_nls(const EnlsCoefficients& c, LatticeState state,
                                    const LatticeRunSpec& spec) {
  LatticeOperator op(c, spec, state.frame);
  const long n = lattice_steps(spec.t_end, spec.dt);
  const size_t ns = state.z_plus.size();
  cvec& z = state.z_plus;
  double peak = max_abs(z);
  if (peak == 0.0) peak = 1.0;
  double norm0 = 0.0;
  for (const cplx& v : z) norm0 += std::norm(v);
  cvec k1, k2, k3, k4, tmp(ns);
  LatticeResult r;
  const double h = spec.dt;
  for (long i = 0; i < n; ++i) {
    if (op.max_rate(z) * h > spec.max_phase)
      throw Error("integrate_lattice_nls: step rejected, nonlinear phase per step above " +
                  std::to_string(spec.max_phase) + " rad");
    op.rhs(z, k1);
    for (size_t j = 0; j < ns; ++j) tmp[j] = z[j] + 0.5 * h * k1[j];
    op.rhs(tmp, k2);
    for (size_t j = 0; j < ns; ++j) tmp[j] = z[j] + 0.5 * h * k2[j];
    op.rhs(tmp, k3);
    for (size_t j = 0; j < ns; ++j) tmp[j] = z[j] + h * k3[j];
    op.rhs(tmp, k4);
    for (size_t j = 0; j < ns; ++j) z[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    const double edge = std::max(std::abs(z.front()), std::abs(z.back())) / peak;
    if (!std::isfinite(edge)) throw Error("integrate_lattice_nls: non-finite value in the field");
    r.max_boundary = std::max(r.max_boundary, edge);
    if (spec.fail_on_leak && edge > spec.leak_tol)
      throw Error("integrate_lattice_nls: boundary leak " + std::to_string(edge) +
                  " exceeds tolerance; enlarge M");
  }
  state.t += n * h;
  for (size_t j = 0; j < ns; ++j) state.z_minus[j] = std::conj(z[j]);
  double norm1 = 0.0;
  for (const cplx& v : z) norm1 += std::norm(v);
  r.norm_drift = norm0 > 0.0 ? std::abs(norm1 - norm0) / norm0 : 0.0;
  r.state = std::move(state);
  return r;
}

cvec lattice_fourier(const cvec& z, int M, int n_xi) {
  cvec out(n_xi);
  for (int j = 0; j < n_xi; ++j) {
    const double xi = -kPi + kTwoPi * j / n_xi;
    cplx acc = 0.0;
    for (int m = -M; m <= M; ++m) acc += z[m + M] * std::exp(-kI * (m * xi));
    out[j] = acc;
  }
  return out;
}

cvec lattice_inverse(const cvec& zbar, int M) {
  const int n = static_cast<int>(zbar.size());
  if (n < 2 * M + 1) throw Error("lattice_inverse: spectrum has fewer points than sites");
  cvec z(2 * M + 1);
  for (int m = -M; m <= M; ++m) {
    cplx acc = 0.0;
    for (int j = 0; j < n; ++j) acc += zbar[j] * std::exp(kI * (m * (-kPi + kTwoPi * j / n)));
    z[m + M] = acc / double(n);
  }
  return z;
}

cplx lattice_interpolate(const cvec& z, int M, double y) {
  cplx acc = 0.0;
  for (int m = -M; m <= M; ++m) {
    const double d = y - m;
    const double s = std::abs(d) < 1e-14 ? 1.0 : std::sin(kPi * d) / (kPi * d);
    acc += z[m + M] * s;
  }
  return acc;
}

LatticeComparison compare_lattice_continuum(const EnlsCoefficients& c, int M,
                                            const std::function<cplx(double)>& h, double beta,
                                            const LatticeRunSpec& spec, long sample_every) {
  LatticeComparison cmp;
  LatticeState lat = make_lattice_state(M, h, beta, Frame::rotating);
  Grid g;
  g.N = 2 * M + 2;
  g.L = g.N;  // unit spacing; x_j = j - (M + 1)
  EnvelopeState cont = make_state(g, h, beta, Frame::rotating);
  cmp.peak = max_abs(lat.z_plus);
  const long n = lattice_steps(spec.t_end, spec.dt);
  LatticeRunSpec chunk = spec;
  EnlsRunSpec es;
  es.order = {2, 0, false};
  es.dt = spec.dt;
  es.max_phase = spec.max_phase;
  for (long done = 0; done < n;) {
    const long m = std::min(sample_every, n - done);
    chunk.t_end = m * spec.dt;
    es.t_end = m * spec.dt;
    lat = integrate_lattice_nls(c, lat, chunk).state;
    cont = integrate_enls(c, cont, es);
    done += m;
    for (int s = -M; s <= M; ++s)
      cmp.max_deviation = std::max(cmp.max_deviation,
                                   std::abs(lat.z_plus[s + M] - cont.z_plus[s + M + 1]) / cmp.peak);
  }
  return cmp;
}

void write_sites_csv(const LatticeState& s, std::ostream& os) {
  os << "m,re,im\n" << std::setprecision(17);
  for (int m = -s.M; m <= s.M; ++m) {
    const cplx z = s.z_plus[s.index(m)];
    os << m << ',' << z.real() << ',' << z.imag() << '\n';
  }
}

void write_spectrum_csv(const cvec& zbar, std::ostream& os) {
  os << "xi,abs\n" << std::setprecision(17);
  const int n = static_cast<int>(zbar.size());
  for (int j = 0; j < n; ++j) os << -kPi + kTwoPi * j / n << ',' << std::abs(zbar[j]) << '\n';
}

}  // namespace nlsr
