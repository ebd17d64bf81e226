#include "nlsregime/reference.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "nlsregime/quadrature.hpp"
#include "nlsregime/susceptibility.hpp"

namespace nlsr {

rvec modal_k_grid(int n) {
  rvec k(n);
  for (int i = 0; i < n; ++i) k[i] = wrap_zone(kTwoPi * i / n);
  return k;
}

ModalSolver::ModalSolver(const DispersionModel& model, ModalConfig cfg)
    : model_(&model), cfg_(std::move(cfg)), fft_(cfg_.n_k) {
  const int n = cfg_.n_k;
  if (n < 8) throw Error("ModalSolver: k-grid too small");
  if (cfg_.bands.empty()) throw Error("ModalSolver: no bands");
  if (cfg_.n1 != 0 && cfg_.n1 != 1) throw Error("ModalSolver: N1 must be 0 or 1");
  const SeparableSusceptibility* sep = model.overlap().separable();
  if (!sep) throw Error("ModalSolver: the reference solver needs a separable susceptibility");
  for (int b : cfg_.bands)
    if (b < 1 || b > model.n_bands()) throw Error("ModalSolver: band " + std::to_string(b) + " not in the model");
  k_ = modal_k_grid(n);
  neg_.resize(n);
  for (int i = 0; i < n; ++i) neg_[i] = (n - i) % n;
  window_.assign(n, 0.0);
  if (cfg_.kernel == KernelMode::fm_only) {
    if (cfg_.window_centers.empty()) throw Error("ModalSolver: FM-only kernel needs window centres");
    for (int i = 0; i < n; ++i)
      for (double c : cfg_.window_centers)
        {
          const double e = wrap_zone(k_[i] - c);
          const double w = cfg_.hard_window ? (std::abs(e) < cfg_.pi0 ? 1.0 : 0.0) : cutoff(e, cfg_.pi0);
          window_[i] = std::max(window_[i], w);
        }
  } else {
    window_.assign(n, 1.0);
  }
  for (int b : cfg_.bands) {
    BandData d;
    d.band = b;
    d.omega.resize(n);
    d.end.resize(n);
    d.op.resize(n);
    d.om.resize(n);
    d.op1.resize(n);
    d.om1.resize(n);
    for (int i = 0; i < n; ++i) {
      d.omega[i] = model.omega(b, k_[i]);
      wmax_ = std::max(wmax_, std::abs(d.omega[i]));
      // factor (2pi)^2 of the modal measure folded into the end factor
      d.end[i] = kTwoPi * kTwoPi * sep->end_factor(1, b, k_[i]);
      d.op[i] = sep->origin_factor(1, b, k_[i], 0);
      d.om[i] = sep->origin_factor(-1, b, k_[i], 0);
      d.op1[i] = sep->origin_factor(1, b, k_[i], 1);
      d.om1[i] = sep->origin_factor(-1, b, k_[i], 1);
    }
    bd_.push_back(std::move(d));
  }
  q5_ = quintic_coefficient(model, 1);
  a_.resize(n);
  b_.resize(n);
  s_.resize(n);
  s1_.resize(n);
  a1_.resize(n);
  b1_.resize(n);
  buf_.resize(n);
}

int ModalSolver::nearest_index(double k) const {
  const int n = cfg_.n_k;
  long i = std::lround(wrap_zone(k) / (kTwoPi / n));
  return static_cast<int>(((i % n) + n) % n);
}

ModalFields ModalSolver::zeros() const { return ModalFields(bd_.size(), cvec(cfg_.n_k, 0.0)); }

void ModalSolver::lab(const ModalFields& u, double t, ModalFields& up, ModalFields& um) const {
  const int n = cfg_.n_k;
  up.assign(bd_.size(), cvec(n));
  um.assign(bd_.size(), cvec(n));
  for (size_t b = 0; b < bd_.size(); ++b) {
    for (int i = 0; i < n; ++i) up[b][i] = u[b][i] * std::exp(-kI * (bd_[b].omega[i] * t));
    for (int i = 0; i < n; ++i) um[b][i] = std::conj(up[b][neg_[i]]);
  }
}

void ModalSolver::nl_terms(const ModalFields& u, double t, const ModalFields* d,
                           ModalFields& out0, ModalFields* out1) {
  const int n = cfg_.n_k;
  ModalFields up, um, dp, dm;
  lab(u, t, up, um);
  if (d) lab(*d, t, dp, dm);
  const double conv = kTwoPi * kTwoPi;  // (2pi)^2 fft(prod ifft)
  out0.assign(bd_.size(), cvec(n, 0.0));
  if (out1) out1->assign(bd_.size(), cvec(n, 0.0));
  if (cfg_.kernel == KernelMode::fm_only) {
    const BandData& B = bd_[0];
    for (int i = 0; i < n; ++i) {
      buf_[i] = B.op[i] * up[0][i];
      s_[i] = B.om[i] * um[0][i];
    }
    fft_.inverse(buf_.data(), a_.data());
    fft_.inverse(s_.data(), b_.data());
    for (int i = 0; i < n; ++i) buf_[i] = a_[i] * a_[i] * b_[i];
    fft_.forward(buf_.data(), s_.data());
    for (int i = 0; i < n; ++i)
      out0[0][i] = 3.0 * conv * B.end[i] * s_[i] * std::exp(kI * (B.omega[i] * t)) * window_[i];
    if (out1) {
      for (int i = 0; i < n; ++i) {
        buf_[i] = B.op1[i] * dp[0][i];
        s_[i] = B.om1[i] * dm[0][i];
      }
      fft_.inverse(buf_.data(), a1_.data());
      fft_.inverse(s_.data(), b1_.data());
      for (int i = 0; i < n; ++i) buf_[i] = 2.0 * a1_[i] * a_[i] * b_[i] + a_[i] * a_[i] * b1_[i];
      fft_.forward(buf_.data(), s_.data());
      for (int i = 0; i < n; ++i)
        (*out1)[0][i] = 3.0 * conv * B.end[i] * s_[i] * std::exp(kI * (B.omega[i] * t)) * window_[i];
    }
    return;
  }
  // full separable kernel: sum over all origin signs and bands
  std::fill(buf_.begin(), buf_.end(), cplx(0.0));
  for (size_t b = 0; b < bd_.size(); ++b)
    for (int i = 0; i < n; ++i) buf_[i] += bd_[b].op[i] * up[b][i] + bd_[b].om[i] * um[b][i];
  fft_.inverse(buf_.data(), s_.data());
  if (out1) {
    std::fill(buf_.begin(), buf_.end(), cplx(0.0));
    for (size_t b = 0; b < bd_.size(); ++b)
      for (int i = 0; i < n; ++i) buf_[i] += bd_[b].op1[i] * dp[b][i] + bd_[b].om1[i] * dm[b][i];
    fft_.inverse(buf_.data(), s1_.data());
  }
  for (int i = 0; i < n; ++i) buf_[i] = s_[i] * s_[i] * s_[i];
  fft_.forward(buf_.data(), a_.data());
  if (out1) {
    for (int i = 0; i < n; ++i) buf_[i] = 3.0 * s1_[i] * s_[i] * s_[i];
    fft_.forward(buf_.data(), b_.data());
  }
  for (size_t b = 0; b < bd_.size(); ++b)
    for (int i = 0; i < n; ++i) {
      const cplx f = conv * bd_[b].end[i] * std::exp(kI * (bd_[b].omega[i] * t));
      out0[b][i] = f * a_[i];
      if (out1) (*out1)[b][i] = f * b_[i];
    }
}

void ModalSolver::nl0(const ModalFields& u, double t, ModalFields& out) {
  nl_terms(u, t, nullptr, out, nullptr);
}

void ModalSolver::forcing(const ModalFields& u, double t, const ModalFields* j, ModalFields& out) {
  const int n = cfg_.n_k;
  const double alpha = cfg_.alpha;
  ModalFields n0;
  nl_terms(u, t, nullptr, n0, nullptr);
  out.assign(bd_.size(), cvec(n, 0.0));
  for (size_t b = 0; b < bd_.size(); ++b)
    for (int i = 0; i < n; ++i) out[b][i] = alpha * n0[b][i];
  if (cfg_.n1 == 1) {
    ModalFields d = out;
    if (j)
      for (size_t b = 0; b < bd_.size(); ++b)
        for (int i = 0; i < n; ++i) d[b][i] -= (*j)[b][i];
    ModalFields unused, n1;
    nl_terms(u, t, &d, unused, &n1);
    for (size_t b = 0; b < bd_.size(); ++b)
      for (int i = 0; i < n; ++i) out[b][i] += alpha * n1[b][i];
  }
  if (cfg_.quintic && q5_ != 0.0) {
    ModalFields up, um;
    lab(u, t, up, um);
    fft_.inverse(up[0].data(), a_.data());
    fft_.inverse(um[0].data(), b_.data());
    for (int i = 0; i < n; ++i) buf_[i] = a_[i] * a_[i] * a_[i] * b_[i] * b_[i];
    fft_.forward(buf_.data(), s_.data());
    const double ap = alpha_pi(alpha);
    const double conv5 = std::pow(kTwoPi, 4);
    const BandData& B = bd_[0];
    for (int i = 0; i < n; ++i)
      out[0][i] += ap * ap * q5_ * conv5 * s_[i] * std::exp(kI * (B.omega[i] * t)) * window_[i];
  }
}

ModalField ModalSolver::integrate(const Current& jfun, double dtau, double tau_end,
                                  const Observer& obs) {
  const double r = tau_end / dtau;
  const long steps = std::lround(r);
  if (!(dtau > 0.0) || std::abs(r - steps) > 1e-6 * std::max(1.0, r))
    throw Error("ModalSolver::integrate: tau_end must be a positive multiple of dtau");
  const int n = cfg_.n_k;
  const size_t nb = bd_.size();
  const double rho = cfg_.rho;
  ModalField f;
  f.k = k_;
  f.bands = cfg_.bands;
  f.u = zeros();
  ModalFields j = zeros(), k1, k2, k3, k4, tmp = zeros();
  auto rhs = [&](const ModalFields& u, long half, ModalFields& out) {
    const double tau = half * 0.5 * dtau;
    for (auto& v : j) std::fill(v.begin(), v.end(), cplx(0.0));
    if (jfun) jfun(tau, half, j);
    forcing(u, tau / rho, &j, out);
    for (size_t b = 0; b < nb; ++b)
      for (int i = 0; i < n; ++i) out[b][i] = (out[b][i] - j[b][i]) / rho;
  };
  auto combo = [&](const ModalFields& u, double a, const ModalFields& k, ModalFields& out) {
    for (size_t b = 0; b < nb; ++b)
      for (int i = 0; i < n; ++i) out[b][i] = u[b][i] + a * k[b][i];
  };
  if (obs) obs(f, 0);
  for (long s = 0; s < steps; ++s) {
    rhs(f.u, 2 * s, k1);
    combo(f.u, 0.5 * dtau, k1, tmp);
    rhs(tmp, 2 * s + 1, k2);
    combo(f.u, 0.5 * dtau, k2, tmp);
    rhs(tmp, 2 * s + 1, k3);
    combo(f.u, dtau, k3, tmp);
    rhs(tmp, 2 * s + 2, k4);
    for (size_t b = 0; b < nb; ++b)
      for (int i = 0; i < n; ++i) {
        f.u[b][i] += dtau / 6.0 * (k1[b][i] + 2.0 * k2[b][i] + 2.0 * k3[b][i] + k4[b][i]);
        if (!std::isfinite(f.u[b][i].real()) || !std::isfinite(f.u[b][i].imag()))
          throw Error("ModalSolver::integrate: non-finite amplitude");
      }
    f.tau = (s + 1) * dtau;
    if (obs) obs(f, s + 1);
  }
  return f;
}

ModalFields ModalSolver::fnlr(const ModalFields& v, const EnvelopeSpec& env, double tau,
                              double panels_per_period) {
  const int n = cfg_.n_k;
  const size_t nb = bd_.size();
  const double rho = cfg_.rho;
  const double period = kTwoPi * rho / std::max(4.0 * wmax_, 1e-12);
  const double width_max = period / panels_per_period;
  ModalFields acc = zeros(), nl;
  const auto& x = gl10_nodes();
  const auto& w = gl10_weights();
  auto segment = [&](double a, double b) {
    if (b <= a) return;
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / width_max)));
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double c = a + (p + 0.5) * h;
      for (int q = 0; q < 10; ++q) {
        const double t1 = c + 0.5 * h * x[q];
        const double ps = env.psi(t1);
        if (ps == 0.0) continue;
        nl_terms(v, t1 / rho, nullptr, nl, nullptr);
        const double wt = 0.5 * h * w[q] * ps * ps * ps;
        for (size_t bnd = 0; bnd < nb; ++bnd)
          for (int i = 0; i < n; ++i) acc[bnd][i] += wt * nl[bnd][i];
      }
    }
  };
  segment(0.0, std::min(tau, env.tau0));
  segment(env.tau0, tau);
  const double f = cfg_.alpha / rho;
  for (auto& a : acc)
    for (auto& z : a) z *= f;
  return acc;
}

cvec envelope_to_modal(const EnvelopeState& s, const EnlsCoefficients& c, const RectifyMap& rect,
                       int nu, const rvec& k_grid, double pi0, bool hard_window) {
  const rvec x = s.grid.x();
  const double dx = s.grid.dx();
  const int N = s.grid.N;
  cvec out(k_grid.size(), 0.0);
  for (size_t i = 0; i < k_grid.size(); ++i) {
    const double eta = wrap_zone(k_grid[i] - c.k_star);
    if (std::abs(eta) >= pi0) continue;
    const double w = hard_window ? 1.0 : cutoff(eta, pi0);
    if (w == 0.0) continue;
    const double xi = rect.inverse(eta);
    // Zhat by direct summation with a phase recurrence
    const cplx step = std::exp(-kI * (xi * dx));
    cplx ph = std::exp(-kI * (xi * x[0]));
    cplx acc = 0.0;
    for (int j = 0; j < N; ++j) {
      acc += s.z_plus[j] * ph;
      ph *= step;
    }
    const cplx zhat = dx / kTwoPi * acc;
    out[i] = w * std::exp(kI * (c.symbol(1, xi, s.frame, nu) * s.t)) * zhat;
  }
  return out;
}

ApproxSolution assemble_uz(const EnvelopeState& s, const EnlsCoefficients& c,
                           const RectifyMap& rect, int nu, const rvec& k_grid, double pi0,
                           const std::map<int, cvec>& indirect) {
  ApproxSolution a;
  a.k = k_grid;
  a.n0 = c.n0;
  a.direct = envelope_to_modal(s, c, rect, nu, k_grid, pi0);
  for (const auto& [band, v] : indirect) {
    if (v.size() != k_grid.size()) throw Error("assemble_uz: indirect data on a different grid");
    a.indirect[band] = v;
  }
  return a;
}

ErrorNorms error_norm(const ModalField& ref, const ApproxSolution& approx, const rvec& window) {
  if (ref.k.size() != approx.k.size() || window.size() != ref.k.size())
    throw Error("error_norm: incompatible grids");
  ErrorNorms e;
  const size_t n = ref.k.size();
  int b0 = -1;
  for (size_t b = 0; b < ref.bands.size(); ++b)
    if (ref.bands[b] == approx.n0) b0 = static_cast<int>(b);
  if (b0 < 0) throw Error("error_norm: reference lacks the direct band");
  double d2 = 0.0, r2 = 0.0, i2 = 0.0, t2 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const cplx diff = ref.u[b0][i] - approx.direct[i];
    if (window[i] > 0.0) {
      d2 += std::norm(diff);
      r2 += std::norm(ref.u[b0][i]);
    } else {
      i2 += std::norm(diff);
    }
    t2 += std::norm(diff);
  }
  for (size_t b = 0; b < ref.bands.size(); ++b) {
    if (static_cast<int>(b) == b0) continue;
    auto it = approx.indirect.find(ref.bands[b]);
    for (size_t i = 0; i < n; ++i) {
      const cplx diff = ref.u[b][i] - (it == approx.indirect.end() ? cplx(0.0) : it->second[i]);
      i2 += std::norm(diff);
      t2 += std::norm(diff);
    }
  }
  e.reference_norm = std::sqrt(r2);
  const double den = e.reference_norm > 0.0 ? e.reference_norm : 1.0;
  e.direct = std::sqrt(d2) / den;
  e.indirect = std::sqrt(i2) / den;
  e.total = std::sqrt(t2) / den;
  return e;
}

std::vector<SpaceSample> reconstruct_space(const EnvelopeState& s, double k_star,
                                           const ModeFunction& mode, int sigma_g,
                                           const rvec& r_grid) {
  if (sigma_g < 0 || sigma_g > 2) throw Error("reconstruct_space: sigma_g must be 0, 1 or 2");
  const int N = s.grid.N;
  const rvec xi = s.grid.xi();
  const double x0 = s.grid.x()[0];
  Fft fft(N);
  const cvec zf = fft.forward(s.z_plus);
  const double h = 1e-3;
  std::vector<SpaceSample> out;
  for (double r : r_grid) {
    // Z and its r-derivatives by trigonometric interpolation
    cplx d[3] = {0.0, 0.0, 0.0};
    for (int j = 0; j < N; ++j) {
      const cplx e = zf[j] * std::exp(kI * (xi[j] * (r - x0))) / double(N);
      d[0] += e;
      d[1] += kI * xi[j] * e;
      d[2] += -xi[j] * xi[j] * e;
    }
    cplx g[3] = {mode(r, k_star), 0.0, 0.0};
    if (sigma_g >= 1) g[1] = (mode(r, k_star + h) - mode(r, k_star - h)) / (2.0 * h);
    if (sigma_g >= 2) g[2] = (mode(r, k_star + h) - 2.0 * g[0] + mode(r, k_star - h)) / (h * h);
    cplx v = g[0] * d[0];
    if (sigma_g >= 1) v += g[1] * (-kI) * d[1];
    if (sigma_g >= 2) v += 0.5 * g[2] * (-1.0) * d[2];
    v *= std::exp(kI * (k_star * r));
    SpaceSample smp;
    smp.r = r;
    smp.value = v + std::conj(v);
    smp.contained = std::abs(r) <= 0.5 * s.grid.L;
    out.push_back(smp);
  }
  return out;
}

void write_modal_csv(const ModalField& f, std::ostream& os) {
  os << "k,band,re,im\n" << std::setprecision(17);
  for (size_t b = 0; b < f.bands.size(); ++b)
    for (size_t i = 0; i < f.k.size(); ++i)
      os << f.k[i] << ',' << f.bands[b] << ',' << f.u[b][i].real() << ',' << f.u[b][i].imag() << '\n';
}

}  // namespace nlsr
