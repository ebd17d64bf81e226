// Envelope-level experiments: soliton balance, solver soundness, bidirectional
// coupling and lattice agreement.

#include <algorithm>
#include <cmath>
#include <sstream>

#include "exp_common.hpp"
#include "nlsregime/enls.hpp"
#include "nlsregime/lattice.hpp"
#include "nlsregime/rectify.hpp"

namespace nlsr {

using detail::add_slope;
using detail::integer;
using detail::num;
using detail::numbers;
using detail::say;

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

int next_pow2(double n) { return 1 << std::max(4, static_cast<int>(std::ceil(std::log2(std::max(n, 1.0))))); }

struct SolitonSetup {
  EnlsCoefficients c;
  double beta = 0.0, rho = 0.0, b = 0.0, amp = 0.0, kappa = 0.0, gamma2 = 0.0;
  Grid grid;
};

// Classical scaling alpha = rho = beta^2 and a sech of inverse width b = width_factor * beta.
// Needs i alpha_pi Q real; kappa = Im(alpha_pi Q) must share the sign of gamma2.
SolitonSetup soliton_setup(const nlohmann::json& p) {
  SolitonSetup s;
  const DispersionModel model = detail::model_at(p);
  const int n0 = integer(p, "n0");
  s.beta = num(p, "beta");
  s.rho = s.beta * s.beta;
  const TaylorJet jet = jet_at(model, n0, num(p, "k_star"), 4);
  s.c = extract_coeffs(model, jet, 2, s.beta * s.beta);
  const cplx aq = s.c.alpha_pi * s.c.plus.sjet.Q;
  if (std::abs(aq.real()) > 1e-12 * std::abs(aq))
    throw Error("soliton: alpha_pi Q must be purely imaginary (i alpha_pi Q real); got " + fmt(aq.real()) +
                " + " + fmt(aq.imag()) + "i");
  s.kappa = aq.imag();
  s.gamma2 = s.c.gamma[2];
  if (!(s.kappa * s.gamma2 > 0.0))
    throw Error("soliton: defocusing configuration (gamma2 = " + fmt(s.gamma2) + ", kappa = " + fmt(s.kappa) +
                "); bright solitons need gamma2 * kappa > 0");
  s.b = num(p, "width_factor") * s.beta;
  s.amp = std::sqrt(2.0 * s.gamma2 * s.b * s.b / s.kappa);
  s.grid.L = num(p, "L_over_width") / s.b;
  s.grid.N = next_pow2(integer(p, "points_per_width") * num(p, "L_over_width"));
  return s;
}

double peak(const EnvelopeState& z) { return max_abs(z.z_plus); }

double l2_sq(const EnvelopeState& z) {
  double s = 0.0;
  for (const cplx& v : z.z_plus) s += std::norm(v);
  return s * z.grid.dx();
}

EnlsCoefficients linear_copy(EnlsCoefficients c) {
  c.alpha = 0.0;
  c.alpha_pi = 0.0;
  return c;
}

}  // namespace

ScalingReport run_soliton_balance(const ExperimentConfig& cfg, const RunOptions& opt) {
  ScalingReport r;
  r.experiment = "soliton";
  r.config = cfg.params;
  const auto& p = cfg.params;
  const SolitonSetup s = soliton_setup(p);
  const double tau_end = num(p, "tau_end");
  const double dtau = num(p, "dtau");
  const long every = std::max(1L, std::lround(num(p, "trace_every") / dtau));
  const double bb = s.b / s.beta, A = s.amp;
  const EnvelopeState z0 = make_state(s.grid, [&](double y) { return cplx(A / std::cosh(bb * y)); }, s.beta);

  EnlsRunSpec spec;
  spec.order = {2, 0, false};
  spec.dt = dtau / s.rho;
  spec.t_end = tau_end / s.rho;
  spec.observe_every = every;
  Table t;
  t.name = "soliton";
  t.header = {"tau", "peak_nonlinear", "peak_linear"};
  std::vector<double> taus, pn, pl;
  spec.observer = [&](const EnvelopeState& z, long) {
    taus.push_back(z.t * s.rho);
    pn.push_back(peak(z) / A);
  };
  integrate_enls(s.c, z0, spec);
  spec.observer = [&](const EnvelopeState& z, long) { pl.push_back(peak(z) / A); };
  integrate_enls(linear_copy(s.c), z0, spec);
  for (size_t i = 0; i < taus.size(); ++i) t.rows.push_back({taus[i], pn[i], pl[i]});
  r.tables.push_back(t);

  double dev = 0.0;
  for (double v : pn) dev = std::max(dev, std::abs(v - 1.0));
  Verdict vn{"nonlinear_peak_flat", dev <= num(p, "nonlinear_tol"),
             "max |peak/A - 1| = " + fmt(dev) + " (tol " + fmt(num(p, "nonlinear_tol")) + ")"};
  const double decay = 1.0 - pl.back();
  Verdict vl{"linear_peak_decays", decay >= num(p, "linear_decay_min"),
             "linear decay " + fmt(decay) + " (min " + fmt(num(p, "linear_decay_min")) + ")"};
  r.verdicts = {vn, vl};
  r.extra["amplitude"] = A;
  r.extra["inverse_width"] = s.b;
  r.extra["kappa"] = s.kappa;
  r.extra["gamma2"] = s.gamma2;
  say(opt, "soliton " + vn.detail + "; " + vl.detail);
  return r;
}

ScalingReport run_enls_soundness(const ExperimentConfig& cfg, const RunOptions& opt) {
  ScalingReport r;
  r.experiment = "soundness";
  r.config = cfg.params;
  const auto& p = cfg.params;
  const SolitonSetup s = soliton_setup(p);
  const double dtau = num(p, "dtau");
  const double bb = s.b / s.beta, A = s.amp;
  Table t;
  t.name = "soundness";
  t.header = {"check", "value", "tolerance"};

  // exact soliton over tau in [0, 1]; the L2 norm is tracked on the same run
  const EnvelopeState sol = make_state(s.grid, [&](double y) { return cplx(A / std::cosh(bb * y)); }, s.beta);
  EnlsRunSpec spec;
  spec.order = {2, 0, false};
  spec.dt = dtau / s.rho;
  spec.t_end = 1.0 / s.rho;
  const double n0 = l2_sq(sol);
  double drift = 0.0, pk = 0.0;
  spec.observer = [&](const EnvelopeState& z, long) {
    drift = std::max(drift, std::abs(l2_sq(z) - n0) / n0);
    pk = std::max(pk, std::abs(peak(z) / A - 1.0));
  };
  integrate_enls(s.c, sol, spec);
  t.rows.push_back({0, drift, num(p, "norm_tol")});
  t.rows.push_back({1, pk, num(p, "soliton_tol")});
  r.verdicts.push_back({"l2_conservation", drift <= num(p, "norm_tol"), "relative drift " + fmt(drift)});
  r.verdicts.push_back({"soliton_peak", pk <= num(p, "soliton_tol"), "max |peak/A - 1| = " + fmt(pk)});

  // linear Gaussian exp(-(b x)^2 / 2): peak (1 + (2 gamma2 b^2 t)^2)^(-1/4), 2^(-1/4) at 2 gamma2 b^2 t = 1
  const EnvelopeState gau = make_state(s.grid, [&](double y) { return cplx(std::exp(-0.5 * bb * bb * y * y)); }, s.beta);
  const double t_match = 1.0 / (2.0 * s.gamma2 * s.b * s.b);
  EnlsRunSpec lin;
  lin.order = {2, 0, false};
  lin.t_end = t_match;
  lin.dt = t_match / std::ceil(t_match / spec.dt);
  const double decay = peak(integrate_enls(linear_copy(s.c), gau, lin));
  const double expect = std::pow(2.0, -0.25);
  const double rel = std::abs(decay - expect) / expect;
  t.rows.push_back({2, decay, num(p, "decay_rel_tol")});
  r.verdicts.push_back({"linear_decay", rel <= num(p, "decay_rel_tol"),
                        "peak " + fmt(decay) + " vs 2^(-1/4) at tau = " + fmt(t_match * s.rho)});

  // source form: V from the current-driven equation equals Z once the ramp is over
  const EnvelopeSpec env{num(p, "source_tau0")};
  EnlsRunSpec src;
  src.order = {2, 0, false};
  src.stepper = Stepper::ifrk4;
  src.dt = num(p, "source_dtau") / s.rho;
  src.t_end = num(p, "source_tau_end") / s.rho;
  const SourceFormResult sf = to_source_form(s.c, sol, env, s.rho, src);
  t.rows.push_back({3, sf.max_diff_after_ramp, num(p, "source_tol")});
  r.verdicts.push_back({"source_form", sf.max_diff_after_ramp <= num(p, "source_tol"),
                        "max |V - Z| after the ramp " + fmt(sf.max_diff_after_ramp)});
  r.tables.push_back(t);
  for (const auto& v : r.verdicts) say(opt, "soundness " + v.name + ": " + v.detail);
  return r;
}

// Forward doublet at k*, backward at -k*, both in the rotating lab-space frame.
ScalingReport run_bidirectional(const ExperimentConfig& cfg, const RunOptions& opt) {
  ScalingReport r;
  r.experiment = "bidirectional";
  r.config = cfg.params;
  const auto& p = cfg.params;
  const DispersionModel model = detail::model_at(p);
  const int n0 = integer(p, "n0");
  const double ks = num(p, "k_star");
  const double beta = num(p, "beta");
  const double tau_end = num(p, "tau_end");
  const double dt = num(p, "dt");
  const TaylorJet jf = jet_at(model, n0, ks, 4), jb = jet_at(model, n0, -ks, 4);
  const rvec rhos = numbers(p, "rho_sweep");

  auto setup = [&](double rho, EnlsCoefficients& cf, EnlsCoefficients& cb, EnvelopeState& zf,
                   EnvelopeState& zb, EnlsRunSpec& spec) {
    const double alpha = rho;
    cf = extract_coeffs(model, jf, 2, alpha);
    cb = extract_coeffs(model, jb, 2, alpha);
    spec.order = {2, 0, false};
    spec.t_end = tau_end / rho;
    spec.dt = spec.t_end / std::ceil(spec.t_end / dt);
    spec.stepper = Stepper::ifrk4;
    Grid g;
    g.L = 2.0 * std::abs(cf.gamma[1]) * spec.t_end + num(p, "margin_over_beta") / beta;
    g.N = next_pow2(g.L * beta * integer(p, "points_per_width"));
    auto h = [](double y) { return cplx(std::exp(-0.5 * y * y)); };
    zf = make_state(g, h, beta, Frame::rotating);
    zb = make_state(g, h, beta, Frame::rotating);
  };

  Table t;
  t.name = "bidirectional";
  t.header = {"rho", "alpha", "cross_forward_over_alpha", "cross_backward_over_alpha", "n_x"};
  t.rows.resize(rhos.size());
  try {
    parallel_for(static_cast<int>(rhos.size()), opt.jobs, [&](int i) {
      const double rho = rhos[i];
      EnlsCoefficients cf, cb;
      EnvelopeState zf, zb;
      EnlsRunSpec spec;
      setup(rho, cf, cb, zf, zb, spec);
      const BidirectionalResult br = integrate_bidirectional(cf, cb, zf, zb, spec, true);
      // slow-time integral rho * int dt, normalized by the nonlinearity strength alpha
      const double alpha = rho;
      t.rows[i] = {rho, alpha, rho * br.cross_integral_forward / alpha, rho * br.cross_integral_backward / alpha,
                   double(zf.grid.N)};
      say(opt, "bidirectional rho=" + fmt(rho) + " cross/alpha=" + fmt(t.rows[i][2]));
    });
  } catch (const std::exception& e) {
    r.partial = true;
    r.error = e.what();
  }
  r.tables.push_back(t);
  add_slope(r, "bidirectional", "rho", "cross_forward_over_alpha", "equal", 1.0, num(p, "slope_tol"));
  add_slope(r, "bidirectional", "rho", "cross_backward_over_alpha", "equal", 1.0, num(p, "slope_tol"));
  r.fit_slopes();

  // delta_x = 0: the coupled integrator must reproduce two independent runs
  {
    const double rho = *std::max_element(rhos.begin(), rhos.end());
    EnlsCoefficients cf, cb;
    EnvelopeState zf, zb;
    EnlsRunSpec spec;
    setup(rho, cf, cb, zf, zb, spec);
    cf.delta_cross_plus = cf.delta_cross_minus = 0.0;
    cb.delta_cross_plus = cb.delta_cross_minus = 0.0;
    const BidirectionalResult br = integrate_bidirectional(cf, cb, zf, zb, spec, true);
    const EnvelopeState sf = integrate_enls(cf, zf, spec), sb = integrate_enls(cb, zb, spec);
    double d = 0.0;
    for (int j = 0; j < zf.grid.N; ++j)
      d = std::max({d, std::abs(br.forward.z_plus[j] - sf.z_plus[j]), std::abs(br.backward.z_plus[j] - sb.z_plus[j])});
    r.verdicts.push_back({"decoupling", d <= num(p, "decouple_tol"), "max deviation from solo runs " + fmt(d)});
    r.extra["decoupling_deviation"] = d;
    say(opt, "bidirectional decoupling " + fmt(d));
  }
  return r;
}

ScalingReport run_lattice(const ExperimentConfig& cfg, const RunOptions& opt) {
  ScalingReport r;
  r.experiment = "lattice";
  r.config = cfg.params;
  const auto& p = cfg.params;
  const DispersionModel model = detail::model_at(p);
  const int n0 = integer(p, "n0");
  const TaylorJet jet = jet_at(model, n0, num(p, "k_star"), 4);
  const rvec betas = numbers(p, "beta_sweep");
  Table t;
  t.name = "lattice";
  t.header = {"beta", "sites", "max_deviation"};
  t.rows.resize(betas.size());
  try {
    parallel_for(static_cast<int>(betas.size()), opt.jobs, [&](int i) {
      const double beta = betas[i];
      const EnlsCoefficients c = extract_coeffs(model, jet, 2, beta * beta);
      LatticeRunSpec spec;
      spec.dt = num(p, "dt");
      spec.t_end = 1.0 / (beta * beta);
      spec.t_end = spec.dt * std::ceil(spec.t_end / spec.dt);
      spec.kind = LatticeSymbolKind::trig2;
      const int M = static_cast<int>(std::ceil(std::abs(c.gamma[1]) * spec.t_end + num(p, "margin_over_beta") / beta));
      auto h = [](double y) { return cplx(std::exp(-0.5 * y * y)); };
      const LatticeComparison cmp =
          compare_lattice_continuum(c, M, h, beta, spec, integer(p, "sample_every"));
      t.rows[i] = {beta, double(2 * M + 1), cmp.max_deviation};
      say(opt, "lattice beta=" + fmt(beta) + " deviation=" + fmt(cmp.max_deviation));
    });
  } catch (const std::exception& e) {
    r.partial = true;
    r.error = e.what();
  }
  r.tables.push_back(t);
  Table d;
  d.name = "symbol_defect";
  d.header = {"xi", "defect"};
  for (double xi : geomspace(num(p, "xi_min"), num(p, "xi_max"), integer(p, "n_xi")))
    d.rows.push_back({xi, std::abs(lattice_symbol(jet, xi, LatticeSymbolKind::trig2) - gamma_poly(jet, 2, xi))});
  r.tables.push_back(d);
  add_slope(r, "lattice", "beta", "max_deviation", "at_least", num(p, "slope_min"), 0.0);
  add_slope(r, "symbol_defect", "xi", "defect", "equal", num(p, "defect_target"), num(p, "defect_tol"));
  r.fit_slopes();
  return r;
}

}  // namespace nlsr
