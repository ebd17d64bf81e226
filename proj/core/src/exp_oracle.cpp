// Oracle-backed experiments: band tables, rectification, stationary phase and the
// time-harmonic expansion.

#include <cmath>
#include <sstream>

#include "exp_common.hpp"
#include "nlsregime/interaction.hpp"
#include "nlsregime/rectify.hpp"

namespace nlsr {

using detail::add_slope;
using detail::integer;
using detail::num;
using detail::numbers;
using detail::say;

ScalingReport run_bands(const ExperimentConfig& cfg, const RunOptions&) {
  ScalingReport r;
  r.experiment = "bands";
  r.config = cfg.params;
  const auto& p = cfg.params;
  DispersionModel model = detail::model_at(p);
  const int n0 = integer(p, "n0");
  const double ks = num(p, "k_star");
  const int n_k = integer(p, "n_k");
  if (n_k < 2) throw Error("bands: n_k must be at least 2");
  Table t;
  t.name = "bands";
  t.header = {"k"};
  for (int n = 1; n <= model.n_bands(); ++n) t.header.push_back("omega_" + std::to_string(n));
  for (int i = 0; i < n_k; ++i) {
    const double k = -kPi + kTwoPi * i / (n_k - 1);
    rvec row{k};
    for (int n = 1; n <= model.n_bands(); ++n) row.push_back(model.omega(n, k));
    t.rows.push_back(row);
  }
  r.tables.push_back(t);
  const TaylorJet jet = jet_at(model, n0, ks, 4);
  Table j;
  j.name = "jet";
  j.header = {"order", "derivative", "error"};
  for (int m = 0; m <= jet.order; ++m) j.rows.push_back({double(m), jet.derivs[m], jet.errors[m]});
  r.tables.push_back(j);
  const GenericityReport gen = check_generic(model, n0, ks);
  r.extra["genericity"] = gen.to_json();
  r.extra["model"] = model.describe();
  Verdict v;
  v.name = "generic";
  v.pass = gen.generic && jet.valid;
  v.detail = jet.valid ? "" : jet.note;
  r.verdicts.push_back(v);
  return r;
}

ScalingReport run_rectify(const ExperimentConfig& cfg, const RunOptions& opt) {
  ScalingReport r;
  r.experiment = "rectify";
  r.config = cfg.params;
  const auto& p = cfg.params;
  const double xi_max = num(p, "xi_max");
  const double tol = num(p, "residual_tol");
  const rvec etas = geomspace(num(p, "eta_min"), num(p, "eta_max"), integer(p, "n_eta"));
  Table res;
  res.name = "rectify_residual";
  res.header = {"family", "nu", "max_residual", "max_roundtrip"};
  int f_idx = 0;
  for (const auto& fj : detail::at_path(p, "families")) {
    const FamilySpec fam = family_from_json(fj);
    const double ks = fj.at("k_star").get<double>();
    const DispersionModel model = make_synthetic({fam});
    const TaylorJet jet = jet_at(model, 1, ks, 4);
    Table off;
    off.name = "offset_" + std::to_string(f_idx);
    off.header = {"eta"};
    const auto nus = detail::at_path(p, "nu");
    for (const auto& nj : nus) off.header.push_back("offset_nu" + std::to_string(nj.get<int>()));
    for (double e : etas) off.rows.push_back({e});
    for (const auto& nj : nus) {
      const int nu = nj.get<int>();
      const RectifyMap map(model, jet, nu, xi_max);
      const RectifyResidual rr = rectify_residual(map, integer(p, "n_points"));
      res.rows.push_back({double(f_idx), double(nu), rr.max_residual, rr.max_roundtrip});
      for (size_t i = 0; i < etas.size(); ++i)
        off.rows[i].push_back(std::abs(y_inverse_offset(model, jet, nu, etas[i])));
      add_slope(r, off.name, "eta", "offset_nu" + std::to_string(nu), "equal", nu + 1.0,
                num(p, "slope_tol"));
      Verdict v;
      v.name = "residual_" + fam.family + "_nu" + std::to_string(nu);
      v.pass = rr.max_residual <= tol;
      std::ostringstream os;
      os << "max residual " << rr.max_residual << " (tol " << tol << ")";
      v.detail = os.str();
      r.verdicts.push_back(v);
      say(opt, "rectify " + fam.family + " nu=" + std::to_string(nu) + " " + v.detail);
    }
    r.tables.push_back(off);
    ++f_idx;
  }
  r.tables.insert(r.tables.begin(), res);
  r.fit_slopes();
  return r;
}

// Gaussian amplitude against the bilinear phase q' q'' H12: the exact integral is
// pi theta / sqrt(1 + theta^2) for H = [[0,2],[2,0]] and in general a closed Gaussian.
ScalingReport run_sphm(const ExperimentConfig& cfg, const RunOptions& opt) {
  ScalingReport r;
  r.experiment = "sphm";
  r.config = cfg.params;
  const auto& p = cfg.params;
  const auto hj = detail::at_path(p, "hessian");
  Eigen::Matrix2d H;
  H << hj[0][0].get<double>(), hj[0][1].get<double>(), hj[1][0].get<double>(), hj[1][1].get<double>();
  if (H(0, 0) != 0.0 || H(1, 1) != 0.0 || H(0, 1) != H(1, 0) || H(0, 1) == 0.0)
    throw Error("sphm: the benchmark needs a purely bilinear Hessian [[0,h],[h,0]]");
  const double h = H(0, 1);
  // int int e^{i h q1 q2 / theta} e^{-q1^2 - q2^2} = pi / sqrt(1 + h^2 / (4 theta^2))
  auto exact = [h](double theta) { return kPi / std::sqrt(1.0 + h * h / (4.0 * theta * theta)); };
  SphmInput in;
  in.hessian = H;
  in.phase0 = 0.0;
  in.derivs = gaussian_mixed_derivs();
  const rvec thetas = geomspace(num(p, "theta_min"), num(p, "theta_max"), integer(p, "n_theta"));
  const auto n3s = detail::at_path(p, "n3");
  Table t;
  t.name = "sphm";
  t.header = {"theta", "exact"};
  for (const auto& n : n3s) t.header.push_back("rel_error_n3_" + std::to_string(n.get<int>()));
  for (double th : thetas) {
    const double ex = exact(th);
    rvec row{th, ex};
    for (const auto& n : n3s) row.push_back(std::abs(sphm_expand(in, th, n.get<int>()).value - ex) / ex);
    t.rows.push_back(row);
  }
  r.tables.push_back(t);
  for (const auto& n : n3s) {
    const int m = n.get<int>();
    add_slope(r, "sphm", "theta", "rel_error_n3_" + std::to_string(m), "equal", m + 1.0, num(p, "slope_tol"));
  }
  r.fit_slopes();
  const double thc = num(p, "check_theta");
  const double ref = num(p, "check_value");
  const double got = std::abs(sphm_expand(in, thc, 0).value - exact(thc)) / exact(thc);
  Verdict v;
  v.name = "leading_error_at_check_theta";
  v.pass = std::abs(got - ref) <= num(p, "check_rel_tol") * ref;
  std::ostringstream os;
  os << "relative error " << got << " vs " << ref;
  v.detail = os.str();
  r.verdicts.push_back(v);
  r.extra["b"] = nlohmann::json::array();
  const SphmResult s = sphm_expand(in, thc, 2);
  for (const cplx& b : s.b) r.extra["b"].push_back({b.real(), b.imag()});
  say(opt, "sphm " + v.detail);
  return r;
}

ScalingReport run_harmonic(const ExperimentConfig& cfg, const RunOptions& opt) {
  ScalingReport r;
  r.experiment = "harmonic";
  r.config = cfg.params;
  const auto& p = cfg.params;
  CausalKernel k;
  k.kind = detail::at_path(p, "kernel.kind").get<std::string>();
  if (k.kind != "exponential") throw Error("harmonic: only the exponential kernel has a closed oracle");
  k.c = num(p, "kernel.c");
  k.R0 = num(p, "kernel.R0");
  const rvec om = numbers(p, "omega");
  if (om.size() != 3) throw Error("harmonic: omega needs three entries");
  const std::array<double, 3> omega{om[0], om[1], om[2]};
  const double tau = num(p, "tau");
  const double c0 = num(p, "profile_center");
  const double var = num(p, "profile_var");
  // A(tau) = exp(-(tau - c0)^2 / var); m-th derivative through Hermite polynomials
  auto a = [=](double t) -> cplx { return std::exp(-(t - c0) * (t - c0) / var); };
  auto da = [=](int m, double t) -> cplx {
    const double u = (t - c0) / std::sqrt(var);
    return (m % 2 ? -1.0 : 1.0) * std::hermite(m, u) * std::exp(-u * u) / std::pow(var, 0.5 * m);
  };
  const std::array<std::function<cplx(double)>, 3> amps{a, a, a};
  const std::array<std::function<cplx(int, double)>, 3> ders{da, da, da};
  const auto c0s = harmonic_expand(k, omega, 0);
  const auto c1s = harmonic_expand(k, omega, 1);
  const rvec rhos = geomspace(num(p, "rho_min"), num(p, "rho_max"), integer(p, "n_rho"));
  Table t;
  t.name = "harmonic";
  t.header = {"rho", "oracle_abs", "rel_error_n1_0", "rel_error_n1_1"};
  for (double rho : rhos) {
    const cplx ex = causal_response(k, omega, amps, rho, tau);
    const double e0 = std::abs(harmonic_series(c0s, ders, rho, tau) - ex) / std::abs(ex);
    const double e1 = std::abs(harmonic_series(c1s, ders, rho, tau) - ex) / std::abs(ex);
    t.rows.push_back({rho, std::abs(ex), e0, e1});
  }
  r.tables.push_back(t);
  add_slope(r, "harmonic", "rho", "rel_error_n1_0", "equal", 1.0, num(p, "slope_tol_n1_0"));
  add_slope(r, "harmonic", "rho", "rel_error_n1_1", "equal", 2.0, num(p, "slope_tol_n1_1"));
  r.fit_slopes();
  say(opt, "harmonic done");
  return r;
}

}  // namespace nlsr
