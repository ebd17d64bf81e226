#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "nlsregime/excitation.hpp"
#include "nlsregime/susceptibility.hpp"

namespace nlsr {

enum class QuadClass { FM, nonFM_opposite, nonFM_third_harmonic, GVM_violating, inadmissible };
std::string to_string(QuadClass c);

struct Quadruplet {
  ModeIndex end;
  Origins origins;
};

// phi = s omega_n(k) - sum_i s_i omega_{n_i}(k_i)
double phase_value(const DispersionModel& model, const Quadruplet& quad);

struct Classification {
  QuadClass cls = QuadClass::inadmissible;
  double pm_residual = 0.0;  // |k - k' - k'' - k'''| mod 2 pi
  double phi = 0.0;
  double gvm_margin = 0.0;  // max_{i,j} |s_i omega'(k_i) - s_j omega'(k_j)| over origins
};

Classification classify_quadruplet(const DispersionModel& model, double k_star, int n0,
                                   const Quadruplet& quad, double tol = 1e-8);

// Scaled FM phase on the rectified variables, s = sign:
//   s [g(s b q) - g(s b q') - g(s b q'') + g(-s b q''')] / b^2,  q''' = q - q' - q''
// with g = gamma_(nu), or the exact band when nu == 0.
double scaled_fm_phase(const DispersionModel& model, const TaylorJet& jet, int nu, int sign,
                       double beta, double q, double q1, double q2);

struct CriticalPoint {
  std::array<double, 4> q_flat{};  // (q, q, q, -q)
  double grad_residual = 0.0;
  Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
  double det = 0.0;
};

// Gradient and Hessian of the polynomial scaled phase in (q', q'').
Eigen::Vector2d scaled_phase_gradient(const TaylorJet& jet, int nu, int sign, double beta,
                                      double q, double q1, double q2);
Eigen::Matrix2d scaled_phase_hessian(const TaylorJet& jet, int nu, int sign, double beta,
                                     double q, double q1, double q2);

// Throws when the gradient at (q, q) exceeds grad_tol.
CriticalPoint critical_point(const TaylorJet& jet, int nu, int sign, double beta, double q,
                             double grad_tol = 1e-9);

// Newton on the gradient system from an arbitrary start; returns (q', q'').
Eigen::Vector2d find_critical(const TaylorJet& jet, int nu, int sign, double beta, double q,
                              Eigen::Vector2d start, int max_iter = 50);

using Phase2 = std::function<double(double, double)>;
using Amp2 = std::function<cplx(double, double)>;

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-300;
  double amp_cut = 1e-14;  // truncate where |A| < amp_cut * |A(center)|
  double max_radius = 60.0;
  double center1 = 0.0;  // grading centre, normally the critical point
  double center2 = 0.0;
  double time_rel_tol = 1e-8;
};

struct QuadValue {
  cplx value{0.0, 0.0};
  double tail_bound = 0.0;
  double radius = 0.0;
  long evaluations = 0;
};

// int int e^{i phase / theta} A dq' dq''
QuadValue oscillatory_2d(const Phase2& phase, const Amp2& amp, double theta,
                         const QuadOptions& opt = {});

// (1/rho) int_0^tau psi^3(tau1) int int e^{i phase tau1 / theta} A dq' dq'' dtau1 at every
// tau in tau_grid (ascending).
std::vector<QuadValue> quad_oracle(const Phase2& phase, const Amp2& amp, double theta, double rho,
                                   const EnvelopeSpec& env, const rvec& tau_grid,
                                   const QuadOptions& opt = {});

// Taylor data of P(s', s'', s''') = Q(s, k* s + sum s_i; (s, s k* + s'), (s, s k* + s''),
// (-s, -s k* + s''')) at 0 by central differences of step h.
struct SusceptibilityJet {
  int sign = 1;
  cplx Q{0.0, 0.0};
  std::array<cplx, 3> a{};
  std::array<std::array<cplx, 3>, 3> H{};
  cplx eval(int sigma, double s1, double s2, double s3) const;  // p^[sigma]
};

SusceptibilityJet susceptibility_jet(const DispersionModel& model, int n0, double k_star,
                                     int sign, double h = 1e-3);
cplx susceptibility_at(const DispersionModel& model, int n0, double k_star, int sign, double s1,
                       double s2, double s3);

// Convolution-form FM integrand at fixed output coordinate q.
//   nu = 0     exact band phase, otherwise gamma_(nu)
//   sigma < 0  exact susceptibility, otherwise the polynomial p^[sigma]
struct FmIntegrand {
  Phase2 phase;
  Amp2 amp;
};

FmIntegrand fm_integrand(const DispersionModel& model, const TaylorJet& jet, int nu,
                         const DoubletExcitation& exc, int sign, double q, int sigma,
                         const SusceptibilityJet* sjet = nullptr);

// I^(sigma) at the given taus with theta = rho / beta^2.
std::vector<QuadValue> rectified_integral(const DispersionModel& model, const TaylorJet& jet,
                                          int nu, const DoubletExcitation& exc, int sigma,
                                          int sign, double q, const rvec& tau_grid,
                                          const QuadOptions& opt = {});

struct WeakDispersionValue {
  std::vector<QuadValue> values;
  double phase_budget = 0.0;      // beta^{nu+1} / rho
  double amplitude_budget = 0.0;  // beta^{sigma+1}
};

WeakDispersionValue weak_dispersion_expand(const DispersionModel& model, const TaylorJet& jet,
                                           int nu, const DoubletExcitation& exc, int sigma,
                                           int sign, double q, const rvec& tau_grid,
                                           double theta0 = 1.0, const QuadOptions& opt = {});

// Stationary phase data at a nondegenerate critical point (d = 1, two variables).
struct SphmInput {
  Eigen::Matrix2d hessian;
  double phase0 = 0.0;
  // d^{p1+p2} A / dq'^p1 dq''^p2 at the critical point
  std::function<cplx(int, int)> derivs;
  int smoothness = 8;  // highest mixed order available
};

struct SphmResult {
  cplx value{0.0, 0.0};
  std::vector<cplx> terms;  // theta^m b_m times the common prefactor
  std::vector<cplx> b;      // b_m
  cplx prefactor{0.0, 0.0};
};

// b_m = [(i/2) <H^{-1} d, d>]^m / m! A, exact for quadratic phases. For m > 2 with a
// non-quadratic phase this omits the Morse change-of-variables terms.
cplx sphm_coefficient(const SphmInput& in, int m);

// 2 pi theta / sqrt|det H| e^{i pi sgn(H) / 4} e^{i phase0 / theta} sum_{m<=N3} theta^m b_m
SphmResult sphm_expand(const SphmInput& in, double theta, int n3);

// (1/rho) int psi^3(tau1) S_N3(theta / tau1) dtau1 on [tau_s, tau] with
// tau_s = rho / beta^kappa; the part below tau_s is bounded by |A|-mass * tau_s / rho and
// returned as the second member.
std::pair<cplx, double> sphm_time_integrated(const SphmInput& in, double theta, double rho,
                                             double beta, const EnvelopeSpec& env, double tau,
                                             int n3, double amp_mass, double kappa = 2.5);

// Central-difference mixed derivatives of a callable amplitude at (x1, x2).
std::function<cplx(int, int)> mixed_derivs_fd(const Amp2& amp, double x1, double x2,
                                              double h = 1e-2);
// Derivatives of exp(-q'^2 - q''^2) at the origin.
std::function<cplx(int, int)> gaussian_mixed_derivs();

struct NonFmEstimate {
  cplx K1{0.0, 0.0};
  cplx rhoK2{0.0, 0.0};
  cplx total{0.0, 0.0};
};

// (1/rho) int_0^tau e^{i phi tau1/rho} A(tau1) dtau1 by integration by parts.
// Throws when |phi| < phi_min.
NonFmEstimate nonfm_estimate(double phi, const std::function<cplx(double)>& a,
                             const std::function<cplx(double)>& da, double rho, double tau,
                             double phi_min = 1e-3);
// Same integral by phase-resolving quadrature.
cplx nonfm_direct(double phi, const std::function<cplx(double)>& a, double rho, double tau);

// Model form: A(tau) = psi^3(tau) Q(quad) h(0)^3.
NonFmEstimate nonfm_estimate(const DispersionModel& model, const Quadruplet& quad,
                             const DoubletExcitation& exc, double tau, double phi_min = 1e-3);

// Causal response with kernel R(t1,t2,t3) = R0 prod_j r(t_j), r(t) = e^{-c t} for the
// exponential family or a user function.
struct CausalKernel {
  std::string kind = "exponential";
  double c = 1.0;
  double R0 = 1.0;
  std::function<double(double)> r;  // tabulated / numeric kernel
  double support = 0.0;             // integration cut for numeric kernels
};

struct HarmonicCoefficient {
  Multi3 l{0, 0, 0};
  cplx chi{0.0, 0.0};
};

// chi_l for |l| <= N1: R0 prod_j (-1)^{l_j} / (c - i w_j)^{l_j+1} for the exponential
// family; (1/l!) int (-s)^l r(s) e^{i w s} ds per slot for numeric kernels.
std::vector<HarmonicCoefficient> harmonic_expand(const CausalKernel& k,
                                                 const std::array<double, 3>& omega, int n1);

// Slow-frame causal response prod_j int_0^inf r(s) e^{i w_j s} A_j(tau - rho s) ds times R0.
cplx causal_response(const CausalKernel& k, const std::array<double, 3>& omega,
                     const std::array<std::function<cplx(double)>, 3>& a, double rho, double tau);

// sum_l chi_l prod_j rho^{l_j} A_j^{(l_j)}(tau); derivs[j](m, tau) is the m-th derivative.
cplx harmonic_series(const std::vector<HarmonicCoefficient>& coeffs,
                     const std::array<std::function<cplx(int, double)>, 3>& derivs, double rho,
                     double tau);

}  // namespace nlsr
