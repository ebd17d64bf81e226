#pragma once

#include <array>
#include <functional>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "nlsregime/excitation.hpp"
#include "nlsregime/fft.hpp"
#include "nlsregime/interaction.hpp"

namespace nlsr {

// Spatial frame of an envelope run:
//   lab       symbol s gamma(s xi)
//   rotating  minus the carrier s gamma_0
//   comoving  rotating and moving with the group velocity gamma_1
enum class Frame { lab, rotating, comoving };
std::string to_string(Frame f);
Frame frame_from_string(const std::string& s);

struct Grid {
  double L = 1.0;
  int N = 256;
  double dx() const { return L / N; }
  rvec x() const;   // (j - N/2) dx
  rvec xi() const;  // 2 pi fftfreq(N, dx)
  // L = L_over_beta / beta with at least points_per_width points per envelope width 1/beta
  // and N a power of two.
  static Grid for_envelope(double beta, double L_over_beta = 40.0, int points_per_width = 32);
};

struct EnvelopeState {
  Grid grid;
  cvec z_plus;
  cvec z_minus;
  double t = 0.0;
  Frame frame = Frame::comoving;
};

// Z_plus = h(beta x) sampled on the grid, Z_minus = conj(Z_plus).
EnvelopeState make_state(const Grid& g, const std::function<cplx(double)>& h, double beta,
                         Frame frame = Frame::comoving);

struct SignCoefficients {
  SusceptibilityJet sjet;  // Q, a, H for this sign
  cplx delta1{0.0, 0.0};
  cplx delta2{0.0, 0.0};
  cplx Q5{0.0, 0.0};
  cplx delta5{0.0, 0.0};
};

struct EnlsCoefficients {
  int nu = 2;
  int n0 = 1;
  double k_star = 0.0;
  std::array<double, 5> gamma{};  // omega^{(j)}(k*) / j!
  SignCoefficients plus;
  SignCoefficients minus;
  bool has_q5 = false;
  cplx delta_cross_minus{0.0, 0.0};  // 3 Q(end (+,-k*); (-,-k*), (-,-k*), (+,k*))
  cplx delta_cross_plus{0.0, 0.0};   // 3 Q(end (+,k*); (-,k*), (-,k*), (+,-k*))
  double alpha = 0.0;
  double alpha_pi = 0.0;

  const SignCoefficients& sign(int s) const { return s > 0 ? plus : minus; }
  double gamma_poly(int nu_, double xi) const;
  // Symbol of the linear part for Z_s in the given frame.
  double symbol(int s, double xi, Frame f, int nu_) const;
  // True when i alpha_pi Q and i alpha_pi^2 delta5 are real for both signs.
  bool norm_conserving(double tol = 1e-14) const;
  nlohmann::json to_json() const;
};

// Q5 = 10 (2pi)^-4 (-i s) q5, zero without a fifth-order kernel.
cplx quintic_coefficient(const DispersionModel& model, int sign);

// Q from the model overlap, delta1 = -2 Q_(1,0,0), delta2 = -Q_(0,0,1),
// delta5 = -delta2 conj(Q) - delta1 Q + Q5 with Q5 = 10 (2pi)^-4 (-i s) q5.
EnlsCoefficients extract_coeffs(const DispersionModel& model, const TaylorJet& jet, int nu,
                                double alpha, double h = 1e-3);

struct EnlsOrder {
  int nu = 2;
  int sigma = 0;
  bool quintic = false;
};

enum class Stepper { strang, ifrk4 };

struct EnlsRunSpec {
  EnlsOrder order;
  double dt = 1e-2;  // fast time
  double t_end = 1.0;
  Stepper stepper = Stepper::strang;
  bool reality = true;  // evolve Z_plus only and set Z_minus = conj(Z_plus)
  double max_phase = 0.1;
  std::function<void(const EnvelopeState&, long)> observer;
  long observe_every = 1;
};

// Cubic (and quintic) envelope nonlinearity for Z_s, already multiplied by alpha_pi.
class EnlsNonlinearity {
 public:
  EnlsNonlinearity(const EnlsCoefficients& c, EnlsOrder order, const Grid& g);
  // Fills out with alpha_pi N_s(Z_s, Z_-s) + alpha_pi^2 delta5 Z_s^3 Z_-s^2.
  void apply(int s, const cvec& zs, const cvec& zm, cvec& out, bool cubic = true,
             bool quintic = true);
  // Largest |nonlinear rate| per unit |Z| on the given field, for the step criterion.
  double max_rate(int s, const cvec& zs, const cvec& zm);

 private:
  const EnlsCoefficients& c_;
  EnlsOrder order_;
  rvec xi_;
  Fft fft_;
  cvec tmp_, w1_, w2_, v1_, v2_;
  void mult(const cvec& in, int power, cvec& out);
};

EnvelopeState integrate_enls(const EnlsCoefficients& c, EnvelopeState state,
                             const EnlsRunSpec& spec);

struct BidirectionalResult {
  EnvelopeState forward;
  EnvelopeState backward;
  // || int_0^t e^{2 i gamma0 t1} F(t1) dt1 || (l2 over the grid, times dx) for the
  // cross forcing F on each field
  double cross_integral_forward = 0.0;
  double cross_integral_backward = 0.0;
};

// Forward doublet at +k*, backward at -k*; each state in the rotating lab-space frame.
// The cross terms alpha_pi delta_x |Z_other|^2 conj(Z_other) e^{2 i gamma0 t} are added with
// the fields in the rotating frame; quintic and cross terms are additive.
BidirectionalResult integrate_bidirectional(const EnlsCoefficients& fwd,
                                            const EnlsCoefficients& bwd, EnvelopeState zf,
                                            EnvelopeState zb, const EnlsRunSpec& spec,
                                            bool coupled = true);

struct SourceFormResult {
  EnvelopeState z;
  EnvelopeState v;
  double max_diff_after_ramp = 0.0;  // max |V - Z| over t >= tau0 / rho
  double max_v_before_start = 0.0;   // max |V| at t <= 0
  double max_linear_mismatch = 0.0;  // max |V - psi Z| over the whole run
};

// Co-integrates Z and the sourced field V (V(0) = 0) with
//   f = rho psi0 Z + (psi - psi^3) N3(Z) + (psi - psi^5) N5(Z)
// by IF-RK4 on the same grid and step. Requires spec.reality.
SourceFormResult to_source_form(const EnlsCoefficients& c, const EnvelopeState& z0,
                                const EnvelopeSpec& env, double rho, const EnlsRunSpec& spec);

struct ReducedTerm {
  std::string name;
  double exponent = 0.0;  // size beta^exponent relative to Z
  bool kept = true;
};

struct ReducedEquation {
  double kappa0 = 0.0;
  double kappa1 = 0.0;
  std::string form;  // transport | NLS | strong-dispersion | intermediate
  std::vector<ReducedTerm> terms;
  const ReducedTerm& term(const std::string& name) const;
  nlohmann::json to_json() const;
};

// alpha = beta^kappa0 (kappa0 defaults to kappa1), rho = beta^kappa1. A term is kept when its
// size does not exceed the time-derivative scale rho, i.e. exponent <= kappa1.
ReducedEquation reduce_scaling(const EnlsCoefficients& c, double kappa1, double kappa0 = -1.0);

// Max over the grid of the time-derivative form residual
//   alpha_pi (-delta1 |Z|^2 dZ/dt - delta2 Z^2 dZ_-/dt) - alpha_pi^2 (delta5 - Q5) |Z|^4 Z
// with dZ/dt from the reduced (quintic) equation.
double time_derivative_residual(const EnlsCoefficients& c, const EnvelopeState& s, EnlsOrder order);

}  // namespace nlsr
