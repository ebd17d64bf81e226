#pragma once

#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "nlsregime/rectify.hpp"

namespace nlsr {

// Unit ramp on [0, 1]: integral of the normalized bump exp(-1/(x(1-x))).
double unit_ramp(double x);
double unit_bump(double x);  // normalized so that its integral over [0,1] is 1

struct EnvelopeSpec {
  double tau0 = 0.1;
  double psi0(double tau) const;  // bump with unit integral, support [0, tau0]
  double psi(double tau) const;   // 0 for tau <= 0, 1 for tau >= tau0
};

// Cutoff Psi0: even, 1 on |eta| <= pi0/2, 0 on |eta| >= pi0, smooth in between.
double cutoff(double eta, double pi0);

// Fourier profile h_hat(q) and its transform h(y) = int h_hat(q) e^{iqy} dq.
//   gauss       amp exp(-((q - shift)/width)^2)
//   sech        amp sech((q - shift)/width)
//   supergauss  amp exp(-((q - shift)/width)^4)
struct Profile {
  std::string family = "gauss";
  double amp = 1.0;
  double width = 1.0;
  double shift = 0.0;
  cplx hhat(double q) const;
  cplx h(double y) const;
  static Profile from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct DoubletExcitation {
  Profile h;
  std::optional<Profile> h_minus;  // only when the reality constraint is dropped
  double alpha = 0.0;
  double beta = 0.05;
  double rho = 0.0025;
  double tau0 = 0.1;
  double k_star = 1.0;
  int n0 = 1;
  double pi0 = 0.1;

  EnvelopeSpec env() const { return EnvelopeSpec{tau0}; }
  // h_minus(q) = conj(h_plus(-q)) unless the reality constraint was dropped.
  cplx hhat(int sign, double q) const;
  bool real() const { return !h_minus.has_value(); }
  static DoubletExcitation from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// -rho psi0(tau) Psi0(k - s k*) beta^-1 h_s(Y_s^-1(k - s k*)/beta)
cplx current_amplitude(const DoubletExcitation& exc, const RectifyMap& rect, int sign, double k,
                       double tau);

// psi(tau) Psi0(.) beta^-1 h_s(Y_s^-1(.)/beta); the lab-frame coefficient carries
// exp(-i s omega(k) t) on top.
cplx linear_response(const DoubletExcitation& exc, const RectifyMap& rect, int sign, double k,
                     double tau);

// Corrective current alpha J1 in modal units: Psi0 [-rho psi0 Z1_hat(xi) - (psi - psi^3) N_hat(xi)]
// with xi = Y_s^-1(k - s k*), Z1_hat the first nonlinear response of the envelope model and
// N_hat the Fourier transform of its cubic nonlinearity evaluated on Z0.
cplx corrective_current(const DoubletExcitation& exc, const RectifyMap& rect, int sign, double k,
                        double tau, const std::function<cplx(double)>& z1_hat,
                        const std::function<cplx(double)>& n_hat);

// Sum of the doublet currents at +k* and -k*. Rejects overlapping cutoffs.
cplx bidirectional_current(const DoubletExcitation& fwd, const RectifyMap& rect_fwd,
                           const DoubletExcitation& bwd, const RectifyMap& rect_bwd, int sign,
                           double k, double tau);

// Smallest C such that 99% of the DFT energy of psi0(rho t) e^{-i omega0 t} lies in
// |omega - omega0| <= C rho.
double bandwidth_constant(const EnvelopeSpec& env, double rho, double omega0, int n_samples = 1 << 14);

}  // namespace nlsr
