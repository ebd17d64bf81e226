#pragma once

#include <functional>
#include <iosfwd>
#include <memory>

#include "nlsregime/dispersion.hpp"

namespace nlsr {

// gamma_(nu)(eta) = sum_{j<=nu} omega^{(j)}(k_star) eta^j / j!
double gamma_poly(const TaylorJet& jet, int nu, double eta);
double gamma_poly_deriv(const TaylorJet& jet, int nu, double eta, int order = 1);

// xi = Y^{-1}(eta): nu = 1 closed form, nu = 2 closed radical with the branch through 0,
// nu >= 3 safeguarded Newton started at xi = eta.
double y_inverse(const DispersionModel& model, const TaylorJet& jet, int nu, double eta);
// eta = Y(xi) by safeguarded Newton on omega(k_star + eta) = gamma_(nu)(xi).
double y_forward(const DispersionModel& model, const TaylorJet& jet, int nu, double xi);
// Y^{-1}(eta) - eta in 50-digit arithmetic, with the Taylor jet recomputed in 50 digits
// (double-precision fallback for solver bands). Used where the offset sits below double
// resolution of eta.
double y_inverse_offset(const DispersionModel& model, const TaylorJet& jet, int nu, double eta);

// Newton with bisection fallback; tol absolute in x, at most max_iter iterations.
double safeguarded_newton(const std::function<double(double)>& g,
                          const std::function<double(double)>& dg, double x0, double lo,
                          double hi, double tol = 1e-12, int max_iter = 50);

class RectifyMap {
 public:
  RectifyMap(const DispersionModel& model, TaylorJet jet, int nu, double pi0 = 0.1,
             bool identity = false);

  double inverse(double eta) const;  // Y^{-1}
  double forward(double xi) const;   // Y
  // Doublet branch: Y_s(xi) = s Y(s xi)
  double inverse_signed(int sign, double eta) const { return sign * inverse(sign * eta); }
  double forward_signed(int sign, double xi) const { return sign * forward(sign * xi); }
  double gamma(double xi) const { return gamma_poly(jet_, nu_, xi); }

  const TaylorJet& jet() const { return jet_; }
  int nu() const { return nu_; }
  double pi0() const { return pi0_; }
  bool identity() const { return identity_; }
  const DispersionModel& model() const { return *model_; }

 private:
  std::shared_ptr<const DispersionModel> model_;
  TaylorJet jet_;
  int nu_;
  double pi0_;
  bool identity_;
};

struct RectifyResidual {
  double max_residual = 0.0;  // max |omega(k*+Y(xi)) - gamma(xi)| over the grid
  double max_roundtrip = 0.0;  // max |Y(Y^{-1}(eta)) - eta|
};

RectifyResidual rectify_residual(const RectifyMap& map, int n_points = 201);

// CSV: eta, xi, residual
void write_rectify_csv(const RectifyMap& map, int n_points, std::ostream& os);

}  // namespace nlsr
