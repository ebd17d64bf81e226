#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlsr {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;
using rvec = std::vector<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Maps k to the zone [-pi, pi).
double wrap_zone(double k);

// Cubic coupling constant 3 alpha (2 pi)^{2d}, d = 1.
inline double alpha_pi(double alpha) { return 3.0 * alpha * kTwoPi * kTwoPi; }

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double halfwidth = 0.0;  // 95% t-interval half-width; NaN for two points
  int points = 0;
  bool defined = false;
};

// Ordinary least squares on (log10 x, log10 y). Needs two or more positive points.
SlopeFit fit_loglog(const rvec& x, const rvec& y);

double l2_norm(const cvec& v);
double max_abs(const cvec& v);

// Geometric grid of n points between a and b (inclusive).
rvec geomspace(double a, double b, int n);

}  // namespace nlsr
