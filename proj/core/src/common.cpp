#include "nlsregime/common.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>

namespace nlsr {

double wrap_zone(double k) {
  if (k >= -kPi && k < kPi) return k;
  double r = std::fmod(k + kPi, kTwoPi);
  if (r < 0) r += kTwoPi;
  return r - kPi;
}

SlopeFit fit_loglog(const rvec& x, const rvec& y) {
  SlopeFit f;
  rvec lx, ly;
  for (size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (x[i] > 0 && y[i] > 0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
      lx.push_back(std::log10(x[i]));
      ly.push_back(std::log10(y[i]));
    }
  }
  f.points = static_cast<int>(lx.size());
  if (f.points < 2) {
    f.slope = f.intercept = f.halfwidth = std::numeric_limits<double>::quiet_NaN();
    return f;
  }
  const double n = f.points;
  double mx = 0, my = 0;
  for (int i = 0; i < f.points; ++i) { mx += lx[i]; my += ly[i]; }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < f.points; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 0) {
    f.slope = f.intercept = f.halfwidth = std::numeric_limits<double>::quiet_NaN();
    return f;
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.defined = true;
  if (f.points > 2) {
    double rss = 0;
    for (int i = 0; i < f.points; ++i) {
      const double r = ly[i] - (f.intercept + f.slope * lx[i]);
      rss += r * r;
    }
    const double se = std::sqrt(rss / (n - 2) / sxx);
    boost::math::students_t dist(n - 2);
    f.halfwidth = boost::math::quantile(boost::math::complement(dist, 0.025)) * se;
  } else {
    f.halfwidth = std::numeric_limits<double>::quiet_NaN();
  }
  return f;
}

double l2_norm(const cvec& v) {
  double s = 0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

double max_abs(const cvec& v) {
  double m = 0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

rvec geomspace(double a, double b, int n) {
  rvec out(n);
  if (n == 1) { out[0] = a; return out; }
  const double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < n; ++i) out[i] = std::exp(la + (lb - la) * i / (n - 1));
  return out;
}

}  // namespace nlsr
