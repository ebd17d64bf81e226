#include "nlsregime/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace nlsr {

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kGl10x[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                              0.8650633666889845, 0.9739065285171717};
constexpr double kGl10w[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                              0.1494513491505806, 0.0666713443086881};

cplx gk15(const std::function<cplx(double)>& f, double a, double b, double& err) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const cplx fc = f(c);
  cplx rk = fc * kWgk[7];
  cplx rg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const cplx f1 = f(c - h * kXgk[j]), f2 = f(c + h * kXgk[j]);
    rk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) rg += kWg[j / 2] * (f1 + f2);
  }
  err = std::abs((rk - rg) * h);
  return rk * h;
}

cplx gk_recurse(const std::function<cplx(double)>& f, double a, double b, double tol, int depth,
                QuadStats& st) {
  double err = 0.0;
  const cplx r = gk15(f, a, b, err);
  st.evaluations += 15;
  if (err <= tol || depth <= 0 || std::abs(b - a) < 1e-15 * (1.0 + std::abs(a))) {
    st.error += err;
    return r;
  }
  const double m = 0.5 * (a + b);
  return gk_recurse(f, a, m, 0.5 * tol, depth - 1, st) + gk_recurse(f, m, b, 0.5 * tol, depth - 1, st);
}

}  // namespace

cplx adaptive_gk(const std::function<cplx(double)>& f, double a, double b, double abs_tol,
                 double rel_tol, int max_depth, const rvec& breakpoints, QuadStats* stats) {
  rvec pts{a};
  for (double p : breakpoints)
    if (p > std::min(a, b) && p < std::max(a, b)) pts.push_back(p);
  pts.push_back(b);
  if (b >= a) std::sort(pts.begin(), pts.end()); else std::sort(pts.rbegin(), pts.rend());
  // coarse pass to set the relative scale
  QuadStats st;
  cplx coarse = 0.0;
  double mass = 0.0;  // coarse integral of |f|, sets the round-off floor for cancelling integrands
  std::map<double, cplx> seen;
  auto memo = [&](double x) {
    auto it = seen.find(x);
    if (it != seen.end()) return it->second;
    return seen[x] = f(x);
  };
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    double e;
    coarse += gk15(memo, pts[i], pts[i + 1], e);
    mass += std::abs(gk15([&](double x) { return cplx(std::abs(memo(x))); }, pts[i], pts[i + 1], e));
  }
  const double tol =
      std::max({abs_tol, rel_tol * std::abs(coarse), 64.0 * std::numeric_limits<double>::epsilon() * mass});
  cplx acc = 0.0;
  const double total = std::abs(b - a);
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    const double share = total > 0 ? std::abs(pts[i + 1] - pts[i]) / total : 1.0;
    acc += gk_recurse(f, pts[i], pts[i + 1], tol * share, max_depth, st);
  }
  if (stats) *stats = st;
  return acc;
}

const std::array<double, 10>& gl10_nodes() {
  static const std::array<double, 10> x = [] {
    std::array<double, 10> v{};
    for (int j = 0; j < 5; ++j) {
      v[j] = -kGl10x[4 - j];
      v[9 - j] = kGl10x[4 - j];
    }
    return v;
  }();
  return x;
}

const std::array<double, 10>& gl10_weights() {
  static const std::array<double, 10> w = [] {
    std::array<double, 10> v{};
    for (int j = 0; j < 5; ++j) v[j] = v[9 - j] = kGl10w[4 - j];
    return v;
  }();
  return w;
}

cplx gauss_legendre10(const std::function<cplx(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  cplx acc = 0.0;
  for (int j = 0; j < 5; ++j) acc += kGl10w[j] * (f(c - h * kGl10x[j]) + f(c + h * kGl10x[j]));
  return acc * h;
}

cplx oscillatory_1d(const std::function<double(double)>& phase,
                    const std::function<cplx(double)>& amp, double theta, double a, double b,
                    double max_cell, long* evaluations) {
  const double lim = 0.25 * kPi * theta;
  struct Cell { double a, b, pa, pb; int depth; };
  std::vector<Cell> stack{{a, b, phase(a), phase(b), 0}};
  cplx acc = 0.0;
  long ev = 2;
  auto integrand = [&](double x) { return std::exp(kI * (phase(x) / theta)) * amp(x); };
  while (!stack.empty()) {
    Cell c = stack.back();
    stack.pop_back();
    const double m = 0.5 * (c.a + c.b);
    const double pm = phase(m);
    ++ev;
    const bool fine = std::abs(c.b - c.a) <= max_cell && std::abs(c.pb - c.pa) <= lim && std::abs(pm - c.pa) <= lim && std::abs(c.pb - pm) <= lim;
    if (fine || c.depth >= 48) {
      acc += gauss_legendre10(integrand, c.a, c.b);
      ev += 10;
    } else {
      stack.push_back({m, c.b, pm, c.pb, c.depth + 1});
      stack.push_back({c.a, m, c.pa, pm, c.depth + 1});
    }
  }
  if (evaluations) *evaluations += ev;
  return acc;
}

}  // namespace nlsr
