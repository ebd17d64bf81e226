#include "nlsregime/hill.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace nlsr {

double PiecewiseProfile::value(double r) const {
  r -= std::floor(r);
  double v = pieces.front().second;
  for (const auto& [r0, v0] : pieces)
    if (r >= r0) v = v0;
  return v;
}

cplx PiecewiseProfile::fourier(int p) const {
  cplx acc = 0.0;
  for (size_t i = 0; i < pieces.size(); ++i) {
    const double a = pieces[i].first;
    const double b = (i + 1 < pieces.size()) ? pieces[i + 1].first : 1.0;
    const double v = pieces[i].second;
    if (p == 0) {
      acc += v * (b - a);
    } else {
      const double w = kTwoPi * p;
      acc += v * (std::exp(-kI * w * b) - std::exp(-kI * w * a)) / (-kI * w);
    }
  }
  return acc;
}

PiecewiseProfile PiecewiseProfile::from_json(const nlohmann::json& j) {
  PiecewiseProfile pp;
  const auto& arr = j.contains("piecewise") ? j.at("piecewise") : j;
  pp.pieces.clear();
  for (const auto& e : arr) pp.pieces.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
  if (pp.pieces.empty()) throw Error("piecewise profile is empty");
  std::sort(pp.pieces.begin(), pp.pieces.end());
  if (pp.pieces.front().first != 0.0) throw Error("piecewise profile must start at r = 0");
  for (const auto& [r0, v0] : pp.pieces)
    if (r0 < 0.0 || r0 >= 1.0) throw Error("piecewise breakpoints must lie in [0, 1)");
  return pp;
}

nlohmann::json PiecewiseProfile::to_json() const {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& [r0, v0] : pieces) a.push_back({r0, v0});
  return {{"piecewise", a}};
}

HillSolver::HillSolver(PiecewiseProfile eps, int n_bands, Options opt)
    : eps_(std::move(eps)), n_bands_(n_bands), opt_(opt) {
  for (const auto& [r0, v0] : eps_.pieces)
    if (!(v0 > 0.0)) throw Error("hill_bands: potential must be strictly positive");
  if (n_bands_ < 1) throw Error("hill_bands: n_bands must be >= 1");
  if (opt_.plane_waves % 2 == 0) ++opt_.plane_waves;
  if (opt_.plane_waves < n_bands_ + 2) opt_.plane_waves = 2 * n_bands_ + 3;
  const int n = opt_.plane_waves, P = n / 2;
  B_.resize(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) B_(a, b) = eps_.fourier((a - P) - (b - P));
}

HillSolver::Solution HillSolver::solve(double k) const {
  // real potential: the -k solution is the conjugate of the +k one with plane-wave index reversed
  if (k < 0.0) {
    Solution s = solve(-k);
    for (auto& v : s.coeffs) v = v.reverse().conjugate().eval();
    return s;
  }
  const int n = opt_.plane_waves, P = n / 2;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    const double q = k + kTwoPi * (a - P);
    A(a, a) = q * q;
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(A, B_);
  if (es.info() != Eigen::Success) throw Error("hill_bands: eigen-solve did not converge");
  Solution s;
  for (int i = 0; i < n_bands_; ++i) {
    Eigen::VectorXcd v = es.eigenvectors().col(i);
    // Rayleigh quotient: absolute eigenvalue error ~ eps*|A| would swamp sqrt near k = 0
    double num = 0.0;
    for (int a = 0; a < n; ++a) num += std::norm(v(a)) * A(a, a).real();
    const double lam = num / (v.adjoint() * B_ * v)(0, 0).real();
    s.omega.push_back(std::sqrt(std::max(0.0, lam)));
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    v *= std::conj(v(imax)) / std::abs(v(imax));
    s.coeffs.push_back(v);
  }
  return s;
}

double HillSolver::omega(int band, double k) const {
  if (band < 1 || band > n_bands_) throw Error("hill band index out of range");
  return solve(k).omega[band - 1];
}

cvec HillSolver::mode_samples(int band, double k, int npts) const {
  const auto sol = solve(k);
  const auto& c = sol.coeffs.at(band - 1);
  const int P = opt_.plane_waves / 2;
  cvec out(npts);
  for (int j = 0; j < npts; ++j) {
    const double r = double(j) / npts;
    cplx acc = 0.0;
    for (int a = 0; a < c.size(); ++a) acc += c(a) * std::exp(kI * (kTwoPi * (a - P) * r));
    out[j] = acc;
  }
  return out;
}

double HillSolver::min_gap(int band, double k) const {
  Solution s;
  {
    HillSolver tmp(eps_, std::min(n_bands_ + 1, opt_.plane_waves), opt_);
    s = tmp.solve(k);
  }
  double g = std::numeric_limits<double>::infinity();
  if (band > 1) g = std::min(g, s.omega[band - 1] - s.omega[band - 2]);
  if (band < static_cast<int>(s.omega.size())) g = std::min(g, s.omega[band] - s.omega[band - 1]);
  return g;
}

HillOverlap::HillOverlap(std::shared_ptr<const HillSolver> solver, PiecewiseProfile chi3, bool wrap,
                         int npts)
    : solver_(std::move(solver)), chi3_(std::move(chi3)), wrap_(wrap), npts_(npts) {}

cvec HillOverlap::mode(const ModeIndex& m) const {
  if (m.sign > 0) return solver_->mode_samples(m.band, m.k, npts_);
  cvec p = solver_->mode_samples(m.band, -m.k, npts_);
  for (auto& z : p) z = std::conj(z);
  return p;
}

cplx HillOverlap::value(const ModeIndex& end, const Origins& o, const Multi3& l) const {
  if (l[0] || l[1] || l[2]) return 0.0;  // instantaneous response
  const cvec pe = mode(end), p1 = mode(o[0]), p2 = mode(o[1]), p3 = mode(o[2]);
  const double dk = o[0].k + o[1].k + o[2].k - end.k;
  cplx acc = 0.0;
  for (int j = 0; j < npts_; ++j) {
    const double r = double(j) / npts_;
    acc += chi3_.value(r) * std::conj(pe[j]) * p1[j] * p2[j] * p3[j] * std::exp(kI * (dk * r));
  }
  acc /= double(npts_);
  if (wrap_) acc *= -kI * double(end.sign) * solver_->omega(end.band, end.k) / (kTwoPi * kTwoPi);
  return acc;
}

nlohmann::json HillOverlap::describe() const {
  return {{"kind", "hill-overlap"}, {"chi3", chi3_.to_json()}, {"wrapped", wrap_}, {"points", npts_}};
}

DispersionModel hill_bands(const PiecewiseProfile& potential, int n_bands, int n_k,
                           HillSolver::Options opt) {
  if (n_k < 16) throw Error("hill_bands: n_k must be >= 16");
  auto solver = std::make_shared<HillSolver>(potential, n_bands, opt);
  DispersionModel m(solver, Provenance::hill);
  m.set_overlap(std::make_shared<HillOverlap>(solver, PiecewiseProfile{}, false));
  m.sample(n_k);
  return m;
}

}  // namespace nlsr
