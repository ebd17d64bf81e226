#pragma once

#include <Eigen/Dense>
#include <memory>
#include <utility>
#include <vector>

#include "nlsregime/dispersion.hpp"
#include "nlsregime/susceptibility.hpp"

namespace nlsr {

// Piecewise-constant periodic profile on [0, 1): value v_i on [r_i, r_{i+1}).
struct PiecewiseProfile {
  std::vector<std::pair<double, double>> pieces{{0.0, 1.0}};
  double value(double r) const;
  cplx fourier(int p) const;  // int_0^1 v(r) e^{-2 pi i p r} dr
  static PiecewiseProfile from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Scalar Hill problem -(d/dr + ik)^2 p = omega^2 eps(r) p with period 1, solved by a
// plane-wave expansion; modes normalized by int eps |p|^2 = 1.
class HillSolver : public BandStructure {
 public:
  struct Options {
    int plane_waves = 41;  // odd count, m in [-P, P]
    double degeneracy_gap = 1e-6;
  };

  struct Solution {
    rvec omega;
    std::vector<Eigen::VectorXcd> coeffs;  // plane-wave coefficients of each periodic part
  };

  HillSolver(PiecewiseProfile eps, int n_bands, Options opt);
  HillSolver(PiecewiseProfile eps, int n_bands) : HillSolver(std::move(eps), n_bands, Options{}) {}

  int n_bands() const override { return n_bands_; }
  double omega(int band, double k) const override;
  Solution solve(double k) const;
  // Periodic part p_{band,k}(r_j) at r_j = j / npts.
  cvec mode_samples(int band, double k, int npts) const;
  // Smallest gap from the band to its neighbours at k.
  double min_gap(int band, double k) const;
  const PiecewiseProfile& eps() const { return eps_; }
  const Options& options() const { return opt_; }

 private:
  PiecewiseProfile eps_;
  int n_bands_;
  Options opt_;
  Eigen::MatrixXcd B_;
};

// Cell-averaged quartic overlap K = int chi3(r) conj(G_end) G_1 G_2 G_3 dr with
// G = p(r) e^{ikr}; frequency sign -1 uses conj(G_{+}(r, -k)). With wrap on the value
// is (2 pi)^-2 (-i s_end omega_end) K.
class HillOverlap : public Susceptibility {
 public:
  HillOverlap(std::shared_ptr<const HillSolver> solver, PiecewiseProfile chi3, bool wrap,
              int npts = 256);
  cplx value(const ModeIndex& end, const Origins& o, const Multi3& l = {0, 0, 0}) const override;
  nlohmann::json describe() const override;

 private:
  cvec mode(const ModeIndex& m) const;
  std::shared_ptr<const HillSolver> solver_;
  PiecewiseProfile chi3_;
  bool wrap_;
  int npts_;
};

DispersionModel hill_bands(const PiecewiseProfile& potential, int n_bands, int n_k,
                           HillSolver::Options opt = {});

}  // namespace nlsr
