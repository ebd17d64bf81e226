#pragma once

#include <functional>
#include <iosfwd>

#include "nlsregime/enls.hpp"

namespace nlsr {

// Lattice dispersion symbols on sites of spacing 1.
//   trig2  [omega + omega''] + omega' sin xi - omega'' cos xi
//   sin    gamma_(nu)(sin xi), polynomial in the centred difference D-
enum class LatticeSymbolKind { trig2, sin };

double lattice_symbol(const TaylorJet& jet, double xi, LatticeSymbolKind kind = LatticeSymbolKind::trig2,
                      int nu = 2);

struct LatticeState {
  int M = 0;  // sites m = -M..M
  cvec z_plus;
  cvec z_minus;
  double t = 0.0;
  Frame frame = Frame::rotating;  // lab or rotating; the lattice has no comoving form
  int index(int m) const { return m + M; }
  int sites() const { return 2 * M + 1; }
};

LatticeState make_lattice_state(int M, const std::function<cplx(double)>& h, double beta,
                                Frame frame = Frame::rotating);

// (D- Z)(m) = (Z(m+1) - Z(m-1)) / 2i,  (D+ Z)(m) = (Z(m+1) + Z(m-1)) / 2, zero outside.
void delta_minus(const cvec& z, cvec& out);
void delta_plus(const cvec& z, cvec& out);

struct LatticeRunSpec {
  double dt = 0.05;
  double t_end = 1.0;
  LatticeSymbolKind kind = LatticeSymbolKind::trig2;
  int nu = 2;
  double max_phase = 0.1;
  double leak_tol = 1e-12;  // boundary |Z| relative to the initial peak
  bool fail_on_leak = true;
};

struct LatticeResult {
  LatticeState state;
  double max_boundary = 0.0;  // largest boundary |Z| seen, relative to the initial peak
  double norm_drift = 0.0;    // relative change of sum |Z|^2
};

// dZ/dt = -i Gamma(D) Z + alpha_pi Q |Z|^2 Z by classical RK4 (real reduction).
LatticeResult integrate_lattice_nls(const EnlsCoefficients& c, LatticeState state,
                                    const LatticeRunSpec& spec);

// Zbar(xi_j) = sum_m Z(m) e^{-i m xi_j} on xi_j = -pi + 2 pi j / n.
cvec lattice_fourier(const cvec& z, int M, int n_xi);
// Inverse for n_xi >= 2M + 1.
cvec lattice_inverse(const cvec& zbar, int M);
// Band-limited interpolation (1/2pi) int Zbar(xi) e^{i y xi} dxi at real y.
cplx lattice_interpolate(const cvec& z, int M, double y);

struct LatticeComparison {
  double max_deviation = 0.0;  // max over sampled times and sites of |Z_lat - Z_nls| / peak
  double peak = 0.0;
};

// Runs the lattice equation and the spectral continuum NLS with symbol gamma_(2) on a
// spacing-1 periodic grid covering the same sites and compares them every sample_every
// steps.
LatticeComparison compare_lattice_continuum(const EnlsCoefficients& c, int M,
                                            const std::function<cplx(double)>& h, double beta,
                                            const LatticeRunSpec& spec, long sample_every = 50);

void write_sites_csv(const LatticeState& s, std::ostream& os);
void write_spectrum_csv(const cvec& zbar, std::ostream& os);

}  // namespace nlsr
