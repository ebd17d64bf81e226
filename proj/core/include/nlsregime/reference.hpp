#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <nlohmann/json.hpp>

#include "nlsregime/enls.hpp"
#include "nlsregime/fft.hpp"
#include "nlsregime/rectify.hpp"

namespace nlsr {

enum class KernelMode { fm_only, full };

struct ModalConfig {
  std::vector<int> bands{1};  // bands[0] is n0
  int n_k = 512;
  double alpha = 0.0;
  double rho = 0.01;
  KernelMode kernel = KernelMode::fm_only;
  int n1 = 0;  // time-harmonic truncation, 0 or 1
  bool quintic = false;
  rvec window_centers;  // FM-only: end modes restricted to cutoff windows around these
  double pi0 = 0.1;
  bool hard_window = false;  // indicator |k - centre| < pi0 instead of the smooth cutoff
};

// Slow amplitudes u_n(k) of the (+, n) modes in the rotating frame, one vector per band.
// The (-, n) amplitudes follow from the reality pairing u_-(k) = conj(u_+(-k)).
using ModalFields = std::vector<cvec>;

struct ModalField {
  rvec k;
  std::vector<int> bands;
  ModalFields u;
  double tau = 0.0;
};

// k-grid in FFT order: k_i = wrap(2 pi i / n).
rvec modal_k_grid(int n);

class ModalSolver {
 public:
  // Needs a separable susceptibility on the model.
  ModalSolver(const DispersionModel& model, ModalConfig cfg);
  ModalSolver(const ModalSolver&) = delete;
  ModalSolver& operator=(const ModalSolver&) = delete;

  const rvec& k() const { return k_; }
  const ModalConfig& config() const { return cfg_; }
  const rvec& window() const { return window_; }
  int nearest_index(double k) const;
  ModalFields zeros() const;

  // Cubic kernel (no alpha) at fast time t; FM-only results are masked to the windows.
  void nl0(const ModalFields& u, double t, ModalFields& out);
  // alpha NL0 + alpha_pi^2 Q5 conv5 + alpha NL1(D), D = alpha NL0 - j (j may be null).
  void forcing(const ModalFields& u, double t, const ModalFields* j, ModalFields& out);

  // j(tau, half_step_index, out); RK4 stages use half-step indices 2n, 2n+1, 2n+1, 2n+2.
  using Current = std::function<void(double, long, ModalFields&)>;
  using Observer = std::function<void(const ModalField&, long)>;
  // du/dtau = (forcing(u, tau/rho, j) - j) / rho from u = 0 at tau = 0.
  ModalField integrate(const Current& j, double dtau, double tau_end, const Observer& obs = {});

  // First nonlinear response (alpha / rho) int_0^tau psi^3 NL0(v, tau1 / rho) dtau1 by
  // composite 10-point Gauss-Legendre, panels_per_period panels per fastest phase period.
  ModalFields fnlr(const ModalFields& v, const EnvelopeSpec& env, double tau,
                   double panels_per_period = 2.0);

  double max_frequency() const { return wmax_; }

 private:
  struct BandData {
    int band;
    rvec omega;
    cvec end, op, om, op1, om1;  // end factor and origin factors (l = 0, 1) for +/- signs
  };
  void lab(const ModalFields& u, double t, ModalFields& up, ModalFields& um) const;
  void nl_terms(const ModalFields& u, double t, const ModalFields* d, ModalFields& out0,
                ModalFields* out1);

  const DispersionModel* model_;
  ModalConfig cfg_;
  rvec k_;
  std::vector<int> neg_;
  rvec window_;
  std::vector<BandData> bd_;
  cplx q5_{0.0, 0.0};
  double wmax_ = 0.0;
  Fft fft_;
  cvec a_, b_, s_, s1_, a1_, b1_, buf_;
};

// u(k) = Psi0(eta) e^{i symbol(xi) t} Zhat(xi), xi = Y^{-1}(eta), eta = k - k*, with
// Zhat(xi) = (dx / 2 pi) sum_j Z_j e^{-i xi x_j} and symbol the frame symbol of the state.
cvec envelope_to_modal(const EnvelopeState& s, const EnlsCoefficients& c, const RectifyMap& rect,
                       int nu, const rvec& k_grid, double pi0, bool hard_window = false);

struct ApproxSolution {
  rvec k;
  int n0 = 1;
  cvec direct;
  std::map<int, cvec> indirect;  // band -> amplitudes
  int sigma_g = 0;
};

// Direct part from the envelope; indirect part alpha-scaled FNLR data per band.
ApproxSolution assemble_uz(const EnvelopeState& s, const EnlsCoefficients& c,
                           const RectifyMap& rect, int nu, const rvec& k_grid, double pi0,
                           const std::map<int, cvec>& indirect = {});

struct ErrorNorms {
  double direct = 0.0;
  double indirect = 0.0;
  double total = 0.0;
  double reference_norm = 0.0;  // l2 norm of the reference direct window
};

// l2 differences on the direct window mask, over the indirect bands and in total,
// each divided by the l2 norm of the reference on the direct window.
ErrorNorms error_norm(const ModalField& ref, const ApproxSolution& approx, const rvec& window);

// Mode G(r, k) of the n0 band.
using ModeFunction = std::function<cplx(double, double)>;

struct SpaceSample {
  double r = 0.0;
  cplx value{0.0, 0.0};
  bool contained = true;  // r inside the envelope grid
};

// U(r) = e^{i k* r} sum_{m <= sigma_g} (1/m!) d_k^m G(r, k*) (-i d_r)^m Z(r) + c.c.
std::vector<SpaceSample> reconstruct_space(const EnvelopeState& s, double k_star,
                                           const ModeFunction& mode, int sigma_g,
                                           const rvec& r_grid);

void write_modal_csv(const ModalField& f, std::ostream& os);

}  // namespace nlsr
