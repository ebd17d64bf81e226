#include <benchmark/benchmark.h>

#include <cmath>

#include "nlsregime/enls.hpp"
#include "nlsregime/fft.hpp"
#include "nlsregime/hill.hpp"
#include "nlsregime/interaction.hpp"
#include "nlsregime/lattice.hpp"

using namespace nlsr;

namespace {

DispersionModel focusing_model(const std::string& family) {
  FamilySpec f;
  f.family = family;
  DispersionModel m = make_synthetic({f});
  m.set_overlap(make_constant_susceptibility(-1.0));
  return m;
}

cplx gauss(double y) { return cplx(std::exp(-0.5 * y * y)); }

}  // namespace

static void BM_FftRoundTrip(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  Fft f(n);
  cvec a(n), b(n);
  for (int j = 0; j < n; ++j) a[j] = std::exp(-0.001 * (j - n / 2) * (j - n / 2));
  for (auto _ : st) {
    f.forward(a.data(), b.data());
    f.inverse(b.data(), a.data());
    benchmark::DoNotOptimize(a.data());
  }
  st.SetComplexityN(n);
}
BENCHMARK(BM_FftRoundTrip)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oNLogN);

// 100 Strang steps of the cubic envelope equation
static void BM_EnlsStrang(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const double beta = 0.1, rho = beta * beta;
  const DispersionModel m = focusing_model("sqrt");
  const EnlsCoefficients c = extract_coeffs(m, jet_at(m, 1, 1.0), 2, rho);
  const EnvelopeState z0 = make_state(Grid{40.0 / beta, n}, [](double y) { return 0.5 * gauss(y); }, beta);
  EnlsRunSpec spec;
  spec.dt = 0.02;
  spec.t_end = 2.0;
  for (auto _ : st) benchmark::DoNotOptimize(integrate_enls(c, z0, spec).z_plus.data());
  st.SetItemsProcessed(st.iterations() * 100);
}
BENCHMARK(BM_EnlsStrang)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

static void BM_LatticeRk4(benchmark::State& st) {
  const double beta = 0.1;
  const DispersionModel m = focusing_model("2-cos");
  const EnlsCoefficients c = extract_coeffs(m, jet_at(m, 1, kPi / 3), 2, beta * beta);
  const LatticeState s = make_lattice_state(static_cast<int>(st.range(0)), gauss, beta);
  LatticeRunSpec spec;
  spec.dt = 0.05;
  spec.t_end = 5.0;
  spec.fail_on_leak = false;
  for (auto _ : st) benchmark::DoNotOptimize(integrate_lattice_nls(c, s, spec).norm_drift);
  st.SetItemsProcessed(st.iterations() * 100);
}
BENCHMARK(BM_LatticeRk4)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

// bilinear Gaussian oracle integral at decreasing theta
static void BM_Oscillatory2d(benchmark::State& st) {
  const double theta = 1.0 / static_cast<double>(st.range(0));
  for (auto _ : st) {
    const QuadValue v = oscillatory_2d([](double a, double b) { return 2 * a * b; },
                                       [](double a, double b) { return cplx(std::exp(-a * a - b * b)); }, theta);
    benchmark::DoNotOptimize(v.value);
  }
}
BENCHMARK(BM_Oscillatory2d)->Arg(1)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_HillSolve(benchmark::State& st) {
  PiecewiseProfile eps;
  eps.pieces = {{0.0, 1.0}, {0.3, 2.5}, {0.7, 1.0}};
  HillSolver::Options opt;
  opt.plane_waves = static_cast<int>(st.range(0));
  HillSolver s(eps, 3, opt);
  double k = 0.1;
  for (auto _ : st) {
    benchmark::DoNotOptimize(s.omega(1, k));
    k = k < 3.0 ? k + 0.01 : 0.1;
  }
}
BENCHMARK(BM_HillSolve)->Arg(33)->Arg(65);
BENCHMARK_MAIN();
