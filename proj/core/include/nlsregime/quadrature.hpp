#pragma once

#include <array>
#include <functional>

#include "nlsregime/common.hpp"

namespace nlsr {

struct QuadStats {
  double error = 0.0;
  long evaluations = 0;
};

// Adaptive Gauss-Kronrod (7/15) for complex integrands on [a, b]. The interval is first
// split at the given breakpoints.
cplx adaptive_gk(const std::function<cplx(double)>& f, double a, double b, double abs_tol,
                 double rel_tol, int max_depth = 40, const rvec& breakpoints = {},
                 QuadStats* stats = nullptr);

// Nodes and weights of the 10-point Gauss-Legendre rule on [-1, 1].
const std::array<double, 10>& gl10_nodes();
const std::array<double, 10>& gl10_weights();

// Fixed 10-point Gauss-Legendre on [a, b].
cplx gauss_legendre10(const std::function<cplx(double)>& f, double a, double b);

// int_a^b e^{i phase(x)/theta} amp(x) dx with cells bisected until the phase varies by
// less than pi/4 per cell and the cell is no wider than max_cell, then Gauss-Legendre on
// each cell.
cplx oscillatory_1d(const std::function<double(double)>& phase,
                    const std::function<cplx(double)>& amp, double theta, double a, double b,
                    double max_cell = 0.5, long* evaluations = nullptr);

}  // namespace nlsr
