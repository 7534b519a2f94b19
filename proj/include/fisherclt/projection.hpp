#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fisherclt/grid.hpp"

namespace fclt {

// Analytic test function with derivative, for identities that need exact
// pointwise evaluation on lattices the caller does not control.
struct TestFunction {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> df;
};

// Deterministic bank: x, x^2 - 1, and three seeded compact smooth bumps
// (sums of (1 - t^2)^3 lobes: bounded, C^2, compactly supported).
std::vector<TestFunction> test_function_bank(std::uint64_t seed);

// Sample a callable on the sum lattice of two congruent grids, i.e. the
// lattice {x1_min + x2_min + k h} covering all pairwise sums.
GridFunction sample_on_sum_lattice(const GridDensity& d1,
                                   const GridDensity& d2,
                                   const std::function<double(double)>& f);

// L2(P1 x P2) projection of f(Y1 + Y2) onto additive functions
// g1(Y1) + g2(Y2), both components centred.  mu = -E g2(Y2) rho2(Y2).
// Pythagoras: E f^2 = E g1^2 + E g2^2 + residual_norm_sq (f centred first).
struct AdditiveProjection {
  GridFunction g1, g2;
  double mu = 0.0;
  double residual_norm_sq = 0.0;
  bool f_centered = false;
  double ef2 = 0.0, eg1_sq = 0.0, eg2_sq = 0.0;
  double pythagoras_gap = 0.0;
};

AdditiveProjection additive_projection(const GridFunction& f,
                                       const GridDensity& d1,
                                       const GridDensity& d2);

// sup_u |g1'(u) + E f(u + Y2) rho2(Y2)| over the interior of d1's grid:
// the weak-differentiability identity g1' = -E f(. + Y2) rho2 for centred
// projections.  Also checks the integral form r1 = -(g1' - mu) internally.
double derivative_identity_check(const GridFunction& f, const GridDensity& d1,
                                 const GridDensity& d2);

// Variance decomposition bound for the projection residual:
//   E(f - h1 - h2)^2 >= E(g1-h1)^2 + E(g2-h2)^2
//                     + [beta E(g1'-mu)^2 + (1-beta) E(g2'-mu)^2] / Ibar,
// Ibar = (1-beta) I(Y1) + beta I(Y2).  vacuous when either I diverges.
struct ProjectionBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // lhs - rhs
  double beta = 0.5;
  bool vacuous = false;
};

ProjectionBound projection_inequality_check(const GridFunction& f,
                                            const GridDensity& d1,
                                            const GridDensity& d2,
                                            const GridFunction& h1,
                                            const GridFunction& h2,
                                            double beta);

// Martingale-style telescoping of f(S_n / sqrt n) along partial sums, with
// f_m in the raw partial-sum coordinate:
//   f_m(s) = E f((s + X_{m+1} + ... + X_n)/ sqrt n)
//   t_m    = E (f_m(S_m) - f_{m-1}(S_{m-1}) - g(X_m)/sqrt n)^2
//   s_m    = E f_m(S_m)^2 - (m/n) E g^2,   g(u) = sqrt n E f((u + S_{n-1})/sqrt n)
// Exact lattice recursion; sum rule s_n = sum t_i; per-step lower bounds
// t_i >= (i-1)/(n I) E(g'-mu)^2 and the aggregate s_n >= (n-1)/(2I) E(g'-mu)^2.
struct TelescopingReport {
  int n = 0;
  std::vector<GridFunction> f_seq;  // f_m on its own lattice, m = 1..n
  GridFunction g;
  std::vector<double> t, s;  // indexed by m-1, m = 1..n
  double mu = 0.0;           // E f'(S_n / sqrt n)
  double e_gprime_mu_sq = 0.0;
  double fisher_I = 0.0;
  double lower_bound_lhs = 0.0;  // s_n, the aggregate left-hand side
};

TelescopingReport telescoping_decomposition(const TestFunction& f,
                                            const GridDensity& d, int n);
// Grid-sampled variant: f is interpolated linearly onto the internal lattice
// (any such sample is itself a valid test function, so the identities and
// bounds are exact for the interpolant).
TelescopingReport telescoping_decomposition(const GridFunction& f,
                                            const GridDensity& d, int n);

// Entropy from information along the interpolation X_t = sqrt(1-t) X + sqrt t Z:
//   D(X) = integral_0^1 J(X_t) / (2(1-t)) dt
// evaluated in the substituted variable tau (t = (1-clip) tau^2 (3-2tau)),
// with a c/sqrt(t) + d model at the left endpoint and a linear sliver at t=1.
struct DeBruijnPath {
  std::vector<double> t_nodes;
  std::vector<double> J_path;
  double D_integral = 0.0;  // quadrature including the endpoint corrections
  double D_direct = 0.0;    // relative_entropy(d) for comparison
  double D_clipped = 0.0;   // quadrature over [0, 1-clip] only
};

DeBruijnPath debruijn_entropy(const GridDensity& d, int nodes = 48,
                              double clip = 1e-4);

}  // namespace fclt
