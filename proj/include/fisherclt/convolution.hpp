#pragma once
#include <map>
#include <vector>

#include "fisherclt/grid.hpp"
#include "fisherclt/info.hpp"

namespace fclt {

// Density of X1 + X2 for independent grid densities with a common step.
// Exact linear convolution on the full sum lattice, renormalized.  The
// result carries a refine hook (both inputs refined coherently) but no pdf.
GridDensity convolve(const GridDensity& a, const GridDensity& b);

// U_n = (X_1 + ... + X_n - n mean) / sqrt(n var) by spectral powering of the
// base lattice, cropped to mean +- c sqrt(n) sd (c = 12, widened up to three
// times if more than 1e-9 of the mass sits within 8h of the window edge).
GridDensity standardized_sum(const GridDensity& d, int n);

struct SumSequence {
  GridDensity base;
  std::vector<int> n_set;
  std::map<int, GridDensity> entries;
  std::vector<int> doubling_index;  // positions in n_set where n doubles
};

SumSequence standardized_sums(const GridDensity& d, std::vector<int> n_set);

// Conditional-expectation score of the sum: rho_bar(s) = E[rho2(Y2) | S = s]
// computed as (p1 * (p2 rho2))(s) / pS(s), masked where pS is resolvable.
// density_ref is the convolution density on its own (sum) lattice.
ScoreField sum_score_projection(const GridDensity& d1, const GridDensity& d2);

// Two-point information drop and its exact variance representation:
//   drop        = I(Y) - I((Y1 + Y2)/sqrt 2)
//   residual_sq = 2 E (rho_bar(S) - (rho(Y1) + rho(Y2))/2)^2
// identity_gap = |drop - residual_sq|; lambda_opt is the optimal mixing
// weight J(U2)/J(Y) in the underlying variance argument.
struct FisherDropReport {
  double I_single = 0.0;
  double I_pair_scaled = 0.0;
  double drop = 0.0;
  double residual_sq = 0.0;
  double identity_gap = 0.0;
  double lambda_opt = 0.0;
  bool infinite = false;  // propagated divergence flag; numbers then unusable
};

FisherDropReport fisher_drop(const GridDensity& d);

}  // namespace fclt
