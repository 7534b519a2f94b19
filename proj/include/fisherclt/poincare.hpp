#pragma once
#include <string>
#include <utility>
#include <vector>

#include "fisherclt/grid.hpp"

namespace fclt {

// Poincare-type constant sup Var g / E g'^2 over a constraint class,
// computed as 1/lambda for the matching eigenvalue of the weighted
// Sturm-Liouville problem -(p g')' = lambda p g with natural boundary
// conditions, discretized on the density's own grid.
//
// constraint: "full"            g orthogonal to constants
//             "restricted"      g additionally orthogonal to x (H1* class)
//             "truncated(T)"    full class on the law conditioned to |x|<=T
struct PoincareEstimate {
  double value = 0.0;
  GridFunction extremal;  // E g^2 = 1, sign fixed by the largest component
  std::string constraint;
  double rayleigh_residual = 0.0;
  std::vector<std::pair<double, double>> refinement_trace;  // (h, value)
  bool infinite = false;  // widening protocol detected R = +inf
};

PoincareEstimate poincare_constant(const GridDensity& d);
PoincareEstimate restricted_poincare(const GridDensity& d);
PoincareEstimate truncated_poincare(const GridDensity& d, double T);

// sup over 0 <= x <= T of  integral_x^T y p(y) dy / p(x), combined with the
// mirrored left-tail statistic; a classical sufficient bound for R.
double borovkov_utev_ratio(const GridDensity& d, double T);

}  // namespace fclt
