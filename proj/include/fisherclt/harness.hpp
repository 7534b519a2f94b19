#pragma once
#include <string>
#include <vector>

#include "fisherclt/convolution.hpp"
#include "fisherclt/families.hpp"
#include "fisherclt/grid.hpp"
#include "fisherclt/info.hpp"

namespace fclt {

inline const std::vector<int> kDefaultNSet = {1, 2, 4, 8, 16, 32, 64};
inline const std::vector<double> kDefaultRadii = {0.0, 0.5, 1.0, 2.0, 3.0, 4.0};

// One row of the O(1/n) verification sweep for U_n.
// flags is a deterministic "key=ok|fail|na" list, recomputable from the
// numeric columns; "na" marks a bound whose hypothesis fails (vacuous, not
// a violation), e.g. the headline-rate form when 2 R* < sigma^2.
struct SweepRow {
  int n = 0;
  double J = 0.0;
  bool J_infinite = false;
  double bound_J_sharp = 0.0;
  double bound_J_thm = 0.0;
  double D = 0.0;
  double bound_D = 0.0;
  double skew_floor = 0.0;
  double nJ = 0.0;
  double sup_diff = 0.0, tv = 0.0, hellinger = 0.0;
  std::string flags;
};

struct SweepConstants {
  double R = 0.0, R_star = 0.0;
  double sigma2 = 0.0;
  double J_X = 0.0, D_X = 0.0;
  double skewness_s = 0.0;
  bool R_infinite = false, Rstar_infinite = false, JX_infinite = false;
};

struct SweepReport {
  std::string family_label;
  std::vector<SweepRow> rows;
  SweepConstants constants;
  bool all_ok = true;  // every asserted (non-na) check passed
};

// Full verification sweep: for each n in n_set, J(U_n) against the sharp
// two-point bound 2R* J/(2R* + (n-1)) and the headline O(1/n) form
// 2R* J / n, D(U_n) against 2R D(X)/n, the moment floor m3^2/(m2 m4),
// and the distance chain sup <= (1+sqrt(6/pi)) sqrt J, tv <= sqrt(2 J),
// hellinger <= sqrt(J/2) wherever J is finite.
SweepReport verify_o1n(const DistributionSpec& spec,
                       const std::vector<int>& n_set = kDefaultNSet,
                       int points = 4096);
SweepReport verify_o1n_density(const GridDensity& base,
                               const std::string& label,
                               const std::vector<int>& n_set = kDefaultNSet);

// Single two-fold step with the intermediate variance inequality
// E (g(Y) + Y)^2 >= J(U2)^2 / J(Y) for g(y) = 2 E rho_bar(y + Y2).
struct TwoFoldReport {
  double J1 = 0.0, J2 = 0.0;
  double R_star = 0.0;
  double bound = 0.0;        // 2R* J1 / (2R* + 1)
  double slack = 0.0;        // bound - J2
  double e_gy_sq = 0.0;      // E (g(Y) + Y)^2
  double rhs_ratio = 0.0;    // J2^2 / J1
  double intermediate_slack = 0.0;
  bool vacuous = false;
};

TwoFoldReport verify_two_fold(const DistributionSpec& spec, int points = 4096);
TwoFoldReport verify_two_fold_density(const GridDensity& base);

// J(U_n) >= m3(U_n)^2 / (m2 m4)(U_n) row by row; the floor times n tends to
// s^2/3 for skewness s, pinning the O(1/n) rate from below.
struct FloorRow {
  int n = 0;
  double J = 0.0, floor = 0.0, nJ = 0.0;
  bool J_infinite = false, ok = true;
};
struct FloorReport {
  std::vector<FloorRow> rows;
  double skewness_s = 0.0, s2_over_3 = 0.0;
  bool all_ok = true;
};

FloorReport skewness_floor(const DistributionSpec& spec,
                           const std::vector<int>& n_set = kDefaultNSet,
                           int points = 4096);

// J along the doubling sequence S_k = U_{2^k}: divergence flags first, then
// finite and decreasing with shrinking decrements.
struct DoublingReport {
  std::vector<int> n;              // 2^k
  std::vector<double> J;
  std::vector<std::uint8_t> infinite;
  int first_finite_n = -1;
  bool monotone_ok = true, diffs_shrink_ok = true;
};

DoublingReport monotone_doubling(const DistributionSpec& spec, int k_max = 6,
                                 int points = 4096);

// psi_n(R) matrix over the sweep: rows follow n_set, columns the radii.
struct TailMatrix {
  std::vector<int> n_set;
  std::vector<double> radii;
  std::vector<std::vector<double>> psi;       // psi[row][col]
  std::vector<double> envelope;               // max over rows per radius
  bool rows_monotone = true;                  // nonincreasing in R per row
};

TailMatrix tail_class_profile(const DistributionSpec& spec,
                              const std::vector<int>& n_set = kDefaultNSet,
                              const std::vector<double>& radii = kDefaultRadii,
                              int points = 4096);

// Atoms smoothed by a centred Gaussian of variance tau, then swept: the
// regularized-discrete regime where every constant stays finite.
SweepReport smoothed_discrete_demo(const std::vector<double>& atoms,
                                   const std::vector<double>& weights,
                                   double tau,
                                   const std::vector<int>& n_set = kDefaultNSet,
                                   int points = 4096);

}  // namespace fclt
