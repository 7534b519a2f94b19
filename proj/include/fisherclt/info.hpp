#pragma once
#include <cstdint>
#include <utility>
#include <vector>

#include "fisherclt/grid.hpp"

namespace fclt {

// Numerical score rho = p'/p on the region where the density is resolvable.
// valid_mask marks nodes with p >= floor * max(p); score values outside the
// mask are 0 and must not be used.
struct ScoreField {
  GridFunction score;
  std::vector<std::uint8_t> valid_mask;
  GridDensity density_ref;
  double floor = 1e-12;
};

// Fisher information with divergence detection.  trace holds (h, I(h)) for
// the refinement ladder actually evaluated.
struct FisherValue {
  double value = 0.0;
  bool infinite = false;
  std::vector<std::pair<double, double>> trace;
};

struct InfoSummary {
  double fisher_I = 0.0;
  double standardized_J = 0.0;
  double rel_entropy_D = 0.0;
  double sigma2 = 0.0;
  bool infinite = false;
  std::vector<std::pair<double, double>> refinement_trace;
};

// Distances to the standard normal for a standardized density.
struct DistanceChain {
  double sup_diff = 0.0;
  double tv = 0.0;
  double hellinger = 0.0;
  double J = 0.0;
  bool J_infinite = false;
};

// psi(R) = sigma^2 E[rho(X)^2 1{|X - m| >= sigma R}] per requested radius.
struct TailProfile {
  std::vector<double> radii;
  std::vector<double> psi;
};

// Centred log-derivative of p on each contiguous masked block (one-sided at
// block ends).  floor_rel <= 0 selects the default 1e-12.
ScoreField score(const GridDensity& d, double floor_rel = 1e-12);

// Single-level masked integral E rho^2 at the density's own resolution.
// with_jump_penalty adds 4 (sqrt(p_edge) - sqrt(p_beyond))^2 / h at every
// mask boundary (p_beyond = 0 past the grid ends): the h-scale Dirichlet
// cost of the drop.  At a genuine support edge with positive density this
// term grows like 1/h under refinement, which is what lets the refinement
// protocol flag I = +inf for laws like the uniform or the exponential.
double fisher_integral(const GridDensity& d, double floor_rel = 1e-12,
                       bool with_jump_penalty = true);

// Three-level refinement protocol: evaluates fisher_integral at h, h/2, h/4
// (via d.refine), flags divergence when the ladder keeps growing without
// contraction, otherwise extrapolates the geometric tail of the increments.
FisherValue fisher_information(const GridDensity& d);

// J = sigma^2 I - 1 >= 0, the standardized (scale-free) information.
FisherValue standardized_fisher(const GridDensity& d);

// D = E log(p / phi) against the normal matched to the grid mean/variance.
// The integrand is taken as 0 where p = 0.
double relative_entropy(const GridDensity& d);

InfoSummary info_summary(const GridDensity& d);

// d must be standardized; compares against the standard normal on the grid.
DistanceChain distance_chain(const GridDensity& d);

TailProfile tail_score_mass(const GridDensity& d,
                            const std::vector<double>& radii);

// Contiguous runs of true entries in a mask: [first, last] index pairs.
std::vector<std::pair<std::size_t, std::size_t>> mask_blocks(
    const std::vector<std::uint8_t>& mask);

}  // namespace fclt
