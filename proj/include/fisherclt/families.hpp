#pragma once
#include <map>
#include <string>
#include <vector>

#include "fisherclt/grid.hpp"

namespace fclt {

// Declarative description of a base law.  Families:
//   normal           params: mu (0), sigma (1)
//   exponential      params: rate (1); centred so the mean is 0
//   gamma            params: shape, rate (1); supported on [0, inf)
//   uniform          params: a (-1), b (1)
//   laplace          params: mu (0), b (1)
//   gaussian_mixture weights/locs/scales vectors (scales are std devs)
//   table            table_x/table_p vectors, linear interpolation between
struct DistributionSpec {
  std::string family;
  std::map<std::string, double> params;
  std::vector<double> weights, locs, scales;  // gaussian_mixture
  std::vector<double> table_x, table_p;       // table
  bool center_and_scale = false;
};

// Sample a spec on `points` uniform nodes.  With halfwidth <= 0 the domain is
// chosen so each unbounded tail holds less than 1e-13 of the mass (and at
// least 12 standard deviations); support endpoints land exactly on nodes.
// A positive halfwidth requests [mean - hw, mean + hw] clipped to the
// support; it must still capture all but 1e-12 of the mass.
// The result carries pdf/refine/widen hooks and is renormalized to mass 1.
GridDensity materialize(const DistributionSpec& spec, int points = 4096,
                        double halfwidth = 0.0);

// Convenience constructors used throughout the tests.
DistributionSpec spec_normal(double mu = 0.0, double sigma = 1.0);
DistributionSpec spec_exponential(double rate = 1.0);
DistributionSpec spec_gamma(double shape, double rate = 1.0);
DistributionSpec spec_uniform(double a = -1.0, double b = 1.0);
DistributionSpec spec_laplace(double mu = 0.0, double b = 1.0);
DistributionSpec spec_mixture(std::vector<double> weights,
                              std::vector<double> locs,
                              std::vector<double> scales);

// Parse "k=v,k=v" CLI parameter strings into a spec for the named family.
DistributionSpec spec_from_params(const std::string& family,
                                  const std::map<std::string, double>& kv,
                                  const std::vector<double>& list_a = {},
                                  const std::vector<double>& list_b = {},
                                  const std::vector<double>& list_c = {});

}  // namespace fclt
