// Python bindings: density construction plus the headline functionals.
// Reports cross the boundary as plain dicts so downstream code needs no
// wrapper types; +inf flags become float('inf') alongside a boolean.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "fisherclt/convolution.hpp"
#include "fisherclt/families.hpp"
#include "fisherclt/grid.hpp"
#include "fisherclt/harness.hpp"
#include "fisherclt/info.hpp"
#include "fisherclt/poincare.hpp"
#include "fisherclt/projection.hpp"

namespace py = pybind11;
using namespace fclt;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

DistributionSpec make_spec(const std::string& family,
                           const std::map<std::string, double>& params,
                           const std::vector<double>& weights,
                           const std::vector<double>& locs,
                           const std::vector<double>& scales,
                           const std::vector<double>& table_x,
                           const std::vector<double>& table_p) {
  if (family == "table") return spec_from_params(family, params, table_x,
                                                 table_p);
  return spec_from_params(family, params, weights, locs, scales);
}

GridDensity make_density(const std::string& family,
                         const std::map<std::string, double>& params,
                         int points, double halfwidth,
                         const std::vector<double>& weights,
                         const std::vector<double>& locs,
                         const std::vector<double>& scales,
                         const std::vector<double>& table_x,
                         const std::vector<double>& table_p) {
  return materialize(
      make_spec(family, params, weights, locs, scales, table_x, table_p),
      points, halfwidth);
}

py::dict info_dict(const GridDensity& d) {
  const InfoSummary s = info_summary(d);
  py::dict out;
  out["fisher_I"] = s.infinite ? kInf : s.fisher_I;
  out["standardized_J"] = s.infinite ? kInf : s.standardized_J;
  out["rel_entropy_D"] = s.rel_entropy_D;
  out["sigma2"] = s.sigma2;
  out["infinite"] = s.infinite;
  out["refinement_trace"] = s.refinement_trace;
  return out;
}

py::dict poincare_dict(const GridDensity& d) {
  const PoincareEstimate full = poincare_constant(d);
  const PoincareEstimate restr = restricted_poincare(d);
  py::dict out;
  out["R"] = full.infinite ? kInf : full.value;
  out["R_infinite"] = full.infinite;
  out["R_residual"] = full.rayleigh_residual;
  out["R_restricted"] = restr.infinite ? kInf : restr.value;
  out["R_restricted_infinite"] = restr.infinite;
  out["R_restricted_residual"] = restr.rayleigh_residual;
  return out;
}

py::dict chain_dict(const GridDensity& d) {
  const DistanceChain c = distance_chain(d);
  py::dict out;
  out["sup_diff"] = c.sup_diff;
  out["tv"] = c.tv;
  out["hellinger"] = c.hellinger;
  out["J"] = c.J_infinite ? kInf : c.J;
  out["J_infinite"] = c.J_infinite;
  return out;
}

py::dict drop_dict(const GridDensity& d) {
  const FisherDropReport r = fisher_drop(d);
  py::dict out;
  out["infinite"] = r.infinite;
  out["I_single"] = r.I_single;
  out["I_pair_scaled"] = r.I_pair_scaled;
  out["drop"] = r.drop;
  out["residual_sq"] = r.residual_sq;
  out["identity_gap"] = r.identity_gap;
  out["lambda_opt"] = r.lambda_opt;
  return out;
}

py::dict sweep_dict(const std::string& family,
                    const std::map<std::string, double>& params,
                    const std::vector<int>& n_set, int points,
                    const std::vector<double>& weights,
                    const std::vector<double>& locs,
                    const std::vector<double>& scales) {
  const SweepReport r = verify_o1n(
      make_spec(family, params, weights, locs, scales, {}, {}), n_set,
      points);
  py::dict out;
  out["family"] = r.family_label;
  out["all_ok"] = r.all_ok;
  py::dict c;
  c["R"] = r.constants.R_infinite ? kInf : r.constants.R;
  c["R_star"] = r.constants.Rstar_infinite ? kInf : r.constants.R_star;
  c["sigma2"] = r.constants.sigma2;
  c["J_X"] = r.constants.JX_infinite ? kInf : r.constants.J_X;
  c["D_X"] = r.constants.D_X;
  c["skewness_s"] = r.constants.skewness_s;
  out["constants"] = c;
  py::list rows;
  for (const auto& row : r.rows) {
    py::dict pr;
    pr["n"] = row.n;
    pr["J"] = row.J_infinite ? kInf : row.J;
    pr["J_infinite"] = row.J_infinite;
    pr["bound_J_sharp"] = row.bound_J_sharp;
    pr["bound_J_thm"] = row.bound_J_thm;
    pr["D"] = row.D;
    pr["bound_D"] = row.bound_D;
    pr["skew_floor"] = row.skew_floor;
    pr["nJ"] = row.nJ;
    pr["sup_diff"] = row.sup_diff;
    pr["tv"] = row.tv;
    pr["hellinger"] = row.hellinger;
    pr["flags"] = row.flags;
    rows.append(pr);
  }
  out["rows"] = rows;
  return out;
}

py::dict debruijn_dict(const GridDensity& d, int nodes) {
  const DeBruijnPath p = debruijn_entropy(d, nodes);
  py::dict out;
  out["t_nodes"] = p.t_nodes;
  out["J_path"] = p.J_path;
  out["D_integral"] = p.D_integral;
  out["D_direct"] = p.D_direct;
  out["D_clipped"] = p.D_clipped;
  return out;
}

py::dict tail_dict(const GridDensity& d, const std::vector<double>& radii) {
  const TailProfile t = tail_score_mass(d, radii);
  py::dict out;
  out["radii"] = t.radii;
  out["psi"] = t.psi;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Grid-based Fisher information, Poincare constants, and O(1/n) "
      "convergence-rate checks for sums of independent random variables";

  py::class_<GridDensity>(m, "Density")
      .def_property_readonly("x_min",
                             [](const GridDensity& d) { return d.x_min; })
      .def_property_readonly("h", [](const GridDensity& d) { return d.h; })
      .def_property_readonly("mean",
                             [](const GridDensity& d) { return d.mean; })
      .def_property_readonly("variance",
                             [](const GridDensity& d) { return d.variance; })
      .def("__len__", [](const GridDensity& d) { return d.n(); })
      .def("values",
           [](const GridDensity& d) { return d.values; },
           "density samples p(x_i)")
      .def("xs",
           [](const GridDensity& d) {
             std::vector<double> xs(d.n());
             for (std::size_t i = 0; i < xs.size(); ++i)
               xs[i] = d.x(std::ptrdiff_t(i));
             return xs;
           },
           "grid abscissas x_i")
      .def("standardize",
           [](const GridDensity& d) { return standardize(d); },
           "affine image with mean 0 and variance 1")
      .def("refine",
           [](const GridDensity& d, int level) {
             if (!d.refine) throw std::runtime_error("no refine hook");
             return d.refine(level);
           },
           py::arg("level") = 1, "same domain at step h / 2^level");

  m.def("density", &make_density, py::arg("family"),
        py::arg("params") = std::map<std::string, double>{},
        py::arg("points") = 4096, py::arg("halfwidth") = 0.0,
        py::arg("weights") = std::vector<double>{},
        py::arg("locs") = std::vector<double>{},
        py::arg("scales") = std::vector<double>{},
        py::arg("table_x") = std::vector<double>{},
        py::arg("table_p") = std::vector<double>{},
        "sample a named family on a uniform grid (normal, exponential, "
        "gamma, uniform, laplace, gaussian_mixture, table)");

  m.def("info", &info_dict, py::arg("density"),
        "Fisher information I, standardized J, relative entropy D");
  m.def("poincare", &poincare_dict, py::arg("density"),
        "Poincare constant and the restricted (zero-mean-derivative) "
        "variant");
  m.def("distance_chain", &chain_dict, py::arg("density"),
        "sup/tv/Hellinger distances to the standard normal (standardized "
        "input)");
  m.def("tail_profile", &tail_dict, py::arg("density"), py::arg("radii"),
        "psi(R) = sigma^2 E[rho^2; |X - m| >= sigma R]");
  m.def("standardized_sum",
        [](const GridDensity& d, int n) { return standardized_sum(d, n); },
        py::arg("density"), py::arg("n"),
        "density of (X_1 + ... + X_n)/sqrt(n sigma^2)");
  m.def("convolve",
        [](const GridDensity& a, const GridDensity& b) {
          return convolve(a, b);
        },
        py::arg("d1"), py::arg("d2"), "density of the independent sum");
  m.def("fisher_drop", &drop_dict, py::arg("density"),
        "information drop I(Y) - I((Y1+Y2)/sqrt(2)) and its residual "
        "identity");
  m.def("sweep", &sweep_dict, py::arg("family"),
        py::arg("params") = std::map<std::string, double>{},
        py::arg("n_set") = kDefaultNSet, py::arg("points") = 4096,
        py::arg("weights") = std::vector<double>{},
        py::arg("locs") = std::vector<double>{},
        py::arg("scales") = std::vector<double>{},
        "O(1/n) bound verification sweep over sum sizes");
  m.def("debruijn", &debruijn_dict, py::arg("density"),
        py::arg("nodes") = 48,
        "entropy via the information integral along the Gaussian "
        "interpolation (standardized input)");
}
