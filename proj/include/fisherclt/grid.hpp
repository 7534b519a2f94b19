#pragma once
#include <cstddef>
#include <functional>
#include <vector>

namespace fclt {

// Density sampled on a uniform grid x_i = x_min + i*h, with cached moments.
// Instances are immutable by convention: every operation returns a new value.
//
// The three hooks make grid-convergence studies possible on derived objects:
//   pdf     pointwise analytic density (families and their affine images only)
//   refine  rebuild with step h / 2^level on the same domain
//   widen   rebuild on a domain enlarged by the given factor (analytic only)
struct GridDensity {
  double x_min = 0.0;
  double h = 0.0;
  std::vector<double> values;
  double mean = 0.0;
  double variance = 1.0;
  bool edge_left = false;   // support boundary sits exactly on the first node
  bool edge_right = false;  // likewise on the last node
  std::function<double(double)> pdf;
  std::function<GridDensity(int)> refine;
  std::function<GridDensity(double)> widen;

  std::size_t n() const { return values.size(); }
  double x(std::ptrdiff_t i) const { return x_min + h * double(i); }
  double x_max() const { return x(std::ptrdiff_t(n()) - 1); }
};

// Plain function samples on a uniform grid (projections, extremals, test f's).
struct GridFunction {
  double x_min = 0.0;
  double h = 0.0;
  std::vector<double> values;

  std::size_t n() const { return values.size(); }
  double x(std::ptrdiff_t i) const { return x_min + h * double(i); }
};

// Trapezoid quadrature over the whole grid.
double trapezoid(const std::vector<double>& v, double h);

// Trapezoid weight of node i in a grid of n nodes (h, halved at the ends).
inline double trap_w(std::size_t i, std::size_t n, double h) {
  return (i == 0 || i + 1 == n) ? 0.5 * h : h;
}

// Centred moment m_r = E (X - m)^r by quadrature, r in 1..8.
double moments(const GridDensity& d, int r);

// Affine map to mean 0, variance 1 using the grid-quadrature moments.
GridDensity standardize(const GridDensity& d);

// Law conditioned on |X| <= T, renormalized.  Re-samples from the analytic
// pdf when one is attached (exact edges at +-T); otherwise crops to the
// nodes inside the window.
GridDensity conditional_truncate(const GridDensity& d, double T);

// Law of shift + scale * X as a pure grid relabeling (no resampling).
GridDensity affine_scale(const GridDensity& d, double shift, double scale);

// Enforce the GridDensity contract (mass 1, captured support, fresh moments).
// Throws std::invalid_argument with a diagnostic on violation.
void check_density(const GridDensity& d);

// Linear interpolation of grid samples (0 outside the covered range).
double interp_linear(const GridFunction& f, double x);

}  // namespace fclt
