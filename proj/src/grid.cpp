#include "fisherclt/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fclt {

double trapezoid(const std::vector<double>& v, double h) {
  if (v.size() < 2) return 0.0;
  double acc = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) acc += v[i];
  return acc * h;
}

static double weighted_moment(const GridDensity& d, double center, int r) {
  const std::size_t n = d.n();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = d.x(std::ptrdiff_t(i)) - center;
    acc += trap_w(i, n, d.h) * d.values[i] * std::pow(dx, r);
  }
  return acc;
}

double moments(const GridDensity& d, int r) {
  if (r < 1 || r > 8) throw std::invalid_argument("moments: r must be 1..8");
  if (r == 1) return 0.0;  // centred first moment
  return weighted_moment(d, d.mean, r);
}

GridDensity affine_scale(const GridDensity& d, double shift, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("affine_scale: scale <= 0");
  GridDensity out;
  out.x_min = shift + scale * d.x_min;
  out.h = scale * d.h;
  out.values.resize(d.n());
  for (std::size_t i = 0; i < d.n(); ++i) out.values[i] = d.values[i] / scale;
  out.mean = shift + scale * d.mean;
  out.variance = scale * scale * d.variance;
  out.edge_left = d.edge_left;
  out.edge_right = d.edge_right;
  if (d.pdf) {
    auto base = d.pdf;
    out.pdf = [base, shift, scale](double y) {
      return base((y - shift) / scale) / scale;
    };
  }
  if (d.refine) {
    auto base = d.refine;
    out.refine = [base, shift, scale](int lev) {
      return affine_scale(base(lev), shift, scale);
    };
  }
  if (d.widen) {
    auto base = d.widen;
    out.widen = [base, shift, scale](double f) {
      return affine_scale(base(f), shift, scale);
    };
  }
  return out;
}

static void refresh_moments(GridDensity& d) {
  const std::size_t n = d.n();
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    m += trap_w(i, n, d.h) * d.values[i] * d.x(std::ptrdiff_t(i));
  d.mean = m;
  d.variance = weighted_moment(d, m, 2);
}

GridDensity standardize(const GridDensity& d) {
  if (!(d.variance > 0.0))
    throw std::invalid_argument("standardize: variance <= 0");
  const double sd = std::sqrt(d.variance);
  GridDensity out = affine_scale(d, -d.mean / sd, 1.0 / sd);
  refresh_moments(out);  // grid-quadrature mean/variance, ~0 and ~1
  return out;
}

GridDensity conditional_truncate(const GridDensity& d, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("conditional_truncate: T <= 0");
  const double lo = std::max(d.x_min, -T);
  const double hi = std::min(d.x_max(), T);
  if (!(hi > lo))
    throw std::invalid_argument("conditional_truncate: empty window");

  GridDensity out;
  if (d.pdf) {
    // Re-sample the analytic density so the window edges land on nodes.
    const std::size_t n = d.n();
    out.x_min = lo;
    out.h = (hi - lo) / double(n - 1);
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      out.values[i] = std::max(0.0, d.pdf(out.x(std::ptrdiff_t(i))));
    const double mass = trapezoid(out.values, out.h);
    if (!(mass > 0.0))
      throw std::invalid_argument("conditional_truncate: no mass in window");
    for (auto& v : out.values) v /= mass;
    auto base_pdf = d.pdf;
    out.pdf = [base_pdf, lo, hi, mass](double y) {
      return (y < lo || y > hi) ? 0.0 : base_pdf(y) / mass;
    };
    out.edge_left = out.values.front() > 0.0;
    out.edge_right = out.values.back() > 0.0;
    GridDensity model = d;  // keep the analytic parent alive in the hook
    out.refine = [model, T](int lev) {
      GridDensity fine = model.refine ? model.refine(lev) : model;
      return conditional_truncate(fine, T);
    };
  } else {
    // No analytic model: crop to the nodes inside the window.
    std::ptrdiff_t i0 = std::ptrdiff_t(std::ceil((lo - d.x_min) / d.h - 1e-9));
    std::ptrdiff_t i1 = std::ptrdiff_t(std::floor((hi - d.x_min) / d.h + 1e-9));
    i0 = std::max<std::ptrdiff_t>(i0, 0);
    i1 = std::min<std::ptrdiff_t>(i1, std::ptrdiff_t(d.n()) - 1);
    if (i1 - i0 < 7)
      throw std::invalid_argument("conditional_truncate: window too small");
    out.x_min = d.x(i0);
    out.h = d.h;
    out.values.assign(d.values.begin() + i0, d.values.begin() + i1 + 1);
    const double mass = trapezoid(out.values, out.h);
    if (!(mass > 0.0))
      throw std::invalid_argument("conditional_truncate: no mass in window");
    for (auto& v : out.values) v /= mass;
    out.edge_left = out.values.front() > 0.0;
    out.edge_right = out.values.back() > 0.0;
    GridDensity parent = d;
    if (parent.refine) {
      auto base = parent.refine;
      out.refine = [base, T](int lev) {
        return conditional_truncate(base(lev), T);
      };
    }
  }
  refresh_moments(out);
  return out;
}

void check_density(const GridDensity& d) {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument("GridDensity: " + msg);
  };
  if (!(d.h > 0.0)) fail("step must be positive");
  if (d.n() < 8) fail("needs at least 8 nodes");
  for (double v : d.values)
    if (!(v >= 0.0) || !std::isfinite(v)) fail("negative or non-finite value");
  const double mass = trapezoid(d.values, d.h);
  if (std::abs(mass - 1.0) > 1e-9) fail("mass deviates from 1");
  if (!d.edge_left && d.values.front() * d.h > 1e-9)
    fail("left boundary mass not captured");
  if (!d.edge_right && d.values.back() * d.h > 1e-9)
    fail("right boundary mass not captured");
  GridDensity probe = d;
  refresh_moments(probe);
  if (std::abs(probe.mean - d.mean) > 1e-9 * std::max(1.0, std::abs(d.mean)))
    fail("stale mean");
  if (std::abs(probe.variance - d.variance) > 1e-9 * probe.variance)
    fail("stale variance");
}

double interp_linear(const GridFunction& f, double x) {
  const double t = (x - f.x_min) / f.h;
  if (t < 0.0) return 0.0;
  const double last = double(f.n()) - 1.0;
  if (t > last) return 0.0;
  if (t >= last) return f.values.back();
  const std::size_t i = std::size_t(t);
  const double frac = t - double(i);
  return f.values[i] * (1.0 - frac) + f.values[i + 1] * frac;
}

}  // namespace fclt
