#include "fisherclt/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fisherclt/fft.hpp"

namespace fclt {

namespace {

void require_congruent(const GridDensity& a, const GridDensity& b,
                       const char* who) {
  if (std::abs(a.h - b.h) > 1e-9 * a.h)
    throw std::invalid_argument(std::string(who) + ": step mismatch");
}

// Clip FFT dust, renormalize to mass 1, refresh quadrature moments.
void finalize_density(GridDensity& g) {
  for (auto& v : g.values) v = std::max(v, 0.0);
  const double mass = trapezoid(g.values, g.h);
  if (!(mass > 0.0)) throw std::invalid_argument("density lost its mass");
  for (auto& v : g.values) v /= mass;
  const std::size_t n = g.n();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    mean += trap_w(i, n, g.h) * g.values[i] * g.x(std::ptrdiff_t(i));
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = g.x(std::ptrdiff_t(i)) - mean;
    var += trap_w(i, n, g.h) * g.values[i] * dx * dx;
  }
  g.mean = mean;
  g.variance = var;
}

}  // namespace

GridDensity convolve(const GridDensity& a, const GridDensity& b) {
  require_congruent(a, b, "convolve");
  GridDensity out;
  out.h = a.h;
  out.x_min = a.x_min + b.x_min;
  out.values = fft_convolve(a.values, b.values);
  for (auto& v : out.values) v *= a.h;
  out.edge_left = a.edge_left && b.edge_left;
  out.edge_right = a.edge_right && b.edge_right;
  finalize_density(out);
  if (a.refine && b.refine) {
    auto ra = a.refine, rb = b.refine;
    out.refine = [ra, rb](int lev) { return convolve(ra(lev), rb(lev)); };
  }
  return out;
}

GridDensity standardized_sum(const GridDensity& d, int n) {
  if (n < 1 || n > 4096)
    throw std::invalid_argument("standardized_sum: n out of range");
  if (n == 1) return standardize(d);

  // Mass-one lattice weights keep the spectral powers in floating range.
  std::vector<double> q(d.values);
  for (auto& v : q) v *= d.h;
  const std::vector<double> pw = fft_self_power(q, n);

  const double mean_s = double(n) * d.mean;
  const double sd_s = std::sqrt(double(n) * d.variance);
  const double lat0 = double(n) * d.x_min;
  const std::ptrdiff_t len = std::ptrdiff_t(pw.size());

  double c = 12.0;
  std::ptrdiff_t i0 = 0, i1 = len - 1;
  for (int attempt = 0; attempt < 4; ++attempt) {
    i0 = std::max<std::ptrdiff_t>(
        0, std::ptrdiff_t(std::floor((mean_s - c * sd_s - lat0) / d.h)));
    i1 = std::min<std::ptrdiff_t>(
        len - 1, std::ptrdiff_t(std::ceil((mean_s + c * sd_s - lat0) / d.h)));
    // Accept when less than 1e-9 of the mass sits within 8h of a cut edge.
    double edge_mass = 0.0;
    if (i0 > 0)
      for (std::ptrdiff_t i = i0; i < std::min(i0 + 9, len); ++i)
        edge_mass += std::max(pw[std::size_t(i)], 0.0);
    if (i1 < len - 1)
      for (std::ptrdiff_t i = std::max(i1 - 8, std::ptrdiff_t(0)); i <= i1; ++i)
        edge_mass += std::max(pw[std::size_t(i)], 0.0);
    if (edge_mass < 1e-9 || (i0 == 0 && i1 == len - 1)) break;
    c *= 1.25;
  }

  GridDensity raw;
  raw.h = d.h;
  raw.x_min = lat0 + double(i0) * d.h;
  raw.values.assign(pw.begin() + i0, pw.begin() + i1 + 1);
  for (auto& v : raw.values) v /= d.h;  // back to density scale
  raw.edge_left = d.edge_left && i0 == 0;
  raw.edge_right = d.edge_right && i1 == len - 1;
  finalize_density(raw);

  GridDensity out = affine_scale(raw, -raw.mean / std::sqrt(raw.variance),
                                 1.0 / std::sqrt(raw.variance));
  {  // exact grid moments of the standardized result
    const std::size_t m = out.n();
    double mean = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      mean += trap_w(i, m, out.h) * out.values[i] * out.x(std::ptrdiff_t(i));
    out.mean = mean;
    double var = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double dx = out.x(std::ptrdiff_t(i)) - mean;
      var += trap_w(i, m, out.h) * out.values[i] * dx * dx;
    }
    out.variance = var;
  }
  if (d.refine) {
    auto base = d.refine;
    out.refine = [base, n](int lev) {
      return standardized_sum(base(lev), n);
    };
  }
  if (d.widen) {
    auto base = d.widen;
    out.widen = [base, n](double f) { return standardized_sum(base(f), n); };
  }
  return out;
}

SumSequence standardized_sums(const GridDensity& d, std::vector<int> n_set) {
  SumSequence seq;
  seq.base = d;
  std::sort(n_set.begin(), n_set.end());
  n_set.erase(std::unique(n_set.begin(), n_set.end()), n_set.end());
  seq.n_set = n_set;
  for (std::size_t k = 0; k < n_set.size(); ++k) {
    seq.entries.emplace(n_set[k], standardized_sum(d, n_set[k]));
    if (k > 0 && n_set[k] == 2 * n_set[k - 1])
      seq.doubling_index.push_back(int(k));
  }
  return seq;
}

ScoreField sum_score_projection(const GridDensity& d1, const GridDensity& d2) {
  require_congruent(d1, d2, "sum_score_projection");
  const ScoreField sf2 = score(d2);

  std::vector<double> weighted(d2.n());
  for (std::size_t j = 0; j < d2.n(); ++j)
    weighted[j] =
        sf2.valid_mask[j] ? d2.values[j] * sf2.score.values[j] : 0.0;

  std::vector<double> num = fft_convolve(d1.values, weighted);
  std::vector<double> den = fft_convolve(d1.values, d2.values);
  for (auto& v : num) v *= d1.h;
  for (auto& v : den) v *= d1.h;

  const double dmax = *std::max_element(den.begin(), den.end());
  const double floor_abs = 1e-12 * dmax;

  ScoreField out;
  out.floor = 1e-12;
  out.score.x_min = d1.x_min + d2.x_min;
  out.score.h = d1.h;
  out.score.values.assign(den.size(), 0.0);
  out.valid_mask.assign(den.size(), 0);
  for (std::size_t k = 0; k < den.size(); ++k) {
    if (den[k] >= floor_abs) {
      out.valid_mask[k] = 1;
      out.score.values[k] = num[k] / den[k];
    }
  }
  out.density_ref = convolve(d1, d2);
  return out;
}

FisherDropReport fisher_drop(const GridDensity& d) {
  FisherDropReport rep;
  const FisherValue fi = fisher_information(d);
  rep.I_single = fi.value;
  if (fi.infinite) {
    rep.infinite = true;
    return rep;
  }

  const GridDensity pair = convolve(d, d);
  const GridDensity pair_scaled =
      affine_scale(pair, 0.0, 1.0 / std::sqrt(2.0));
  const FisherValue fi2 = fisher_information(pair_scaled);
  if (fi2.infinite) {
    rep.infinite = true;
    return rep;
  }
  rep.I_pair_scaled = fi2.value;
  rep.drop = fi.value - fi2.value;

  // Exact variance form of the drop: 2 E (rho_bar(S) - (rho1 + rho2)/2)^2.
  const ScoreField sf = score(d);
  const ScoreField sp = sum_score_projection(d, d);
  const std::size_t n = d.n();
  std::vector<double> row_sum(n, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < std::ptrdiff_t(n); ++ii) {
    const std::size_t i = std::size_t(ii);
    if (!sf.valid_mask[i]) continue;
    const double wi = trap_w(i, n, d.h) * d.values[i];
    const double ri = sf.score.values[i];
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!sf.valid_mask[j] || !sp.valid_mask[i + j]) continue;
      const double wj = trap_w(j, n, d.h) * d.values[j];
      const double diff =
          sp.score.values[i + j] - 0.5 * (ri + sf.score.values[j]);
      acc += wj * diff * diff;
    }
    row_sum[i] = wi * acc;
  }
  double resid = 0.0;
  for (double v : row_sum) resid += v;  // fixed order: thread-count invariant
  rep.residual_sq = 2.0 * resid;
  rep.identity_gap = std::abs(rep.drop - rep.residual_sq);

  const double j1 = d.variance * fi.value - 1.0;
  const double j2 = pair_scaled.variance * fi2.value - 1.0;
  rep.lambda_opt = j1 > 1e-12 ? j2 / j1 : 0.0;
  return rep;
}

}  // namespace fclt
