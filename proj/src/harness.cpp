#include "fisherclt/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fisherclt/poincare.hpp"

namespace fclt {

namespace {

constexpr double kTol = 1e-6;
const double kInvSqrt2Pi = 0.3989422804014326779;
const double kSupConst = 1.0 + std::sqrt(6.0 / 3.14159265358979323846);
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Distances {
  double sup = 0.0, tv = 0.0, hell = 0.0;
};

Distances normal_distances(const GridDensity& d) {
  Distances out;
  const std::size_t n = d.n();
  double hell2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = d.x(std::ptrdiff_t(i));
    const double ph = kInvSqrt2Pi * std::exp(-0.5 * x * x);
    const double w = trap_w(i, n, d.h);
    out.sup = std::max(out.sup, std::abs(d.values[i] - ph));
    out.tv += w * std::abs(d.values[i] - ph);
    const double ds = std::sqrt(d.values[i]) - std::sqrt(ph);
    hell2 += w * ds * ds;
  }
  out.hell = std::sqrt(std::max(hell2, 0.0));
  return out;
}

std::string flag(const char* key, int state) {  // 1 ok, 0 fail, -1 na
  std::string s(key);
  s += '=';
  s += state > 0 ? "ok" : (state == 0 ? "fail" : "na");
  return s;
}

}  // namespace

SweepReport verify_o1n_density(const GridDensity& base,
                               const std::string& label,
                               const std::vector<int>& n_set) {
  SweepReport rep;
  rep.family_label = label;

  const GridDensity X = standardize(base);
  auto& C = rep.constants;
  C.sigma2 = base.variance;
  const FisherValue jx = standardized_fisher(X);
  C.J_X = jx.value;
  C.JX_infinite = jx.infinite;
  C.D_X = relative_entropy(X);
  C.skewness_s = moments(X, 3);

  const PoincareEstimate pr = poincare_constant(X);
  C.R = pr.value;
  C.R_infinite = pr.infinite;
  const PoincareEstimate prs = restricted_poincare(X);
  C.R_star = prs.value;
  C.Rstar_infinite = prs.infinite;

  // standardized X: the bound hypothesis 2R* >= sigma^2 reads 2R* >= 1
  const bool j_usable = !C.JX_infinite && !C.Rstar_infinite;
  const bool thm_hypothesis = j_usable && 2.0 * C.R_star >= 1.0 - 1e-12;
  const bool d_usable = !C.R_infinite && std::isfinite(C.D_X);

  SumSequence seq = standardized_sums(X, n_set);

  for (int n : seq.n_set) {
    const GridDensity& U = seq.entries.at(n);
    SweepRow row;
    row.n = n;

    const FisherValue jn = standardized_fisher(U);
    row.J = jn.infinite ? kInf : jn.value;
    row.J_infinite = jn.infinite;
    row.nJ = jn.infinite ? kInf : double(n) * jn.value;
    row.D = relative_entropy(U);

    if (j_usable) {
      row.bound_J_sharp =
          2.0 * C.R_star / (2.0 * C.R_star + double(n - 1)) * C.J_X;
      row.bound_J_thm = 2.0 * C.R_star * C.J_X / double(n);
    } else {
      row.bound_J_sharp = row.bound_J_thm = kInf;
    }
    row.bound_D = d_usable ? 2.0 * C.R * C.D_X / double(n) : kInf;

    const double m2 = moments(U, 2), m3 = moments(U, 3), m4 = moments(U, 4);
    row.skew_floor = m3 * m3 / (m2 * m4);

    const Distances dist = normal_distances(U);
    row.sup_diff = dist.sup;
    row.tv = dist.tv;
    row.hellinger = dist.hell;

    int sharp_state = -1, thm_state = -1, d_state = -1, floor_state = 1,
        chain_state = 1;
    if (j_usable && !jn.infinite) {
      sharp_state = row.J <= row.bound_J_sharp + kTol ? 1 : 0;
      thm_state = thm_hypothesis ? (row.J <= row.bound_J_thm + kTol ? 1 : 0)
                                 : -1;
    }
    if (d_usable) d_state = row.D <= row.bound_D + kTol ? 1 : 0;
    if (!jn.infinite) {
      floor_state = row.J >= row.skew_floor - kTol ? 1 : 0;
      const double sj = std::sqrt(std::max(row.J, 0.0));
      const bool chain_ok = row.sup_diff <= kSupConst * sj + kTol &&
                            row.tv <= 2.0 * row.hellinger + kTol &&
                            row.tv <= std::sqrt(2.0 * std::max(row.J, 0.0)) + kTol &&
                            row.hellinger <= std::sqrt(std::max(row.J, 0.0) / 2.0) + kTol;
      chain_state = chain_ok ? 1 : 0;
    } else {
      chain_state = row.tv <= 2.0 * row.hellinger + kTol ? 1 : 0;
    }

    row.flags = flag("sharp", sharp_state) + ";" + flag("thm", thm_state) +
                ";" + flag("D", d_state) + ";" + flag("floor", floor_state) +
                ";" + flag("chain", chain_state);
    for (int st : {sharp_state, thm_state, d_state, floor_state, chain_state})
      if (st == 0) rep.all_ok = false;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

SweepReport verify_o1n(const DistributionSpec& spec,
                       const std::vector<int>& n_set, int points) {
  return verify_o1n_density(materialize(spec, points), spec.family, n_set);
}

TwoFoldReport verify_two_fold_density(const GridDensity& base) {
  TwoFoldReport rep;
  const GridDensity X = standardize(base);
  const FisherValue j1 = standardized_fisher(X);
  const PoincareEstimate prs = restricted_poincare(X);
  rep.R_star = prs.value;
  const GridDensity U2 = standardized_sum(X, 2);
  const FisherValue j2 = standardized_fisher(U2);

  if (j1.infinite || j2.infinite || prs.infinite) {
    rep.vacuous = true;
    rep.J1 = j1.infinite ? kInf : j1.value;
    rep.J2 = j2.infinite ? kInf : j2.value;
    return rep;
  }
  rep.J1 = j1.value;
  rep.J2 = j2.value;
  rep.bound = 2.0 * rep.R_star / (2.0 * rep.R_star + 1.0) * rep.J1;
  rep.slack = rep.bound - rep.J2;

  // intermediate variance inequality for g(y) = 2 E rho_bar(y + Y2)
  const ScoreField sp = sum_score_projection(X, X);
  const std::size_t n = X.n();
  std::vector<double> g(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!sp.valid_mask[i + j]) continue;
      acc += trap_w(j, n, X.h) * X.values[j] * sp.score.values[i + j];
    }
    g[i] = 2.0 * acc;
  }
  double egy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = g[i] + X.x(std::ptrdiff_t(i));
    egy += trap_w(i, n, X.h) * X.values[i] * v * v;
  }
  rep.e_gy_sq = egy;
  rep.rhs_ratio = rep.J1 > 1e-12 ? rep.J2 * rep.J2 / rep.J1 : 0.0;
  rep.intermediate_slack = rep.e_gy_sq - rep.rhs_ratio;
  return rep;
}

TwoFoldReport verify_two_fold(const DistributionSpec& spec, int points) {
  return verify_two_fold_density(materialize(spec, points));
}

FloorReport skewness_floor(const DistributionSpec& spec,
                           const std::vector<int>& n_set, int points) {
  FloorReport rep;
  const GridDensity X = standardize(materialize(spec, points));
  rep.skewness_s = moments(X, 3);
  rep.s2_over_3 = rep.skewness_s * rep.skewness_s / 3.0;
  SumSequence seq = standardized_sums(X, n_set);
  for (int n : seq.n_set) {
    const GridDensity& U = seq.entries.at(n);
    FloorRow row;
    row.n = n;
    const FisherValue jn = standardized_fisher(U);
    row.J_infinite = jn.infinite;
    row.J = jn.infinite ? kInf : jn.value;
    row.nJ = jn.infinite ? kInf : double(n) * jn.value;
    const double m2 = moments(U, 2), m3 = moments(U, 3), m4 = moments(U, 4);
    row.floor = m3 * m3 / (m2 * m4);
    row.ok = jn.infinite || row.J >= row.floor - kTol;
    if (!row.ok) rep.all_ok = false;
    rep.rows.push_back(row);
  }
  return rep;
}

DoublingReport monotone_doubling(const DistributionSpec& spec, int k_max,
                                 int points) {
  if (k_max < 1 || k_max > 12)
    throw std::invalid_argument("monotone_doubling: k_max out of range");
  DoublingReport rep;
  const GridDensity X = standardize(materialize(spec, points));
  for (int k = 0; k <= k_max; ++k) {
    const int n = 1 << k;
    const GridDensity U = standardized_sum(X, n);
    const FisherValue jn = standardized_fisher(U);
    rep.n.push_back(n);
    rep.infinite.push_back(jn.infinite ? 1 : 0);
    rep.J.push_back(jn.infinite ? kInf : jn.value);
    if (!jn.infinite && rep.first_finite_n < 0) rep.first_finite_n = n;
  }
  // after the first finite entry: nonincreasing with shrinking decrements
  std::vector<double> fin;
  for (std::size_t i = 0; i < rep.J.size(); ++i)
    if (!rep.infinite[i]) fin.push_back(rep.J[i]);
  for (std::size_t i = 1; i < fin.size(); ++i)
    if (fin[i] > fin[i - 1] + 1e-9) rep.monotone_ok = false;
  for (std::size_t i = 2; i < fin.size(); ++i) {
    const double d0 = fin[i - 2] - fin[i - 1], d1 = fin[i - 1] - fin[i];
    if (d1 > d0 * (1.0 + 1e-6) + 1e-9) rep.diffs_shrink_ok = false;
  }
  return rep;
}

TailMatrix tail_class_profile(const DistributionSpec& spec,
                              const std::vector<int>& n_set,
                              const std::vector<double>& radii, int points) {
  TailMatrix m;
  m.radii = radii;
  const GridDensity X = standardize(materialize(spec, points));
  SumSequence seq = standardized_sums(X, n_set);
  m.n_set = seq.n_set;
  for (int n : seq.n_set) {
    const TailProfile tp = tail_score_mass(seq.entries.at(n), radii);
    m.psi.push_back(tp.psi);
    for (std::size_t c = 1; c < tp.psi.size(); ++c)
      if (tp.psi[c] > tp.psi[c - 1] + 1e-12) m.rows_monotone = false;
  }
  m.envelope.assign(radii.size(), 0.0);
  for (const auto& row : m.psi)
    for (std::size_t c = 0; c < row.size(); ++c)
      m.envelope[c] = std::max(m.envelope[c], row[c]);
  return m;
}

SweepReport smoothed_discrete_demo(const std::vector<double>& atoms,
                                   const std::vector<double>& weights,
                                   double tau, const std::vector<int>& n_set,
                                   int points) {
  if (atoms.empty() || atoms.size() != weights.size())
    throw std::invalid_argument("smoothed_discrete_demo: atoms/weights");
  if (!(tau > 0.0)) throw std::invalid_argument("smoothed_discrete_demo: tau");
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(wsum > 0.0))
    throw std::invalid_argument("smoothed_discrete_demo: zero weight");
  std::vector<double> w(weights), locs(atoms),
      scales(atoms.size(), std::sqrt(tau));
  for (auto& v : w) v /= wsum;
  double mean = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) mean += w[i] * locs[i];
  for (auto& v : locs) v -= mean;
  SweepReport rep = verify_o1n(spec_mixture(w, locs, scales), n_set, points);
  rep.family_label = "smoothed_discrete";
  return rep;
}

}  // namespace fclt
