#include "fisherclt/info.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fclt {

namespace {
const double kInvSqrt2Pi = 0.3989422804014326779;
}

std::vector<std::pair<std::size_t, std::size_t>> mask_blocks(
    const std::vector<std::uint8_t>& mask) {
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  std::size_t i = 0;
  while (i < mask.size()) {
    if (!mask[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < mask.size() && mask[j + 1]) ++j;
    blocks.emplace_back(i, j);
    i = j + 1;
  }
  return blocks;
}

ScoreField score(const GridDensity& d, double floor_rel) {
  if (floor_rel <= 0.0) floor_rel = 1e-12;
  const std::size_t n = d.n();
  if (n < 3) throw std::invalid_argument("score: grid too small");
  const double pmax = *std::max_element(d.values.begin(), d.values.end());
  if (!(pmax > 0.0)) throw std::invalid_argument("score: empty density");
  const double floor_abs = floor_rel * pmax;

  ScoreField out;
  out.floor = floor_rel;
  out.density_ref = d;
  out.score.x_min = d.x_min;
  out.score.h = d.h;
  out.score.values.assign(n, 0.0);
  out.valid_mask.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    out.valid_mask[i] = d.values[i] >= floor_abs ? 1 : 0;

  for (auto& [a, b] : mask_blocks(out.valid_mask)) {
    if (b == a) {  // isolated node: cannot differentiate, drop it
      out.valid_mask[a] = 0;
      continue;
    }
    auto lp = [&](std::size_t i) { return std::log(d.values[i]); };
    out.score.values[a] = (lp(a + 1) - lp(a)) / d.h;
    out.score.values[b] = (lp(b) - lp(b - 1)) / d.h;
    for (std::size_t i = a + 1; i < b; ++i)
      out.score.values[i] = (lp(i + 1) - lp(i - 1)) / (2.0 * d.h);
  }
  return out;
}

double fisher_integral(const GridDensity& d, double floor_rel,
                       bool with_jump_penalty) {
  const ScoreField sf = score(d, floor_rel);
  const auto blocks = mask_blocks(sf.valid_mask);
  if (blocks.empty())
    throw std::invalid_argument("fisher_integral: density unresolvable");
  double acc = 0.0;
  for (auto& [a, b] : blocks) {
    for (std::size_t i = a; i <= b; ++i) {
      const double w = (i == a || i == b) ? 0.5 * d.h : d.h;
      const double r = sf.score.values[i];
      acc += w * d.values[i] * r * r;
    }
    if (with_jump_penalty) {
      // sqrt-density jump at the mask boundary: the h-scale Dirichlet cost
      // of the drop to the unresolved level (0 beyond the grid itself).
      const double out_lo = a > 0 ? d.values[a - 1] : 0.0;
      const double out_hi = b + 1 < d.n() ? d.values[b + 1] : 0.0;
      const double jl = std::sqrt(d.values[a]) - std::sqrt(out_lo);
      const double jr = std::sqrt(d.values[b]) - std::sqrt(out_hi);
      acc += 4.0 * (jl * jl + jr * jr) / d.h;
    }
  }
  return acc;
}

FisherValue fisher_information(const GridDensity& d) {
  FisherValue out;
  const double i0 = fisher_integral(d);
  out.trace.emplace_back(d.h, i0);
  if (!d.refine) {  // no refinement hook: single-level estimate
    out.value = i0;
    return out;
  }
  const GridDensity d1 = d.refine(1);
  const double i1 = fisher_integral(d1);
  out.trace.emplace_back(d1.h, i1);
  const GridDensity d2g = d.refine(2);
  const double i2 = fisher_integral(d2g);
  out.trace.emplace_back(d2g.h, i2);

  const double inc1 = i1 - i0, inc2 = i2 - i1;
  const double g1 = std::abs(inc1) / std::max(std::abs(i1), 1e-300);
  const double g2 = std::abs(inc2) / std::max(std::abs(i2), 1e-300);
  const bool runaway = g1 > 0.10 && g2 > 0.10;
  const bool no_contraction =
      inc1 > 0.0 && inc2 > 0.0 && inc2 / inc1 >= 0.8 && g2 > 0.005;
  if (runaway || no_contraction) {
    out.infinite = true;
    out.value = i2;
    return out;
  }
  double val = i2;
  if (inc1 != 0.0) {
    const double theta = inc2 / inc1;
    if (theta > 0.0 && theta < 0.95) val = i2 + inc2 * theta / (1.0 - theta);
  }
  out.value = val;
  return out;
}

FisherValue standardized_fisher(const GridDensity& d) {
  FisherValue fi = fisher_information(d);
  if (!fi.infinite) {
    double J = d.variance * fi.value - 1.0;
    if (J < 0.0 && J > -1e-9) J = 0.0;  // fp dust at the Gaussian minimum
    fi.value = J;
  }
  return fi;
}

double relative_entropy(const GridDensity& d) {
  const std::size_t n = d.n();
  const double var = d.variance;
  if (!(var > 0.0)) throw std::invalid_argument("relative_entropy: var <= 0");
  const double lognorm = -std::log(std::sqrt(var) / kInvSqrt2Pi);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = d.values[i];
    if (p <= 0.0) continue;
    const double z = d.x(std::ptrdiff_t(i)) - d.mean;
    const double logphi = lognorm - 0.5 * z * z / var;
    acc += trap_w(i, n, d.h) * p * (std::log(p) - logphi);
  }
  return acc;
}

InfoSummary info_summary(const GridDensity& d) {
  InfoSummary s;
  const FisherValue fi = fisher_information(d);
  s.fisher_I = fi.value;
  s.infinite = fi.infinite;
  s.refinement_trace = fi.trace;
  s.sigma2 = d.variance;
  if (!fi.infinite) {
    double J = d.variance * fi.value - 1.0;
    if (J < 0.0 && J > -1e-9) J = 0.0;
    s.standardized_J = J;
  }
  s.rel_entropy_D = relative_entropy(d);
  return s;
}

DistanceChain distance_chain(const GridDensity& d) {
  if (std::abs(d.mean) > 1e-6 || std::abs(d.variance - 1.0) > 1e-6)
    throw std::invalid_argument("distance_chain: density not standardized");
  DistanceChain c;
  const std::size_t n = d.n();
  double tv = 0.0, hell2 = 0.0, sup = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = d.x(std::ptrdiff_t(i));
    const double ph = kInvSqrt2Pi * std::exp(-0.5 * x * x);
    const double w = trap_w(i, n, d.h);
    sup = std::max(sup, std::abs(d.values[i] - ph));
    tv += w * std::abs(d.values[i] - ph);
    const double ds = std::sqrt(d.values[i]) - std::sqrt(ph);
    hell2 += w * ds * ds;
  }
  c.sup_diff = sup;
  c.tv = tv;
  c.hellinger = std::sqrt(std::max(hell2, 0.0));
  const FisherValue J = standardized_fisher(d);
  c.J = J.value;
  c.J_infinite = J.infinite;
  return c;
}

TailProfile tail_score_mass(const GridDensity& d,
                            const std::vector<double>& radii) {
  const ScoreField sf = score(d);
  const auto blocks = mask_blocks(sf.valid_mask);
  const double sig = std::sqrt(d.variance);
  TailProfile out;
  out.radii = radii;
  out.psi.reserve(radii.size());
  for (double R : radii) {
    if (R < 0.0) throw std::invalid_argument("tail_score_mass: R < 0");
    double acc = 0.0;
    for (auto& [a, b] : blocks) {
      for (std::size_t i = a; i <= b; ++i) {
        if (std::abs(d.x(std::ptrdiff_t(i)) - d.mean) < sig * R) continue;
        const double w = (i == a || i == b) ? 0.5 * d.h : d.h;
        const double r = sf.score.values[i];
        acc += w * d.values[i] * r * r;
      }
    }
    out.psi.push_back(d.variance * acc);
  }
  return out;
}

}  // namespace fclt
