#include "fisherclt/families.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fclt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTailTarget = 1e-13;  // default-domain mass per open tail

const double kInvSqrt2Pi = 0.3989422804014326779;

double phi(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }
double Phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Analytic model behind a DistributionSpec.
struct Model {
  std::function<double(double)> pdf;
  std::function<double(double)> cdf;
  double lo = -kInf, hi = kInf;  // support
  double mean = 0.0, sd = 1.0;   // analytic, used only to pick domains
};

double get(const std::map<std::string, double>& kv, const std::string& k,
           double dflt) {
  auto it = kv.find(k);
  return it == kv.end() ? dflt : it->second;
}

Model build_model(const DistributionSpec& spec) {
  Model m;
  const auto& p = spec.params;
  if (spec.family == "normal") {
    const double mu = get(p, "mu", 0.0), sg = get(p, "sigma", 1.0);
    if (!(sg > 0.0)) throw std::invalid_argument("normal: sigma <= 0");
    m.pdf = [mu, sg](double x) { return phi((x - mu) / sg) / sg; };
    m.cdf = [mu, sg](double x) { return Phi((x - mu) / sg); };
    m.mean = mu;
    m.sd = sg;
  } else if (spec.family == "exponential") {
    const double rate = get(p, "rate", 1.0);
    if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate <= 0");
    const double shift = 1.0 / rate;  // centred: support starts at -1/rate
    m.pdf = [rate, shift](double x) {
      return x < -shift ? 0.0 : rate * std::exp(-rate * (x + shift));
    };
    m.cdf = [rate, shift](double x) {
      return x < -shift ? 0.0 : 1.0 - std::exp(-rate * (x + shift));
    };
    m.lo = -shift;
    m.mean = 0.0;
    m.sd = 1.0 / rate;
  } else if (spec.family == "gamma") {
    const double k = get(p, "shape", 0.0), rate = get(p, "rate", 1.0);
    if (!(k > 0.0)) throw std::invalid_argument("gamma: shape <= 0");
    if (!(rate > 0.0)) throw std::invalid_argument("gamma: rate <= 0");
    const double lognorm = k * std::log(rate) - std::lgamma(k);
    m.pdf = [k, rate, lognorm](double x) {
      if (x < 0.0) return 0.0;
      if (x == 0.0) return k > 1.0 ? 0.0 : (k == 1.0 ? rate : kInf);
      return std::exp(lognorm + (k - 1.0) * std::log(x) - rate * x);
    };
    m.cdf = [k, rate](double x) {
      return x <= 0.0 ? 0.0 : boost::math::gamma_p(k, rate * x);
    };
    m.lo = 0.0;
    m.mean = k / rate;
    m.sd = std::sqrt(k) / rate;
  } else if (spec.family == "uniform") {
    const double a = get(p, "a", -1.0), b = get(p, "b", 1.0);
    if (!(b > a)) throw std::invalid_argument("uniform: b <= a");
    const double dens = 1.0 / (b - a);
    m.pdf = [a, b, dens](double x) { return (x < a || x > b) ? 0.0 : dens; };
    m.cdf = [a, b, dens](double x) {
      return x <= a ? 0.0 : (x >= b ? 1.0 : (x - a) * dens);
    };
    m.lo = a;
    m.hi = b;
    m.mean = 0.5 * (a + b);
    m.sd = (b - a) / std::sqrt(12.0);
  } else if (spec.family == "laplace") {
    const double mu = get(p, "mu", 0.0), b = get(p, "b", 1.0);
    if (!(b > 0.0)) throw std::invalid_argument("laplace: b <= 0");
    m.pdf = [mu, b](double x) {
      return 0.5 / b * std::exp(-std::abs(x - mu) / b);
    };
    m.cdf = [mu, b](double x) {
      return x < mu ? 0.5 * std::exp((x - mu) / b)
                    : 1.0 - 0.5 * std::exp(-(x - mu) / b);
    };
    m.mean = mu;
    m.sd = b * std::sqrt(2.0);
  } else if (spec.family == "gaussian_mixture") {
    auto w = spec.weights;
    const auto& mus = spec.locs;
    const auto& sds = spec.scales;
    if (w.empty() || w.size() != mus.size() || w.size() != sds.size())
      throw std::invalid_argument("gaussian_mixture: weights/locs/scales");
    double wsum = std::accumulate(w.begin(), w.end(), 0.0);
    if (std::abs(wsum - 1.0) > 1e-8)
      throw std::invalid_argument("gaussian_mixture: weights must sum to 1");
    for (auto& wi : w) {
      if (!(wi > 0.0))
        throw std::invalid_argument("gaussian_mixture: weight <= 0");
      wi /= wsum;
    }
    for (double s : sds)
      if (!(s > 0.0)) throw std::invalid_argument("gaussian_mixture: sd <= 0");
    m.pdf = [w, mus, sds](double x) {
      double acc = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i)
        acc += w[i] * phi((x - mus[i]) / sds[i]) / sds[i];
      return acc;
    };
    m.cdf = [w, mus, sds](double x) {
      double acc = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i)
        acc += w[i] * Phi((x - mus[i]) / sds[i]);
      return acc;
    };
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      mean += w[i] * mus[i];
      m2 += w[i] * (sds[i] * sds[i] + mus[i] * mus[i]);
    }
    m.mean = mean;
    m.sd = std::sqrt(std::max(m2 - mean * mean, 1e-300));
  } else if (spec.family == "table") {
    const auto& xs = spec.table_x;
    const auto& ps = spec.table_p;
    if (xs.size() < 2 || xs.size() != ps.size())
      throw std::invalid_argument("table: needs matching x/p, >= 2 points");
    for (std::size_t i = 1; i < xs.size(); ++i)
      if (!(xs[i] > xs[i - 1]))
        throw std::invalid_argument("table: x must be increasing");
    for (double v : ps)
      if (!(v >= 0.0)) throw std::invalid_argument("table: negative p");
    m.pdf = [xs, ps](double x) {
      if (x <= xs.front() || x >= xs.back()) {
        if (x == xs.front()) return ps.front();
        if (x == xs.back()) return ps.back();
        return 0.0;
      }
      auto it = std::upper_bound(xs.begin(), xs.end(), x);
      const std::size_t j = std::size_t(it - xs.begin());
      const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
      return ps[j - 1] * (1.0 - t) + ps[j] * t;
    };
    m.lo = xs.front();
    m.hi = xs.back();
    // Rough numeric moments for domain bookkeeping only.
    double mass = 0.0, mean = 0.0, sq = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
      const double dx = xs[i] - xs[i - 1];
      mass += 0.5 * dx * (ps[i] + ps[i - 1]);
      mean += 0.5 * dx * (ps[i] * xs[i] + ps[i - 1] * xs[i - 1]);
      sq += 0.5 * dx * (ps[i] * xs[i] * xs[i] + ps[i - 1] * xs[i - 1] * xs[i - 1]);
    }
    if (!(mass > 0.0)) throw std::invalid_argument("table: zero mass");
    m.mean = mean / mass;
    m.sd = std::sqrt(std::max(sq / mass - m.mean * m.mean, 1e-300));
  } else {
    throw std::invalid_argument("unknown family: " + spec.family);
  }
  return m;
}

// Smallest x with cdf(x) >= q on an unbounded-left tail (and mirrored).
double tail_quantile_left(const Model& m, double q) {
  double hi = m.mean, lo = m.mean - 12.0 * m.sd;
  while (m.cdf(lo) > q) lo -= 12.0 * m.sd;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (m.cdf(mid) >= q ? hi : lo) = mid;
  }
  return lo;
}

double tail_quantile_right(const Model& m, double q) {
  double lo = m.mean, hi = m.mean + 12.0 * m.sd;
  while (1.0 - m.cdf(hi) > q) hi += 12.0 * m.sd;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (1.0 - m.cdf(mid) <= q ? hi : lo) = mid;
  }
  return hi;
}

GridDensity materialize_at(const DistributionSpec& spec, int points, double lo,
                           double hi);

void attach_hooks(GridDensity& g, const DistributionSpec& spec, int points,
                  double lo, double hi, const Model& m) {
  g.pdf = m.pdf;
  DistributionSpec sp = spec;
  g.refine = [sp, points, lo, hi](int lev) {
    const int fine = (points - 1) * (1 << lev) + 1;
    return materialize_at(sp, fine, lo, hi);
  };
  const double mlo = m.lo, mhi = m.hi, mean = m.mean;
  g.widen = [sp, points, lo, hi, mlo, mhi, mean](double factor) {
    double nlo = lo, nhi = hi;
    if (!std::isfinite(mlo)) nlo = mean - factor * (mean - lo);
    if (!std::isfinite(mhi)) nhi = mean + factor * (hi - mean);
    const int npts =
        int(std::lround(double(points - 1) * (nhi - nlo) / (hi - lo))) + 1;
    return materialize_at(sp, std::max(npts, points), nlo, nhi);
  };
}

GridDensity materialize_at(const DistributionSpec& spec, int points, double lo,
                           double hi) {
  const Model m = build_model(spec);
  if (points < 64 || points > (1 << 21))
    throw std::invalid_argument("materialize: points out of range");
  if (!(hi > lo)) throw std::invalid_argument("materialize: empty domain");

  GridDensity g;
  g.x_min = lo;
  g.h = (hi - lo) / double(points - 1);
  g.values.resize(std::size_t(points));
  for (int i = 0; i < points; ++i) {
    double v = m.pdf(g.x(i));
    if (!std::isfinite(v))
      throw std::invalid_argument("materialize: density singular on a node");
    g.values[std::size_t(i)] = std::max(v, 0.0);
  }
  const double mass = trapezoid(g.values, g.h);
  if (m.cdf) {
    const double missing = m.cdf(lo) + (1.0 - m.cdf(hi));
    if (missing > 1e-12)
      throw std::invalid_argument(
          "materialize: requested domain drops more than 1e-12 of the mass");
  }
  if (!(mass > 0.5))
    throw std::invalid_argument("materialize: domain misses the density");
  for (auto& v : g.values) v /= mass;
  g.edge_left = std::isfinite(m.lo) && std::abs(lo - m.lo) < 1e-12 * g.h + 1e-300;
  g.edge_right = std::isfinite(m.hi) && std::abs(hi - m.hi) < 1e-12 * g.h + 1e-300;
  // a support edge inside the domain would put a jump off-node; forbid
  if (std::isfinite(m.lo) && lo < m.lo - 1e-12)
    throw std::invalid_argument("materialize: domain exceeds support (left)");
  if (std::isfinite(m.hi) && hi > m.hi + 1e-12)
    throw std::invalid_argument("materialize: domain exceeds support (right)");

  {  // grid-quadrature moments
    const std::size_t n = g.n();
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      mean += trap_w(i, n, g.h) * g.values[i] * g.x(std::ptrdiff_t(i));
    g.mean = mean;
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = g.x(std::ptrdiff_t(i)) - mean;
      var += trap_w(i, n, g.h) * g.values[i] * dx * dx;
    }
    g.variance = var;
  }
  attach_hooks(g, spec, points, lo, hi, m);
  return g;
}

}  // namespace

GridDensity materialize(const DistributionSpec& spec, int points,
                        double halfwidth) {
  const Model m = build_model(spec);
  double lo, hi;
  if (halfwidth > 0.0) {
    lo = std::max(m.lo, m.mean - halfwidth);
    hi = std::min(m.hi, m.mean + halfwidth);
  } else {
    lo = std::isfinite(m.lo)
             ? m.lo
             : std::min(tail_quantile_left(m, kTailTarget),
                        m.mean - 12.0 * m.sd);
    hi = std::isfinite(m.hi)
             ? m.hi
             : std::max(tail_quantile_right(m, kTailTarget),
                        m.mean + 12.0 * m.sd);
  }
  GridDensity g = materialize_at(spec, points, lo, hi);
  if (spec.center_and_scale) g = standardize(g);
  return g;
}

DistributionSpec spec_normal(double mu, double sigma) {
  DistributionSpec s;
  s.family = "normal";
  s.params = {{"mu", mu}, {"sigma", sigma}};
  return s;
}

DistributionSpec spec_exponential(double rate) {
  DistributionSpec s;
  s.family = "exponential";
  s.params = {{"rate", rate}};
  return s;
}

DistributionSpec spec_gamma(double shape, double rate) {
  DistributionSpec s;
  s.family = "gamma";
  s.params = {{"shape", shape}, {"rate", rate}};
  return s;
}

DistributionSpec spec_uniform(double a, double b) {
  DistributionSpec s;
  s.family = "uniform";
  s.params = {{"a", a}, {"b", b}};
  return s;
}

DistributionSpec spec_laplace(double mu, double b) {
  DistributionSpec s;
  s.family = "laplace";
  s.params = {{"mu", mu}, {"b", b}};
  return s;
}

DistributionSpec spec_mixture(std::vector<double> weights,
                              std::vector<double> locs,
                              std::vector<double> scales) {
  DistributionSpec s;
  s.family = "gaussian_mixture";
  s.weights = std::move(weights);
  s.locs = std::move(locs);
  s.scales = std::move(scales);
  return s;
}

DistributionSpec spec_from_params(const std::string& family,
                                  const std::map<std::string, double>& kv,
                                  const std::vector<double>& list_a,
                                  const std::vector<double>& list_b,
                                  const std::vector<double>& list_c) {
  DistributionSpec s;
  s.family = family;
  s.params = kv;
  if (family == "gaussian_mixture") {
    s.weights = list_a;
    s.locs = list_b;
    s.scales = list_c;
  } else if (family == "table") {
    s.table_x = list_a;
    s.table_p = list_b;
  }
  auto it = kv.find("center_and_scale");
  if (it != kv.end()) s.center_and_scale = it->second != 0.0;
  return s;
}

}  // namespace fclt
