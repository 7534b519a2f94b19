#include "fisherclt/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fisherclt/fft.hpp"
#include "fisherclt/info.hpp"

namespace fclt {

namespace {

const double kInvSqrt2Pi = 0.3989422804014326779;

// splitmix64: tiny portable generator so seeded banks are identical across
// platforms and standard libraries.
struct SplitMix {
  std::uint64_t s;
  explicit SplitMix(std::uint64_t seed) : s(seed) {}
  double uniform() {
    s += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    return double(z >> 11) * 0x1p-53;
  }
  double range(double a, double b) { return a + (b - a) * uniform(); }
};

void require_lattice(const GridFunction& f, double x_min, double h,
                     std::size_t n, const char* who) {
  if (f.n() != n || std::abs(f.h - h) > 1e-9 * h ||
      std::abs(f.x_min - x_min) > 1e-6 * h)
    throw std::invalid_argument(std::string(who) + ": lattice mismatch");
}

std::vector<double> quad_weights(const GridDensity& d) {
  std::vector<double> w(d.n());
  for (std::size_t i = 0; i < d.n(); ++i)
    w[i] = trap_w(i, d.n(), d.h) * d.values[i];
  return w;
}

// central difference with one-sided ends
std::vector<double> diff_grid(const std::vector<double>& v, double h) {
  const std::size_t n = v.size();
  std::vector<double> out(n);
  out[0] = (v[1] - v[0]) / h;
  out[n - 1] = (v[n - 1] - v[n - 2]) / h;
  for (std::size_t i = 1; i + 1 < n; ++i)
    out[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
  return out;
}

}  // namespace

std::vector<TestFunction> test_function_bank(std::uint64_t seed) {
  std::vector<TestFunction> bank;
  bank.push_back({"linear", [](double x) { return x; },
                  [](double) { return 1.0; }});
  bank.push_back({"quadratic_centered", [](double x) { return x * x - 1.0; },
                  [](double x) { return 2.0 * x; }});
  SplitMix rng(seed);
  for (int k = 0; k < 3; ++k) {
    struct Lobe {
      double c, a, w;
    };
    std::vector<Lobe> lobes(4);
    for (auto& l : lobes) {
      l.c = rng.range(-1.0, 1.0);
      l.a = rng.range(-3.0, 3.0);
      l.w = rng.range(0.8, 2.0);
    }
    auto f = [lobes](double x) {
      double acc = 0.0;
      for (const auto& l : lobes) {
        const double t = (x - l.a) / l.w;
        if (std::abs(t) < 1.0) {
          const double u = 1.0 - t * t;
          acc += l.c * u * u * u;
        }
      }
      return acc;
    };
    auto df = [lobes](double x) {
      double acc = 0.0;
      for (const auto& l : lobes) {
        const double t = (x - l.a) / l.w;
        if (std::abs(t) < 1.0) {
          const double u = 1.0 - t * t;
          acc += l.c * (-6.0 * t * u * u) / l.w;
        }
      }
      return acc;
    };
    bank.push_back({"bump_" + std::to_string(k + 1), f, df});
  }
  return bank;
}

GridFunction sample_on_sum_lattice(const GridDensity& d1,
                                   const GridDensity& d2,
                                   const std::function<double(double)>& f) {
  if (std::abs(d1.h - d2.h) > 1e-9 * d1.h)
    throw std::invalid_argument("sample_on_sum_lattice: step mismatch");
  GridFunction out;
  out.h = d1.h;
  out.x_min = d1.x_min + d2.x_min;
  out.values.resize(d1.n() + d2.n() - 1);
  for (std::size_t k = 0; k < out.n(); ++k)
    out.values[k] = f(out.x(std::ptrdiff_t(k)));
  return out;
}

AdditiveProjection additive_projection(const GridFunction& f,
                                       const GridDensity& d1,
                                       const GridDensity& d2) {
  if (std::abs(d1.h - d2.h) > 1e-9 * d1.h)
    throw std::invalid_argument("additive_projection: step mismatch");
  const std::size_t n1 = d1.n(), n2 = d2.n();
  require_lattice(f, d1.x_min + d2.x_min, d1.h, n1 + n2 - 1,
                  "additive_projection");

  const std::vector<double> w1 = quad_weights(d1), w2 = quad_weights(d2);
  const std::vector<double> psw = fft_convolve(w1, w2);

  std::vector<double> fc(f.values);
  double ef = 0.0;
  for (std::size_t k = 0; k < fc.size(); ++k) ef += psw[k] * fc[k];
  for (auto& v : fc) v -= ef;

  AdditiveProjection ap;
  ap.f_centered = true;

  std::vector<double> g1 = fft_correlate_valid(fc, w2);
  std::vector<double> g2 = fft_correlate_valid(fc, w1);
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < n1; ++i) m1 += w1[i] * g1[i];
  for (std::size_t j = 0; j < n2; ++j) m2 += w2[j] * g2[j];
  for (auto& v : g1) v -= m1;
  for (auto& v : g2) v -= m2;

  const ScoreField sf2 = score(d2);
  double mu = 0.0;
  for (std::size_t j = 0; j < n2; ++j)
    if (sf2.valid_mask[j]) mu -= w2[j] * g2[j] * sf2.score.values[j];
  ap.mu = mu;

  std::vector<double> row(n1, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < std::ptrdiff_t(n1); ++ii) {
    const std::size_t i = std::size_t(ii);
    double acc = 0.0;
    for (std::size_t j = 0; j < n2; ++j) {
      const double r = fc[i + j] - g1[i] - g2[j];
      acc += w2[j] * r * r;
    }
    row[i] = w1[i] * acc;
  }
  double resid = 0.0;
  for (double v : row) resid += v;
  ap.residual_norm_sq = resid;

  for (std::size_t k = 0; k < fc.size(); ++k) ap.ef2 += psw[k] * fc[k] * fc[k];
  for (std::size_t i = 0; i < n1; ++i) ap.eg1_sq += w1[i] * g1[i] * g1[i];
  for (std::size_t j = 0; j < n2; ++j) ap.eg2_sq += w2[j] * g2[j] * g2[j];
  ap.pythagoras_gap =
      std::abs(ap.ef2 - ap.eg1_sq - ap.eg2_sq - ap.residual_norm_sq);

  ap.g1.x_min = d1.x_min;
  ap.g1.h = d1.h;
  ap.g1.values = std::move(g1);
  ap.g2.x_min = d2.x_min;
  ap.g2.h = d2.h;
  ap.g2.values = std::move(g2);
  return ap;
}

double derivative_identity_check(const GridFunction& f, const GridDensity& d1,
                                 const GridDensity& d2) {
  const AdditiveProjection ap = additive_projection(f, d1, d2);
  const ScoreField sf2 = score(d2);
  const std::size_t n1 = d1.n(), n2 = d2.n();

  std::vector<double> fc(f.values);
  const std::vector<double> w1 = quad_weights(d1), w2 = quad_weights(d2);
  const std::vector<double> psw = fft_convolve(w1, w2);
  double ef = 0.0;
  for (std::size_t k = 0; k < fc.size(); ++k) ef += psw[k] * fc[k];
  for (auto& v : fc) v -= ef;

  std::vector<double> w2r(n2);
  for (std::size_t j = 0; j < n2; ++j)
    w2r[j] = sf2.valid_mask[j] ? w2[j] * sf2.score.values[j] : 0.0;
  const std::vector<double> rhs = fft_correlate_valid(fc, w2r);

  const std::vector<double> dg1 = diff_grid(ap.g1.values, d1.h);
  double sup = 0.0;
  for (std::size_t i = 1; i + 1 < n1; ++i)
    sup = std::max(sup, std::abs(dg1[i] + rhs[i]));
  return sup;
}

ProjectionBound projection_inequality_check(const GridFunction& f,
                                            const GridDensity& d1,
                                            const GridDensity& d2,
                                            const GridFunction& h1,
                                            const GridFunction& h2,
                                            double beta) {
  if (!(beta >= 0.0 && beta <= 1.0))
    throw std::invalid_argument("projection_inequality_check: beta");
  const std::size_t n1 = d1.n(), n2 = d2.n();
  require_lattice(h1, d1.x_min, d1.h, n1, "projection_inequality_check h1");
  require_lattice(h2, d2.x_min, d2.h, n2, "projection_inequality_check h2");

  const AdditiveProjection ap = additive_projection(f, d1, d2);
  const std::vector<double> w1 = quad_weights(d1), w2 = quad_weights(d2);

  // centred copies: the decomposition is stated for mean-zero f, h1, h2
  std::vector<double> fc(f.values);
  {
    const std::vector<double> psw = fft_convolve(w1, w2);
    double ef = 0.0;
    for (std::size_t k = 0; k < fc.size(); ++k) ef += psw[k] * fc[k];
    for (auto& v : fc) v -= ef;
  }
  std::vector<double> h1c(h1.values), h2c(h2.values);
  double e1 = 0.0, e2 = 0.0;
  for (std::size_t i = 0; i < n1; ++i) e1 += w1[i] * h1c[i];
  for (std::size_t j = 0; j < n2; ++j) e2 += w2[j] * h2c[j];
  for (auto& v : h1c) v -= e1;
  for (auto& v : h2c) v -= e2;

  ProjectionBound pb;
  pb.beta = beta;

  std::vector<double> row(n1, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < std::ptrdiff_t(n1); ++ii) {
    const std::size_t i = std::size_t(ii);
    double acc = 0.0;
    for (std::size_t j = 0; j < n2; ++j) {
      const double r = fc[i + j] - h1c[i] - h2c[j];
      acc += w2[j] * r * r;
    }
    row[i] = w1[i] * acc;
  }
  for (double v : row) pb.lhs += v;

  double t1 = 0.0, t2 = 0.0;
  for (std::size_t i = 0; i < n1; ++i) {
    const double r = ap.g1.values[i] - h1c[i];
    t1 += w1[i] * r * r;
  }
  for (std::size_t j = 0; j < n2; ++j) {
    const double r = ap.g2.values[j] - h2c[j];
    t2 += w2[j] * r * r;
  }

  const FisherValue i1 = fisher_information(d1);
  const FisherValue i2 = fisher_information(d2);
  double deriv_term = 0.0;
  if (i1.infinite || i2.infinite) {
    pb.vacuous = true;  // infinite information: the derivative term drops
  } else {
    const double ibar = (1.0 - beta) * i1.value + beta * i2.value;
    const std::vector<double> dg1 = diff_grid(ap.g1.values, d1.h);
    const std::vector<double> dg2 = diff_grid(ap.g2.values, d2.h);
    double q1 = 0.0, q2 = 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
      const double r = dg1[i] - ap.mu;
      q1 += w1[i] * r * r;
    }
    for (std::size_t j = 0; j < n2; ++j) {
      const double r = dg2[j] - ap.mu;
      q2 += w2[j] * r * r;
    }
    if (ibar > 0.0) deriv_term = (beta * q1 + (1.0 - beta) * q2) / ibar;
  }
  pb.rhs = t1 + t2 + deriv_term;
  pb.slack = pb.lhs - pb.rhs;
  return pb;
}

namespace {

// Shared telescoping engine: fn samples the test function, dfn (optional)
// its derivative; both are evaluated on the n-stage window lattice.
TelescopingReport telescoping_core(const std::function<double(double)>& fn,
                                   const std::function<double(double)>* dfn,
                                   const GridDensity& d, int n) {
  if (n < 1 || n > 8)
    throw std::invalid_argument("telescoping_decomposition: n must be 1..8");
  if (std::abs(d.mean) > 1e-6 || std::abs(d.variance - 1.0) > 1e-6)
    throw std::invalid_argument(
        "telescoping_decomposition: base must be standardized");

  const std::size_t nb = d.n();
  const double h = d.h, x0 = d.x_min;
  const double sqn = std::sqrt(double(n));
  const std::size_t W = (nb - 1) * std::size_t(n) + 1 + 2 * nb;
  const std::ptrdiff_t off = std::ptrdiff_t(nb);

  std::vector<double> wq(d.values);
  for (auto& v : wq) v *= h;  // plain lattice weights
  const double mass_b = std::accumulate(wq.begin(), wq.end(), 0.0);

  // raw-lattice partial-sum densities pS_m, support (nb-1)m+1 nodes
  std::vector<std::vector<double>> ps(std::size_t(n) + 1);
  ps[1] = d.values;
  for (int m = 2; m <= n; ++m) {
    ps[std::size_t(m)] = fft_convolve(ps[std::size_t(m - 1)], d.values);
    for (auto& v : ps[std::size_t(m)]) v *= h;
  }

  auto lattice_x = [&](int m, std::ptrdiff_t k) {
    return double(m) * x0 + double(k - off) * h;
  };

  // F_n on the window, recentred under pS_n
  std::vector<std::vector<double>> F(std::size_t(n) + 1);
  F[std::size_t(n)].resize(W);
  for (std::size_t k = 0; k < W; ++k)
    F[std::size_t(n)][k] = fn(lattice_x(n, std::ptrdiff_t(k)) / sqn);
  {
    double ef = 0.0;
    for (std::size_t j = 0; j < ps[std::size_t(n)].size(); ++j)
      ef += ps[std::size_t(n)][j] * h * F[std::size_t(n)][j + std::size_t(off)];
    for (auto& v : F[std::size_t(n)]) v -= ef;
  }

  // downward smoothing recursion F_{m-1}(s) = E F_m(s + X)
  std::vector<double> wq_rev(wq.rbegin(), wq.rend());
  for (int m = n; m >= 2; --m) {
    std::vector<double> full = fft_convolve(F[std::size_t(m)], wq_rev);
    F[std::size_t(m - 1)].assign(
        full.begin() + std::ptrdiff_t(nb) - 1,
        full.begin() + std::ptrdiff_t(nb) - 1 + std::ptrdiff_t(W));
  }

  TelescopingReport rep;
  rep.n = n;

  // g on the base grid: g(u) = sqrt(n) F_1(u)
  rep.g.x_min = x0;
  rep.g.h = h;
  rep.g.values.resize(nb);
  for (std::size_t u = 0; u < nb; ++u)
    rep.g.values[u] = sqn * F[1][u + std::size_t(off)];

  double eg2 = 0.0, eg = 0.0;
  for (std::size_t u = 0; u < nb; ++u) {
    eg2 += wq[u] * rep.g.values[u] * rep.g.values[u];
    eg += wq[u] * rep.g.values[u];
  }

  // mu = E f'(S_n / sqrt n)
  if (dfn) {
    double mu = 0.0;
    for (std::size_t j = 0; j < ps[std::size_t(n)].size(); ++j)
      mu += ps[std::size_t(n)][j] * h *
            (*dfn)(lattice_x(n, std::ptrdiff_t(j) + off) / sqn);
    rep.mu = mu;
  } else {
    double mu = 0.0;
    for (std::size_t j = 0; j < ps[std::size_t(n)].size(); ++j) {
      const std::size_t k = j + std::size_t(off);
      const double fp =
          sqn * (F[std::size_t(n)][k + 1] - F[std::size_t(n)][k - 1]) /
          (2.0 * h);
      mu += ps[std::size_t(n)][j] * h * fp;
    }
    rep.mu = mu;
  }

  {  // E (g' - mu)^2 on the base grid
    const std::vector<double> dg = diff_grid(rep.g.values, h);
    double q = 0.0;
    for (std::size_t u = 0; u < nb; ++u) {
      const double r = dg[u] - rep.mu;
      q += wq[u] * r * r;
    }
    rep.e_gprime_mu_sq = q;
  }

  // second moments E f_m(S_m)^2 and first moments under pS_m
  std::vector<double> Em(std::size_t(n) + 1, 0.0), E1(std::size_t(n) + 1, 0.0);
  std::vector<double> mass_s(std::size_t(n) + 1, 0.0);
  for (int m = 1; m <= n; ++m) {
    const auto& pm = ps[std::size_t(m)];
    const auto& Fm = F[std::size_t(m)];
    double acc2 = 0.0, acc1 = 0.0, ms = 0.0;
    for (std::size_t j = 0; j < pm.size(); ++j) {
      const double w = pm[j] * h;
      const double v = Fm[j + std::size_t(off)];
      acc2 += w * v * v;
      acc1 += w * v;
      ms += w;
    }
    Em[std::size_t(m)] = acc2;
    E1[std::size_t(m)] = acc1;
    mass_s[std::size_t(m)] = ms;
  }

  rep.t.resize(std::size_t(n));
  rep.s.resize(std::size_t(n));
  {  // t_1 = E (f_1(X) - g(X)/sqrt n)^2, identically zero on the lattice
    double acc = 0.0;
    for (std::size_t u = 0; u < nb; ++u) {
      const double r = F[1][u + std::size_t(off)] - rep.g.values[u] / sqn;
      acc += wq[u] * r * r;
    }
    rep.t[0] = acc;
  }
  for (int m = 2; m <= n; ++m) {
    // expanded square of E (f_m(S_{m-1}+X) - f_{m-1}(S_{m-1}) - g(X)/sqrt n)^2;
    // the cross term E_X f_m(. + X) collapses to f_{m-1} by the recursion and
    // the (m-1)-fold smoothing of f_m against X collapses to f_1.
    double t = Em[std::size_t(m)] - 2.0 * Em[std::size_t(m - 1)] +
               mass_b * Em[std::size_t(m - 1)] - (2.0 / double(n)) * eg2 +
               mass_s[std::size_t(m - 1)] * eg2 / double(n) +
               2.0 * E1[std::size_t(m - 1)] * eg / sqn;
    rep.t[std::size_t(m - 1)] = std::max(t, 0.0);
  }
  for (int m = 1; m <= n; ++m)
    rep.s[std::size_t(m - 1)] =
        Em[std::size_t(m)] - double(m) / double(n) * eg2;
  rep.lower_bound_lhs = rep.s[std::size_t(n - 1)];

  const FisherValue fi = fisher_information(d);
  rep.fisher_I =
      fi.infinite ? std::numeric_limits<double>::infinity() : fi.value;

  rep.f_seq.resize(std::size_t(n));
  for (int m = 1; m <= n; ++m) {
    GridFunction gf;
    gf.h = h;
    gf.x_min = lattice_x(m, 0);
    gf.values = std::move(F[std::size_t(m)]);
    rep.f_seq[std::size_t(m - 1)] = std::move(gf);
  }
  return rep;
}

}  // namespace

TelescopingReport telescoping_decomposition(const TestFunction& f,
                                            const GridDensity& d, int n) {
  return telescoping_core(f.f, &f.df, d, n);
}

TelescopingReport telescoping_decomposition(const GridFunction& f,
                                            const GridDensity& d, int n) {
  std::function<double(double)> fn = [&f](double x) {
    return interp_linear(f, x);
  };
  return telescoping_core(fn, nullptr, d, n);
}

DeBruijnPath debruijn_entropy(const GridDensity& d, int nodes, double clip) {
  if (nodes < 8) throw std::invalid_argument("debruijn_entropy: nodes < 8");
  if (!(clip > 0.0 && clip < 0.01))
    throw std::invalid_argument("debruijn_entropy: clip out of range");
  if (std::abs(d.mean) > 1e-6 || std::abs(d.variance - 1.0) > 1e-6)
    throw std::invalid_argument("debruijn_entropy: density not standardized");

  const int m = nodes;
  const auto mz = std::size_t(m);
  std::vector<double> ts(mz), tps(mz), js(mz);

  for (int k = 1; k <= m; ++k) {
    const double tau = double(k) / double(m);
    ts[std::size_t(k - 1)] = (1.0 - clip) * tau * tau * (3.0 - 2.0 * tau);
    tps[std::size_t(k - 1)] = (1.0 - clip) * (6.0 * tau - 6.0 * tau * tau);
  }

#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < m; ++k) {
    const double t = ts[std::size_t(k)];
    const double a = std::sqrt(1.0 - t);
    const double hs = a * d.h;
    std::vector<double> scaled(d.values);
    for (auto& v : scaled) v /= a;

    const double sd = std::sqrt(t);
    const std::ptrdiff_t halfw =
        std::ptrdiff_t(std::ceil(8.0 * sd / hs));
    std::vector<double> kern(std::size_t(2 * halfw + 1));
    for (std::ptrdiff_t j = -halfw; j <= halfw; ++j) {
      const double z = double(j) * hs / sd;
      kern[std::size_t(j + halfw)] =
          kInvSqrt2Pi * std::exp(-0.5 * z * z) / sd;
    }
    double ksum = 0.0;
    for (double v : kern) ksum += v;
    for (auto& v : kern) v /= ksum * hs;

    GridDensity path;
    path.h = hs;
    path.x_min = a * d.x_min - double(halfw) * hs;
    path.values = fft_convolve(scaled, kern);
    for (auto& v : path.values) v *= hs;
    for (auto& v : path.values) v = std::max(v, 0.0);
    const double mass = trapezoid(path.values, path.h);
    for (auto& v : path.values) v /= mass;
    {
      const std::size_t nn = path.n();
      double mean = 0.0;
      for (std::size_t i = 0; i < nn; ++i)
        mean += trap_w(i, nn, hs) * path.values[i] * path.x(std::ptrdiff_t(i));
      path.mean = mean;
      double var = 0.0;
      for (std::size_t i = 0; i < nn; ++i) {
        const double dx = path.x(std::ptrdiff_t(i)) - mean;
        var += trap_w(i, nn, hs) * path.values[i] * dx * dx;
      }
      path.variance = var;
    }
    js[std::size_t(k)] =
        path.variance * fisher_integral(path) - 1.0;
  }

  DeBruijnPath out;
  out.t_nodes = ts;
  out.J_path = js;

  std::vector<double> f(mz);
  for (int k = 0; k < m; ++k)
    f[std::size_t(k)] = js[std::size_t(k)] / (2.0 * (1.0 - ts[std::size_t(k)]));

  // c / sqrt(t) + const model pins the integrable singularity at t = 0
  const double c = (f[0] - f[1]) /
                   (1.0 / std::sqrt(ts[0]) - 1.0 / std::sqrt(ts[1]));
  std::vector<double> integrand(mz + 1);
  integrand[0] = c * 2.0 * std::sqrt(3.0 * (1.0 - clip));
  for (int k = 0; k < m; ++k)
    integrand[std::size_t(k) + 1] = f[std::size_t(k)] * tps[std::size_t(k)];
  out.D_clipped = trapezoid(integrand, 1.0 / double(m));

  // linear continuation across the [1-clip, 1] sliver
  const double slope = (f[std::size_t(m - 1)] - f[std::size_t(m - 2)]) /
                       (ts[std::size_t(m - 1)] - ts[std::size_t(m - 2)]);
  const double fend =
      f[std::size_t(m - 1)] + slope * (1.0 - ts[std::size_t(m - 1)]);
  out.D_integral = out.D_clipped + 0.5 * (f[std::size_t(m - 1)] + fend) * clip;
  out.D_direct = relative_entropy(d);
  return out;
}

}  // namespace fclt
