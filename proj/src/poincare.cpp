#include "fisherclt/poincare.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace fclt {

namespace {

// Discretization of sup Var g / E g'^2 on a grid block: mass M_i = p_i w_i
// (trapezoid weights), stiffness from midpoint densities pm_i = (p_i+p_{i+1})/2,
//   (A g)_i = sum of pm/h couplings  =>  -(p g')' with natural BCs.
// Everything below works on the symmetrically scaled z = sqrt(M) g, where
// A becomes the tridiagonal (diag, off) and constants map to sqrt(M).
struct Assembled {
  std::vector<double> xb, pb;   // block grid and density
  std::vector<double> M, pm;    // lumped mass, midpoint density
  std::vector<double> diag, off;  // scaled tridiagonal
  double h = 0.0;
};

Assembled assemble(const GridDensity& d) {
  const double pmax = *std::max_element(d.values.begin(), d.values.end());
  if (!(pmax > 0.0)) throw std::invalid_argument("poincare: empty density");
  const double cut = 1e-280 * pmax;
  // largest contiguous block above the excision cut
  std::size_t best_a = 0, best_b = 0, i = 0;
  const std::size_t n = d.n();
  while (i < n) {
    if (d.values[i] <= cut) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && d.values[j + 1] > cut) ++j;
    if (j - i > best_b - best_a) {
      best_a = i;
      best_b = j;
    }
    i = j + 1;
  }
  const std::size_t nb = best_b - best_a + 1;
  if (nb < 8) throw std::invalid_argument("poincare: resolvable block too small");

  Assembled as;
  as.h = d.h;
  as.xb.resize(nb);
  as.pb.resize(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    as.xb[k] = d.x(std::ptrdiff_t(best_a + k));
    as.pb[k] = d.values[best_a + k];
  }
  as.M.resize(nb);
  for (std::size_t k = 0; k < nb; ++k) as.M[k] = as.pb[k] * trap_w(k, nb, d.h);
  as.pm.resize(nb - 1);
  for (std::size_t k = 0; k + 1 < nb; ++k)
    as.pm[k] = 0.5 * (as.pb[k] + as.pb[k + 1]);

  std::vector<double> dA(nb, 0.0);
  for (std::size_t k = 0; k + 1 < nb; ++k) {
    dA[k] += as.pm[k] / d.h;
    dA[k + 1] += as.pm[k] / d.h;
  }
  as.diag.resize(nb);
  for (std::size_t k = 0; k < nb; ++k) as.diag[k] = dA[k] / as.M[k];
  as.off.resize(nb - 1);
  // sqrt before multiplying: M_k M_{k+1} underflows for deep tails (p down
  // near the excision cut) even though the scaled coupling itself is benign.
  for (std::size_t k = 0; k + 1 < nb; ++k)
    as.off[k] =
        -as.pm[k] / d.h / (std::sqrt(as.M[k]) * std::sqrt(as.M[k + 1]));
  return as;
}

// #eigenvalues of the scaled tridiagonal strictly below x (Sturm/LDL^T).
int sturm_count(const Assembled& as, double x) {
  int cnt = 0;
  double q = as.diag[0] - x;
  if (q < 0.0) ++cnt;
  for (std::size_t k = 1; k < as.diag.size(); ++k) {
    if (q == 0.0) q = 1e-300;
    q = as.diag[k] - x - as.off[k - 1] * as.off[k - 1] / q;
    if (q < 0.0) ++cnt;
  }
  return cnt;
}

// k-th smallest eigenvalue (k = 1 is the smallest), 300 bisections.
double smallest_k(const Assembled& as, int k) {
  double hims = 0.0, maxd = as.diag[0];
  for (double v : as.diag) maxd = std::max(maxd, v);
  for (double v : as.off) hims = std::max(hims, std::abs(v));
  double hi = maxd + 2.0 * hims;
  double lo = -1e-6 * hi;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    (sturm_count(as, mid) >= k ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// Factorized shifted solve: (T - mu I) X = B for several right-hand sides.
struct TriSolver {
  lapack_int n = 0;
  std::vector<double> dl, dd, du, du2;
  std::vector<lapack_int> ipiv;

  TriSolver(const Assembled& as, double mu) {
    n = lapack_int(as.diag.size());
    du2.resize(std::size_t(std::max<lapack_int>(n - 2, 0)));
    ipiv.resize(std::size_t(n));
    // When the bisected shift lands machine-exactly on an eigenvalue the
    // factorization hits a zero pivot; retry with the shift backed off by
    // an amount tied to the matrix magnitude (a mu-relative nudge would
    // vanish against pivots of size ~1/h^2).
    double scale = std::abs(mu);
    for (double v : as.diag) scale = std::max(scale, std::abs(v));
    const double mu0 = mu;
    for (int attempt = 0; attempt < 4; ++attempt) {
      if (attempt > 0)
        mu = mu0 - scale * 1e-13 * std::pow(10.0, double(attempt - 1));
      dd.resize(as.diag.size());
      for (std::size_t i = 0; i < as.diag.size(); ++i)
        dd[i] = as.diag[i] - mu;
      dl.assign(as.off.begin(), as.off.end());
      du.assign(as.off.begin(), as.off.end());
      const lapack_int info = LAPACKE_dgttrf(n, dl.data(), dd.data(),
                                             du.data(), du2.data(),
                                             ipiv.data());
      if (info == 0) return;
      if (info < 0)
        throw std::runtime_error("poincare: dgttrf failed, info=" +
                                 std::to_string(info));
    }
    throw std::runtime_error("poincare: singular shifted system");
  }

  void solve(std::vector<double>& b_cols, lapack_int nrhs) const {
    const lapack_int info = LAPACKE_dgttrs(
        LAPACK_COL_MAJOR, 'N', n, nrhs, dl.data(), dd.data(), du.data(),
        du2.data(), ipiv.data(), b_cols.data(), n);
    if (info != 0) throw std::runtime_error("poincare: dgttrs failed");
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void normalize(std::vector<double>& v) {
  const double nn = std::sqrt(dot(v, v));
  if (!(nn > 0.0)) throw std::runtime_error("poincare: zero iterate");
  for (auto& x : v) x /= nn;
}

std::vector<double> mat_apply(const Assembled& as,
                              const std::vector<double>& z) {
  const std::size_t nb = as.diag.size();
  std::vector<double> out(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    double v = as.diag[i] * z[i];
    if (i > 0) v += as.off[i - 1] * z[i - 1];
    if (i + 1 < nb) v += as.off[i] * z[i + 1];
    out[i] = v;
  }
  return out;
}

// Secular function v^T (T - mu)^{-1} v for the constrained eigenvalue.
double secular(const Assembled& as, const std::vector<double>& v, double mu) {
  TriSolver solver(as, mu);
  std::vector<double> rhs(v);
  solver.solve(rhs, 1);
  return dot(v, rhs);
}

// Shifted inverse iteration constrained to the orthocomplement of V.
// Returns the converged unit iterate and its Rayleigh quotient.
std::pair<std::vector<double>, double> bordered_invit(
    const Assembled& as, const std::vector<std::vector<double>>& V, double mu,
    std::vector<double> y) {
  const std::size_t nb = as.diag.size();
  auto project = [&](std::vector<double>& w) {
    for (const auto& vcol : V) axpy(w, -dot(vcol, w), vcol);
  };
  project(y);
  normalize(y);
  const TriSolver solver(as, mu);
  const lapack_int ncol = lapack_int(V.size()) + 1;
  for (int step = 0; step < 8; ++step) {
    std::vector<double> cols((std::size_t(ncol)) * nb);
    std::copy(y.begin(), y.end(), cols.begin());
    for (std::size_t c = 0; c < V.size(); ++c)
      std::copy(V[c].begin(), V[c].end(), cols.begin() + std::ptrdiff_t((c + 1) * nb));
    solver.solve(cols, ncol);
    std::vector<double> ky(cols.begin(), cols.begin() + std::ptrdiff_t(nb));
    // remove the constraint components reintroduced by the solve
    if (!V.empty()) {
      // Solve the small Gram system (V^T K^{-1} V) a = V^T K^{-1} y.
      const std::size_t m = V.size();
      std::vector<std::vector<double>> kv(m);
      for (std::size_t c = 0; c < m; ++c)
        kv[c].assign(cols.begin() + std::ptrdiff_t((c + 1) * nb),
                     cols.begin() + std::ptrdiff_t((c + 2) * nb));
      std::vector<double> G(m * m), rhs(m);
      for (std::size_t r = 0; r < m; ++r) {
        rhs[r] = dot(V[r], ky);
        for (std::size_t c = 0; c < m; ++c) G[r * m + c] = dot(V[r], kv[c]);
      }
      std::vector<double> alpha(rhs);
      if (m == 1) {
        alpha[0] = rhs[0] / G[0];
      } else {  // m == 2
        const double det = G[0] * G[3] - G[1] * G[2];
        alpha[0] = (rhs[0] * G[3] - rhs[1] * G[1]) / det;
        alpha[1] = (rhs[1] * G[0] - rhs[0] * G[2]) / det;
      }
      for (std::size_t c = 0; c < m; ++c) axpy(ky, -alpha[c], kv[c]);
    }
    project(ky);
    normalize(ky);
    y = std::move(ky);
  }
  const std::vector<double> ay = mat_apply(as, y);
  return {y, dot(y, ay)};
}

struct SolveResult {
  double value = 0.0;
  GridFunction extremal;
  double resid = 0.0;
};

SolveResult solve_mode(const GridDensity& d, bool restricted) {
  const Assembled as = assemble(d);
  const std::size_t nb = as.diag.size();

  std::vector<double> sqm(nb);
  for (std::size_t i = 0; i < nb; ++i) sqm[i] = std::sqrt(as.M[i]);
  std::vector<double> nconst(sqm);
  normalize(nconst);

  std::vector<std::vector<double>> V{nconst};
  double mu;
  std::vector<double> y0(nb);
  if (!restricted) {
    mu = smallest_k(as, 2);  // above the constant kernel mode
    for (std::size_t i = 0; i < nb; ++i) y0[i] = sqm[i] * as.xb[i];
  } else {
    // extra constraint E g' = 0, as the cellwise functional sum pm (g_{i+1}-g_i)
    std::vector<double> v(nb, 0.0);
    for (std::size_t i = 0; i + 1 < nb; ++i) {
      v[i] -= as.pm[i];
      v[i + 1] += as.pm[i];
    }
    for (std::size_t i = 0; i < nb; ++i) v[i] /= sqm[i];
    axpy(v, -dot(nconst, v), nconst);
    normalize(v);
    V.push_back(v);

    const double lam1 = smallest_k(as, 2);
    const double lam2 = smallest_k(as, 3);
    const double gap = lam2 - lam1;
    const double a = lam1 + gap * 1e-9, b = lam2 - gap * 1e-9;
    if (secular(as, v, a) > 0.0) {
      mu = lam1;  // constraint already satisfied by the first mode
    } else if (secular(as, v, b) < 0.0) {
      mu = lam2;
    } else {
      double lo = a, hi = b;
      for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        (secular(as, v, mid) < 0.0 ? lo : hi) = mid;
      }
      mu = 0.5 * (lo + hi);
    }
    double mass = 0.0, ex2 = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
      mass += as.M[i];
      ex2 += as.M[i] * as.xb[i] * as.xb[i];
    }
    for (std::size_t i = 0; i < nb; ++i)
      y0[i] = sqm[i] * (as.xb[i] * as.xb[i] - ex2 / mass);
  }

  auto [y, lam] = bordered_invit(as, V, mu, y0);

  SolveResult res;
  if (!(lam > 0.0)) throw std::runtime_error("poincare: nonpositive eigenvalue");
  res.value = 1.0 / lam;

  // eigen-equation residual orthogonal to the constraints
  std::vector<double> r = mat_apply(as, y);
  axpy(r, -lam, y);
  for (const auto& vcol : V) axpy(r, -dot(vcol, r), vcol);
  res.resid = std::sqrt(dot(r, r)) / lam;

  res.extremal.x_min = as.xb.front();
  res.extremal.h = as.h;
  res.extremal.values.resize(nb);
  for (std::size_t i = 0; i < nb; ++i)
    res.extremal.values[i] = y[i] / sqm[i];
  std::size_t imax = 0;
  for (std::size_t i = 1; i < nb; ++i)
    if (std::abs(res.extremal.values[i]) > std::abs(res.extremal.values[imax]))
      imax = i;
  if (res.extremal.values[imax] < 0.0)
    for (auto& g : res.extremal.values) g = -g;
  return res;
}

PoincareEstimate run(const GridDensity& d, bool restricted,
                     const std::string& label, bool trace_and_widen) {
  SolveResult s = solve_mode(d, restricted);
  PoincareEstimate est;
  est.value = s.value;
  est.extremal = std::move(s.extremal);
  est.constraint = label;
  est.rayleigh_residual = s.resid;
  est.refinement_trace.emplace_back(d.h, s.value);
  if (!trace_and_widen) return est;
  if (d.refine) {
    const GridDensity fine = d.refine(1);
    est.refinement_trace.emplace_back(fine.h, solve_mode(fine, restricted).value);
  }
  if (d.widen) {
    // growth under domain extension signals a divergent constant
    const double r1 = solve_mode(d.widen(1.35), restricted).value;
    const double r2 = solve_mode(d.widen(1.35 * 1.35), restricted).value;
    if (r1 > 1.10 * s.value && r2 > 1.10 * r1) {
      est.infinite = true;
      est.value = r2;
    }
  }
  return est;
}

}  // namespace

PoincareEstimate poincare_constant(const GridDensity& d) {
  return run(d, false, "full", true);
}

PoincareEstimate restricted_poincare(const GridDensity& d) {
  return run(d, true, "restricted", true);
}

PoincareEstimate truncated_poincare(const GridDensity& d, double T) {
  const GridDensity cond = conditional_truncate(d, T);
  char buf[64];
  std::snprintf(buf, sizeof buf, "truncated(%g)", T);
  return run(cond, false, buf, false);
}

double borovkov_utev_ratio(const GridDensity& d, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("borovkov_utev_ratio: T <= 0");
  const std::size_t n = d.n();
  const double pmax = *std::max_element(d.values.begin(), d.values.end());
  const double floor_abs = 1e-12 * pmax;
  const double m = d.mean;

  double best = 0.0;
  {  // right statistic on [m, m + T]
    std::ptrdiff_t iT = std::ptrdiff_t(std::floor((m + T - d.x_min) / d.h));
    iT = std::min(iT, std::ptrdiff_t(n) - 1);
    double integ = 0.0;
    double prev_f = (d.x(iT) - m) * d.values[std::size_t(iT)];
    for (std::ptrdiff_t i = iT; i >= 0; --i) {
      const double y = d.x(i) - m;
      if (y < 0.0) break;
      const double f = y * d.values[std::size_t(i)];
      if (i < iT) integ += 0.5 * d.h * (f + prev_f);
      prev_f = f;
      if (d.values[std::size_t(i)] >= floor_abs)
        best = std::max(best, integ / d.values[std::size_t(i)]);
    }
  }
  {  // mirrored left statistic on [m - T, m]
    std::ptrdiff_t iT = std::ptrdiff_t(std::ceil((m - T - d.x_min) / d.h));
    iT = std::max<std::ptrdiff_t>(iT, 0);
    double integ = 0.0;
    double prev_f = -(d.x(iT) - m) * d.values[std::size_t(iT)];
    for (std::ptrdiff_t i = iT; i < std::ptrdiff_t(n); ++i) {
      const double y = d.x(i) - m;
      if (y > 0.0) break;
      const double f = -y * d.values[std::size_t(i)];
      if (i > iT) integ += 0.5 * d.h * (f + prev_f);
      prev_f = f;
      if (d.values[std::size_t(i)] >= floor_abs)
        best = std::max(best, integ / d.values[std::size_t(i)]);
    }
  }
  return best;
}

}  // namespace fclt
