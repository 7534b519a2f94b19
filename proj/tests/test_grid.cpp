// Grid container, family materialization, and density-contract tests.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fisherclt/families.hpp"
#include "fisherclt/grid.hpp"

using namespace fclt;

namespace {
double sup_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}
}  // namespace

TEST_CASE("materialized families satisfy the density contract") {
  const std::vector<DistributionSpec> specs = {
      spec_normal(),          spec_exponential(),
      spec_gamma(5.0),        spec_uniform(-1.0, 1.0),
      spec_laplace(),         spec_mixture({0.5, 0.5}, {-1.0, 1.0},
                                           {std::sqrt(0.5), std::sqrt(0.5)})};
  for (const auto& s : specs) {
    const GridDensity d = materialize(s);
    CAPTURE(s.family);
    CHECK_NOTHROW(check_density(d));
    CHECK(std::abs(trapezoid(d.values, d.h) - 1.0) < 1e-12);
    CHECK(d.variance > 0.0);
    CHECK(d.n() == 4096);
  }
}

TEST_CASE("normal grid moments and domain") {
  const GridDensity d = materialize(spec_normal());
  // The 12-sigma floor governs the window for the standard normal.
  CHECK(d.x_min == doctest::Approx(-12.0).epsilon(1e-12));
  CHECK(d.x_max() == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(std::abs(d.mean) < 1e-10);
  CHECK(std::abs(d.variance - 1.0) < 1e-9);
  CHECK(std::abs(moments(d, 3)) < 1e-9);
  CHECK(moments(d, 4) == doctest::Approx(3.0).epsilon(1e-8));
  CHECK_FALSE(d.edge_left);
  CHECK_FALSE(d.edge_right);
}

TEST_CASE("gamma grid: support edge on node, raw moments") {
  const GridDensity d = materialize(spec_gamma(5.0));
  CHECK(d.x_min == 0.0);  // exactly on the support endpoint
  CHECK(d.edge_left);
  CHECK_FALSE(d.edge_right);
  CHECK(d.mean == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(d.variance == doctest::Approx(5.0).epsilon(1e-6));
  const double skew = moments(d, 3) / std::pow(moments(d, 2), 1.5);
  CHECK(skew == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-5));
}

TEST_CASE("centred exponential: support edge at -1/rate") {
  const GridDensity d = materialize(spec_exponential(2.0));
  CHECK(d.x_min == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(d.edge_left);
  // Trapezoid moments at a support edge with nonzero slope carry an
  // O(h^2) Euler-Maclaurin boundary term, so the tolerances are looser
  // than for the smooth families.
  CHECK(std::abs(d.mean) < 1e-5);
  CHECK(d.variance == doctest::Approx(0.25).epsilon(1e-4));
  CHECK(d.values.front() > 1.9);  // density rate/mass at the edge
}

TEST_CASE("halfwidth request clips to the support") {
  const GridDensity d = materialize(spec_exponential(1.0), 8192, 240.0);
  CHECK(d.x_min == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(d.x_max() == doctest::Approx(240.0).epsilon(1e-12));
  CHECK(d.edge_left);
  CHECK_NOTHROW(check_density(d));
}

TEST_CASE("standardize: quadrature moments pinned to (0, 1)") {
  const GridDensity d = materialize(spec_gamma(5.0));
  const GridDensity s = standardize(d);
  CHECK(std::abs(s.mean) < 1e-12);
  CHECK(std::abs(s.variance - 1.0) < 1e-12);
  CHECK(s.n() == d.n());
  // Idempotent up to floating-point dust.
  const GridDensity s2 = standardize(s);
  CHECK(sup_abs_diff(s.values, s2.values) < 1e-12);
  CHECK(std::abs(s.x_min - s2.x_min) < 1e-12);
}

TEST_CASE("affine_scale relabels exactly and standardize undoes it") {
  const GridDensity d = materialize(spec_gamma(5.0));
  const GridDensity a = affine_scale(d, 3.0, 2.0);
  CHECK(std::abs(trapezoid(a.values, a.h) - 1.0) < 1e-12);
  CHECK(a.mean == doctest::Approx(2.0 * d.mean + 3.0).epsilon(1e-12));
  CHECK(a.variance == doctest::Approx(4.0 * d.variance).epsilon(1e-12));
  const GridDensity sd = standardize(d), sa = standardize(a);
  CHECK(sup_abs_diff(sd.values, sa.values) < 1e-12);
  CHECK(std::abs(sd.x_min - sa.x_min) < 1e-12);
  CHECK(std::abs(sd.h - sa.h) < 1e-15);
}

TEST_CASE("conditional_truncate: uniform window is exact") {
  const double r3 = std::sqrt(3.0);
  const GridDensity u = materialize(spec_uniform(-r3, r3));
  const GridDensity t = conditional_truncate(u, 1.0);
  CHECK(t.x_min == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(t.x_max() == doctest::Approx(1.0).epsilon(1e-12));
  for (double v : t.values) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(t.mean) < 1e-12);
  CHECK(t.variance == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("conditional_truncate: analytic resampling barely changes a wide normal") {
  const GridDensity d = materialize(spec_normal());
  const GridDensity t = conditional_truncate(d, 10.0);
  CHECK(t.n() == d.n());
  const double c = 0.3989422804014326779;
  double worst = 0.0;
  for (std::size_t i = 0; i < t.n(); ++i) {
    const double x = t.x(std::ptrdiff_t(i));
    const double phi = c * std::exp(-0.5 * x * x);
    worst = std::max(worst, std::abs(t.values[i] / phi - 1.0));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("conditional_truncate: node cropping without an analytic pdf") {
  GridDensity d = materialize(spec_normal());
  d.pdf = nullptr;  // pretend this came from a derived computation
  d.refine = nullptr;
  d.widen = nullptr;
  const GridDensity t = conditional_truncate(d, 5.0);
  CHECK(t.x_min >= -5.0 - 1e-12);
  CHECK(t.x_min <= -5.0 + d.h + 1e-12);
  CHECK(std::abs(trapezoid(t.values, t.h) - 1.0) < 1e-12);
  CHECK(t.h == d.h);
}

TEST_CASE("check_density rejects contract violations") {
  const GridDensity good = materialize(spec_normal());

  GridDensity bad_mass = good;
  for (double& v : bad_mass.values) v *= 1.01;
  CHECK_THROWS_AS(check_density(bad_mass), std::invalid_argument);

  GridDensity bad_neg = good;
  bad_neg.values[100] = -bad_neg.values[100] - 1e-6;
  CHECK_THROWS_AS(check_density(bad_neg), std::invalid_argument);

  GridDensity stale = good;
  stale.mean += 0.5;
  CHECK_THROWS_AS(check_density(stale), std::invalid_argument);
}

TEST_CASE("interp_linear: inside, outside, and on nodes") {
  GridFunction f;
  f.x_min = 0.0;
  f.h = 0.1;
  f.values.resize(11);
  for (int i = 0; i <= 10; ++i) f.values[i] = (0.1 * i) * (0.1 * i);
  CHECK(interp_linear(f, 0.3) == doctest::Approx(0.09).epsilon(1e-12));
  CHECK(interp_linear(f, 0.35) == doctest::Approx(0.1250).epsilon(1e-2));
  CHECK(interp_linear(f, -0.1) == 0.0);
  CHECK(interp_linear(f, 1.1) == 0.0);
  CHECK(interp_linear(f, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("refine hook: halved step on the same domain") {
  const GridDensity d = materialize(spec_normal());
  REQUIRE(bool(d.refine));
  const GridDensity r = d.refine(1);
  CHECK(r.n() == 2 * d.n() - 1);
  CHECK(r.x_min == doctest::Approx(d.x_min).epsilon(1e-14));
  CHECK(r.x_max() == doctest::Approx(d.x_max()).epsilon(1e-12));
  CHECK(r.h == doctest::Approx(0.5 * d.h).epsilon(1e-14));
  CHECK_NOTHROW(check_density(r));
  const GridDensity r2 = d.refine(2);
  CHECK(r2.n() == 4 * (d.n() - 1) + 1);
}

TEST_CASE("widen hook: stretched domain, same law") {
  const GridDensity d = materialize(spec_normal());
  REQUIRE(bool(d.widen));
  const GridDensity w = d.widen(1.35);
  CHECK((w.x_max() - w.x_min) / (d.x_max() - d.x_min) ==
        doctest::Approx(1.35).epsilon(1e-9));
  CHECK(std::abs(w.mean - d.mean) < 1e-9);
  CHECK(w.variance == doctest::Approx(d.variance).epsilon(1e-9));

  const GridDensity g = materialize(spec_gamma(5.0));
  const GridDensity wg = g.widen(1.35);
  CHECK(wg.x_min == 0.0);  // bounded side stays put
  CHECK(wg.x_max() > g.x_max() * 1.2);
}

TEST_CASE("table family: triangular density") {
  DistributionSpec s;
  s.family = "table";
  s.table_x = {-1.0, 0.0, 1.0};
  s.table_p = {0.0, 1.0, 0.0};
  const GridDensity d = materialize(s, 4097);
  CHECK(d.x_min == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(d.edge_left);
  CHECK(d.edge_right);
  CHECK(std::abs(d.mean) < 1e-12);
  CHECK(d.variance == doctest::Approx(1.0 / 6.0).epsilon(1e-6));
}

TEST_CASE("singular densities are rejected at materialization") {
  CHECK_THROWS_AS(materialize(spec_gamma(0.5)), std::invalid_argument);
}
