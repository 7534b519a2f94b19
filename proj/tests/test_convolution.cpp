// Convolutions, standardized sums, conditional scores, and the two-point
// information drop.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fisherclt/convolution.hpp"
#include "fisherclt/families.hpp"
#include "fisherclt/grid.hpp"
#include "fisherclt/info.hpp"

using namespace fclt;

namespace {
DistributionSpec canonical_mixture() {
  return spec_mixture({0.5, 0.5}, {-1.0, 1.0}, {std::sqrt(0.5), std::sqrt(0.5)});
}
double skewness(const GridDensity& d) {
  return moments(d, 3) / std::pow(moments(d, 2), 1.5);
}
}  // namespace

TEST_CASE("convolve: normal + normal = normal with doubled variance") {
  const GridDensity a = materialize(spec_normal());
  const GridDensity c = convolve(a, a);
  CHECK(c.n() == 2 * a.n() - 1);
  CHECK(std::abs(c.mean) < 1e-10);
  CHECK(c.variance == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(std::abs(trapezoid(c.values, c.h) - 1.0) < 1e-12);
  const double inv_norm = 0.3989422804014326779 / std::sqrt(2.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < c.n(); ++i) {
    const double x = c.x(std::ptrdiff_t(i));
    worst = std::max(worst,
                     std::abs(c.values[i] - inv_norm * std::exp(-0.25 * x * x)));
  }
  CHECK(worst < 1e-5);  // discrete-convolution quadrature is O(h^2)
  // The refine hook reconvolves the refined inputs coherently.
  REQUIRE(bool(c.refine));
  const GridDensity cr = c.refine(1);
  CHECK(cr.h == doctest::Approx(0.5 * c.h).epsilon(1e-12));
  CHECK(cr.variance == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("standardized_sum: exact first two moments, correct skewness decay") {
  const GridDensity d = materialize(spec_gamma(5.0));
  const GridDensity u4 = standardized_sum(d, 4);
  CHECK(std::abs(u4.mean) < 1e-10);
  CHECK(u4.variance == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_NOTHROW(check_density(u4));
  // skew(U_n) = skew(X)/sqrt(n)
  CHECK(skewness(u4) == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-4));
  // n = 1 is plain standardization
  const GridDensity u1 = standardized_sum(d, 1);
  CHECK(u1.n() == d.n());
  CHECK(std::abs(u1.variance - 1.0) < 1e-12);
}

TEST_CASE("standardized_sum: large n keeps the mass inside the window") {
  const GridDensity d = materialize(spec_exponential());
  const GridDensity u64 = standardized_sum(d, 64);
  CHECK_NOTHROW(check_density(u64));
  CHECK(std::abs(u64.mean) < 1e-10);
  CHECK(u64.variance == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(skewness(u64) == doctest::Approx(2.0 / 8.0).epsilon(2e-3));
  CHECK(u64.values.front() * u64.h < 1e-9);
  CHECK(u64.values.back() * u64.h < 1e-9);
}

TEST_CASE("exponential rate law: J(U_n) = 2/(n-2)") {
  const GridDensity d = materialize(spec_exponential());
  const FisherValue j4 = standardized_fisher(standardized_sum(d, 4));
  REQUIRE_FALSE(j4.infinite);
  CHECK(j4.value == doctest::Approx(1.0).epsilon(1e-3));
  const FisherValue j8 = standardized_fisher(standardized_sum(d, 8));
  REQUIRE_FALSE(j8.infinite);
  CHECK(j8.value == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
}

TEST_CASE("two-fold information: pinned J(U_2) values") {
  auto j2_of = [](const DistributionSpec& s) {
    const GridDensity d = materialize(s);
    return standardized_fisher(standardized_sum(d, 2));
  };
  const FisherValue g5 = j2_of(spec_gamma(5.0));
  REQUIRE_FALSE(g5.infinite);
  CHECK(g5.value == doctest::Approx(0.250006).epsilon(1e-3));
  const FisherValue g8 = j2_of(spec_gamma(8.0));
  REQUIRE_FALSE(g8.infinite);
  CHECK(g8.value == doctest::Approx(0.142859).epsilon(1e-3));
  const FisherValue mx = j2_of(canonical_mixture());
  REQUIRE_FALSE(mx.infinite);
  CHECK(mx.value == doctest::Approx(0.095679).epsilon(1e-3));
  const FisherValue lp = j2_of(spec_laplace(0.0, 1.0 / std::sqrt(2.0)));
  REQUIRE_FALSE(lp.infinite);
  CHECK(lp.value == doctest::Approx(0.192654).epsilon(1e-3));
}

TEST_CASE("standardized_sums: ordering and doubling bookkeeping") {
  const GridDensity d = materialize(spec_gamma(5.0));
  const SumSequence seq = standardized_sums(d, {8, 1, 4, 2, 3});
  CHECK(seq.n_set == std::vector<int>{1, 2, 3, 4, 8});
  // Positions whose n doubles the immediately preceding entry.
  CHECK(seq.doubling_index == std::vector<int>{1, 4});
  CHECK(seq.entries.size() == 5);
  CHECK(std::abs(seq.entries.at(3).variance - 1.0) < 1e-10);
}

TEST_CASE("sum_score_projection: conditional-score identities") {
  const GridDensity d = standardize(materialize(spec_gamma(5.0)));
  const ScoreField sp = sum_score_projection(d, d);
  CHECK(sp.score.n() == 2 * d.n() - 1);
  CHECK(std::abs(trapezoid(sp.density_ref.values, sp.density_ref.h) - 1.0) <
        1e-12);
  // E rho_bar(S) = E rho(Y2) = 0 and E S rho_bar(S) = E Y2 rho(Y2) = -1.
  const GridDensity& ps = sp.density_ref;
  double e_rho = 0.0, e_srho = 0.0, mass = 0.0;
  for (std::size_t k = 0; k < ps.n(); ++k) {
    if (!sp.valid_mask[k]) continue;
    const double w = trap_w(k, ps.n(), ps.h) * ps.values[k];
    e_rho += w * sp.score.values[k];
    e_srho += w * ps.x(std::ptrdiff_t(k)) * sp.score.values[k];
    mass += w;
  }
  CHECK(mass > 0.999);
  CHECK(std::abs(e_rho) < 2e-3);
  CHECK(e_srho == doctest::Approx(-1.0).epsilon(2e-3));
}

TEST_CASE("sum_score_projection agrees with the direct score of the sum") {
  // Gaussian case: rho_bar(s) = -s/2 exactly in the continuum.
  const GridDensity n = materialize(spec_normal());
  const ScoreField sp = sum_score_projection(n, n);
  const ScoreField direct = score(sp.density_ref);
  const double pmax = *std::max_element(sp.density_ref.values.begin(),
                                        sp.density_ref.values.end());
  double worst_vs_exact = 0.0, worst_vs_direct = 0.0;
  for (std::size_t k = 0; k < sp.score.n(); ++k) {
    if (!sp.valid_mask[k] || !direct.valid_mask[k]) continue;
    if (sp.density_ref.values[k] < 1e-9 * pmax) continue;
    const double s = sp.score.x(std::ptrdiff_t(k));
    if (std::abs(sp.score.values[k]) * sp.score.h > 0.05) continue;
    worst_vs_exact =
        std::max(worst_vs_exact, std::abs(sp.score.values[k] + 0.5 * s));
    worst_vs_direct = std::max(
        worst_vs_direct, std::abs(sp.score.values[k] - direct.score.values[k]));
  }
  // The masked sup carries the cut-face error of the score floor near the
  // mask edge; 2e-4 at this resolution, well inside the 1e-3 contract.
  CHECK(worst_vs_exact < 1e-3);
  CHECK(worst_vs_direct < 1e-3);
}

TEST_CASE("fisher_drop: variance identity for the information decrement") {
  const GridDensity g5 = standardize(materialize(spec_gamma(5.0)));
  const FisherDropReport r = fisher_drop(g5);
  REQUIRE_FALSE(r.infinite);
  // I(Y) - I(U_2) = 5/3 - 5/4 for the gamma(5) shape.
  CHECK(r.drop == doctest::Approx(5.0 / 3.0 - 5.0 / 4.0).epsilon(2e-3));
  CHECK(r.identity_gap < 1e-2 * r.drop);
  CHECK(r.lambda_opt == doctest::Approx(0.375).epsilon(5e-3));

  const FisherDropReport m = fisher_drop(standardize(materialize(canonical_mixture())));
  REQUIRE_FALSE(m.infinite);
  CHECK(m.identity_gap < 1e-2 * m.drop);
  CHECK(m.drop > 0.0);
}

TEST_CASE("fisher_drop: identity gap contracts under refinement") {
  const GridDensity g5 = standardize(materialize(spec_gamma(5.0)));
  const FisherDropReport r0 = fisher_drop(g5);
  const FisherDropReport r1 = fisher_drop(g5.refine(1));
  CHECK(r1.identity_gap < 0.6 * r0.identity_gap + 1e-12);
}

TEST_CASE("fisher_drop: divergence propagates") {
  CHECK(fisher_drop(standardize(materialize(spec_exponential()))).infinite);
}

TEST_CASE("congruence guard") {
  const GridDensity a = materialize(spec_normal());
  const GridDensity b = materialize(spec_normal(), 2048);
  CHECK_THROWS(convolve(a, b));
}
