// End-to-end verification sweeps: O(1/n) bounds, two-fold step, skewness
// floors, doubling monotonicity, tail matrices, and serialization formats.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fisherclt/families.hpp"
#include "fisherclt/harness.hpp"
#include "fisherclt/serialize.hpp"

using namespace fclt;

namespace {
DistributionSpec canonical_mixture() {
  return spec_mixture({0.5, 0.5}, {-1.0, 1.0}, {std::sqrt(0.5), std::sqrt(0.5)});
}
bool has(const std::string& s, const std::string& needle) {
  return s.find(needle) != std::string::npos;
}
}  // namespace

TEST_CASE("verify_o1n: gamma(5) passes every asserted bound") {
  const SweepReport rep = verify_o1n(spec_gamma(5.0), {1, 2, 4, 8});
  CHECK(rep.all_ok);
  const auto& C = rep.constants;
  CHECK_FALSE(C.JX_infinite);
  CHECK_FALSE(C.R_infinite);
  CHECK_FALSE(C.Rstar_infinite);
  CHECK(C.sigma2 == doctest::Approx(5.0).epsilon(1e-5));
  CHECK(C.J_X == doctest::Approx(2.0 / 3.0).epsilon(2e-3));
  CHECK(C.D_X == doctest::Approx(0.070074).epsilon(1e-3));
  CHECK(C.R == doctest::Approx(1.439992).epsilon(1e-3));
  CHECK(C.R_star == doctest::Approx(1.190650).epsilon(1e-3));
  CHECK(C.skewness_s == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-3));

  REQUIRE(rep.rows.size() == 4);
  for (const auto& row : rep.rows) {
    CAPTURE(row.n);
    CHECK_FALSE(row.J_infinite);
    CHECK(has(row.flags, "sharp=ok"));
    CHECK(has(row.flags, "thm=ok"));  // 2 R* = 2.38 >= 1: hypothesis holds
    CHECK(has(row.flags, "D=ok"));
    CHECK(has(row.flags, "floor=ok"));
    CHECK(has(row.flags, "chain=ok"));
    // Structural column identities.
    CHECK(row.bound_J_sharp ==
          doctest::Approx(2.0 * C.R_star / (2.0 * C.R_star + double(row.n - 1)) *
                          C.J_X)
              .epsilon(1e-12));
    CHECK(row.bound_J_thm ==
          doctest::Approx(2.0 * C.R_star * C.J_X / double(row.n)).epsilon(1e-12));
    CHECK(row.bound_D ==
          doctest::Approx(2.0 * C.R * C.D_X / double(row.n)).epsilon(1e-12));
    CHECK(row.nJ == doctest::Approx(double(row.n) * row.J).epsilon(1e-12));
  }
  CHECK(rep.rows[0].J == doctest::Approx(C.J_X).epsilon(1e-10));
  CHECK(rep.rows[1].J == doctest::Approx(0.250006).epsilon(1e-3));
  // D decays along n.
  CHECK(rep.rows[3].D < rep.rows[0].D);
}

TEST_CASE("verify_o1n: mixture marks the rate form vacuous, never failed") {
  const SweepReport rep = verify_o1n(canonical_mixture(), {1, 2, 4});
  CHECK(rep.all_ok);
  CHECK(rep.family_label == "gaussian_mixture");
  CHECK(rep.constants.R_star == doctest::Approx(0.337568).epsilon(1e-3));
  CHECK(2.0 * rep.constants.R_star < 1.0);  // hypothesis genuinely fails
  CHECK(rep.constants.J_X == doctest::Approx(0.613891).epsilon(1e-3));
  for (const auto& row : rep.rows) {
    CAPTURE(row.n);
    CHECK(has(row.flags, "thm=na"));
    CHECK(has(row.flags, "sharp=ok"));
    CHECK(has(row.flags, "D=ok"));
    CHECK(has(row.flags, "chain=ok"));
  }
  CHECK(rep.rows[1].J == doctest::Approx(0.095679).epsilon(1e-3));
}

TEST_CASE("verify_o1n: exponential divergence rows, then the rate law") {
  const SweepReport rep = verify_o1n(spec_exponential(), {1, 2, 4, 8, 16});
  CHECK(rep.all_ok);
  const auto& C = rep.constants;
  CHECK(C.JX_infinite);
  CHECK_FALSE(C.R_infinite);
  CHECK(C.D_X == doctest::Approx(0.418939).epsilon(1e-3));
  CHECK(C.skewness_s == doctest::Approx(2.0).epsilon(1e-3));

  REQUIRE(rep.rows.size() == 5);
  CHECK(rep.rows[0].J_infinite);
  CHECK(rep.rows[1].J_infinite);
  for (std::size_t k = 2; k < 5; ++k) {
    const auto& row = rep.rows[k];
    CAPTURE(row.n);
    CHECK_FALSE(row.J_infinite);
    CHECK(row.J ==
          doctest::Approx(2.0 / double(row.n - 2)).epsilon(1.5e-3));
    CHECK(row.nJ > 4.0 / 3.0);
    // J_X diverges, so both J bounds stay hypothesis-vacuous.
    CHECK(has(row.flags, "sharp=na"));
    CHECK(has(row.flags, "thm=na"));
    CHECK(has(row.flags, "D=ok"));
    CHECK(has(row.flags, "chain=ok"));
  }
  for (const auto& row : rep.rows) CHECK(has(row.flags, "floor=ok"));
}

TEST_CASE("two-fold step with the intermediate variance inequality") {
  struct Want {
    DistributionSpec spec;
    double j1, j2;
  };
  const std::vector<Want> wants = {
      {spec_gamma(5.0), 2.0 / 3.0, 0.250006},
      {spec_gamma(8.0), 1.0 / 3.0, 0.142859},
      {spec_laplace(0.0, 1.0 / std::sqrt(2.0)), 0.997587, 0.192654},
      {canonical_mixture(), 0.613891, 0.095679},
  };
  for (const auto& w : wants) {
    const TwoFoldReport tf = verify_two_fold(w.spec);
    CAPTURE(w.spec.family);
    REQUIRE_FALSE(tf.vacuous);
    CHECK(tf.J1 == doctest::Approx(w.j1).epsilon(3e-3));
    CHECK(tf.J2 == doctest::Approx(w.j2).epsilon(3e-3));
    CHECK(tf.bound ==
          doctest::Approx(2.0 * tf.R_star / (2.0 * tf.R_star + 1.0) * tf.J1)
              .epsilon(1e-12));
    CHECK(tf.J2 <= tf.bound + 1e-6);
    CHECK(tf.slack > 0.0);
    CHECK(tf.rhs_ratio ==
          doctest::Approx(tf.J2 * tf.J2 / tf.J1).epsilon(1e-12));
    CHECK(tf.intermediate_slack > 0.0);
    CHECK(tf.intermediate_slack > -1e-4);  // the shipped acceptance margin
  }
  CHECK(verify_two_fold(spec_exponential()).vacuous);
}

TEST_CASE("skewness floor: J stays above the moment ratio") {
  const FloorReport fr = skewness_floor(spec_gamma(5.0), {1, 2, 4, 8});
  CHECK(fr.all_ok);
  CHECK(fr.skewness_s == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-3));
  CHECK(fr.s2_over_3 ==
        doctest::Approx(fr.skewness_s * fr.skewness_s / 3.0).epsilon(1e-12));
  REQUIRE(fr.rows.size() == 4);
  for (const auto& row : fr.rows) {
    CHECK_FALSE(row.J_infinite);
    CHECK(row.J >= row.floor - 1e-6);
    CHECK(row.ok);
  }
  // n * floor approaches s^2/3 as the kurtosis of U_n relaxes to 3.
  const auto& last = fr.rows.back();
  CHECK(double(last.n) * last.floor ==
        doctest::Approx(fr.s2_over_3).epsilon(0.1));
}

TEST_CASE("doubling sequence: divergence flags, then monotone decrease") {
  const DoublingReport exp_rep = monotone_doubling(spec_exponential(), 6);
  REQUIRE(exp_rep.n.size() == 7);
  CHECK(exp_rep.n.front() == 1);
  CHECK(exp_rep.n.back() == 64);
  CHECK(exp_rep.infinite[0]);
  CHECK(exp_rep.infinite[1]);
  CHECK(exp_rep.first_finite_n == 4);
  CHECK(exp_rep.monotone_ok);
  CHECK(exp_rep.diffs_shrink_ok);
  CHECK(exp_rep.J[2] == doctest::Approx(1.0).epsilon(1.5e-3));
  CHECK(exp_rep.J[6] == doctest::Approx(2.0 / 62.0).epsilon(1.5e-3));

  const DoublingReport g3 = monotone_doubling(spec_gamma(3.0), 3);
  CHECK(g3.first_finite_n == 1);
  CHECK(g3.monotone_ok);
}

TEST_CASE("tail matrix: monotone rows and column envelope") {
  const TailMatrix tm = tail_class_profile(spec_gamma(5.0), {1, 2, 4});
  CHECK(tm.rows_monotone);
  REQUIRE(tm.psi.size() == 3);
  REQUIRE(tm.psi[0].size() == kDefaultRadii.size());
  CHECK(tm.psi[0][0] == doctest::Approx(1.0 + 2.0 / 3.0).epsilon(5e-3));
  for (std::size_t j = 0; j < tm.radii.size(); ++j) {
    double colmax = 0.0;
    for (std::size_t i = 0; i < tm.psi.size(); ++i)
      colmax = std::max(colmax, tm.psi[i][j]);
    CHECK(tm.envelope[j] == doctest::Approx(colmax).epsilon(1e-12));
  }
}

TEST_CASE("smoothed discrete law: everything finite, bounds hold") {
  const SweepReport rep =
      smoothed_discrete_demo({-0.5, 0.5, 2.0}, {0.6, 0.3, 0.1}, 0.5, {1, 2, 4});
  CHECK(rep.family_label == "smoothed_discrete");
  CHECK(rep.all_ok);
  CHECK_FALSE(rep.constants.JX_infinite);
  CHECK_FALSE(rep.constants.Rstar_infinite);
  CHECK(rep.constants.J_X > 0.0);
  for (const auto& row : rep.rows) CHECK_FALSE(row.J_infinite);

  // Single atom: the smoothing alone, i.e. an exact Gaussian.
  const SweepReport one = smoothed_discrete_demo({0.0}, {1.0}, 1.0, {1, 2});
  CHECK(one.all_ok);
  CHECK(one.constants.J_X < 1e-6);
}

TEST_CASE("serialization: formats, column order, atomicity") {
  CHECK(fmt12(1.0 / 3.0) == "0.333333333333");
  CHECK(fmt12(2.5) == "2.5");
  CHECK(fmt12(0.0) == "0");

  const SweepReport rep = verify_o1n(spec_gamma(5.0), {1, 2});
  const std::string csv = sweep_csv(rep);
  CHECK(has(csv,
            "n,J,bound_J_sharp,bound_J_thm,D,bound_D,skew_floor,nJ,"
            "sup_diff,tv,hellinger,flags"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 rows
  const std::string js = sweep_json(rep);
  CHECK(js.front() == '{');
  CHECK(has(js, "\"family\""));
  CHECK(has(js, "\"all_ok\":true"));

  namespace fs = std::filesystem;
  const fs::path dir = fs::path(".") / "serialize_test_tmp";
  fs::create_directories(dir);
  const fs::path target = dir / "sweep.csv";
  atomic_write(target.string(), csv);
  CHECK(fs::exists(target));
  CHECK_FALSE(fs::exists(target.string() + ".tmp"));
  std::ifstream in(target);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  CHECK(content == csv);
  fs::remove_all(dir);
}
