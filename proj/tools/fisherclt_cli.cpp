// fisherclt — command-line driver for the grid-based information toolkit.
//
// Subcommands
//   info      score/information functionals and normal-distance chain
//   sweep     full O(1/n) report battery (bounds, floors, tails, doubling)
//   poincare  Poincare constant, restricted constant, optional truncation
//   project   additive projections, telescoping decomposition, residual bound
//   debruijn  entropy from information along the Gaussian interpolation
//   verify    like sweep but asserting: exit 1 when any bound check fails
//
// Exit status: 0 all asserted checks pass, 1 at least one check failed,
// 2 configuration or runtime error.  All files are written atomically
// (tmp + rename) with %.12g formatting, so identical configurations produce
// byte-identical outputs.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fisherclt/convolution.hpp"
#include "fisherclt/families.hpp"
#include "fisherclt/grid.hpp"
#include "fisherclt/harness.hpp"
#include "fisherclt/info.hpp"
#include "fisherclt/poincare.hpp"
#include "fisherclt/projection.hpp"
#include "fisherclt/serialize.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fclt;

// ---------------------------------------------------------------- parsing

std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, delim)) out.push_back(item);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument(what + ": not a number: '" + s + "'");
  }
  if (pos != s.size())
    throw std::invalid_argument(what + ": trailing characters in '" + s + "'");
  return v;
}

int parse_int(const std::string& s, const std::string& what) {
  const double v = parse_double(s, what);
  const int i = int(v);
  if (double(i) != v)
    throw std::invalid_argument(what + ": not an integer: '" + s + "'");
  return i;
}

std::vector<double> parse_double_list(const std::string& s,
                                      const std::string& what) {
  std::vector<double> out;
  for (const auto& tok : split(s, ','))
    if (!tok.empty()) out.push_back(parse_double(tok, what));
  if (out.empty()) throw std::invalid_argument(what + ": empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& s,
                                const std::string& what) {
  std::vector<int> out;
  for (const auto& tok : split(s, ','))
    if (!tok.empty()) out.push_back(parse_int(tok, what));
  if (out.empty()) throw std::invalid_argument(what + ": empty list");
  return out;
}

std::map<std::string, double> parse_kv(const std::string& s,
                                       const std::string& what) {
  std::map<std::string, double> out;
  for (const auto& tok : split(s, ',')) {
    if (tok.empty()) continue;
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument(what + ": expected k=v, got '" + tok + "'");
    out[tok.substr(0, eq)] =
        parse_double(tok.substr(eq + 1), what + "." + tok.substr(0, eq));
  }
  return out;
}

// ------------------------------------------------------------ effective config

// Raw command-line flag values; presence is checked through CLI11 counts so
// that flags override config-file values which override the defaults below.
struct RawFlags {
  std::string family, params, n, radii, tol, out, format;
  std::string atoms, weights, locs, scales;
  int points = 0, threads = 0, nodes = 0;
  double domain = 0.0, tau = 0.0, beta = 0.0, T = 0.0;
  double shape = 0.0, rate = 0.0;
  std::uint64_t seed = 0;
};

struct Options {
  std::string command;
  std::string family = "normal";
  std::map<std::string, double> params;
  std::vector<double> atoms, weights, locs, scales;
  std::vector<double> table_x, table_p;  // config file only
  int points = 4096;
  double halfwidth = 0.0;  // <= 0: automatic domain
  std::vector<int> n_set = kDefaultNSet;
  bool n_set_given = false;
  std::vector<double> radii = kDefaultRadii;
  double tau = 0.5;
  double beta = 0.5;
  std::uint64_t seed = 1;
  std::map<std::string, double> tol;
  std::string out_dir = "reports";
  bool write_csv = true, write_json = true;
  int threads = 0;
  double T = 0.0;
  bool T_given = false;
  int nodes = 48;
};

double tol_of(const Options& o, const std::string& key, double dflt) {
  auto it = o.tol.find(key);
  return it == o.tol.end() ? dflt : it->second;
}

void apply_config(Options& o, const json& j) {
  if (j.contains("command")) o.command = j.at("command").get<std::string>();
  if (j.contains("family")) o.family = j.at("family").get<std::string>();
  if (j.contains("params"))
    for (const auto& [k, v] : j.at("params").items())
      o.params[k] = v.get<double>();
  if (j.contains("atoms")) o.atoms = j.at("atoms").get<std::vector<double>>();
  if (j.contains("weights"))
    o.weights = j.at("weights").get<std::vector<double>>();
  if (j.contains("locs")) o.locs = j.at("locs").get<std::vector<double>>();
  if (j.contains("scales")) o.scales = j.at("scales").get<std::vector<double>>();
  if (j.contains("table_x"))
    o.table_x = j.at("table_x").get<std::vector<double>>();
  if (j.contains("table_p"))
    o.table_p = j.at("table_p").get<std::vector<double>>();
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (g.contains("points")) o.points = g.at("points").get<int>();
    if (g.contains("domain_halfwidth"))
      o.halfwidth = g.at("domain_halfwidth").get<double>();
  }
  if (j.contains("n_set")) {
    o.n_set = j.at("n_set").get<std::vector<int>>();
    o.n_set_given = true;
  }
  if (j.contains("radii")) o.radii = j.at("radii").get<std::vector<double>>();
  if (j.contains("tau")) o.tau = j.at("tau").get<double>();
  if (j.contains("beta")) o.beta = j.at("beta").get<double>();
  if (j.contains("seed")) o.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("tolerances"))
    for (const auto& [k, v] : j.at("tolerances").items())
      o.tol[k] = v.get<double>();
  if (j.contains("output")) {
    const auto& out = j.at("output");
    if (out.contains("dir")) o.out_dir = out.at("dir").get<std::string>();
    if (out.contains("formats")) {
      o.write_csv = o.write_json = false;
      for (const auto& f : out.at("formats")) {
        const auto fmt = f.get<std::string>();
        if (fmt == "csv")
          o.write_csv = true;
        else if (fmt == "json")
          o.write_json = true;
        else
          throw std::invalid_argument("config: unknown format '" + fmt + "'");
      }
    }
  }
  if (j.contains("threads")) o.threads = j.at("threads").get<int>();
  if (j.contains("T")) {
    o.T = j.at("T").get<double>();
    o.T_given = true;
  }
  if (j.contains("nodes")) o.nodes = j.at("nodes").get<int>();
}

void apply_flags(Options& o, const RawFlags& r, const CLI::App* sub) {
  auto given = [sub](const char* name) { return sub->count(name) > 0; };
  if (given("--family")) o.family = r.family;
  if (given("--params"))
    for (const auto& [k, v] : parse_kv(r.params, "--params")) o.params[k] = v;
  if (given("--shape")) o.params["shape"] = r.shape;
  if (given("--rate")) o.params["rate"] = r.rate;
  if (given("--atoms")) o.atoms = parse_double_list(r.atoms, "--atoms");
  if (given("--weights")) o.weights = parse_double_list(r.weights, "--weights");
  if (given("--locs")) o.locs = parse_double_list(r.locs, "--locs");
  if (given("--scales")) o.scales = parse_double_list(r.scales, "--scales");
  if (given("--grid-points")) o.points = r.points;
  if (given("--domain")) o.halfwidth = r.domain;
  if (given("--n")) {
    o.n_set = parse_int_list(r.n, "--n");
    o.n_set_given = true;
  }
  if (given("--radii")) o.radii = parse_double_list(r.radii, "--radii");
  if (given("--tau")) o.tau = r.tau;
  if (given("--beta")) o.beta = r.beta;
  if (given("--seed")) o.seed = r.seed;
  if (given("--tol"))
    for (const auto& [k, v] : parse_kv(r.tol, "--tol")) o.tol[k] = v;
  if (given("--out")) o.out_dir = r.out;
  if (given("--format")) {
    o.write_csv = o.write_json = false;
    for (const auto& f : split(r.format, ',')) {
      if (f == "csv")
        o.write_csv = true;
      else if (f == "json")
        o.write_json = true;
      else if (!f.empty())
        throw std::invalid_argument("--format: unknown format '" + f + "'");
    }
    if (!o.write_csv && !o.write_json)
      throw std::invalid_argument("--format: empty format list");
  }
  if (given("--threads")) o.threads = r.threads;
  if (given("--T")) {
    o.T = r.T;
    o.T_given = true;
  }
  if (given("--nodes")) o.nodes = r.nodes;
}

// The smoothed-discrete family is syntactic sugar: atoms re-centred to mean
// zero, each carrying a Gaussian of variance tau.
DistributionSpec build_spec(const Options& o) {
  if (o.family == "smoothed_discrete") {
    if (o.atoms.empty() || o.atoms.size() != o.weights.size())
      throw std::invalid_argument(
          "smoothed_discrete: --atoms and --weights must be non-empty and "
          "the same length");
    if (!(o.tau > 0.0))
      throw std::invalid_argument("smoothed_discrete: --tau must be > 0");
    double wsum = 0.0;
    for (double w : o.weights) wsum += w;
    if (!(wsum > 0.0))
      throw std::invalid_argument("smoothed_discrete: weights sum to 0");
    std::vector<double> w(o.weights), locs(o.atoms),
        scales(o.atoms.size(), std::sqrt(o.tau));
    for (auto& v : w) v /= wsum;
    double mean = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) mean += w[i] * locs[i];
    for (auto& v : locs) v -= mean;
    return spec_mixture(w, locs, scales);
  }
  if (o.family == "gaussian_mixture")
    return spec_from_params(o.family, o.params, o.weights, o.locs, o.scales);
  if (o.family == "table")
    return spec_from_params(o.family, o.params, o.table_x, o.table_p);
  return spec_from_params(o.family, o.params);
}

// ---------------------------------------------------------------- reporting

struct Reporter {
  fs::path dir;
  bool csv = true, js = true;
  bool all_ok = true;

  void note(const std::string& line) { std::cout << line << "\n"; }

  void check(const std::string& name, bool ok, const std::string& detail) {
    std::cout << "check " << name << ": " << (ok ? "ok" : "FAIL") << " ("
              << detail << ")\n";
    if (!ok) all_ok = false;
  }

  void write(const std::string& fname, const std::string& content) {
    fs::create_directories(dir);
    const fs::path p = dir / fname;
    atomic_write(p.string(), content);
    std::cout << "wrote " << p.string() << "\n";
  }
  void write_csv(const std::string& fname, const std::string& content) {
    if (csv) write(fname, content);
  }
  void write_json(const std::string& fname, const std::string& content) {
    if (js) write(fname, content);
  }
};

std::string inf_or(double v, bool infinite) {
  return infinite ? "inf" : fmt12(v);
}

// ------------------------------------------------------------- subcommands

void run_info(const Options& o, Reporter& rep) {
  const GridDensity d = materialize(build_spec(o), o.points, o.halfwidth);
  const InfoSummary s = info_summary(d);
  rep.note("family " + o.family + " points " + std::to_string(o.points));
  rep.note("I=" + inf_or(s.fisher_I, s.infinite) +
           " J=" + inf_or(s.standardized_J, s.infinite) +
           " D=" + fmt12(s.rel_entropy_D) + " sigma2=" + fmt12(s.sigma2));

  const double slack = tol_of(o, "slack", 1e-6);
  rep.check("J_nonneg", s.infinite || s.standardized_J >= -slack,
            "J=" + inf_or(s.standardized_J, s.infinite));
  rep.check("D_nonneg", s.rel_entropy_D >= -1e-8, "D=" + fmt12(s.rel_entropy_D));

  const GridDensity ds = standardize(d);
  const DistanceChain chain = distance_chain(ds);
  rep.note("sup_diff=" + fmt12(chain.sup_diff) + " tv=" + fmt12(chain.tv) +
           " hellinger=" + fmt12(chain.hellinger) +
           " J=" + inf_or(chain.J, chain.J_infinite));
  rep.check("tv_le_2hellinger", chain.tv <= 2.0 * chain.hellinger + slack,
            fmt12(chain.tv) + " <= " + fmt12(2.0 * chain.hellinger));
  if (!chain.J_infinite) {
    const double sj = std::sqrt(std::max(chain.J, 0.0));
    const double sup_c = 1.0 + std::sqrt(6.0 / 3.14159265358979323846);
    rep.check("sup_le_const_sqrtJ", chain.sup_diff <= sup_c * sj + slack,
              fmt12(chain.sup_diff) + " <= " + fmt12(sup_c * sj));
    rep.check("tv_le_sqrt2J",
              chain.tv <= std::sqrt(2.0 * std::max(chain.J, 0.0)) + slack,
              fmt12(chain.tv) + " <= " +
                  fmt12(std::sqrt(2.0 * std::max(chain.J, 0.0))));
    rep.check("hellinger_le_sqrtJhalf",
              chain.hellinger <= std::sqrt(std::max(chain.J, 0.0) / 2.0) + slack,
              fmt12(chain.hellinger) + " <= " +
                  fmt12(std::sqrt(std::max(chain.J, 0.0) / 2.0)));
  }

  const TailProfile tp = tail_score_mass(ds, o.radii);
  bool monotone = true;
  for (std::size_t i = 1; i < tp.psi.size(); ++i)
    if (tp.psi[i] > tp.psi[i - 1] + 1e-12) monotone = false;
  rep.check("tail_monotone", monotone,
            std::to_string(tp.psi.size()) + " radii");

  rep.write_json("info_" + o.family + ".json", info_json(s, o.family));
  rep.write_csv("info_trace_" + o.family + ".csv",
                trace_csv(s.refinement_trace));
  {
    std::ostringstream os;
    os << '{' << "\"sup_diff\":" << fmt12(chain.sup_diff)
       << ",\"tv\":" << fmt12(chain.tv)
       << ",\"hellinger\":" << fmt12(chain.hellinger)
       << ",\"J\":" << fmt12(chain.J)
       << ",\"J_infinite\":" << (chain.J_infinite ? "true" : "false") << "}\n";
    rep.write_json("distances_" + o.family + ".json", os.str());
  }
  {
    std::ostringstream os;
    os << "{\"radii\":[";
    for (std::size_t i = 0; i < tp.radii.size(); ++i)
      os << (i ? "," : "") << fmt12(tp.radii[i]);
    os << "],\"psi\":[";
    for (std::size_t i = 0; i < tp.psi.size(); ++i)
      os << (i ? "," : "") << fmt12(tp.psi[i]);
    os << "]}\n";
    rep.write_json("tail_" + o.family + ".json", os.str());
  }
}

void run_poincare(const Options& o, Reporter& rep) {
  const GridDensity d = materialize(build_spec(o), o.points, o.halfwidth);
  const PoincareEstimate full = poincare_constant(d);
  const PoincareEstimate restr = restricted_poincare(d);
  rep.note("family " + o.family + " points " + std::to_string(o.points));
  rep.note("R=" + inf_or(full.value, full.infinite) +
           " R_star=" + inf_or(restr.value, restr.infinite));

  const double res_tol = tol_of(o, "residual", 1e-6);
  rep.check("residual_full",
            full.infinite || full.rayleigh_residual <= res_tol,
            fmt12(full.rayleigh_residual));
  rep.check("residual_restricted",
            restr.infinite || restr.rayleigh_residual <= res_tol,
            fmt12(restr.rayleigh_residual));
  rep.check("restricted_le_full",
            full.infinite || restr.infinite ||
                restr.value <= full.value + 1e-9,
            inf_or(restr.value, restr.infinite) + " <= " +
                inf_or(full.value, full.infinite));

  rep.write_json("poincare_" + o.family + ".json", poincare_json(full, restr));
  if (!full.infinite)
    rep.write_csv("extremal_full_" + o.family + ".csv",
                  extremal_csv(full.extremal));
  if (!restr.infinite)
    rep.write_csv("extremal_restricted_" + o.family + ".csv",
                  extremal_csv(restr.extremal));

  if (o.T_given) {
    const PoincareEstimate trunc = truncated_poincare(d, o.T);
    const double bu = borovkov_utev_ratio(d, o.T);
    rep.note("R_truncated(" + fmt12(o.T) +
             ")=" + inf_or(trunc.value, trunc.infinite) +
             " bu_ratio=" + fmt12(bu));
    rep.check("residual_truncated",
              trunc.infinite || trunc.rayleigh_residual <= res_tol,
              fmt12(trunc.rayleigh_residual));
    std::ostringstream os;
    os << '{' << "\"value\":" << fmt12(trunc.value) << ",\"constraint\":\""
       << trunc.constraint
       << "\",\"rayleigh_residual\":" << fmt12(trunc.rayleigh_residual)
       << ",\"infinite\":" << (trunc.infinite ? "true" : "false")
       << ",\"bu_ratio\":" << fmt12(bu) << "}\n";
    rep.write_json("poincare_truncated_" + o.family + ".json", os.str());
  }
}

SweepReport compute_sweep(const Options& o) {
  if (o.family == "smoothed_discrete") {
    // delegate so that the report label marks the regularized-discrete regime
    if (o.atoms.empty() || o.atoms.size() != o.weights.size())
      throw std::invalid_argument(
          "smoothed_discrete: --atoms and --weights must be non-empty and "
          "the same length");
    return smoothed_discrete_demo(o.atoms, o.weights, o.tau, o.n_set,
                                  o.points);
  }
  return verify_o1n(build_spec(o), o.n_set, o.points);
}

void print_sweep(const SweepReport& r, Reporter& rep, bool asserting) {
  rep.note("family " + r.family_label +
           " R=" + inf_or(r.constants.R, r.constants.R_infinite) +
           " R_star=" + inf_or(r.constants.R_star, r.constants.Rstar_infinite) +
           " J_X=" + inf_or(r.constants.J_X, r.constants.JX_infinite) +
           " D_X=" + fmt12(r.constants.D_X) +
           " sigma2=" + fmt12(r.constants.sigma2));
  for (const auto& row : r.rows) {
    const bool row_ok = row.flags.find("fail") == std::string::npos;
    const std::string detail = "J=" + inf_or(row.J, row.J_infinite) +
                               " D=" + fmt12(row.D) + " " + row.flags;
    if (asserting)
      rep.check("n=" + std::to_string(row.n), row_ok, detail);
    else
      rep.note("row n=" + std::to_string(row.n) + " " + detail);
  }
}

void run_sweep(const Options& o, Reporter& rep) {
  const SweepReport r = compute_sweep(o);
  print_sweep(r, rep, /*asserting=*/false);
  rep.write_csv("sweep_" + o.family + ".csv", sweep_csv(r));
  rep.write_json("sweep_" + o.family + ".json", sweep_json(r));

  const DistributionSpec spec = build_spec(o);
  const FloorReport fl = skewness_floor(spec, o.n_set, o.points);
  rep.note("skewness_s=" + fmt12(fl.skewness_s) +
           " s2_over_3=" + fmt12(fl.s2_over_3));
  rep.write_csv("floor_" + o.family + ".csv", floor_csv(fl));

  const TailMatrix tm = tail_class_profile(spec, o.n_set, o.radii, o.points);
  rep.note(std::string("tail_rows_monotone=") +
           (tm.rows_monotone ? "yes" : "no"));
  rep.write_csv("tailmatrix_" + o.family + ".csv", tail_csv(tm));

  int k_max = 6;
  if (o.n_set_given) {
    int max_n = 1;
    for (int n : o.n_set) max_n = std::max(max_n, n);
    k_max = 1;
    while ((1 << k_max) < max_n && k_max < 12) ++k_max;
  }
  const DoublingReport db = monotone_doubling(spec, k_max, o.points);
  rep.note("doubling first_finite_n=" + std::to_string(db.first_finite_n) +
           std::string(" monotone=") + (db.monotone_ok ? "yes" : "no") +
           std::string(" diffs_shrink=") + (db.diffs_shrink_ok ? "yes" : "no"));
  rep.write_csv("doubling_" + o.family + ".csv", doubling_csv(db));
}

void run_verify(const Options& o, Reporter& rep) {
  const SweepReport r = compute_sweep(o);
  print_sweep(r, rep, /*asserting=*/true);
  rep.write_csv("sweep_" + o.family + ".csv", sweep_csv(r));
  rep.write_json("sweep_" + o.family + ".json", sweep_json(r));
  rep.check("all_rows", r.all_ok, r.all_ok ? "no violations" : "see flags");
}

void run_project(const Options& o, Reporter& rep) {
  const GridDensity ds = standardize(materialize(build_spec(o), o.points,
                                                 o.halfwidth));
  const auto bank = test_function_bank(o.seed);
  const double slack = tol_of(o, "slack", 1e-6);
  const double deriv_tol = tol_of(o, "deriv", 1e-3);
  const double sumrule_tol = tol_of(o, "sumrule", 1e-5);

  rep.note("family " + o.family + " points " + std::to_string(o.points) +
           " seed " + std::to_string(o.seed));

  std::ostringstream pj;
  pj << "{\"functions\":[";
  bool first = true;
  for (const auto& tf : bank) {
    const GridFunction f = sample_on_sum_lattice(ds, ds, tf.f);
    const AdditiveProjection ap = additive_projection(f, ds, ds);
    const double deriv = derivative_identity_check(f, ds, ds);
    const ProjectionBound pb =
        projection_inequality_check(f, ds, ds, ap.g1, ap.g2, o.beta);

    rep.check(tf.name + "_pythagoras",
              std::abs(ap.pythagoras_gap) <= slack * std::max(ap.ef2, 1.0),
              "gap=" + fmt12(ap.pythagoras_gap));
    rep.check(tf.name + "_derivative_identity", deriv <= deriv_tol,
              "sup=" + fmt12(deriv));
    rep.check(tf.name + "_residual_bound",
              pb.vacuous || pb.slack >= -slack * std::max(pb.lhs, 1.0),
              (pb.vacuous ? std::string("vacuous (I infinite)")
                          : "slack=" + fmt12(pb.slack)));

    pj << (first ? "" : ",") << "{\"name\":\"" << tf.name << "\""
       << ",\"ef2\":" << fmt12(ap.ef2) << ",\"eg1_sq\":" << fmt12(ap.eg1_sq)
       << ",\"eg2_sq\":" << fmt12(ap.eg2_sq)
       << ",\"residual_norm_sq\":" << fmt12(ap.residual_norm_sq)
       << ",\"pythagoras_gap\":" << fmt12(ap.pythagoras_gap)
       << ",\"derivative_sup\":" << fmt12(deriv)
       << ",\"bound_lhs\":" << fmt12(pb.lhs)
       << ",\"bound_rhs\":" << fmt12(pb.rhs)
       << ",\"bound_slack\":" << fmt12(pb.slack)
       << ",\"beta\":" << fmt12(pb.beta)
       << ",\"vacuous\":" << (pb.vacuous ? "true" : "false") << "}";
    first = false;
  }
  pj << "]}\n";
  rep.write_json("project_" + o.family + ".json", pj.str());

  // telescoping decomposition for the canonical quadratic test function
  std::vector<int> t_ns = o.n_set_given ? o.n_set : std::vector<int>{2, 4, 8};
  for (int n : t_ns) {
    if (n < 1 || n > 8)
      throw std::invalid_argument(
          "project: telescoping n must lie in 1..8 (got " +
          std::to_string(n) + ")");
    const TelescopingReport tr = telescoping_decomposition(bank[1], ds, n);
    double tsum = 0.0;
    for (double t : tr.t) tsum += t;
    const double sn = tr.s.back();
    rep.check("telescoping_n" + std::to_string(n) + "_sum_rule",
              std::abs(sn - tsum) <= sumrule_tol * std::max(1.0, std::abs(sn)),
              "s_n=" + fmt12(sn) + " sum_t=" + fmt12(tsum));
    bool steps_ok = true;
    for (double t : tr.t)
      if (t < -1e-9) steps_ok = false;
    rep.check("telescoping_n" + std::to_string(n) + "_steps_nonneg", steps_ok,
              std::to_string(tr.t.size()) + " steps");
    const double agg =
        double(n - 1) / (2.0 * tr.fisher_I) * tr.e_gprime_mu_sq;
    rep.check("telescoping_n" + std::to_string(n) + "_aggregate_bound",
              sn >= agg - slack * std::max(1.0, std::abs(sn)),
              fmt12(sn) + " >= " + fmt12(agg));
    rep.write_json("telescoping_" + o.family + "_n" + std::to_string(n) +
                       ".json",
                   telescoping_json(tr));
    std::ostringstream cs;
    cs << "m,t,s\n";
    for (std::size_t i = 0; i < tr.t.size(); ++i)
      cs << (i + 1) << ',' << fmt12(tr.t[i]) << ',' << fmt12(tr.s[i]) << '\n';
    rep.write_csv(
        "telescoping_" + o.family + "_n" + std::to_string(n) + ".csv",
        cs.str());
  }
}

void run_debruijn(const Options& o, Reporter& rep) {
  const GridDensity ds = standardize(materialize(build_spec(o), o.points,
                                                 o.halfwidth));
  const DeBruijnPath p = debruijn_entropy(ds, o.nodes);
  rep.note("family " + o.family + " nodes " + std::to_string(o.nodes));
  rep.note("D_integral=" + fmt12(p.D_integral) +
           " D_direct=" + fmt12(p.D_direct) +
           " D_clipped=" + fmt12(p.D_clipped));

  const double rel_tol = tol_of(o, "debruijn", 1e-2);
  const double rel = std::abs(p.D_integral - p.D_direct) /
                     std::max(p.D_direct, 1e-8);
  rep.check("consistency", rel <= rel_tol, "rel_diff=" + fmt12(rel));
  bool monotone = true;
  for (std::size_t i = 1; i < p.J_path.size(); ++i)
    if (p.J_path[i] > p.J_path[i - 1] + 1e-6 * (1.0 + p.J_path[i - 1]))
      monotone = false;
  rep.check("path_monotone", monotone,
            std::to_string(p.J_path.size()) + " nodes");

  rep.write_csv("debruijn_" + o.family + ".csv", debruijn_csv(p));
  rep.write_json("debruijn_" + o.family + ".json", debruijn_json(p));
}

void register_common(CLI::App* sub, RawFlags& r) {
  sub->add_option("--family", r.family,
                  "normal | exponential | gamma | uniform | laplace | "
                  "gaussian_mixture | table | smoothed_discrete");
  sub->add_option("--params", r.params, "family parameters as k=v,k=v,...");
  sub->add_option("--shape", r.shape, "shorthand for --params shape=...");
  sub->add_option("--rate", r.rate, "shorthand for --params rate=...");
  sub->add_option("--atoms", r.atoms,
                  "comma list: atom locations (smoothed_discrete)");
  sub->add_option("--weights", r.weights,
                  "comma list: weights (gaussian_mixture/smoothed_discrete)");
  sub->add_option("--locs", r.locs,
                  "comma list: component means (gaussian_mixture)");
  sub->add_option("--scales", r.scales,
                  "comma list: component std devs (gaussian_mixture)");
  sub->add_option("--grid-points", r.points, "number of grid nodes");
  sub->add_option("--domain", r.domain,
                  "domain halfwidth around the mean; <= 0 selects "
                  "automatically from the tail mass");
  sub->add_option("--n", r.n, "comma list of sum sizes, e.g. 1,2,4,8");
  sub->add_option("--radii", r.radii, "comma list of tail radii");
  sub->add_option("--tau", r.tau,
                  "smoothing variance for smoothed_discrete atoms");
  sub->add_option("--beta", r.beta,
                  "weight in the projection residual bound (project)");
  sub->add_option("--tol", r.tol,
                  "named tolerances k=v,...: slack, residual, debruijn, "
                  "deriv, sumrule");
  sub->add_option("--out", r.out, "output directory (default: reports)");
  sub->add_option("--format", r.format, "subset of csv,json (default both)");
  sub->add_option("--threads", r.threads,
                  "worker threads; 0 keeps the runtime default");
  sub->add_option("--seed", r.seed,
                  "seed for the spline test-function bank (project)");
  sub->add_option("--T", r.T, "truncation radius (poincare)");
  sub->add_option("--nodes", r.nodes,
                  "interpolation nodes along the entropy path (debruijn)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "fisherclt: Fisher information, Poincare constants, and O(1/n) "
      "convergence-rate verification for densities on uniform grids"};
  app.require_subcommand(0, 1);
  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON config file; explicit flags override its values");

  RawFlags raw;
  const std::vector<std::pair<std::string, std::string>> cmds = {
      {"info", "information functionals and normal-distance chain"},
      {"sweep", "report-only O(1/n) battery: bounds, floors, tails, doubling"},
      {"poincare", "Poincare constant and restricted/truncated variants"},
      {"project", "additive projections and telescoping decomposition"},
      {"debruijn", "entropy from information along the Gaussian path"},
      {"verify", "asserting sweep: exit 1 when any bound check fails"}};
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, desc] : cmds) {
    subs[name] = app.add_subcommand(name, desc);
    register_common(subs[name], raw);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    Options opts;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in)
        throw std::invalid_argument("cannot open config file: " + config_path);
      json j = json::parse(in);
      apply_config(opts, j);
    }
    CLI::App* active = nullptr;
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) {
        active = sub;
        opts.command = name;
      }
    if (active) apply_flags(opts, raw, active);
    if (opts.command.empty()) {
      std::cerr << "error: no command given (subcommand or config "
                   "\"command\" required)\n";
      std::cerr << app.help();
      return 2;
    }
    if (opts.points < 16 || opts.points > (1 << 20))
      throw std::invalid_argument("grid points out of range");

#ifdef _OPENMP
    if (opts.threads > 0) omp_set_num_threads(opts.threads);
#endif

    Reporter rep;
    rep.dir = opts.out_dir;
    rep.csv = opts.write_csv;
    rep.js = opts.write_json;

    if (opts.command == "info")
      run_info(opts, rep);
    else if (opts.command == "sweep")
      run_sweep(opts, rep);
    else if (opts.command == "poincare")
      run_poincare(opts, rep);
    else if (opts.command == "project")
      run_project(opts, rep);
    else if (opts.command == "debruijn")
      run_debruijn(opts, rep);
    else if (opts.command == "verify")
      run_verify(opts, rep);
    else
      throw std::invalid_argument("unknown command: " + opts.command);

    std::cout << "result: " << (rep.all_ok ? "PASS" : "FAIL") << "\n";
    return rep.all_ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
