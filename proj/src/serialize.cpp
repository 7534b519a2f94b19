#include "fisherclt/serialize.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fclt {

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp);
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("atomic_write: write failed " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string sweep_csv(const SweepReport& r) {
  std::ostringstream os;
  os << "n,J,bound_J_sharp,bound_J_thm,D,bound_D,skew_floor,nJ,"
        "sup_diff,tv,hellinger,flags\n";
  for (const auto& row : r.rows) {
    os << row.n << ',' << fmt12(row.J) << ',' << fmt12(row.bound_J_sharp)
       << ',' << fmt12(row.bound_J_thm) << ',' << fmt12(row.D) << ','
       << fmt12(row.bound_D) << ',' << fmt12(row.skew_floor) << ','
       << fmt12(row.nJ) << ',' << fmt12(row.sup_diff) << ',' << fmt12(row.tv)
       << ',' << fmt12(row.hellinger) << ',' << row.flags << '\n';
  }
  return os.str();
}

static void json_kv(std::ostringstream& os, const char* k, double v,
                    bool comma = true) {
  os << '"' << k << "\":" << fmt12(v);
  if (comma) os << ',';
}

std::string sweep_json(const SweepReport& r) {
  std::ostringstream os;
  os << "{\"family\":\"" << r.family_label << "\",\"constants\":{";
  json_kv(os, "R", r.constants.R);
  json_kv(os, "R_star", r.constants.R_star);
  json_kv(os, "sigma2", r.constants.sigma2);
  json_kv(os, "J_X", r.constants.J_X);
  json_kv(os, "D_X", r.constants.D_X);
  json_kv(os, "skewness_s", r.constants.skewness_s, false);
  os << "},\"rows\":[";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    os << (i ? "," : "") << "{\"n\":" << row.n << ',';
    json_kv(os, "J", row.J);
    json_kv(os, "bound_J_sharp", row.bound_J_sharp);
    json_kv(os, "bound_J_thm", row.bound_J_thm);
    json_kv(os, "D", row.D);
    json_kv(os, "bound_D", row.bound_D);
    json_kv(os, "skew_floor", row.skew_floor);
    json_kv(os, "nJ", row.nJ);
    json_kv(os, "sup_diff", row.sup_diff);
    json_kv(os, "tv", row.tv);
    json_kv(os, "hellinger", row.hellinger);
    os << "\"flags\":\"" << row.flags << "\"}";
  }
  os << "],\"all_ok\":" << (r.all_ok ? "true" : "false") << "}\n";
  return os.str();
}

std::string info_json(const InfoSummary& s, const std::string& label) {
  std::ostringstream os;
  os << "{\"label\":\"" << label << "\",";
  json_kv(os, "fisher_I", s.fisher_I);
  json_kv(os, "standardized_J", s.standardized_J);
  json_kv(os, "rel_entropy_D", s.rel_entropy_D);
  json_kv(os, "sigma2", s.sigma2);
  os << "\"infinite\":" << (s.infinite ? "true" : "false")
     << ",\"refinement_trace\":[";
  for (std::size_t i = 0; i < s.refinement_trace.size(); ++i)
    os << (i ? "," : "") << '[' << fmt12(s.refinement_trace[i].first) << ','
       << fmt12(s.refinement_trace[i].second) << ']';
  os << "]}\n";
  return os.str();
}

std::string trace_csv(const std::vector<std::pair<double, double>>& trace) {
  std::ostringstream os;
  os << "h,I\n";
  for (const auto& [h, v] : trace) os << fmt12(h) << ',' << fmt12(v) << '\n';
  return os.str();
}

std::string poincare_json(const PoincareEstimate& full,
                          const PoincareEstimate& restricted) {
  std::ostringstream os;
  auto one = [&os](const PoincareEstimate& e) {
    os << '{';
    json_kv(os, "value", e.value);
    os << "\"constraint\":\"" << e.constraint << "\",";
    json_kv(os, "rayleigh_residual", e.rayleigh_residual);
    os << "\"infinite\":" << (e.infinite ? "true" : "false")
       << ",\"refinement_trace\":[";
    for (std::size_t i = 0; i < e.refinement_trace.size(); ++i)
      os << (i ? "," : "") << '[' << fmt12(e.refinement_trace[i].first) << ','
         << fmt12(e.refinement_trace[i].second) << ']';
    os << "]}";
  };
  os << "{\"full\":";
  one(full);
  os << ",\"restricted\":";
  one(restricted);
  os << "}\n";
  return os.str();
}

std::string extremal_csv(const GridFunction& g) {
  std::ostringstream os;
  os << "x,g\n";
  for (std::size_t i = 0; i < g.n(); ++i)
    os << fmt12(g.x(std::ptrdiff_t(i))) << ',' << fmt12(g.values[i]) << '\n';
  return os.str();
}

std::string debruijn_csv(const DeBruijnPath& p) {
  std::ostringstream os;
  os << "t,J\n";
  for (std::size_t i = 0; i < p.t_nodes.size(); ++i)
    os << fmt12(p.t_nodes[i]) << ',' << fmt12(p.J_path[i]) << '\n';
  return os.str();
}

std::string debruijn_json(const DeBruijnPath& p) {
  std::ostringstream os;
  os << '{';
  json_kv(os, "D_integral", p.D_integral);
  json_kv(os, "D_direct", p.D_direct);
  json_kv(os, "D_clipped", p.D_clipped);
  os << "\"nodes\":" << p.t_nodes.size() << "}\n";
  return os.str();
}

std::string tail_csv(const TailMatrix& m) {
  std::ostringstream os;
  os << "n";
  for (double r : m.radii) os << ",psi_R" << fmt12(r);
  os << '\n';
  for (std::size_t i = 0; i < m.psi.size(); ++i) {
    os << m.n_set[i];
    for (double v : m.psi[i]) os << ',' << fmt12(v);
    os << '\n';
  }
  os << "envelope";
  for (double v : m.envelope) os << ',' << fmt12(v);
  os << '\n';
  return os.str();
}

std::string floor_csv(const FloorReport& r) {
  std::ostringstream os;
  os << "n,J,floor,nJ,ok\n";
  for (const auto& row : r.rows)
    os << row.n << ',' << fmt12(row.J) << ',' << fmt12(row.floor) << ','
       << fmt12(row.nJ) << ',' << (row.ok ? "ok" : "fail") << '\n';
  return os.str();
}

std::string doubling_csv(const DoublingReport& r) {
  std::ostringstream os;
  os << "n,J,infinite\n";
  for (std::size_t i = 0; i < r.n.size(); ++i)
    os << r.n[i] << ',' << fmt12(r.J[i]) << ','
       << (r.infinite[i] ? "yes" : "no") << '\n';
  return os.str();
}

std::string telescoping_json(const TelescopingReport& r) {
  std::ostringstream os;
  os << "{\"n\":" << r.n << ',';
  json_kv(os, "mu", r.mu);
  json_kv(os, "e_gprime_mu_sq", r.e_gprime_mu_sq);
  json_kv(os, "fisher_I", r.fisher_I);
  json_kv(os, "lower_bound_lhs", r.lower_bound_lhs);
  os << "\"t\":[";
  for (std::size_t i = 0; i < r.t.size(); ++i)
    os << (i ? "," : "") << fmt12(r.t[i]);
  os << "],\"s\":[";
  for (std::size_t i = 0; i < r.s.size(); ++i)
    os << (i ? "," : "") << fmt12(r.s[i]);
  os << "]}\n";
  return os.str();
}

}  // namespace fclt
