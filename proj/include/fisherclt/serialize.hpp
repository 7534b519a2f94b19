#pragma once
#include <string>

#include "fisherclt/convolution.hpp"
#include "fisherclt/harness.hpp"
#include "fisherclt/info.hpp"
#include "fisherclt/poincare.hpp"
#include "fisherclt/projection.hpp"

namespace fclt {

// All numeric output is printed with %.12g so identical runs are bit-exact.
std::string fmt12(double v);

// Write via <path>.tmp + rename so readers never observe partial files.
void atomic_write(const std::string& path, const std::string& content);

// CSV column order is part of the file contract; do not reorder.
std::string sweep_csv(const SweepReport& r);
std::string sweep_json(const SweepReport& r);
std::string info_json(const InfoSummary& s, const std::string& label);
std::string trace_csv(const std::vector<std::pair<double, double>>& trace);
std::string poincare_json(const PoincareEstimate& full,
                          const PoincareEstimate& restricted);
std::string extremal_csv(const GridFunction& g);
std::string debruijn_csv(const DeBruijnPath& p);
std::string debruijn_json(const DeBruijnPath& p);
std::string tail_csv(const TailMatrix& m);
std::string floor_csv(const FloorReport& r);
std::string doubling_csv(const DoublingReport& r);
std::string telescoping_json(const TelescopingReport& r);

}  // namespace fclt
