#pragma once

// JSON and CSV forms of the library's records.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "bethe/expansion.hpp"
#include "bethe/oracle.hpp"
#include "bethe/treewalk.hpp"

namespace bethe::io {

using json = nlohmann::ordered_json;

/// {"n": 4, "classes": [{"profile": {"3":1,"2":1}, "count_poly": [0,1,1]}, ...]}
json row_to_json(int n, const CoefficientRow& row);
CoefficientRow row_from_json(const json& j, int* n = nullptr);

/// {"max_order": N, "rows": [row, ...]}
json table_to_json(const CoefficientTable& table);
CoefficientTable table_from_json(const json& j);

/// {"I":[b1,b2],"delta0":d0,"delta":d}
json window_to_json(const AnalyticWindow& w);
AnalyticWindow window_from_json(const json& j);

/// {"law":"uniform","a":1.0} or
/// {"law":"generic","density":"uniform"|"semicircle"|{"chebyshev":[c0,...]},
///  "a"|"radius": x, "outside_masses":[[t,w],...]}.
/// Generic laws are split at the window's I_sharp.
SingleSiteLaw law_from_json(const json& j, const AnalyticWindow& window);

/// {"mean":[re,im],"stderr":s,"samples":M,"depth":R,"gap":g,"seed":n,...}
json mc_to_json(const MCEstimate& e);
MCEstimate mc_from_json(const json& j);

json dos_to_json(const DosValue& d, double lambda);
DosValue dos_from_json(const json& j);

/// One parsed line of a density sweep.
struct DosRow {
  double xi = 0.0;
  double energy = 0.0;
  double value = 0.0;
  double remainder_bound = 0.0;
  bool rigorous = false;
  /// a_0, a_2, ..., (even orders up to N)
  std::vector<double> even_coefficients;

  bool operator==(const DosRow&) const = default;
};

/// xi,E,value,remainder_bound,rigorous,a0,a2,...,aN
std::string dos_csv_header(int order);
/// Full-precision (17 significant digits) row.
std::string dos_csv_row(const DosValue& d, double lambda);
DosRow dos_row_from_csv(const std::string& line);
std::vector<DosRow> dos_rows_from_csv(std::istream& in, int* order = nullptr);

/// Scientific notation, 17 significant digits.
std::string format_double(double x);

}  // namespace bethe::io
