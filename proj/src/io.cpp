#include "bethe/io.hpp"

#include "bethe/errors.hpp"

#include <cstdio>
#include <istream>
#include <limits>
#include <sstream>

namespace bethe::io {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

namespace {

json bigint_to_json(const BigInt& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
    return v.convert_to<std::int64_t>();
  return v.str();
}

BigInt bigint_from_json(const json& j) {
  if (j.is_string()) return BigInt(j.get<std::string>());
  if (j.is_number_unsigned()) return BigInt(j.get<std::uint64_t>());
  if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
  throw DomainError("count_poly entries must be integers");
}

}  // namespace

json row_to_json(int n, const CoefficientRow& row) {
  json classes = json::array();
  for (const auto& c : row) {
    json profile = json::object();
    for (auto it = c.profile.multiplicities().rbegin(); it != c.profile.multiplicities().rend(); ++it)
      profile[std::to_string(it->first)] = it->second;
    json poly = json::array();
    for (const auto& coef : c.count.coefficients()) poly.push_back(bigint_to_json(coef));
    classes.push_back({{"profile", profile}, {"count_poly", poly}});
  }
  return {{"n", n}, {"classes", classes}};
}

CoefficientRow row_from_json(const json& j, int* n) {
  if (n) *n = j.at("n").get<int>();
  CoefficientRow row;
  for (const auto& c : j.at("classes")) {
    std::map<int, int> m;
    for (const auto& [k, v] : c.at("profile").items()) m[std::stoi(k)] = v.get<int>();
    std::vector<BigInt> coefs;
    for (const auto& x : c.at("count_poly")) coefs.push_back(bigint_from_json(x));
    row.push_back({OccupationProfile(std::move(m)), CountPolynomial(std::move(coefs))});
  }
  return row;
}

json table_to_json(const CoefficientTable& table) {
  json rows = json::array();
  for (int n = 0; n <= table.max_order(); ++n) rows.push_back(row_to_json(n, table.row(n)));
  return {{"max_order", table.max_order()}, {"rows", rows}};
}

CoefficientTable table_from_json(const json& j) {
  const int max_order = j.at("max_order").get<int>();
  std::vector<CoefficientRow> rows(static_cast<std::size_t>(max_order) + 1);
  for (const auto& r : j.at("rows")) {
    int n = 0;
    CoefficientRow row = row_from_json(r, &n);
    if (n < 0 || n > max_order) throw DomainError("row order outside the table");
    rows[static_cast<std::size_t>(n)] = std::move(row);
  }
  return CoefficientTable(std::move(rows));
}

json window_to_json(const AnalyticWindow& w) {
  return {{"I", {w.interval().lo, w.interval().hi}}, {"delta0", w.delta0()}, {"delta", w.delta()}};
}

AnalyticWindow window_from_json(const json& j) {
  const auto& I = j.at("I");
  return AnalyticWindow({I.at(0).get<double>(), I.at(1).get<double>()}, j.at("delta0").get<double>(),
                        j.at("delta").get<double>());
}

SingleSiteLaw law_from_json(const json& j, const AnalyticWindow& window) {
  const std::string kind = j.at("law").get<std::string>();
  if (kind == "uniform") return SingleSiteLaw::uniform(j.at("a").get<double>());
  if (kind != "generic") throw DomainError("unknown law '" + kind + "'");
  const json& density = j.at("density");
  std::vector<PointMass> masses;
  if (j.contains("outside_masses"))
    for (const auto& p : j.at("outside_masses")) masses.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  if (density.is_string()) {
    const std::string name = density.get<std::string>();
    if (!masses.empty()) throw DomainError("builtin densities carry their own outside part");
    if (name == "uniform") return uniform_as_generic(j.at("a").get<double>(), window);
    if (name == "semicircle") return semicircle_law(j.value("radius", 1.0), window);
    throw DomainError("unknown builtin density '" + name + "'");
  }
  if (density.contains("chebyshev"))
    return chebyshev_law(density.at("chebyshev").get<std::vector<double>>(), window, std::move(masses));
  throw DomainError("generic density must be a builtin name or {\"chebyshev\": [...]}");
}

json mc_to_json(const MCEstimate& e) {
  return {{"mean", {e.mean.real(), e.mean.imag()}},
          {"stderr", e.stderr_},
          {"samples", e.samples_used},
          {"depth", e.depth},
          {"gap", e.depth_pair_gap},
          {"seed", e.seed},
          {"effective_depth", e.effective_depth},
          {"prune_bound", e.prune_bound},
          {"stderr_flagged", e.stderr_flagged}};
}

MCEstimate mc_from_json(const json& j) {
  MCEstimate e;
  e.mean = {j.at("mean").at(0).get<double>(), j.at("mean").at(1).get<double>()};
  e.stderr_ = j.at("stderr").get<double>();
  e.samples_used = j.at("samples").get<long>();
  e.depth = j.at("depth").get<int>();
  e.depth_pair_gap = j.at("gap").get<double>();
  e.seed = j.at("seed").get<std::uint64_t>();
  e.effective_depth = j.value("effective_depth", e.depth);
  e.prune_bound = j.value("prune_bound", 0.0);
  e.stderr_flagged = j.value("stderr_flagged", false);
  return e;
}

json dos_to_json(const DosValue& d, double lambda) {
  return {{"xi", d.xi},
          {"E", lambda * d.xi},
          {"value", d.value},
          {"terms", d.terms},
          {"coefficients", d.coefficients},
          {"remainder_bound", d.remainder_bound},
          {"numerical_error", d.numerical_error},
          {"rigorous", d.rigorous}};
}

DosValue dos_from_json(const json& j) {
  DosValue d;
  d.xi = j.at("xi").get<double>();
  d.value = j.at("value").get<double>();
  d.terms = j.at("terms").get<std::vector<double>>();
  d.coefficients = j.at("coefficients").get<std::vector<double>>();
  d.remainder_bound = j.at("remainder_bound").get<double>();
  d.numerical_error = j.at("numerical_error").get<double>();
  d.rigorous = j.at("rigorous").get<bool>();
  return d;
}

std::string dos_csv_header(int order) {
  std::string h = "xi,E,value,remainder_bound,rigorous";
  for (int n = 0; n <= order; n += 2) h += ",a" + std::to_string(n);
  return h;
}

std::string dos_csv_row(const DosValue& d, double lambda) {
  std::string line = format_double(d.xi) + "," + format_double(lambda * d.xi) + "," + format_double(d.value) + "," +
                     format_double(d.remainder_bound) + "," + (d.rigorous ? "true" : "false");
  for (std::size_t n = 0; n < d.coefficients.size(); n += 2) line += "," + format_double(d.coefficients[n]);
  return line;
}

DosRow dos_row_from_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  if (fields.size() < 6) throw DomainError("density CSV row has too few fields");
  DosRow r;
  r.xi = std::stod(fields[0]);
  r.energy = std::stod(fields[1]);
  r.value = std::stod(fields[2]);
  r.remainder_bound = std::stod(fields[3]);
  if (fields[4] != "true" && fields[4] != "false") throw DomainError("rigorous flag must be true/false");
  r.rigorous = fields[4] == "true";
  for (std::size_t i = 5; i < fields.size(); ++i) r.even_coefficients.push_back(std::stod(fields[i]));
  return r;
}

std::vector<DosRow> dos_rows_from_csv(std::istream& in, int* order) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("xi,E,value,remainder_bound,rigorous", 0) != 0)
    throw DomainError("missing density CSV header");
  if (order) {
    const auto pos = line.rfind(",a");
    *order = pos == std::string::npos ? 0 : std::stoi(line.substr(pos + 2));
  }
  std::vector<DosRow> rows;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(dos_row_from_csv(line));
  return rows;
}

}  // namespace bethe::io
