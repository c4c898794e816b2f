// bethe_dos: batch front-end for the strong-disorder expansion and its oracles.

#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bethe/checks.hpp"
#include "bethe/errors.hpp"
#include "bethe/expansion.hpp"
#include "bethe/io.hpp"
#include "bethe/oracle.hpp"
#include "bethe/stieltjes.hpp"
#include "bethe/treewalk.hpp"

using namespace bethe;
using bethe::io::json;

namespace {

struct RunConfig {
  int q = 2;
  double lambda = 100.0;
  int order = 3;
  std::string law = "uniform";
  double a = 1.0;
  double radius = 1.0;
  std::vector<double> chebyshev;
  json law_spec;  // full law JSON, overrides the named law when set
  std::vector<double> interval{-0.5, 0.5};
  double delta0 = 0.3;
  double delta = 0.15;
  int grid = 101;
  std::vector<double> xi_range;
  std::vector<double> zeta{0.0, 0.4};
  int kmax = 0;
  int depth = 20;
  long samples = 100000;
  std::uint64_t seed = 42;
  int workers = 0;
  double stderr_ceiling = INFINITY;
  bool spectral_budget = false;
  std::string table;
  std::string out;
  std::string format;  // empty: csv, or json for coeffs
};

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

void apply_config_file(const std::string& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  const json j = json::parse(in);
  take(j, "q", c.q);
  take(j, "lambda", c.lambda);
  take(j, "order", c.order);
  if (j.contains("law")) {
    if (j.at("law").is_object())
      c.law_spec = j.at("law");
    else
      c.law = j.at("law").get<std::string>();
  }
  take(j, "a", c.a);
  take(j, "radius", c.radius);
  take(j, "chebyshev", c.chebyshev);
  take(j, "I", c.interval);
  take(j, "delta0", c.delta0);
  take(j, "delta", c.delta);
  if (j.contains("window")) {
    const json& w = j.at("window");
    take(w, "I", c.interval);
    take(w, "delta0", c.delta0);
    take(w, "delta", c.delta);
  }
  take(j, "grid", c.grid);
  take(j, "xi_range", c.xi_range);
  take(j, "zeta", c.zeta);
  take(j, "kmax", c.kmax);
  take(j, "depth", c.depth);
  take(j, "samples", c.samples);
  take(j, "seed", c.seed);
  take(j, "workers", c.workers);
  take(j, "stderr_ceiling", c.stderr_ceiling);
  take(j, "spectral_budget", c.spectral_budget);
  take(j, "out", c.out);
  take(j, "format", c.format);
}

// The config file is read before the flags so that flags override it.
std::optional<std::string> find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--config") == 0 && i + 1 < argc) return argv[i + 1];
    if (std::strncmp(argv[i], "--config=", 9) == 0) return std::string(argv[i] + 9);
  }
  return std::nullopt;
}

AnalyticWindow make_window(const RunConfig& c) {
  if (c.interval.size() != 2) throw DomainError("--I takes two values b1,b2");
  return AnalyticWindow({c.interval[0], c.interval[1]}, c.delta0, c.delta);
}

SingleSiteLaw make_law(const RunConfig& c, const AnalyticWindow& w) {
  if (!c.law_spec.is_null()) return io::law_from_json(c.law_spec, w);
  if (c.law == "uniform") return SingleSiteLaw::uniform(c.a);
  if (c.law == "uniform-generic") return uniform_as_generic(c.a, w);
  if (c.law == "semicircle") return semicircle_law(c.radius, w);
  if (c.law == "chebyshev") return chebyshev_law(c.chebyshev, w, {});
  throw DomainError("unknown law '" + c.law + "'");
}

void check_common(RunConfig& c) {
  if (c.format.empty()) c.format = "csv";
  if (c.q < 1) throw DomainError("q must be >= 1");
  if (!(c.lambda > 0.0)) throw DomainError("lambda must be positive");
  if (c.order < 0) throw DomainError("order must be >= 0");
  if (c.format != "csv" && c.format != "json") throw DomainError("format must be csv or json");
}

void emit(const RunConfig& c, const std::string& text) {
  if (c.out.empty() || c.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + c.out);
  f << text;
}

std::vector<double> xi_grid(const RunConfig& c, const AnalyticWindow& w) {
  const Interval I = w.interval();
  if (c.grid < 1) throw DomainError("grid needs at least one point");
  std::vector<double> xs;
  if (c.xi_range.empty()) {
    for (int j = 0; j < c.grid; ++j) xs.push_back(I.lo + (j + 1) * I.length() / (c.grid + 1));
    return xs;
  }
  if (c.xi_range.size() != 2) throw DomainError("--xi-range takes two values");
  const double lo = c.xi_range[0], hi = c.xi_range[1];
  if (!(I.contains_open(lo) && I.contains_open(hi) && lo <= hi))
    throw DomainError("grid must lie strictly inside I (it touches or leaves the boundary)");
  for (int j = 0; j < c.grid; ++j) xs.push_back(c.grid == 1 ? lo : lo + j * (hi - lo) / (c.grid - 1));
  return xs;
}

int cmd_coeffs(RunConfig c) {
  if (c.format.empty()) c.format = "json";
  if (c.format != "json" && c.format != "csv") throw DomainError("format must be csv or json");
  const CoefficientTable table = CoefficientTable::build(c.order);
  if (c.format == "json") {
    emit(c, io::table_to_json(table).dump(1) + "\n");
    return 0;
  }
  std::string s = "n,profile,count_poly\n";
  for (int n = 0; n <= table.max_order(); ++n)
    for (const auto& cl : table.row(n)) s += std::to_string(n) + ",\"" + cl.profile.to_string() + "\"," + cl.count.to_string() + "\n";
  emit(c, s);
  return 0;
}

cdouble zeta_of(const RunConfig& c) {
  if (c.zeta.size() != 2) throw DomainError("--zeta takes two values re,im");
  return {c.zeta[0], c.zeta[1]};
}

int cmd_transforms(RunConfig c) {
  check_common(c);
  const AnalyticWindow w = make_window(c);
  const SingleSiteLaw law = make_law(c, w);
  const cdouble z = zeta_of(c);
  const int kmax = c.kmax > 0 ? c.kmax : c.order + 1;
  const bool continued = w.contains(z);
  if (!continued && !(z.imag() > 0.0)) throw DomainError("point is neither in Omega_delta(I) nor above the axis");
  const Eigen::ArrayXcd s = continued ? s_continued_all(law, kmax, z, w) : s_upper_all(law, kmax, z);
  std::vector<double> bounds;
  if (continued)
    for (int k = 1; k <= kmax; ++k) bounds.push_back(sk_bound(law, w, k));
  if (c.format == "json") {
    json j = {{"z", {z.real(), z.imag()}}, {"law", law.name()}, {"continued", continued}, {"s", json::array()}};
    for (int k = 0; k < kmax; ++k) j["s"].push_back({s[k].real(), s[k].imag()});
    if (continued) j["sk_bound"] = bounds;
    emit(c, j.dump(1) + "\n");
    return 0;
  }
  std::string out = "k,re,im,bound\n";
  for (int k = 1; k <= kmax; ++k)
    out += std::to_string(k) + "," + io::format_double(s[k - 1].real()) + "," + io::format_double(s[k - 1].imag()) +
           "," + (continued ? io::format_double(bounds[k - 1]) : std::string("nan")) + "\n";
  emit(c, out);
  return 0;
}

int cmd_dos(RunConfig c) {
  check_common(c);
  const AnalyticWindow w = make_window(c);
  const SingleSiteLaw law = make_law(c, w);
  const std::vector<double> xs = xi_grid(c, w);
  const Interval sigma = spectrum_window(c.q, c.lambda, law.support());
  if (!(c.lambda * w.interval().lo >= sigma.lo && c.lambda * w.interval().hi <= sigma.hi))
    throw DomainError("lambda I is not contained in the spectrum window");
  const ExpansionParams p{c.q, c.lambda, c.order, w, law, c.spectral_budget};
  const RemainderBudget budget = remainder_budget(w, c.q, law, c.order, c.spectral_budget);

  std::vector<DosValue> rows;
  double worst_numerical = 0.0;
  for (double xi : xs) {
    rows.push_back(dos_density(p, xi));
    worst_numerical = std::max(worst_numerical, rows.back().numerical_error);
  }
  const bool rigorous = !rows.empty() && rows.front().rigorous;
  std::cerr << "lambda0 = " << budget.lambda0 << ", lambda = " << c.lambda
            << (rigorous ? " (rigorous)" : " (exploratory: rigorous=false)") << "\n"
            << "truncation bound C_N lambda^(-N-2)/pi = " << (rows.empty() ? 0.0 : rows.front().remainder_bound)
            << ", max numerical error = " << worst_numerical << "\n";

  if (c.format == "json") {
    json j = {{"q", c.q},
              {"lambda", c.lambda},
              {"order", c.order},
              {"law", law.name()},
              {"window", io::window_to_json(w)},
              {"lambda0", budget.lambda0},
              {"C_N_delta", budget.C_N_delta},
              {"rigorous_constants", budget.rigorous_constants},
              {"records", json::array()}};
    for (const auto& d : rows) j["records"].push_back(io::dos_to_json(d, c.lambda));
    emit(c, j.dump(1) + "\n");
    return 0;
  }
  std::string out = io::dos_csv_header(c.order) + "\n";
  for (const auto& d : rows) out += io::dos_csv_row(d, c.lambda) + "\n";
  emit(c, out);
  return 0;
}

int cmd_mc_compare(RunConfig c) {
  check_common(c);
  const cdouble zeta = zeta_of(c);
  if (!(zeta.imag() > 0.0)) throw DomainError("mc-compare needs Im zeta > 0");
  const AnalyticWindow w = make_window(c);
  const SingleSiteLaw law = make_law(c, w);
  MCConfig mc;
  mc.q = c.q;
  mc.lambda = c.lambda;
  mc.z = c.lambda * zeta;
  mc.depth = c.depth;
  mc.samples = c.samples;
  mc.seed = c.seed;
  mc.workers = c.workers;
  mc.stderr_ceiling = c.stderr_ceiling;
  const MCEstimate e = mc_average(mc, law);
  const PartialSum ps = m_partial({c.q, c.lambda, c.order, w, law, c.spectral_budget}, zeta);
  const double diff = std::abs(e.mean - ps.value);
  const bool passed = diff <= 3.0 * e.stderr_;
  const json j = {{"zeta", {zeta.real(), zeta.imag()}},
                  {"lambda", c.lambda},
                  {"order", c.order},
                  {"mc", io::mc_to_json(e)},
                  {"expansion", {ps.value.real(), ps.value.imag()}},
                  {"difference", diff},
                  {"stderr", e.stderr_},
                  {"truncation_bound", ps.remainder_bound},
                  {"bound_rigorous", ps.rigorous},
                  {"stderr_flagged", e.stderr_flagged},
                  {"passed", passed}};
  emit(c, j.dump(1) + "\n");
  if (e.stderr_flagged) std::cerr << "warning: stderr " << e.stderr_ << " exceeds the ceiling " << c.stderr_ceiling << "\n";
  return passed ? 0 : 1;
}

int cmd_verify(const RunConfig& c) {
  CoefficientTable table;
  if (!c.table.empty()) {
    std::ifstream in(c.table);
    if (!in) throw std::runtime_error("cannot open table " + c.table);
    table = io::table_from_json(json::parse(in));
  } else {
    table = CoefficientTable::build(16);
  }
  CheckOptions opt;
  opt.mc_samples = c.samples;
  opt.workers = c.workers;
  const auto results = run_invariant_suite(table, opt);
  emit(c, format_check_matrix(results));
  for (const auto& r : results)
    if (!r.passed) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  try {
    if (auto path = find_config_path(argc, argv)) apply_config_file(*path, cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"Strong-disorder density of states on the Bethe lattice"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::string config_path;
  std::string law_spec_text;
  app.add_option("--config", config_path, "JSON config file (flags override it)");
  app.add_option("--q", cfg.q, "branching number q");
  app.add_option("--lambda", cfg.lambda, "disorder strength");
  app.add_option("--order", cfg.order, "truncation order N (coeffs: n_max)");
  app.add_option("--law", cfg.law, "uniform | uniform-generic | semicircle | chebyshev");
  app.add_option("--a", cfg.a, "half-width of the uniform law");
  app.add_option("--radius", cfg.radius, "semicircle radius");
  app.add_option("--chebyshev", cfg.chebyshev, "Chebyshev coefficients of the density on I_sharp")->delimiter(',');
  app.add_option("--law-spec", law_spec_text, "law as JSON, e.g. {\"law\":\"uniform\",\"a\":1.0}");
  app.add_option("--I", cfg.interval, "analytic interval b1,b2")->delimiter(',')->expected(2);
  app.add_option("--delta0", cfg.delta0, "contour distance");
  app.add_option("--delta", cfg.delta, "evaluation radius (< delta0)");
  app.add_option("--grid", cfg.grid, "number of xi points");
  app.add_option("--xi-range", cfg.xi_range, "xi_min,xi_max inside I")->delimiter(',')->expected(2);
  app.add_option("--zeta", cfg.zeta, "evaluation point re,im")->delimiter(',')->expected(2);
  app.add_option("--kmax", cfg.kmax, "highest transform order (default N+1)");
  app.add_option("--depth", cfg.depth, "Monte Carlo tree depth");
  app.add_option("--samples", cfg.samples, "Monte Carlo samples");
  app.add_option("--seed", cfg.seed, "Monte Carlo seed");
  app.add_option("--workers", cfg.workers, "worker threads (0 = all cores)");
  app.add_option("--stderr-ceiling", cfg.stderr_ceiling, "flag Monte Carlo runs above this stderr");
  app.add_flag("--spectral-budget", cfg.spectral_budget, "use 2 sqrt(q) in the budget (non-rigorous)");
  app.add_option("--table", cfg.table, "verify: read the coefficient table from this JSON file");
  app.add_option("--out", cfg.out, "output path (default stdout)");
  app.add_option("--format", cfg.format, "csv | json");

  auto* coeffs = app.add_subcommand("coeffs", "coefficient table up to order n_max (JSON)");
  auto* transforms = app.add_subcommand("transforms", "single-site transforms s_1..s_K at --zeta");
  auto* dos = app.add_subcommand("dos", "density-of-states sweep over xi in I");
  auto* mcc = app.add_subcommand("mc-compare", "Monte Carlo vs expansion at lambda*zeta");
  auto* verify = app.add_subcommand("verify", "invariant suite; exit 0 iff all pass");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (!law_spec_text.empty()) cfg.law_spec = json::parse(law_spec_text);
    if (coeffs->parsed()) return cmd_coeffs(cfg);
    if (transforms->parsed()) return cmd_transforms(cfg);
    if (dos->parsed()) return cmd_dos(cfg);
    if (mcc->parsed()) return cmd_mc_compare(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
