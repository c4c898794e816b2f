#include "bethe/checks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "bethe/errors.hpp"
#include "bethe/expansion.hpp"
#include "bethe/io.hpp"
#include "bethe/oracle.hpp"
#include "bethe/stieltjes.hpp"

namespace bethe {
namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(const char* pattern, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

const AnalyticWindow& reference_window() {
  static const AnalyticWindow w({-0.5, 0.5}, 0.3, 0.15);
  return w;
}

// 20 x 20 grid over the bounding box of Omega_delta(I), keeping the points inside.
std::vector<cdouble> window_grid(const AnalyticWindow& w, int side = 20) {
  const double d = w.delta();
  const double x0 = w.interval().lo - d, x1 = w.interval().hi + d;
  std::vector<cdouble> out;
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) {
      const cdouble z(x0 + (x1 - x0) * (i + 0.5) / side, -d + 2.0 * d * (j + 0.5) / side);
      if (w.contains(z)) out.push_back(z);
    }
  return out;
}

// Five evaluation points inside the window, two below the axis.
std::vector<cdouble> window_points() {
  return {{0.0, 0.05}, {0.3, 0.1}, {-0.4, -0.05}, {0.2, -0.1}, {-0.55, 0.02}};
}

BigInt binomial(int n, int k) {
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// ------------------------------------------------------------------ treewalk

Outcome visit_sum(const CoefficientTable& t) {
  for (int n = 0; n <= t.max_order(); ++n)
    for (const auto& c : t.row(n))
      if (c.profile.total_visits() != n + 1)
        return {false, "row " + std::to_string(n) + " class " + c.profile.to_string()};
  return {true, "rows 0.." + std::to_string(t.max_order())};
}

Outcome odd_rows_empty(const CoefficientTable& t) {
  for (int n = 1; n <= t.max_order(); n += 2)
    if (!t.row(n).empty()) return {false, "row " + std::to_string(n) + " not empty"};
  return {true, "odd n <= " + std::to_string(t.max_order())};
}

Outcome central_binomial(const CoefficientTable& t) {
  for (int n = 0; n <= std::min(12, t.max_order()); n += 2)
    if (t.walk_count(n, 1) != binomial(n, n / 2)) return {false, "n = " + std::to_string(n)};
  return {true, "q = 1 counts equal C(n, n/2) (Catalan-type), n <= 12"};
}

Outcome brute_force_grouping(const CoefficientTable& t) {
  for (int q = 1; q <= 3; ++q)
    for (int n = 0; n <= std::min(10, t.max_order()); n += 2) {
      std::map<std::vector<int>, BigInt> seen;
      for_each_closed_walk(n, q, [&](std::span<const VertexPath> walk) { ++seen[walk_profile(walk).sorted_visits()]; });
      std::map<std::vector<int>, BigInt> table;
      for (const auto& c : t.row(n)) {
        const BigInt v = c.count.evaluate(BigInt(q));
        if (v != 0) table[c.profile.sorted_visits()] = v;
      }
      if (seen != table) return {false, "q = " + std::to_string(q) + ", n = " + std::to_string(n)};
    }
  return {true, "q in {1,2,3}, n <= 10"};
}

Outcome count_bound(const CoefficientTable& t) {
  for (int q = 1; q <= 6; ++q) {
    BigInt cap = 1;
    for (int n = 0; n <= t.max_order(); ++n) {
      if (t.walk_count(n, q) > cap) return {false, "q = " + std::to_string(q) + ", n = " + std::to_string(n)};
      cap *= q + 1;
    }
  }
  return {true, "q <= 6"};
}

Outcome nonnegative_counts(const CoefficientTable& t) {
  for (int n = 0; n <= t.max_order(); ++n)
    for (const auto& c : t.row(n))
      for (int q = 1; q <= 8; ++q)
        if (c.count.evaluate(BigInt(q)) < 0)
          return {false, c.profile.to_string() + " negative at q = " + std::to_string(q)};
  return {true, "every class count >= 0 at q = 1..8"};
}

Outcome sphere_ratio() {
  for (int q = 2; q <= 5; ++q) {
    const double limit = (q - 1.0) / q;
    double prev_gap = INFINITY;
    double gap = 0.0;
    for (int r = 0; r <= 30; ++r) {
      const BigInt s = sphere_size(q, r), b = ball_size(q, r);
      const double ratio = static_cast<double>(boost::multiprecision::cpp_rational(s, b));
      gap = std::abs(ratio - limit);
      if (gap > prev_gap) return {false, "not monotone at q = " + std::to_string(q)};
      prev_gap = gap;
    }
    if (gap > 1e-6) return {false, "q = " + std::to_string(q) + fmt(", gap %.3g at R = 30", gap)};
  }
  return {true, "q = 2..5, R <= 30"};
}

// ---------------------------------------------------------------- stieltjes

std::vector<SingleSiteLaw> sample_laws() {
  const auto& w = reference_window();
  return {SingleSiteLaw::uniform(1.0), uniform_as_generic(1.0, w), semicircle_law(1.0, w),
          chebyshev_law({0.5, 0.1}, w, {{2.0, 0.2}})};
}

Outcome herglotz_transforms() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> re(-2.0, 2.0), im(0.05, 3.0);
  double worst = INFINITY;
  for (const auto& law : sample_laws())
    for (int i = 0; i < 100; ++i) {
      const cdouble z(re(rng), im(rng));
      const double v = s_upper(law, 1, z).imag();
      worst = std::min(worst, v);
      if (!(v > 0.0)) return {false, law.name() + fmt(": Im s_1 = %.3g", v)};
    }
  return {true, fmt("min Im s_1 = %.3g over 4 laws x 100 points", worst)};
}

Outcome derivative_consistency() {
  const auto& w = reference_window();
  const std::vector<SingleSiteLaw> laws = {SingleSiteLaw::uniform(1.0), semicircle_law(1.0, w)};
  const double h = 2e-3;
  double worst_ratio = INFINITY;
  for (const auto& law : laws)
    for (cdouble z : {cdouble(0.1, 0.08), cdouble(-0.2, -0.07)})
      for (int k = 1; k <= 5; ++k) {
        auto err = [&](double step) {
          const cdouble fd = (s_continued(law, k, z + step, w) - s_continued(law, k, z - step, w)) / (2.0 * step * k);
          return std::abs(fd - s_continued(law, k + 1, z, w));
        };
        const double e1 = err(h), e2 = err(h / 2);
        const double scale = std::abs(s_continued(law, k + 1, z, w));
        if (e2 < 1e-9 * std::max(1.0, scale)) continue;
        const double ratio = e1 / e2;
        worst_ratio = std::min(worst_ratio, ratio);
        if (ratio < 3.0) return {false, law.name() + fmt(": halving h reduced the error by %.3g", ratio)};
      }
  return {true, std::isinf(worst_ratio) ? "errors at rounding level" : fmt("error ratio under h/2 >= %.3g", worst_ratio)};
}

Outcome closed_vs_quadrature() {
  const auto& w = reference_window();
  const SingleSiteLaw generic = uniform_as_generic(1.0, w);
  double worst = 0.0;
  for (cdouble z : window_grid(w)) {
    const Eigen::ArrayXcd s = s_continued_all(generic, 6, z, w);
    for (int k = 1; k <= 6; ++k) worst = std::max(worst, std::abs(s[k - 1] - s_uniform_closed(k, z, 1.0)));
  }
  return {worst <= 1e-8, fmt("max error %.3g (k <= 6)", worst)};
}

// rho^{(m)}(z) / m! by the trapezoid rule on a circle of radius r.
cdouble taylor_coefficient(const std::function<cdouble(cdouble)>& f, cdouble z, int m, double r = 0.08) {
  const int nodes = 128;
  cdouble acc = 0.0;
  for (int j = 0; j < nodes; ++j) {
    const cdouble u = std::polar(r, 2.0 * kPi * j / nodes);
    acc += f(z + u) * std::pow(u, -m);
  }
  return acc / static_cast<double>(nodes);
}

Outcome continuation_jump() {
  const auto& w = reference_window();
  const SingleSiteLaw semi = semicircle_law(1.0, w);
  const auto& rho = semi.generic_params().density;
  const SingleSiteLaw uni = SingleSiteLaw::uniform(1.0);
  auto uni_rho = [](cdouble) { return cdouble(0.5, 0.0); };
  double worst = 0.0;
  for (cdouble z : {cdouble(0.0, -0.06), cdouble(0.35, -0.1), cdouble(-0.45, -0.08)})
    for (int k = 1; k <= 4; ++k) {
      const cdouble jump_semi = s_continued(semi, k, z, w) - std::conj(s_upper(semi, k, std::conj(z)));
      const cdouble want_semi = 2.0 * kPi * cdouble(0, 1) * taylor_coefficient(rho, z, k - 1);
      const cdouble jump_uni = s_continued(uni, k, z, w) - std::conj(s_upper(uni, k, std::conj(z)));
      const cdouble want_uni = 2.0 * kPi * cdouble(0, 1) * taylor_coefficient(uni_rho, z, k - 1);
      worst = std::max({worst, std::abs(jump_semi - want_semi), std::abs(jump_uni - want_uni)});
    }
  return {worst <= 1e-8, fmt("max deviation %.3g (k <= 4)", worst)};
}

Outcome transform_bounds() {
  const auto& w = reference_window();
  double worst = 0.0;
  for (const SingleSiteLaw& law : {SingleSiteLaw::uniform(1.0), semicircle_law(1.0, w)})
    for (cdouble z : window_grid(w, 12)) {
      const Eigen::ArrayXcd s = s_continued_all(law, 10, z, w);
      for (int k = 1; k <= 10; ++k) {
        const double r = std::abs(s[k - 1]) / sk_bound(law, w, k);
        worst = std::max(worst, r);
        if (r > 1.0) return {false, law.name() + fmt(": |s_k| / bound = %.3g", r)};
      }
    }
  return {true, fmt("max |s_k| / bound = %.3g (k <= 10)", worst)};
}

// ---------------------------------------------------------------- expansion

Outcome odd_vanishing(const CoefficientTable& t) {
  const auto& w = reference_window();
  const SingleSiteLaw law = SingleSiteLaw::uniform(1.0);
  const Eigen::ArrayXcd s = s_continued_all(law, t.max_order() + 1, {0.1, -0.05}, w);
  for (int n = 1; n <= std::min(15, t.max_order()); n += 2)
    if (coefficient_from_transforms(t.row(n), n, 2, s) != cdouble(0.0, 0.0))
      return {false, "M_" + std::to_string(n) + " != 0"};
  return {true, "M_n = 0 exactly for odd n <= 15"};
}

Outcome low_order_identities(const CoefficientTable& t) {
  if (t.max_order() < 4) return {false, "table shorter than order 4"};
  const auto& w = reference_window();
  const std::vector<SingleSiteLaw> laws = {SingleSiteLaw::uniform(1.0), semicircle_law(1.0, w)};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> re(-0.6, 0.6), im(-0.1, 0.1);
  std::uniform_int_distribution<int> qd(1, 6);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int q = qd(rng);
    cdouble z(re(rng), im(rng));
    if (!w.contains(z)) z = {0.5 * z.real(), z.imag()};
    const Eigen::ArrayXcd s = s_continued_all(laws[i % 2], 5, z, w);
    const double qq = q;
    const cdouble m2 = (qq + 1) * s[1] * s[0];
    const cdouble m4 = (qq + 1) * s[2] * s[1] + (qq * qq + qq) * s[2] * s[0] * s[0] + (qq * qq + qq) * s[1] * s[1] * s[0];
    const double e2 = std::abs(coefficient_from_transforms(t.row(2), 2, q, s) - m2) / std::max(1.0, std::abs(m2));
    const double e4 = std::abs(coefficient_from_transforms(t.row(4), 4, q, s) - m4) / std::max(1.0, std::abs(m4));
    worst = std::max({worst, e2, e4});
  }
  return {worst <= 1e-12, fmt("max relative error %.3g over 100 (q, z)", worst)};
}

Outcome neumann_consistency() {
  const auto& w = reference_window();
  const SingleSiteLaw law = SingleSiteLaw::uniform(1.0);
  const int q = 2;
  const double lambda = 10.0;
  double worst = 0.0;
  for (cdouble z : {cdouble(0.1, 0.5), cdouble(-1.5, 0.8), cdouble(0.0, 2.0)}) {
    StrongDisorderExpansion ex({q, lambda, 15, w, law});
    const cdouble ref = ex.partial_sum(z, 15, lambda);
    for (int n = 0; n <= 13; ++n) {
      const double diff = std::abs(ex.partial_sum(z, n, lambda) - ref);
      const double bound = neumann_tail_bound(q, lambda, n, z);
      worst = std::max(worst, diff / bound);
      if (diff > bound) return {false, fmt("N-truncation gap exceeds tail bound at Re z = %.2f", z.real())};
    }
  }
  return {true, fmt("max gap / tail bound = %.3g", worst)};
}

struct ScalingStats {
  double worst_slope_error = 0.0;
  double worst_bound_ratio = 0.0;
  std::string failure;
};

ScalingStats remainder_scaling() {
  const auto& w = reference_window();
  const SingleSiteLaw law = SingleSiteLaw::uniform(1.0);
  ScalingStats st;
  for (int order : {1, 3}) {
    ExpansionParams p{2, 1.0, 9, w, law};
    StrongDisorderExpansion ex(p);
    const RemainderBudget budget = remainder_budget(w, 2, law, order);
    for (cdouble z : window_points()) {
      const std::vector<cdouble> m = ex.coefficients(z, 9);
      std::vector<double> xs, ys;
      for (double f : {4.0, 8.0, 16.0, 32.0}) {
        const double lambda = f * budget.lambda0;
        cdouble tail = 0.0;
        for (int n = 9; n > order; --n) tail += m[n] * std::pow(lambda, -n - 1);
        const double diff = std::abs(tail);
        st.worst_bound_ratio = std::max(st.worst_bound_ratio, diff / budget.bound(lambda));
        xs.push_back(std::log(lambda));
        ys.push_back(std::log(diff));
      }
      const double xm = (xs[0] + xs[1] + xs[2] + xs[3]) / 4, ym = (ys[0] + ys[1] + ys[2] + ys[3]) / 4;
      double sxy = 0.0, sxx = 0.0;
      for (int i = 0; i < 4; ++i) {
        sxy += (xs[i] - xm) * (ys[i] - ym);
        sxx += (xs[i] - xm) * (xs[i] - xm);
      }
      const double slope = sxy / sxx;
      st.worst_slope_error = std::max(st.worst_slope_error, std::abs(slope + order + 2));
    }
  }
  return st;
}

Outcome remainder_order() {
  const ScalingStats st = remainder_scaling();
  return {st.worst_slope_error <= 0.3, fmt("max |slope + N + 2| = %.3g", st.worst_slope_error)};
}

Outcome bound_validity() {
  const ScalingStats st = remainder_scaling();
  return {st.worst_bound_ratio <= 1.0, fmt("max |tail| / bound = %.3g", st.worst_bound_ratio)};
}

Outcome dos_positivity() {
  const auto& w = reference_window();
  const SingleSiteLaw law = SingleSiteLaw::uniform(1.0);
  const double lambda0 = remainder_budget(w, 2, law, 3).lambda0;
  int dominated = 0;
  for (double f : {1.0, 2.0, 10.0}) {
    ExpansionParams p{2, f * lambda0, 3, w, law};
    for (int i = 1; i < 20; ++i) {
      const double xi = -0.5 + i / 20.0;
      const DosValue d = dos_density(p, xi);
      if (!(d.value > 0.0)) return {false, fmt("value <= 0 at xi = %.3f", xi)};
      if (law.density(xi) / p.lambda > 2.0 * d.remainder_bound) {
        ++dominated;
        if (!(d.value > d.remainder_bound)) return {false, fmt("value below bound at xi = %.3f", xi)};
      }
    }
  }
  return {true, std::to_string(dominated) + " dominated points, all positive"};
}

// ------------------------------------------------------------------- oracle

Outcome herglotz_levels() {
  const SingleSiteLaw law = SingleSiteLaw::uniform(1.0);
  DisorderStream stream(3, quantile_function(law));
  long seen = 0;
  bool ok = true;
  LevelObserver obs = [&](int, cdouble g) {
    ++seen;
    if (!(g.imag() > 0.0)) ok = false;
  };
  for (cdouble z : {cdouble(0.0, 1e-3), cdouble(1.5, 0.1), cdouble(-3.0, 2.0)})
    for (std::uint64_t s = 0; s < 20; ++s) {
      const cdouble g = root_green(2, 2.0, z, 8, stream.frozen(s), &obs);
      if (!(g.imag() > 0.0)) ok = false;
    }
  return {ok, std::to_string(seen) + " levels observed"};
}

Outcome resolvent_bound(long samples) {
  const SingleSiteLaw law = SingleSiteLaw::uniform(1.0);
  DisorderStream stream(17, quantile_function(law));
  const cdouble z(0.2, 0.05);
  double worst = 0.0;
  for (long s = 0; s < samples; ++s) {
    const cdouble g = root_green(2, 1.0, z, 5, stream.frozen(static_cast<std::uint64_t>(s)));
    worst = std::max(worst, std::abs(g) * z.imag());
  }
  return {worst <= 1.0, fmt("max |G| Im z = %.6f over ", worst) + std::to_string(samples) + " samples"};
}

Outcome recursion_vs_dense() {
  const SingleSiteLaw law = SingleSiteLaw::uniform(1.0);
  DisorderStream stream(29, quantile_function(law));
  double worst = 0.0;
  for (int q = 1; q <= 2; ++q)
    for (int r = 0; r <= 3; ++r)
      for (cdouble z : {cdouble(0.3, 0.7), cdouble(-1.0, 0.05)})
        for (std::uint64_t s = 0; s < 3; ++s) {
          const auto omega = stream.frozen(s);
          const cdouble a = root_green(q, 1.5, z, r, omega);
          const cdouble b = dense_green_oracle(r, q, 1.5, z, omega);
          worst = std::max(worst, std::abs(a - b) / std::abs(b));
        }
  return {worst <= 1e-12, fmt("max relative error %.3g", worst)};
}

Outcome seed_determinism(int workers) {
  const SingleSiteLaw law = SingleSiteLaw::uniform(1.0);
  MCConfig c;
  c.lambda = 3.0;
  c.z = {0.5, 0.3};
  c.depth = 8;
  c.samples = 3000;
  c.workers = workers;
  const MCEstimate a = mc_average(c, law);
  const MCEstimate b = mc_average(c, law);
  c.workers = 1;
  const MCEstimate serial = mc_average(c, law);
  c.workers = 3;
  const MCEstimate three = mc_average(c, law);
  const std::string ja = io::mc_to_json(a).dump(), jb = io::mc_to_json(b).dump();
  const bool ok = ja == jb && a == serial && a == three;
  return {ok, ok ? "repeat, 1 and 3 workers bit-identical" : "outputs differ"};
}

Outcome mc_agreement(long samples, int workers) {
  const auto& w = reference_window();
  const SingleSiteLaw law = SingleSiteLaw::uniform(1.0);
  const double lambda = 20.0;
  int hits = 0;
  for (int i = 0; i < 10; ++i) {
    const cdouble zeta(-0.45 + 0.1 * i, 0.4);
    MCConfig c;
    c.q = 2;
    c.lambda = lambda;
    c.z = lambda * zeta;
    c.depth = 20;
    c.samples = samples;
    c.seed = 42;
    c.workers = workers;
    const MCEstimate e = mc_average(c, law);
    const PartialSum ps = m_partial({2, lambda, 7, w, law}, zeta);
    if (std::abs(e.mean - ps.value) <= 3.0 * e.stderr_) ++hits;
  }
  return {hits >= 9, std::to_string(hits) + "/10 points within 3 stderr"};
}

// ---------------------------------------------------------------------- cli

Outcome round_trips(const CoefficientTable& t) {
  const auto& w = reference_window();
  const io::json jt = io::table_to_json(t);
  if (!(io::table_from_json(io::json::parse(jt.dump())) == t)) return {false, "coefficient table"};
  if (!(io::window_from_json(io::json::parse(io::window_to_json(w).dump())) == w)) return {false, "window"};
  MCEstimate e;
  e.mean = {0.1 / 3.0, std::sqrt(2.0) / 7.0};
  e.stderr_ = 1.0 / 3e4;
  e.samples_used = 12345;
  e.depth = 20;
  e.depth_pair_gap = 1e-17 / 3.0;
  e.seed = 0xfedcba9876543210ULL;
  e.effective_depth = 8;
  e.prune_bound = 3.4e-13;
  if (!(io::mc_from_json(io::json::parse(io::mc_to_json(e).dump())) == e)) return {false, "MC record"};
  const DosValue d = dos_density({2, 37.0, 5, w, SingleSiteLaw::uniform(1.0)}, 0.1234);
  const io::DosRow r = io::dos_row_from_csv(io::dos_csv_row(d, 37.0));
  bool ok = r.xi == d.xi && r.value == d.value && r.remainder_bound == d.remainder_bound &&
            r.rigorous == d.rigorous && r.energy == 37.0 * d.xi;
  for (std::size_t n = 0; ok && n < d.coefficients.size(); n += 2)
    ok = r.even_coefficients.at(n / 2) == d.coefficients[n];
  if (!ok) return {false, "density CSV row"};
  return {true, "table, window, MC record, density CSV"};
}

Outcome output_determinism(const CoefficientTable& t) {
  const auto& w = reference_window();
  auto render = [&] {
    std::string s = io::table_to_json(t).dump();
    ExpansionParams p{2, 100.0, 3, w, SingleSiteLaw::uniform(1.0)};
    for (int i = 1; i < 10; ++i) s += io::dos_csv_row(dos_density(p, -0.5 + i / 10.0), 100.0);
    return s;
  };
  return {render() == render(), "repeated rendering byte-identical"};
}

}  // namespace

std::vector<CheckResult> run_invariant_suite(const CoefficientTable& table, const CheckOptions& options) {
  std::vector<CheckResult> out;
  auto run = [&](const char* module, const char* name, const std::function<Outcome()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    r.module = module;
    r.name = name;
    try {
      const Outcome o = f();
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("threw: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  };

  run("treewalk", "visits sum to n+1", [&] { return visit_sum(table); });
  run("treewalk", "odd rows empty", [&] { return odd_rows_empty(table); });
  run("treewalk", "q=1 central binomial (Catalan)", [&] { return central_binomial(table); });
  run("treewalk", "brute-force class grouping", [&] { return brute_force_grouping(table); });
  run("treewalk", "count <= (q+1)^n", [&] { return count_bound(table); });
  run("treewalk", "nonnegative class counts", [&] { return nonnegative_counts(table); });
  run("treewalk", "sphere/ball ratio", sphere_ratio);

  run("stieltjes", "Herglotz s_1", herglotz_transforms);
  run("stieltjes", "derivative consistency", derivative_consistency);
  run("stieltjes", "closed form vs contour", closed_vs_quadrature);
  run("stieltjes", "continuation jump", continuation_jump);
  run("stieltjes", "|s_k| <= sk_bound", transform_bounds);

  run("expansion", "odd orders vanish", [&] { return odd_vanishing(table); });
  run("expansion", "M_2, M_4 identities", [&] { return low_order_identities(table); });
  run("expansion", "Neumann consistency", neumann_consistency);
  run("expansion", "remainder order", remainder_order);
  run("expansion", "remainder bound validity", bound_validity);
  run("expansion", "positivity at strong disorder", dos_positivity);

  run("oracle", "Herglotz at every level", herglotz_levels);
  run("oracle", "|G| <= 1/Im z", [&] { return resolvent_bound(options.bound_samples); });
  run("oracle", "recursion vs dense solve", recursion_vs_dense);
  run("oracle", "seed determinism", [&] { return seed_determinism(options.workers); });
  if (options.mc_samples > 0)
    run("oracle", "agreement with expansion", [&] { return mc_agreement(options.mc_samples, options.workers); });

  run("cli", "JSON/CSV round trip", [&] { return round_trips(table); });
  run("cli", "output determinism", [&] { return output_determinism(table); });
  return out;
}

std::string format_check_matrix(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  int failed = 0;
  for (const auto& r : results) {
    char line[256];
    std::snprintf(line, sizeof line, "%-4s  %-10s %-32s %7.2fs  ", r.passed ? "PASS" : "FAIL", r.module.c_str(),
                  r.name.c_str(), r.seconds);
    os << line << r.detail << '\n';
    failed += !r.passed;
  }
  os << results.size() - failed << '/' << results.size() << " checks passed\n";
  return os.str();
}

}  // namespace bethe
