#include "bethe/stieltjes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bethe {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kContourStartNodes = 16;
constexpr int kContourMaxNodes = 1 << 14;
constexpr double kContourTol = 1e-12;

void require_order(int k) {
  if (k < 1) throw DomainError("transform order k must be >= 1");
}

// Powers (t - z)^{-k}, k = 1..kmax.
Eigen::ArrayXcd inverse_powers(cdouble d, int kmax) {
  Eigen::ArrayXcd out(kmax);
  const cdouble inv = 1.0 / d;
  cdouble p = inv;
  for (int k = 0; k < kmax; ++k) {
    out[k] = p;
    p *= inv;
  }
  return out;
}

// Integrates f over [lo, hi] after t = lo + (hi - lo)(1 - cos phi)/2, which
// removes square-root behaviour of the density at either end.
template <typename F>
Eigen::ArrayXcd integrate_segment(const F& f, double lo, double hi, int kmax) {
  const double half = 0.5 * (hi - lo);
  auto g = [&](double phi) -> Eigen::ArrayXcd {
    const double t = lo + half * (1.0 - std::cos(phi));
    return f(t) * (half * std::sin(phi));
  };
  return integrate_adaptive(g, 0.0, kPi, Eigen::ArrayXcd::Zero(kmax).eval());
}

const ContourEta& cached_eta(const AnalyticWindow& window, int nodes) {
  thread_local std::vector<std::pair<std::pair<AnalyticWindow, int>, ContourEta>> cache;
  for (auto& [key, eta] : cache)
    if (key.first == window && key.second == nodes) return eta;
  if (cache.size() > 64) cache.clear();
  cache.push_back({{window, nodes}, build_eta(window, nodes)});
  return cache.back().second;
}

void check_generic_window(const GenericAnalyticLaw& g, const AnalyticWindow& window) {
  const Interval s = window.sharp();
  if (std::abs(s.lo - g.analytic_interval.lo) > 1e-12 || std::abs(s.hi - g.analytic_interval.hi) > 1e-12)
    throw DomainError("law '" + g.name + "' was split at a different I_sharp than this window's");
}

void check_uniform_window(double a, const AnalyticWindow& window) {
  const Interval s = window.sharp();
  if (!(s.lo > -a && s.hi < a))
    throw DomainError("I_sharp must lie inside (-a, a) for the uniform law");
}

}  // namespace

// ------------------------------------------------------------------ window

AnalyticWindow::AnalyticWindow(Interval interval, double delta0, double delta)
    : interval_(interval), delta0_(delta0), delta_(delta) {
  if (!(interval.lo < interval.hi)) throw DomainError("window interval must satisfy b1 < b2");
  if (!(delta0 > 0.0)) throw DomainError("delta0 must be positive");
  if (!(delta > 0.0 && delta < delta0)) throw DomainError("need 0 < delta < delta0");
}

double AnalyticWindow::distance_to_interval(cdouble z) const {
  const double x = std::clamp(z.real(), interval_.lo, interval_.hi);
  return std::abs(z - cdouble(x, 0.0));
}

// --------------------------------------------------------------- outside

double OutsidePart::total_mass() const {
  double m = 0.0;
  for (const auto& p : masses) m += p.w;
  for (const auto& s : segments) {
    auto f = [&](double t) { return Eigen::ArrayXcd::Constant(1, s.density(t)).eval(); };
    m += integrate_segment(f, s.lo, s.hi, 1)[0].real();
  }
  return m;
}

Eigen::ArrayXcd OutsidePart::transforms(int kmax, cdouble z) const {
  Eigen::ArrayXcd acc = Eigen::ArrayXcd::Zero(kmax);
  for (const auto& p : masses) {
    if (p.t == z) throw PoleError("evaluation at an outside point mass");
    acc += p.w * inverse_powers(p.t - z, kmax);
  }
  for (const auto& s : segments) {
    auto f = [&](double t) { return (s.density(t) * inverse_powers(t - z, kmax)).eval(); };
    acc += integrate_segment(f, s.lo, s.hi, kmax);
  }
  return acc;
}

// -------------------------------------------------------------------- laws

SingleSiteLaw SingleSiteLaw::uniform(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("uniform half-width must be positive");
  return SingleSiteLaw(UniformLaw{a});
}

SingleSiteLaw SingleSiteLaw::generic(GenericAnalyticLaw law) {
  if (!law.density) throw DomainError("generic law needs a density");
  const Interval s = law.analytic_interval;
  if (!(s.lo < s.hi)) throw DomainError("analytic interval must be nonempty");
  for (int j = 0; j <= 64; ++j) {
    const double t = s.lo + (s.hi - s.lo) * j / 64.0;
    const cdouble r = law.density(t);
    if (std::abs(r.imag()) > 1e-12 * std::max(1.0, std::abs(r.real())) || r.real() < -1e-14)
      throw DomainError("density must be real and nonnegative on the analytic interval");
  }
  for (const auto& p : law.outside.masses) {
    if (p.w < 0.0) throw DomainError("outside masses must be nonnegative");
    if (p.t > s.lo && p.t < s.hi) throw DomainError("outside masses must lie off I_sharp");
  }
  for (const auto& seg : law.outside.segments)
    if (seg.hi > s.lo && seg.lo < s.hi) throw DomainError("outside segments must lie off I_sharp");
  SingleSiteLaw out(std::move(law));
  const double mass = out.total_mass();
  if (std::abs(mass - 1.0) > 1e-10)
    throw DomainError("total mass " + std::to_string(mass) + " differs from 1");
  return out;
}

Interval SingleSiteLaw::support() const {
  if (is_uniform()) return {-uniform_params().a, uniform_params().a};
  const auto& g = generic_params();
  Interval s = g.analytic_interval;
  for (const auto& p : g.outside.masses) {
    s.lo = std::min(s.lo, p.t);
    s.hi = std::max(s.hi, p.t);
  }
  for (const auto& seg : g.outside.segments) {
    s.lo = std::min(s.lo, seg.lo);
    s.hi = std::max(s.hi, seg.hi);
  }
  return s;
}

double SingleSiteLaw::density(double t) const {
  if (is_uniform()) {
    const double a = uniform_params().a;
    return std::abs(t) <= a ? 0.5 / a : 0.0;
  }
  const auto& g = generic_params();
  if (t > g.analytic_interval.lo && t < g.analytic_interval.hi) return g.density(t).real();
  for (const auto& seg : g.outside.segments)
    if (t >= seg.lo && t <= seg.hi) return seg.density(t);
  return 0.0;
}

double SingleSiteLaw::total_mass() const {
  if (is_uniform()) return 1.0;
  const auto& g = generic_params();
  auto f = [&](double t) { return Eigen::ArrayXcd::Constant(1, g.density(t)).eval(); };
  const double inside =
      integrate_segment(f, g.analytic_interval.lo, g.analytic_interval.hi, 1)[0].real();
  return inside + g.outside.total_mass();
}

std::string SingleSiteLaw::name() const {
  return is_uniform() ? std::string("uniform") : generic_params().name;
}

SingleSiteLaw uniform_as_generic(double a, const AnalyticWindow& window) {
  check_uniform_window(a, window);
  const Interval s = window.sharp();
  const double rho = 0.5 / a;
  GenericAnalyticLaw g;
  g.name = "uniform";
  g.density = [rho](cdouble) { return cdouble(rho, 0.0); };
  g.analytic_interval = s;
  g.density_bound_on_eta = rho;
  auto flat = [rho](double) { return rho; };
  g.outside.segments = {{-a, s.lo, flat}, {s.hi, a, flat}};
  return SingleSiteLaw::generic(std::move(g));
}

SingleSiteLaw semicircle_law(double radius, const AnalyticWindow& window) {
  if (!(radius > 0.0)) throw DomainError("semicircle radius must be positive");
  const Interval s = window.sharp();
  if (!(s.lo > -radius && s.hi < radius)) throw DomainError("I_sharp must lie inside (-R, R)");
  const double c = 2.0 / (kPi * radius * radius);
  GenericAnalyticLaw g;
  g.name = "semicircle";
  g.density = [c, radius](cdouble w) { return c * std::sqrt(radius * radius - w * w); };
  g.analytic_interval = s;
  auto real_density = [c, radius](double t) {
    return c * std::sqrt(std::max(0.0, radius * radius - t * t));
  };
  g.outside.segments = {{-radius, s.lo, real_density}, {s.hi, radius, real_density}};
  return SingleSiteLaw::generic(std::move(g));
}

SingleSiteLaw chebyshev_law(std::vector<double> coefficients, const AnalyticWindow& window,
                            std::vector<PointMass> outside_masses) {
  if (coefficients.empty()) throw DomainError("need at least one Chebyshev coefficient");
  const Interval s = window.sharp();
  GenericAnalyticLaw g;
  g.name = "chebyshev";
  g.density = [c = std::move(coefficients), s](cdouble w) {
    const cdouble x = (2.0 * w - (s.lo + s.hi)) / (s.hi - s.lo);
    cdouble b1 = 0.0, b2 = 0.0;
    for (std::size_t j = c.size(); j-- > 1;) {
      const cdouble b0 = 2.0 * x * b1 - b2 + c[j];
      b2 = b1;
      b1 = b0;
    }
    return x * b1 - b2 + c[0];
  };
  g.analytic_interval = s;
  g.outside.masses = std::move(outside_masses);
  return SingleSiteLaw::generic(std::move(g));
}

// ----------------------------------------------------------------- contour

ContourEta build_eta(const AnalyticWindow& window, int nodes_per_piece) {
  if (nodes_per_piece < 4) throw DomainError("contour needs at least 4 nodes per piece");
  const double b1 = window.interval().lo;
  const double b2 = window.interval().hi;
  const double r = window.delta0();
  const cdouble I(0.0, 1.0);
  ContourEta eta;
  // angle pi -> 3pi/2 around b1
  eta.pieces[0] = {
      [=](double t) { return b1 + r * std::exp(I * (kPi + 0.25 * kPi * (t + 1.0))); },
      [=](double t) { return I * r * 0.25 * kPi * std::exp(I * (kPi + 0.25 * kPi * (t + 1.0))); }};
  eta.pieces[1] = {[=](double t) { return cdouble(b1 + 0.5 * (b2 - b1) * (t + 1.0), -r); },
                   [=](double) { return cdouble(0.5 * (b2 - b1), 0.0); }};
  // angle -pi/2 -> 0 around b2
  eta.pieces[2] = {
      [=](double t) { return b2 + r * std::exp(I * (-0.5 * kPi + 0.25 * kPi * (t + 1.0))); },
      [=](double t) { return I * r * 0.25 * kPi * std::exp(I * (-0.5 * kPi + 0.25 * kPi * (t + 1.0))); }};
  for (std::size_t p = 0; p < 3; ++p) eta.nodes[p] = discretize(eta.pieces[p], nodes_per_piece);
  eta.nodes_per_piece = nodes_per_piece;
  eta.length = kPi * r + (b2 - b1);
  return eta;
}

// -------------------------------------------------------------- transforms

cdouble s_uniform_closed(int k, cdouble z, double a) {
  require_order(k);
  if (!(a > 0.0)) throw DomainError("uniform half-width must be positive");
  if (z == cdouble(a, 0.0) || z == cdouble(-a, 0.0)) throw PoleError("s_k of the uniform law has poles at +-a");
  if (k == 1) {
    // Principal Log((a - z)/(-a - z)) is holomorphic off [-a, a] and is the
    // upper-half-plane branch. Continuing along the vertical line from
    // Re z + i*inf down to z crosses the cut exactly when |Re z| < a and the
    // line passes below the axis; the continued branch gains 2 pi i there.
    // On the cut itself the upper boundary value (arg = +pi) is returned.
    const double x = z.real();
    const double y = z.imag();
    cdouble L;
    if (y == 0.0 && std::abs(x) < a) {
      L = cdouble(std::log((a - x) / (a + x)), kPi);
    } else {
      L = std::log((a - z) / (-a - z));
      if (y < 0.0 && std::abs(x) < a) L += cdouble(0.0, 2.0 * kPi);
    }
    return L / (2.0 * a);
  }
  const int m = k - 1;
  return (std::pow(-a - z, -m) - std::pow(a - z, -m)) / (2.0 * a * m);
}

Eigen::ArrayXcd s_upper_all(const SingleSiteLaw& law, int kmax, cdouble z) {
  require_order(kmax);
  if (!(z.imag() > 0.0)) throw DomainError("s_upper needs Im z > 0");
  Eigen::ArrayXcd out(kmax);
  if (law.is_uniform()) {
    for (int k = 1; k <= kmax; ++k) out[k - 1] = s_uniform_closed(k, z, law.uniform_params().a);
    return out;
  }
  const auto& g = law.generic_params();
  auto f = [&](double t) { return (g.density(t).real() * inverse_powers(t - z, kmax)).eval(); };
  AdaptiveOptions opt;
  opt.max_nodes = 1L << 20;
  out = integrate_adaptive(f, g.analytic_interval.lo, g.analytic_interval.hi,
                           Eigen::ArrayXcd::Zero(kmax).eval(), opt);
  out += g.outside.transforms(kmax, z);
  return out;
}

cdouble s_upper(const SingleSiteLaw& law, int k, cdouble z) {
  require_order(k);
  return s_upper_all(law, k, z)[k - 1];
}

Eigen::ArrayXcd s_continued_all(const SingleSiteLaw& law, int kmax, cdouble z,
                                const AnalyticWindow& window) {
  require_order(kmax);
  if (!window.contains(z)) throw DomainError("point lies outside Omega_delta(I)");
  Eigen::ArrayXcd out(kmax);
  if (law.is_uniform()) {
    const double a = law.uniform_params().a;
    check_uniform_window(a, window);
    for (int k = 1; k <= kmax; ++k) out[k - 1] = s_uniform_closed(k, z, a);
    return out;
  }
  const auto& g = law.generic_params();
  check_generic_window(g, window);
  out = g.outside.transforms(kmax, z);
  for (std::size_t p = 0; p < 3; ++p) {
    // value and integral of the absolute integrand (rounding floor)
    auto piece_integral = [&](int n, double& magnitude) {
      const ContourNodes& cn = cached_eta(window, n).nodes[p];
      Eigen::ArrayXcd acc = Eigen::ArrayXcd::Zero(kmax);
      Eigen::ArrayXd mag = Eigen::ArrayXd::Zero(kmax);
      for (Eigen::Index j = 0; j < cn.points.size(); ++j) {
        const Eigen::ArrayXcd term = cn.weights[j] * g.density(cn.points[j]) * inverse_powers(cn.points[j] - z, kmax);
        acc += term;
        mag += term.abs();
      }
      magnitude = mag.maxCoeff();
      return acc;
    };
    int n = kContourStartNodes;
    double magnitude = 0.0;
    Eigen::ArrayXcd prev = piece_integral(n, magnitude);
    double diff = INFINITY;
    for (;;) {
      n *= 2;
      if (n > kContourMaxNodes) throw ConvergenceError("contour quadrature did not converge", diff);
      Eigen::ArrayXcd next = piece_integral(n, magnitude);
      diff = (next - prev).abs().maxCoeff();
      prev = std::move(next);
      if (diff < kContourTol * std::max(1.0, magnitude)) break;
    }
    out += prev;
  }
  return out;
}

cdouble s_continued(const SingleSiteLaw& law, int k, cdouble z, const AnalyticWindow& window) {
  require_order(k);
  return s_continued_all(law, k, z, window)[k - 1];
}

TransformConstant transform_constant(const SingleSiteLaw& law, const AnalyticWindow& window) {
  TransformConstant tc;
  tc.eta_length = kPi * window.delta0() + window.interval().length();
  if (law.is_uniform()) {
    check_uniform_window(law.uniform_params().a, window);
    tc.sup_density_on_eta = 0.5 / law.uniform_params().a;
  } else {
    const auto& g = law.generic_params();
    check_generic_window(g, window);
    if (g.density_bound_on_eta) {
      tc.sup_density_on_eta = *g.density_bound_on_eta;
    } else {
      // 256 samples spread over the three pieces, inflated by 2.
      const ContourEta eta = build_eta(window, 4);
      double sup = 0.0;
      for (int j = 0; j < 256; ++j) {
        const double u = 3.0 * j / 255.0;
        const int p = std::min(2, static_cast<int>(u));
        const double t = 2.0 * (u - p) - 1.0;
        sup = std::max(sup, std::abs(g.density(eta.pieces[static_cast<std::size_t>(p)].point(t))));
      }
      tc.sup_density_on_eta = 2.0 * sup;
      tc.rigorous = false;
    }
  }
  tc.C_delta = 1.0 + tc.eta_length * tc.sup_density_on_eta;
  return tc;
}

double sk_bound(const SingleSiteLaw& law, const AnalyticWindow& window, int k) {
  require_order(k);
  const double C = transform_constant(law, window).C_delta;
  return C * std::pow(window.delta0() - window.delta(), -k);
}

}  // namespace bethe
