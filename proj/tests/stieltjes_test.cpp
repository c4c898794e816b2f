#include "doctest.h"

#include <cmath>
#include <random>

#include "bethe/errors.hpp"
#include "bethe/quadrature.hpp"
#include "bethe/stieltjes.hpp"

using namespace bethe;

namespace {

constexpr double kPi = 3.14159265358979323846;
const cdouble kI(0.0, 1.0);

AnalyticWindow ref_window() { return AnalyticWindow({-0.5, 0.5}, 0.3, 0.15); }

std::vector<cdouble> grid20(const AnalyticWindow& w) {
  std::vector<cdouble> pts;
  const double d = w.delta();
  const double x0 = w.interval().lo - d, x1 = w.interval().hi + d;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const cdouble z(x0 + (x1 - x0) * (i + 0.5) / 20, -d + 2 * d * (j + 0.5) / 20);
      if (w.contains(z)) pts.push_back(z);
    }
  return pts;
}

// Composite 64-point Gauss-Legendre over [lo, hi] split into `panels` pieces.
template <class F>
cdouble composite(const F& f, double lo, double hi, int panels = 64) {
  cdouble acc = 0.0;
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) acc += integrate_fixed(f, lo + p * h, lo + (p + 1) * h, 64, cdouble(0.0));
  return acc;
}

// s_1 of the uniform law tracked from z + 2i straight down to z:
// s_1(z) = s_1(z + 2i) - int_z^{z+2i} s_2(w) dw, with s_2 rational.
cdouble uniform_s1_by_path(cdouble z, double a) {
  const cdouble top = z + 2.0 * kI;
  const cdouble s1_top = composite([&](double t) { return 1.0 / (2 * a) / (t - top); }, -a, a);
  auto s2 = [&](cdouble w) { return (1.0 / (-a - w) - 1.0 / (a - w)) / (2 * a); };
  const cdouble path = composite([&](double y) { return s2(cdouble(z.real(), y)) * kI; }, z.imag(), top.imag(), 16);
  return s1_top - path;
}

// Semicircle of radius R: s_1(z) = (2 / R^2) (sqrt(z - R) sqrt(z + R) - z) above the axis;
// the continuation below flips the sign of the square-root product.
cdouble semicircle_s1(cdouble z, double R, bool continued_below) {
  const cdouble root = std::sqrt(z - R) * std::sqrt(z + R);
  return 2.0 / (R * R) * ((continued_below ? -root : root) - z);
}

}  // namespace

TEST_SUITE("stieltjes") {
  TEST_CASE("Gauss-Legendre rules") {
    for (int n : {1, 4, 16, 64}) {
      const auto r = gauss_legendre(n);
      CHECK(r->weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
      // exact for degree 2n-1
      const double moment = (r->weights * r->nodes.pow(2 * n - 2)).sum();
      CHECK(moment == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-13));
    }
    CHECK(gauss_legendre(16) == gauss_legendre(16));
    const double v = integrate_adaptive([](double x) { return std::exp(x); }, 0.0, 1.0, 0.0);
    CHECK(v == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
    AdaptiveOptions tight;
    tight.max_nodes = 200;
    CHECK_THROWS_AS(integrate_adaptive([](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3)); }, 0.0, 1.0, 0.0, tight),
                    ConvergenceError);
  }

  TEST_CASE("window validation and membership") {
    CHECK_THROWS_AS(AnalyticWindow({0.5, -0.5}, 0.3, 0.15), DomainError);
    CHECK_THROWS_AS(AnalyticWindow({-0.5, 0.5}, 0.3, 0.3), DomainError);
    CHECK_THROWS_AS(AnalyticWindow({-0.5, 0.5}, 0.3, 0.0), DomainError);
    const AnalyticWindow w = ref_window();
    CHECK(w.contains({0.0, -0.14}));
    CHECK_FALSE(w.contains({0.0, -0.16}));
    CHECK(w.contains({0.6, 0.1}));
    CHECK_FALSE(w.contains({0.6, 0.12}));
    CHECK(w.sharp() == Interval{-0.8, 0.8});
  }

  TEST_CASE("deformation contour") {
    const AnalyticWindow w = ref_window();
    const ContourEta eta = build_eta(w, 32);
    CHECK(eta.length == doctest::Approx(kPi * 0.3 + 1.0));
    CHECK(std::abs(eta.start() - cdouble(-0.8, 0.0)) < 1e-15);
    CHECK(std::abs(eta.end() - cdouble(0.8, 0.0)) < 1e-15);
    double len = 0.0;
    for (const auto& nodes : eta.nodes) {
      for (Eigen::Index j = 0; j < nodes.points.size(); ++j) {
        const cdouble p = nodes.points[j];
        CHECK(p.imag() <= 1e-15);
        CHECK(w.distance_to_interval(p) == doctest::Approx(0.3));
      }
      len += nodes.weights.abs().sum();
    }
    CHECK(len == doctest::Approx(eta.length).epsilon(1e-12));
    CHECK_THROWS_AS(build_eta(w, 2), DomainError);
  }

  TEST_CASE("uniform closed forms follow the continued branch") {
    for (cdouble z : {cdouble(0.1, 0.3), cdouble(-0.3, -0.1), cdouble(0.6, -0.12), cdouble(0.0, -0.5), cdouble(2.0, 0.4)})
      CHECK(std::abs(s_uniform_closed(1, z, 1.0) - uniform_s1_by_path(z, 1.0)) < 1e-12);
    // boundary value from above on the real axis
    const cdouble s = s_uniform_closed(1, {0.25, 0.0}, 1.0);
    CHECK(s.real() == doctest::Approx(0.5 * std::log(0.75 / 1.25)));
    CHECK(s.imag() == doctest::Approx(kPi / 2));
    const cdouble z(0.2, -0.1);
    CHECK(std::abs(s_uniform_closed(2, z, 1.0) - (1.0 / (-1.0 - z) - 1.0 / (1.0 - z)) / 2.0) < 1e-14);
    CHECK_THROWS_AS(s_uniform_closed(1, {1.0, 0.0}, 1.0), PoleError);
    CHECK_THROWS_AS(s_uniform_closed(3, {-1.0, 0.0}, 1.0), PoleError);
    CHECK_THROWS_AS(s_uniform_closed(0, {0.0, 1.0}, 1.0), DomainError);
  }

  TEST_CASE("transforms above the axis against direct integration") {
    const AnalyticWindow w = ref_window();
    const SingleSiteLaw semi = semicircle_law(1.0, w);
    const SingleSiteLaw cheb = chebyshev_law({0.5, 0.1}, w, {{2.0, 0.2}});
    for (cdouble z : {cdouble(0.1, 0.2), cdouble(-1.3, 0.5), cdouble(0.9, 0.05)}) {
      CHECK(std::abs(s_upper(semi, 1, z) - semicircle_s1(z, 1.0, false)) < 1e-10);
      for (int k = 1; k <= 3; ++k) {
        const cdouble direct =
            composite([&](double t) { return (0.5 + 0.1 * t / 0.8) / std::pow(cdouble(t) - z, k); }, -0.8, 0.8, 256) +
            0.2 / std::pow(2.0 - z, k);
        CHECK(std::abs(s_upper(cheb, k, z) - direct) < 1e-9 * std::max(1.0, std::abs(direct)));
        CHECK(std::abs(s_upper(SingleSiteLaw::uniform(1.0), k, z) - s_uniform_closed(k, z, 1.0)) < 1e-10);
      }
    }
  }

  TEST_CASE("semicircle continuation below the axis") {
    const AnalyticWindow w = ref_window();
    const SingleSiteLaw semi = semicircle_law(1.0, w);
    for (cdouble z : {cdouble(0.0, -0.1), cdouble(0.55, -0.05), cdouble(-0.3, 0.1)}) {
      const cdouble want = semicircle_s1(z, 1.0, z.imag() < 0);
      CHECK(std::abs(s_continued(semi, 1, z, w) - want) < 1e-10);
    }
  }

  TEST_CASE("Herglotz property") {
    const AnalyticWindow w = ref_window();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> re(-3.0, 3.0), lim(-2.0, 1.0);
    for (const SingleSiteLaw& law : {SingleSiteLaw::uniform(1.0), SingleSiteLaw::uniform(0.3), semicircle_law(1.0, w),
                                     chebyshev_law({0.5, 0.1}, w, {{2.0, 0.2}})})
      for (int i = 0; i < 100; ++i) {
        const cdouble z(re(rng), std::pow(10.0, lim(rng)));
        CHECK(s_upper(law, 1, z).imag() > 0.0);
      }
  }

  TEST_CASE("derivative consistency s_{k+1} = s_k' / k") {
    const AnalyticWindow w = ref_window();
    for (const SingleSiteLaw& law : {SingleSiteLaw::uniform(1.0), semicircle_law(1.0, w)})
      for (cdouble z : {cdouble(0.05, 0.1), cdouble(0.3, -0.08)})
        for (int k = 1; k <= 5; ++k) {
          auto err = [&](double h) {
            const cdouble fd = (s_continued(law, k, z + h, w) - s_continued(law, k, z - h, w)) / (2 * h * k);
            return std::abs(fd - s_continued(law, k + 1, z, w));
          };
          const double e1 = err(4e-3), e2 = err(2e-3);
          CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
        }
  }

  TEST_CASE("contour machinery reproduces the uniform closed forms") {
    const AnalyticWindow w = ref_window();
    const SingleSiteLaw generic = uniform_as_generic(1.0, w);
    const auto pts = grid20(w);
    REQUIRE(pts.size() > 200);
    double worst = 0.0;
    int below = 0;
    for (cdouble z : pts) {
      below += z.imag() < 0;
      const Eigen::ArrayXcd s = s_continued_all(generic, 6, z, w);
      for (int k = 1; k <= 6; ++k) worst = std::max(worst, std::abs(s[k - 1] - s_uniform_closed(k, z, 1.0)));
    }
    CHECK(below > 100);
    CHECK(worst <= 1e-8);
  }

  TEST_CASE("jump across the analytic interval") {
    const AnalyticWindow w = ref_window();
    const SingleSiteLaw semi = semicircle_law(1.0, w);
    const double c = 2.0 / kPi;
    for (cdouble z : {cdouble(0.0, -0.05), cdouble(0.4, -0.12)})
      for (int k = 1; k <= 4; ++k) {
        // rho^{(k-1)}(z)/(k-1)! by Cauchy's formula on a circle of radius 0.1
        cdouble taylor = 0.0;
        const int m = 256;
        for (int j = 0; j < m; ++j) {
          const cdouble u = std::polar(0.1, 2 * kPi * j / m);
          taylor += c * std::sqrt(1.0 - (z + u) * (z + u)) * std::pow(u, -(k - 1));
        }
        taylor /= static_cast<double>(m);
        const cdouble jump = s_continued(semi, k, z, w) - std::conj(s_upper(semi, k, std::conj(z)));
        CHECK(std::abs(jump - 2 * kPi * kI * taylor) < 1e-8);
      }
    const SingleSiteLaw uni = SingleSiteLaw::uniform(1.0);
    const cdouble z(0.1, -0.1);
    CHECK(std::abs(s_continued(uni, 1, z, w) - std::conj(s_upper(uni, 1, std::conj(z))) - kPi * kI) < 1e-12);
    CHECK(std::abs(s_continued(uni, 3, z, w) - std::conj(s_upper(uni, 3, std::conj(z)))) < 1e-12);
  }

  TEST_CASE("uniform-in-k bound") {
    const AnalyticWindow w = ref_window();
    const SingleSiteLaw uni = SingleSiteLaw::uniform(1.0);
    const TransformConstant tc = transform_constant(uni, w);
    CHECK(tc.rigorous);
    CHECK(tc.eta_length == doctest::Approx(1.9425).epsilon(1e-4));
    CHECK(tc.C_delta == doctest::Approx(1.9712).epsilon(1e-4));
    CHECK(sk_bound(uni, w, 1) == doctest::Approx(13.14).epsilon(1e-3));
    CHECK(transform_constant(uniform_as_generic(1.0, w), w).rigorous);
    const TransformConstant sampled = transform_constant(semicircle_law(1.0, w), w);
    CHECK_FALSE(sampled.rigorous);
    CHECK(sampled.sup_density_on_eta > 2.0 / kPi);
    for (const SingleSiteLaw& law : {uni, semicircle_law(1.0, w)})
      for (cdouble z : grid20(w)) {
        const Eigen::ArrayXcd s = s_continued_all(law, 10, z, w);
        for (int k = 1; k <= 10; ++k) CHECK(std::abs(s[k - 1]) <= sk_bound(law, w, k));
      }
  }

  TEST_CASE("law construction and domain errors") {
    const AnalyticWindow w = ref_window();
    CHECK_THROWS_AS(SingleSiteLaw::uniform(0.0), DomainError);
    CHECK_THROWS_AS(chebyshev_law({0.6}, w, {}), DomainError);                // mass 0.96
    CHECK_THROWS_AS(chebyshev_law({0.1, 0.5}, w, {{2.0, 0.84}}), DomainError);  // negative density
    CHECK_THROWS_AS(chebyshev_law({0.5}, w, {{0.0, 0.2}}), DomainError);       // mass inside I_sharp
    CHECK_THROWS_AS(semicircle_law(0.7, w), DomainError);
    const SingleSiteLaw semi = semicircle_law(1.0, w);
    CHECK(semi.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(semi.density(0.0) == doctest::Approx(2.0 / kPi));
    CHECK(semi.density(1.5) == 0.0);
    CHECK(SingleSiteLaw::uniform(2.0).support() == Interval{-2.0, 2.0});

    CHECK_THROWS_AS(s_upper(semi, 1, {0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(s_upper(semi, 0, {0.0, 1.0}), DomainError);
    CHECK_THROWS_AS(s_continued(semi, 1, {0.0, -0.2}, w), DomainError);
    CHECK_THROWS_AS(s_continued(semi, 0, {0.0, -0.1}, w), DomainError);
    const AnalyticWindow other({-0.4, 0.4}, 0.3, 0.15);
    CHECK_THROWS_AS(s_continued(semi, 1, {0.0, -0.1}, other), DomainError);
    CHECK_THROWS_AS(s_continued(SingleSiteLaw::uniform(0.7), 1, {0.0, -0.1}, w), DomainError);
    const SingleSiteLaw with_mass = chebyshev_law({0.5}, w, {{2.0, 0.2}});
    CHECK_THROWS_AS(s_upper(with_mass, 1, {2.0, 0.0}), DomainError);
  }
}
