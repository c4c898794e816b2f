#include "doctest.h"

#include <cmath>
#include <random>
#include <thread>

#include "bethe/errors.hpp"
#include "bethe/expansion.hpp"

using namespace bethe;

namespace {

constexpr double kPi = 3.14159265358979323846;

AnalyticWindow ref_window() { return AnalyticWindow({-0.5, 0.5}, 0.3, 0.15); }

// (-1)^n sum over explicit closed walks of prod_v s_{nu(v)}.
cdouble walk_sum(int n, int q, const Eigen::ArrayXcd& s) {
  cdouble acc = 0.0;
  for_each_closed_walk(n, q, [&](std::span<const VertexPath> walk) {
    cdouble prod = 1.0;
    for (int k : walk_profile(walk).sorted_visits()) prod *= s[k - 1];
    acc += prod;
  });
  return n % 2 ? -acc : acc;
}

}  // namespace

TEST_SUITE("expansion") {
  TEST_CASE("remainder budget constants") {
    const AnalyticWindow w = ref_window();
    const RemainderBudget b = remainder_budget(w, 2, SingleSiteLaw::uniform(1.0), 3);
    CHECK(b.K_delta == doctest::Approx(13.14).epsilon(1e-3));
    CHECK(b.Q_delta == doctest::Approx(39.42).epsilon(1e-3));
    CHECK(b.lambda0 == doctest::Approx(78.85).epsilon(1e-3));
    CHECK(b.C_N_delta == doctest::Approx(2 * b.K_delta * std::pow(b.Q_delta, 4)));
    CHECK(b.bound(200.0) == doctest::Approx(b.C_N_delta * std::pow(200.0, -5)));
    CHECK(b.rigorous_constants);
    const RemainderBudget sr = remainder_budget(w, 2, SingleSiteLaw::uniform(1.0), 3, true);
    CHECK_FALSE(sr.rigorous_constants);
    CHECK(sr.Q_delta == doctest::Approx(2 * std::sqrt(2.0) * b.K_delta));
    CHECK_FALSE(remainder_budget(w, 2, semicircle_law(1.0, w), 3).rigorous_constants);
    CHECK_THROWS_AS(remainder_budget(w, 0, SingleSiteLaw::uniform(1.0), 3), DomainError);
    CHECK_THROWS_AS(remainder_budget(w, 2, SingleSiteLaw::uniform(1.0), -1), DomainError);
  }

  TEST_CASE("odd orders vanish exactly") {
    const AnalyticWindow w = ref_window();
    const CoefficientTable& t = shared_coefficient_table(15);
    for (int n = 1; n <= 15; n += 2) CHECK(M_n(t.row(n), n, SingleSiteLaw::uniform(1.0), w, 2, {0.1, -0.05}) == cdouble(0.0));
    StrongDisorderExpansion ex({2, 50.0, 9, w, semicircle_law(1.0, w)});
    const auto m = ex.coefficients({0.2, 0.05}, 9);
    for (int n = 1; n <= 9; n += 2) CHECK(m[n] == cdouble(0.0));
  }

  TEST_CASE("second and fourth coefficients in closed form") {
    const AnalyticWindow w = ref_window();
    const CoefficientTable& t = shared_coefficient_table(4);
    const SingleSiteLaw laws[] = {SingleSiteLaw::uniform(1.0), semicircle_law(1.0, w)};
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> re(-0.6, 0.6), im(-0.1, 0.1);
    std::uniform_int_distribution<int> qd(1, 7);
    for (int i = 0; i < 100; ++i) {
      const int q = qd(rng);
      const cdouble z(0.8 * re(rng), im(rng));
      REQUIRE(w.contains(z));
      const Eigen::ArrayXcd s = s_continued_all(laws[i % 2], 5, z, w);
      const double qq = q;
      const cdouble m2 = (qq + 1) * s[1] * s[0];
      const cdouble m4 = (qq + 1) * s[2] * s[1] + qq * (qq + 1) * s[2] * s[0] * s[0] + qq * (qq + 1) * s[1] * s[1] * s[0];
      CHECK(std::abs(coefficient_from_transforms(t.row(2), 2, q, s) - m2) <= 1e-12 * std::max(1.0, std::abs(m2)));
      CHECK(std::abs(coefficient_from_transforms(t.row(4), 4, q, s) - m4) <= 1e-12 * std::max(1.0, std::abs(m4)));
    }
  }

  TEST_CASE("coefficients match explicit walk sums") {
    const AnalyticWindow w = ref_window();
    const CoefficientTable& t = shared_coefficient_table(10);
    for (cdouble z : {cdouble(0.3, 0.8), cdouble(-0.2, -0.1)}) {
      const SingleSiteLaw law = SingleSiteLaw::uniform(1.0);
      const Eigen::ArrayXcd s = z.imag() > 0 ? s_upper_all(law, 11, z) : s_continued_all(law, 11, z, w);
      for (int q = 1; q <= 3; ++q)
        for (int n = 0; n <= 8; n += 2) {
          const cdouble want = walk_sum(n, q, s);
          CHECK(std::abs(coefficient_from_transforms(t.row(n), n, q, s) - want) <= 1e-11 * std::max(1.0, std::abs(want)));
        }
    }
    CHECK_THROWS_AS(coefficient_from_transforms(t.row(4), 4, 2, Eigen::ArrayXcd::Ones(3)), DomainError);
  }

  TEST_CASE("Neumann region: partial sums converge within the tail bound") {
    const AnalyticWindow w = ref_window();
    for (const SingleSiteLaw& law : {SingleSiteLaw::uniform(1.0), semicircle_law(1.0, w)})
      for (cdouble z : {cdouble(0.0, 0.5), cdouble(1.2, 0.4), cdouble(-0.3, 1.5)}) {
        const double lambda = 10.0;
        StrongDisorderExpansion ex({2, lambda, 15, w, law});
        const cdouble limit = ex.partial_sum(z, 15, lambda);
        for (int n = 0; n <= 13; ++n)
          CHECK(std::abs(ex.partial_sum(z, n, lambda) - limit) <= neumann_tail_bound(2, lambda, n, z));
      }
    CHECK(std::isinf(neumann_tail_bound(2, 10.0, 3, {0.0, 0.3})));
    CHECK(std::isinf(neumann_tail_bound(2, 10.0, 3, {0.0, -0.3})));
    CHECK(neumann_tail_bound(2, 10.0, 0, {0.0, 0.6}) == doctest::Approx(0.5 / (6.0 * 0.5)));
  }

  TEST_CASE("off-window points") {
    const AnalyticWindow w = ref_window();
    const ExpansionParams p{2, 20.0, 7, w, SingleSiteLaw::uniform(1.0)};
    const PartialSum good = m_partial(p, {0.2, 0.4});
    CHECK(good.rigorous);
    CHECK(good.remainder_bound == doctest::Approx(neumann_tail_bound(2, 20.0, 7, {0.2, 0.4})));
    CHECK(good.value.imag() > 0.0);
    const PartialSum weak = m_partial(p, {0.8, 0.14});
    CHECK_FALSE(weak.rigorous);
    CHECK_THROWS_AS(m_partial(p, {0.2, -0.3}), DomainError);
    CHECK_THROWS_AS(m_partial({2, 0.0, 3, w, SingleSiteLaw::uniform(1.0)}, {0.0, 0.1}), DomainError);
  }

  TEST_CASE("truncation error scales like lambda^{-N-2} and obeys the bound") {
    const AnalyticWindow w = ref_window();
    const SingleSiteLaw law = SingleSiteLaw::uniform(1.0);
    for (int order : {1, 3}) {
      const RemainderBudget b = remainder_budget(w, 2, law, order);
      StrongDisorderExpansion ex({2, b.lambda0, 9, w, law});
      const cdouble z(0.1, -0.07);
      const auto m = ex.coefficients(z, 9);
      double prev = 0.0;
      for (double f : {4.0, 8.0, 16.0, 32.0}) {
        const double lambda = f * b.lambda0;
        const double gap = std::abs(ex.partial_sum(z, 9, lambda) - ex.partial_sum(z, order, lambda));
        CHECK(gap <= b.bound(lambda));
        if (prev > 0.0) CHECK(std::log2(gap / prev) == doctest::Approx(-(order + 2)).epsilon(0.1));
        prev = gap;
      }
    }
  }

  TEST_CASE("uniform density coefficients") {
    const SingleSiteLaw law = SingleSiteLaw::uniform(1.0);
    const AnalyticWindow w = ref_window();
    CHECK(dos_coefficient(0, law, w, 2, 0.0) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(dos_coefficient(2, law, w, 2, 0.0) == doctest::Approx(-1.5).epsilon(1e-13));
    CHECK(dos_coefficient(3, law, w, 2, 0.1) == 0.0);
    const AnalyticWindow wide({-0.7, 0.7}, 0.2, 0.1);
    CHECK(dos_coefficient(2, law, wide, 2, 0.5) == doctest::Approx(-2.0).epsilon(1e-13));
    for (int q : {2, 3})
      for (double xi : {-0.45, -0.2, 0.0, 0.33}) {
        CHECK(std::abs(dos_coefficient(0, law, w, q, xi) - 0.5) < 1e-12);
        CHECK(std::abs(dos_coefficient(2, law, w, q, xi) + (q + 1) / (2 * (1 - xi * xi))) < 1e-12);
      }
    CHECK_THROWS_AS(dos_coefficient(2, law, w, 2, 0.5), DomainError);
    CHECK_THROWS_AS(dos_coefficient(2, law, w, 2, 0.7), DomainError);
  }

  TEST_CASE("leading density coefficient is the single-site density") {
    const AnalyticWindow w = ref_window();
    const SingleSiteLaw semi = semicircle_law(1.0, w);
    for (double xi : {-0.4, 0.0, 0.25}) CHECK(dos_coefficient(0, semi, w, 2, xi) == doctest::Approx(semi.density(xi)).epsilon(1e-10));
  }

  TEST_CASE("density sweep values") {
    const AnalyticWindow w = ref_window();
    const SingleSiteLaw law = SingleSiteLaw::uniform(1.0);
    const DosValue d = dos_density({2, 100.0, 3, w, law}, 0.0);
    CHECK(std::abs(d.value - 0.0049985) < 1e-12);
    CHECK(d.rigorous);
    CHECK(d.coefficients.size() == 4);
    CHECK(d.terms[2] == doctest::Approx(-1.5e-6));
    CHECK(d.remainder_bound == doctest::Approx(remainder_budget(w, 2, law, 3).bound(100.0) / kPi));
    CHECK(d.numerical_error > 0.0);
    CHECK(d.numerical_error < 1e-15);
    CHECK_FALSE(dos_density({2, 50.0, 3, w, law}, 0.0).rigorous);
    CHECK_FALSE(dos_density({2, 100.0, 3, w, law, true}, 0.0).rigorous);
    CHECK_THROWS_AS(dos_density({2, 100.0, 3, w, law}, -0.5), DomainError);
    for (double xi : {-0.3, 0.1, 0.45})
      CHECK(std::abs(dos_density({2, 10.0, 3, w, law}, xi).value - uniform_two_term(1.0, 2, 10.0, xi)) < 1e-14);
    const DosValue g = dos_density({2, 100.0, 5, w, uniform_as_generic(1.0, w)}, 0.2);
    const DosValue u = dos_density({2, 100.0, 5, w, law}, 0.2);
    CHECK(std::abs(g.value - u.value) < 1e-12);
  }

  TEST_CASE("two-term uniform expansion") {
    CHECK(uniform_two_term(1.0, 2, 10.0, 0.0) == doctest::Approx(0.0485));
    CHECK(uniform_two_term(1.0, 2, 10.0, 0.5) == doctest::Approx(0.048));
    CHECK_THROWS_AS(uniform_two_term(1.0, 2, 10.0, 1.0), DomainError);
    CHECK_THROWS_AS(uniform_two_term(1.0, 2, 10.0, -1.0 + 1e-8), DomainError);
  }

  TEST_CASE("density is positive at strong disorder") {
    const AnalyticWindow w = ref_window();
    const SingleSiteLaw law = SingleSiteLaw::uniform(1.0);
    const double lambda0 = remainder_budget(w, 2, law, 3).lambda0;
    for (double lambda : {lambda0, 3 * lambda0})
      for (int i = 1; i < 40; ++i) {
        const double xi = -0.5 + i / 40.0;
        const DosValue d = dos_density({2, lambda, 3, w, law}, xi);
        CHECK(d.value > 0.0);
        if (law.density(xi) / lambda > 2 * d.remainder_bound) CHECK(d.value > d.remainder_bound);
      }
  }

  TEST_CASE("transform cache") {
    const AnalyticWindow w = ref_window();
    TransformCache cache(semicircle_law(1.0, w), w);
    const cdouble z(0.1, -0.05);
    const Eigen::ArrayXcd a = cache.get(z, 6);
    CHECK(cache.size() == 1);
    CHECK((cache.get(z, 4) == a.head(4)).all());
    CHECK((a == s_continued_all(cache.law(), 6, z, w)).all());
    std::vector<std::thread> pool;
    std::vector<Eigen::ArrayXcd> got(4);
    for (int t = 0; t < 4; ++t)
      pool.emplace_back([&, t] { got[t] = cache.get({0.05 * t, 0.4}, 5); });
    for (auto& th : pool) th.join();
    for (int t = 0; t < 4; ++t) CHECK((got[t] == s_upper_all(cache.law(), 5, {0.05 * t, 0.4})).all());
  }
}
