#include "doctest.h"

#include <map>
#include <vector>

#include "bethe/errors.hpp"
#include "bethe/treewalk.hpp"

using namespace bethe;

namespace {

CountPolynomial poly(std::vector<long> c) {
  std::vector<BigInt> b(c.begin(), c.end());
  return CountPolynomial(std::move(b));
}

OccupationProfile prof(std::map<int, int> m) { return OccupationProfile(std::move(m)); }

// (A^n)_{00} on the explicit ball of radius ceil(n/2), by repeated
// adjacency-vector products.
std::uint64_t adjacency_walks(int n, int q) {
  const int radius = (n + 1) / 2;
  std::vector<int> parent{-1};
  std::vector<int> level{0};
  for (std::size_t v = 0; v < parent.size(); ++v) {
    if (level[v] == radius) continue;
    const int kids = v == 0 ? q + 1 : q;
    for (int c = 0; c < kids; ++c) {
      parent.push_back(static_cast<int>(v));
      level.push_back(level[v] + 1);
    }
  }
  std::vector<std::uint64_t> x(parent.size(), 0), y(parent.size());
  x[0] = 1;
  for (int step = 0; step < n; ++step) {
    std::fill(y.begin(), y.end(), 0);
    for (std::size_t v = 1; v < parent.size(); ++v) {
      y[v] += x[parent[v]];
      y[parent[v]] += x[v];
    }
    x.swap(y);
  }
  return x[0];
}

BigInt binom(int n, int k) {
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_SUITE("treewalk") {
  TEST_CASE("low-order tables") {
    CHECK(enumerate_walk_classes(0) == CoefficientRow{{prof({{1, 1}}), poly({1})}});
    CHECK(enumerate_walk_classes(2) == CoefficientRow{{prof({{2, 1}, {1, 1}}), poly({1, 1})}});
    const CoefficientRow four{{prof({{3, 1}, {2, 1}}), poly({1, 1})},
                              {prof({{3, 1}, {1, 2}}), poly({0, 1, 1})},
                              {prof({{2, 2}, {1, 1}}), poly({0, 1, 1})}};
    CHECK(enumerate_walk_classes(4) == four);
    CHECK(four[0].profile.to_string() == "(3,2)");
    CHECK(four[1].profile.to_string() == "(3,1,1)");
    CHECK(four[2].profile.to_string() == "(2,2,1)");
    CHECK(four[1].count.to_string() == "q^2 + q");
  }

  TEST_CASE("odd orders are empty") {
    for (int n = 1; n <= 15; n += 2) CHECK(enumerate_walk_classes(n).empty());
  }

  TEST_CASE("order cap and domain") {
    CHECK_THROWS_AS(enumerate_walk_classes(17), CapExceeded);
    CHECK_THROWS_AS(enumerate_walk_classes(-2), DomainError);
    EnumerationLimits tiny;
    tiny.max_accumulator_entries = 1;
    CHECK_THROWS_AS(enumerate_walk_classes(6, tiny), CapExceeded);
    EnumerationLimits wide;
    wide.max_order = 18;
    CHECK(enumerate_walk_classes(17, wide).empty());
  }

  TEST_CASE("visit numbers sum to n+1") {
    const CoefficientTable& t = CoefficientTable::build(16);
    for (int n = 0; n <= 16; ++n)
      for (const auto& c : t.row(n)) CHECK(c.profile.total_visits() == n + 1);
  }

  TEST_CASE("classes are sorted and deterministic") {
    const CoefficientTable a = CoefficientTable::build(12);
    const CoefficientTable b = CoefficientTable::build(12);
    CHECK(a == b);
    for (int n = 0; n <= 12; ++n) {
      const auto& row = a.row(n);
      for (std::size_t i = 1; i < row.size(); ++i) CHECK(row[i - 1].profile < row[i].profile);
    }
  }

  TEST_CASE("closed-walk counts against adjacency powers") {
    for (int q = 1; q <= 4; ++q)
      for (int n = 0; n <= 16; n += 2) CHECK(count_closed_walks(n, q) == BigInt(adjacency_walks(n, q)));
    CHECK(count_closed_walks(4, 2) == 15);
    CHECK(count_closed_walks(6, 1) == 20);
    CHECK(count_closed_walks(7, 2) == 0);
  }

  TEST_CASE("q = 1 reduces to the line") {
    for (int n = 0; n <= 16; n += 2) CHECK(count_closed_walks(n, 1) == binom(n, n / 2));
  }

  TEST_CASE("explicit walks group into the symbolic classes") {
    for (int q = 1; q <= 3; ++q)
      for (int n = 0; n <= 10; n += 2) {
        std::map<std::vector<int>, BigInt> seen;
        for (const auto& w : brute_force_walks(n, q)) {
          REQUIRE(w.size() == static_cast<std::size_t>(n + 1));
          CHECK(w.front().is_root());
          CHECK(w.back().is_root());
          for (std::size_t i = 1; i < w.size(); ++i) {
            CHECK(std::abs(w[i].depth() - w[i - 1].depth()) == 1);
            CHECK(w[i].valid_for(q));
          }
          ++seen[walk_profile(w).sorted_visits()];
        }
        std::map<std::vector<int>, BigInt> expected;
        for (const auto& c : enumerate_walk_classes(n)) {
          const BigInt v = c.count.evaluate(BigInt(q));
          if (v != 0) expected[c.profile.sorted_visits()] = v;
        }
        CHECK(seen == expected);
      }
    CHECK(brute_force_walks(4, 2).size() == 15);
    CHECK_THROWS_AS(brute_force_walks(14, 2), CapExceeded);
    CHECK_THROWS_AS(brute_force_walks(4, 4), CapExceeded);
  }

  TEST_CASE("counts bounded by (q+1)^n") {
    for (int q = 1; q <= 5; ++q) {
      BigInt cap = 1;
      for (int n = 0; n <= 16; ++n) {
        CHECK(count_closed_walks(n, q) <= cap);
        cap *= q + 1;
      }
    }
  }

  TEST_CASE("class counts are integers and nonnegative at every q") {
    const CoefficientTable& t = CoefficientTable::build(14);
    for (int n = 0; n <= 14; ++n)
      for (const auto& c : t.row(n))
        for (int q = 1; q <= 10; ++q) CHECK(c.count.evaluate(BigInt(q)) >= 0);
    // the q-monomial coefficients themselves can be negative
    bool found = false;
    for (const auto& c : t.row(6))
      if (c.profile == prof({{4, 1}, {1, 3}})) {
        CHECK(c.count == poly({0, -1, 0, 1}));
        found = true;
      }
    CHECK(found);
  }

  TEST_CASE("count polynomial arithmetic") {
    CHECK(CountPolynomial::falling_factorial(1, 2) == poly({0, 1, 1}));
    CHECK(CountPolynomial::falling_factorial(0, 3) == poly({0, 2, -3, 1}));
    CHECK(poly({1, 1}).to_string() == "q + 1");
    CHECK(poly({0, 1, 1}).evaluate(BigInt(3)) == 12);
    CHECK(poly({0, 1, 1}).evaluate(2.5) == doctest::Approx(8.75));
    CountPolynomial p = poly({1, 2});
    p += poly({0, 0, 3});
    CHECK(p == poly({1, 2, 3}));
    CHECK(poly({1, 1}) * poly({-1, 1}) == poly({-1, 0, 1}));
    CHECK((poly({1, 2}) * BigInt(3)) == poly({3, 6}));
    CHECK(poly({0, 0, 0}).is_zero());
  }

  TEST_CASE("occupation profiles") {
    const std::vector<int> visits{3, 1, 1};
    const OccupationProfile p = OccupationProfile::from_visits(visits);
    CHECK(p.multiplicity(1) == 2);
    CHECK(p.multiplicity(3) == 1);
    CHECK(p.multiplicity(2) == 0);
    CHECK(p.vertex_count() == 3);
    CHECK(p.total_visits() == 5);
    CHECK(p.max_occupation() == 3);
    CHECK(p.to_string() == "(3,1,1)");
    CHECK(prof({{3, 1}, {2, 1}}) < p);
    CHECK_THROWS_AS(prof({{0, 1}}), DomainError);
  }

  TEST_CASE("vertex paths") {
    const VertexPath root;
    const VertexPath v = root.child(2).child(1);
    CHECK(v.depth() == 2);
    CHECK(v.parent() == root.child(2));
    CHECK(v.valid_for(1));
    CHECK_FALSE(root.child(4).valid_for(2));
    CHECK(root.child(3).valid_for(2));
    CHECK_FALSE(root.child(3).child(3).valid_for(2));
    CHECK(root.key() == root_key());
    CHECK(v.key() != root.child(1).child(2).key());
    CHECK_THROWS_AS(root.parent(), DomainError);
  }

  TEST_CASE("tree geometry") {
    CHECK(sphere_size(2, 3) == 12);
    CHECK(ball_size(2, 3) == 22);
    CHECK(sphere_size(1, 5) == 2);
    CHECK(ball_size(1, 5) == 11);
    for (int q = 2; q <= 5; ++q) {
      const double limit = (q - 1.0) / q;
      double prev = 1.0;
      for (int r = 1; r <= 30; ++r) {
        const double ratio = static_cast<double>(boost::multiprecision::cpp_rational(sphere_size(q, r), ball_size(q, r)));
        const double gap = std::abs(ratio - limit);
        CHECK(gap <= prev);
        prev = gap;
      }
      CHECK(prev < 1e-6);
    }
  }

  TEST_CASE("spectrum window") {
    CHECK(spectrum_window(4, 10.0, {-1.0, 1.0}) == Interval{-14.0, 14.0});
    CHECK_THROWS_AS(spectrum_window(2, 0.0, {-1.0, 1.0}), DomainError);
  }
}
