#pragma once

// Closed walks at the root of the (q+1)-regular tree, grouped by
// occupation profile, with walk counts kept as exact polynomials in q.

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace bethe {

using BigInt = boost::multiprecision::cpp_int;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Key of child `label` of the vertex keyed `parent`. VertexPath::key()
/// folds this over the labels starting from root_key().
constexpr std::uint64_t child_key(std::uint64_t parent, int label) {
  return mix64(parent ^ static_cast<std::uint64_t>(label));
}
constexpr std::uint64_t root_key() { return 0x6a09e667f3bcc908ULL; }

/// Vertex of the canonically labeled rooted tree. Empty = root; the first
/// label picks one of the q+1 root neighbours, every later label one of
/// the q forward children.
struct VertexPath {
  std::vector<int> labels;

  bool is_root() const { return labels.empty(); }
  int depth() const { return static_cast<int>(labels.size()); }
  VertexPath parent() const;
  VertexPath child(int index) const;
  /// Stable 64-bit key; used to index frozen disorder.
  std::uint64_t key() const;

  /// Checks the label ranges for branching number q.
  bool valid_for(int q) const;

  auto operator<=>(const VertexPath&) const = default;
};

/// Multiplicities m_k = number of visited vertices with occupation k.
class OccupationProfile {
 public:
  OccupationProfile() = default;
  explicit OccupationProfile(std::map<int, int> multiplicities);
  /// Builds the profile from a list of per-vertex occupation numbers.
  static OccupationProfile from_visits(std::span<const int> visits);

  const std::map<int, int>& multiplicities() const { return m_; }
  int multiplicity(int k) const;
  /// Sum_k k*m_k, i.e. n+1 for a walk of length n.
  int total_visits() const;
  /// Number of distinct visited vertices, Sum_k m_k.
  int vertex_count() const;
  int max_occupation() const;
  /// Occupation numbers in nonincreasing order, e.g. {3,1,1}.
  std::vector<int> sorted_visits() const;
  std::string to_string() const;

  bool operator==(const OccupationProfile&) const = default;
  /// Descending lexicographic order on sorted_visits(): (3,2) < (3,1,1) < (2,2,1).
  bool operator<(const OccupationProfile& other) const;

 private:
  std::map<int, int> m_;
};

/// Integer polynomial in q, coefficients ascending (index j <-> q^j).
class CountPolynomial {
 public:
  CountPolynomial() = default;
  explicit CountPolynomial(std::vector<BigInt> coefficients);
  static CountPolynomial constant(const BigInt& c);
  /// x(x-1)...(x-len+1) with x = q + shift.
  static CountPolynomial falling_factorial(int shift, int length);

  const std::vector<BigInt>& coefficients() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }

  BigInt evaluate(const BigInt& q) const;
  double evaluate(double q) const;

  CountPolynomial& operator+=(const CountPolynomial& other);
  friend CountPolynomial operator*(const CountPolynomial& a, const CountPolynomial& b);
  friend CountPolynomial operator*(const CountPolynomial& a, const BigInt& s);
  bool operator==(const CountPolynomial&) const = default;

  /// Human form, e.g. "q^2 + q".
  std::string to_string() const;

 private:
  void trim();
  std::vector<BigInt> c_;
};

struct WalkClass {
  OccupationProfile profile;
  CountPolynomial count;

  bool operator==(const WalkClass&) const = default;
};

using CoefficientRow = std::vector<WalkClass>;

struct EnumerationLimits {
  int max_order = 16;
  /// Distinct (profile, branching-signature) keys held during the DFS.
  std::size_t max_accumulator_entries = std::size_t{1} << 24;
};

/// All closed-walk classes of length n at the root, sorted by profile.
/// Odd n yields an empty list. Throws CapExceeded for n > limits.max_order.
CoefficientRow enumerate_walk_classes(int n, const EnumerationLimits& limits = {});

/// Rows 0..max_order, one per walk length.
class CoefficientTable {
 public:
  CoefficientTable() = default;
  CoefficientTable(std::vector<CoefficientRow> rows);
  static CoefficientTable build(int max_order, const EnumerationLimits& limits = {});

  int max_order() const { return static_cast<int>(rows_.size()) - 1; }
  const CoefficientRow& row(int n) const;
  CoefficientRow& mutable_row(int n);

  /// Sum of the class counts of row n at branching number q.
  BigInt walk_count(int n, int q) const;

  bool operator==(const CoefficientTable&) const = default;

 private:
  std::vector<CoefficientRow> rows_;
};

BigInt count_closed_walks(int n, int q, const EnumerationLimits& limits = {});

using Walk = std::vector<VertexPath>;

/// Explicit enumeration on the concrete tree. Caps: n <= 12, q <= 3.
std::vector<Walk> brute_force_walks(int n, int q);

/// Streaming form of brute_force_walks without the caps; the callback
/// sees each walk as a vertex sequence of length n+1.
void for_each_closed_walk(int n, int q, const std::function<void(std::span<const VertexPath>)>& visit);

/// Occupation profile of one explicit walk.
OccupationProfile walk_profile(std::span<const VertexPath> walk);

BigInt sphere_size(int q, int radius);
BigInt ball_size(int q, int radius);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains_open(double x) const { return lo < x && x < hi; }
  bool operator==(const Interval&) const = default;
};

/// Almost-sure spectrum [-2 sqrt q, 2 sqrt q] + lambda * supp.
Interval spectrum_window(int q, double lambda, Interval support);

}  // namespace bethe
