#include "bethe/treewalk.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bethe/errors.hpp"

namespace bethe {

// ---------------------------------------------------------------- VertexPath

VertexPath VertexPath::parent() const {
  if (labels.empty()) throw DomainError("root has no parent");
  return VertexPath{{labels.begin(), labels.end() - 1}};
}

VertexPath VertexPath::child(int index) const {
  VertexPath c = *this;
  c.labels.push_back(index);
  return c;
}

std::uint64_t VertexPath::key() const {
  std::uint64_t h = root_key();
  for (int l : labels) h = child_key(h, l);
  return h;
}

bool VertexPath::valid_for(int q) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int limit = i == 0 ? q + 1 : q;
    if (labels[i] < 1 || labels[i] > limit) return false;
  }
  return true;
}

// --------------------------------------------------------- OccupationProfile

OccupationProfile::OccupationProfile(std::map<int, int> multiplicities) {
  for (auto [k, m] : multiplicities) {
    if (k < 1 || m < 0) throw DomainError("occupation profile needs k >= 1 and m_k >= 0");
    if (m > 0) m_[k] = m;
  }
}

OccupationProfile OccupationProfile::from_visits(std::span<const int> visits) {
  std::map<int, int> m;
  for (int v : visits)
    if (v > 0) ++m[v];
  return OccupationProfile(std::move(m));
}

int OccupationProfile::multiplicity(int k) const {
  auto it = m_.find(k);
  return it == m_.end() ? 0 : it->second;
}

int OccupationProfile::total_visits() const {
  int s = 0;
  for (auto [k, m] : m_) s += k * m;
  return s;
}

int OccupationProfile::vertex_count() const {
  int s = 0;
  for (auto [k, m] : m_) s += m;
  return s;
}

int OccupationProfile::max_occupation() const { return m_.empty() ? 0 : m_.rbegin()->first; }

std::vector<int> OccupationProfile::sorted_visits() const {
  std::vector<int> out;
  for (auto it = m_.rbegin(); it != m_.rend(); ++it)
    out.insert(out.end(), it->second, it->first);
  return out;
}

std::string OccupationProfile::to_string() const {
  std::ostringstream os;
  os << '(';
  bool first = true;
  for (int v : sorted_visits()) {
    if (!first) os << ',';
    os << v;
    first = false;
  }
  os << ')';
  return os.str();
}

bool OccupationProfile::operator<(const OccupationProfile& other) const {
  const auto a = sorted_visits();
  const auto b = other.sorted_visits();
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), std::greater<>{});
}

// ----------------------------------------------------------- CountPolynomial

CountPolynomial::CountPolynomial(std::vector<BigInt> coefficients) : c_(std::move(coefficients)) {
  trim();
}

CountPolynomial CountPolynomial::constant(const BigInt& c) { return CountPolynomial({c}); }

CountPolynomial CountPolynomial::falling_factorial(int shift, int length) {
  CountPolynomial p = constant(1);
  for (int j = 0; j < length; ++j) p = p * CountPolynomial({BigInt(shift - j), BigInt(1)});
  return p;
}

void CountPolynomial::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

BigInt CountPolynomial::evaluate(const BigInt& q) const {
  BigInt acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * q + *it;
  return acc;
}

double CountPolynomial::evaluate(double q) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * q + it->convert_to<double>();
  return acc;
}

CountPolynomial& CountPolynomial::operator+=(const CountPolynomial& other) {
  if (other.c_.size() > c_.size()) c_.resize(other.c_.size());
  for (std::size_t j = 0; j < other.c_.size(); ++j) c_[j] += other.c_[j];
  trim();
  return *this;
}

CountPolynomial operator*(const CountPolynomial& a, const CountPolynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<BigInt> c(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  return CountPolynomial(std::move(c));
}

CountPolynomial operator*(const CountPolynomial& a, const BigInt& s) {
  std::vector<BigInt> c = a.c_;
  for (auto& x : c) x *= s;
  return CountPolynomial(std::move(c));
}

std::string CountPolynomial::to_string() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int j = degree(); j >= 0; --j) {
    BigInt c = c_[j];
    if (c == 0) continue;
    const bool neg = c < 0;
    if (neg) c = -c;
    if (first)
      os << (neg ? "-" : "");
    else
      os << (neg ? " - " : " + ");
    if (j == 0 || c != 1) os << c;
    if (j >= 1) os << 'q';
    if (j >= 2) os << '^' << j;
    first = false;
  }
  return os.str();
}

// --------------------------------------------------------------- enumeration

namespace {

// Symbolic closed-walk DFS on the canonically labeled tree. A vertex that
// has already opened u children can step to any of them (factor 1) or open
// a fresh one, which stands for (q+1-u) concrete choices at the root and
// (q-u) elsewhere. The total weight of a walk is therefore
//   (q+1)_{u_root} * prod_{v != root} (q)_{u_v}
// (falling factorials), so it is enough to accumulate integer counts per
// (profile, branching signature) and expand polynomials once at the end.
class SymbolicWalker {
 public:
  SymbolicWalker(int n, std::size_t max_entries) : n_(n), max_entries_(max_entries) {
    const std::size_t cap = static_cast<std::size_t>(n) / 2 + 1;
    parent_.reserve(cap);
    depth_.reserve(cap);
    visits_.reserve(cap);
    children_.reserve(cap);
    add_vertex(-1, 0);
    visits_[0] = 1;
  }

  void run() { step(0, n_); }

  CoefficientRow collect() const {
    std::map<std::vector<int>, CountPolynomial> by_profile;
    for (const auto& [key, count] : counts_) {
      const auto& [profile_m, signature] = key;
      CountPolynomial w = CountPolynomial::falling_factorial(1, signature.front());
      for (std::size_t i = 1; i < signature.size(); ++i)
        w = w * CountPolynomial::falling_factorial(0, signature[i]);
      by_profile[profile_m] += w * BigInt(count);
    }
    CoefficientRow row;
    row.reserve(by_profile.size());
    for (auto& [m, poly] : by_profile) {
      std::map<int, int> mult;
      for (std::size_t k = 1; k < m.size(); ++k)
        if (m[k] > 0) mult[static_cast<int>(k)] = m[k];
      row.push_back({OccupationProfile(std::move(mult)), poly});
    }
    std::sort(row.begin(), row.end(),
              [](const WalkClass& a, const WalkClass& b) { return a.profile < b.profile; });
    return row;
  }

 private:
  int add_vertex(int parent, int depth) {
    parent_.push_back(parent);
    depth_.push_back(depth);
    visits_.push_back(0);
    children_.emplace_back();
    return static_cast<int>(parent_.size()) - 1;
  }

  void record() {
    std::vector<int> m(static_cast<std::size_t>(n_) + 2, 0);
    for (int v : visits_) ++m[static_cast<std::size_t>(v)];
    m[0] = 0;
    std::vector<int> signature;
    signature.push_back(static_cast<int>(children_[0].size()));
    std::vector<int> rest;
    for (std::size_t v = 1; v < children_.size(); ++v)
      if (!children_[v].empty()) rest.push_back(static_cast<int>(children_[v].size()));
    std::sort(rest.begin(), rest.end());
    signature.insert(signature.end(), rest.begin(), rest.end());
    auto [it, inserted] = counts_.try_emplace({std::move(m), std::move(signature)}, 0);
    ++it->second;
    if (inserted && counts_.size() > max_entries_)
      throw CapExceeded("walk-class accumulator exceeded its memory guard");
  }

  void enter(int v) { ++visits_[v]; }
  void leave(int v) { --visits_[v]; }

  void step(int v, int remaining) {
    if (remaining == 0) {
      if (v == 0) record();
      return;
    }
    // Every move must leave enough steps to get back to the root.
    if (v != 0) {
      const int p = parent_[v];
      if (depth_[p] <= remaining - 1) {
        enter(p);
        step(p, remaining - 1);
        leave(p);
      }
    }
    if (depth_[v] + 1 <= remaining - 1) {
      for (std::size_t i = 0; i < children_[v].size(); ++i) {
        const int c = children_[v][i];
        enter(c);
        step(c, remaining - 1);
        leave(c);
      }
      const int c = add_vertex(v, depth_[v] + 1);
      children_[v].push_back(c);
      enter(c);
      step(c, remaining - 1);
      leave(c);
      children_[v].pop_back();
      parent_.pop_back();
      depth_.pop_back();
      visits_.pop_back();
      children_.pop_back();
    }
  }

  int n_;
  std::size_t max_entries_;
  std::vector<int> parent_, depth_, visits_;
  std::vector<std::vector<int>> children_;
  std::map<std::pair<std::vector<int>, std::vector<int>>, std::uint64_t> counts_;
};

}  // namespace

CoefficientRow enumerate_walk_classes(int n, const EnumerationLimits& limits) {
  if (n < 0) throw DomainError("walk length must be nonnegative");
  if (n > limits.max_order)
    throw CapExceeded("walk length " + std::to_string(n) + " exceeds enumeration cap " +
                      std::to_string(limits.max_order));
  if (n % 2 != 0) return {};
  SymbolicWalker walker(n, limits.max_accumulator_entries);
  walker.run();
  return walker.collect();
}

CoefficientTable::CoefficientTable(std::vector<CoefficientRow> rows) : rows_(std::move(rows)) {}

CoefficientTable CoefficientTable::build(int max_order, const EnumerationLimits& limits) {
  if (max_order < 0) throw DomainError("max_order must be nonnegative");
  std::vector<CoefficientRow> rows;
  rows.reserve(static_cast<std::size_t>(max_order) + 1);
  for (int n = 0; n <= max_order; ++n) rows.push_back(enumerate_walk_classes(n, limits));
  return CoefficientTable(std::move(rows));
}

const CoefficientRow& CoefficientTable::row(int n) const {
  if (n < 0 || n > max_order()) throw DomainError("row " + std::to_string(n) + " not in table");
  return rows_[static_cast<std::size_t>(n)];
}

CoefficientRow& CoefficientTable::mutable_row(int n) {
  if (n < 0 || n > max_order()) throw DomainError("row " + std::to_string(n) + " not in table");
  return rows_[static_cast<std::size_t>(n)];
}

BigInt CoefficientTable::walk_count(int n, int q) const {
  BigInt total = 0;
  for (const auto& c : row(n)) total += c.count.evaluate(BigInt(q));
  return total;
}

BigInt count_closed_walks(int n, int q, const EnumerationLimits& limits) {
  if (q < 1) throw DomainError("q must be >= 1");
  BigInt total = 0;
  for (const auto& c : enumerate_walk_classes(n, limits)) total += c.count.evaluate(BigInt(q));
  return total;
}

// ------------------------------------------------------------- brute force

void for_each_closed_walk(int n, int q, const std::function<void(std::span<const VertexPath>)>& visit) {
  if (n < 0) throw DomainError("walk length must be nonnegative");
  if (q < 1) throw DomainError("q must be >= 1");
  std::vector<VertexPath> walk(static_cast<std::size_t>(n) + 1);
  std::function<void(int)> extend = [&](int j) {
    const VertexPath& here = walk[static_cast<std::size_t>(j)];
    if (j == n) {
      if (here.is_root()) visit(walk);
      return;
    }
    const int remaining = n - j - 1;
    if (!here.is_root() && here.depth() - 1 <= remaining) {
      walk[static_cast<std::size_t>(j) + 1] = here.parent();
      extend(j + 1);
    }
    if (here.depth() + 1 <= remaining) {
      const int branching = here.is_root() ? q + 1 : q;
      for (int c = 1; c <= branching; ++c) {
        walk[static_cast<std::size_t>(j) + 1] = here.child(c);
        extend(j + 1);
      }
    }
  };
  extend(0);
}

std::vector<Walk> brute_force_walks(int n, int q) {
  if (n > 12 || q > 3) throw CapExceeded("explicit walk enumeration limited to n <= 12, q <= 3");
  std::vector<Walk> out;
  for_each_closed_walk(n, q, [&](std::span<const VertexPath> w) { out.emplace_back(w.begin(), w.end()); });
  return out;
}

OccupationProfile walk_profile(std::span<const VertexPath> walk) {
  std::map<VertexPath, int> visits;
  for (const auto& v : walk) ++visits[v];
  std::vector<int> counts;
  counts.reserve(visits.size());
  for (const auto& [v, c] : visits) counts.push_back(c);
  return OccupationProfile::from_visits(counts);
}

// ----------------------------------------------------------------- geometry

BigInt sphere_size(int q, int radius) {
  if (q < 1 || radius < 0) throw DomainError("sphere_size needs q >= 1, R >= 0");
  if (radius == 0) return 1;
  return BigInt(q + 1) * boost::multiprecision::pow(BigInt(q), static_cast<unsigned>(radius - 1));
}

BigInt ball_size(int q, int radius) {
  if (q < 1 || radius < 0) throw DomainError("ball_size needs q >= 1, R >= 0");
  if (q == 1) {
    BigInt total = 0;
    for (int r = 0; r <= radius; ++r) total += sphere_size(q, r);
    return total;
  }
  const BigInt qr = boost::multiprecision::pow(BigInt(q), static_cast<unsigned>(radius));
  return 1 + BigInt(q + 1) * (qr - 1) / (q - 1);
}

Interval spectrum_window(int q, double lambda, Interval support) {
  if (q < 1) throw DomainError("q must be >= 1");
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  if (!(support.lo <= support.hi) || !std::isfinite(support.lo) || !std::isfinite(support.hi))
    throw DomainError("support must be a bounded interval");
  const double band = 2.0 * std::sqrt(static_cast<double>(q));
  return {lambda * support.lo - band, lambda * support.hi + band};
}

}  // namespace bethe
