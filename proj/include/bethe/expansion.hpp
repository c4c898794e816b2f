#pragma once

// Strong-disorder expansion of the averaged root Green function,
//   m_lambda(lambda z) = sum_{n<=N} lambda^{-n-1} M_n(z) + remainder,
// and the density-of-states coefficients a_n = Im M_n / pi.

#include <map>
#include <memory>
#include <shared_mutex>
#include <vector>

#include "bethe/stieltjes.hpp"
#include "bethe/treewalk.hpp"

namespace bethe {

struct ExpansionParams {
  int q = 2;
  double lambda = 1.0;
  int order = 0;
  AnalyticWindow window;
  SingleSiteLaw law;
  /// Replace ||A|| <= q+1 by 2 sqrt(q) in the budget. Output is marked
  /// non-rigorous when set.
  bool spectral_radius_budget = false;
};

struct RemainderBudget {
  double C_delta = 0.0;
  double K_delta = 0.0;
  double Q_delta = 0.0;
  double lambda0 = 0.0;
  double C_N_delta = 0.0;
  int order = 0;
  /// False when C_delta rests on a sampled density bound or the
  /// spectral-radius budget is used.
  bool rigorous_constants = true;

  /// C_{N,delta} lambda^{-N-2}.
  double bound(double lambda) const;
};

RemainderBudget remainder_budget(const AnalyticWindow& window, int q, const SingleSiteLaw& law, int order,
                                 bool spectral_radius_budget = false);

/// Process-wide coefficient tables, built on first use.
const CoefficientTable& shared_coefficient_table(int max_order);

/// Single-site transforms s_1..s_K memoized per point; safe for concurrent
/// readers with one writer at a time.
class TransformCache {
 public:
  TransformCache(SingleSiteLaw law, AnalyticWindow window) : law_(std::move(law)), window_(window) {}

  /// s_1..s_kmax at z (continued).
  Eigen::ArrayXcd get(cdouble z, int kmax);

  const SingleSiteLaw& law() const { return law_; }
  const AnalyticWindow& window() const { return window_; }
  std::size_t size() const;

 private:
  struct Key {
    double re, im;
    auto operator<=>(const Key&) const = default;
  };
  SingleSiteLaw law_;
  AnalyticWindow window_;
  mutable std::shared_mutex mutex_;
  std::map<Key, Eigen::ArrayXcd> values_;
};

/// M_n at z from one table row and precomputed s_1..s_K (K >= n+1).
/// abs_sum, if given, receives sum over classes of |count * monomial|.
cdouble coefficient_from_transforms(const CoefficientRow& row, int n, int q, const Eigen::ArrayXcd& s,
                                    double* abs_sum = nullptr);

cdouble M_n(const CoefficientRow& row, int n, const SingleSiteLaw& law, const AnalyticWindow& window, int q,
            cdouble z);

struct PartialSum {
  cdouble value;
  /// M_0..M_N at the point.
  std::vector<cdouble> coefficients;
  double remainder_bound = 0.0;
  bool rigorous = false;
};

/// sum_{n>N} (q+1)^n / (lambda Im z)^{n+1}: the tail of the walk series off
/// the window, valid for Im z > (q+1)/lambda (infinite otherwise).
double neumann_tail_bound(int q, double lambda, int order, cdouble z);

/// Evaluates the truncated expansion of m_lambda(lambda z) for z in
/// Omega_delta(I), or anywhere in the upper half-plane using the plain
/// transforms; off the window the bound is the Neumann tail bound.
class StrongDisorderExpansion {
 public:
  explicit StrongDisorderExpansion(ExpansionParams params);

  const ExpansionParams& params() const { return params_; }
  const RemainderBudget& budget() const { return budget_; }
  bool rigorous() const;

  std::vector<cdouble> coefficients(cdouble z, int max_n, std::vector<double>* abs_sums = nullptr);
  PartialSum partial_sum(cdouble z);
  /// Same point at another truncation order and disorder strength,
  /// reusing the cached transforms.
  cdouble partial_sum(cdouble z, int order, double lambda);

 private:
  void ensure_counts(int max_n);

  ExpansionParams params_;
  RemainderBudget budget_;
  std::shared_ptr<TransformCache> cache_;
  // counts_[n][i]: walk count of class i of row n at this q
  std::vector<std::vector<double>> counts_;
};

PartialSum m_partial(const ExpansionParams& params, cdouble z);

/// a_n(xi) = Im M_n(xi) / pi at xi in I (open interval).
double dos_coefficient(int n, const SingleSiteLaw& law, const AnalyticWindow& window, int q, double xi);

struct DosValue {
  double xi = 0.0;
  /// a_n(xi) lambda^{-n-1}, n = 0..N.
  std::vector<double> terms;
  /// a_n(xi), n = 0..N.
  std::vector<double> coefficients;
  double value = 0.0;
  /// C_{N,delta} lambda^{-N-2} / pi.
  double remainder_bound = 0.0;
  /// Quadrature error estimate, kept apart from the truncation bound.
  double numerical_error = 0.0;
  bool rigorous = false;

  bool operator==(const DosValue&) const = default;
};

DosValue dos_density(const ExpansionParams& params, double xi);

/// n_lambda(lambda xi) ~ 1/(2 a lambda) - (q+1)/(2a(a^2 - xi^2) lambda^3).
/// Rejects xi within `guard` of +-a.
double uniform_two_term(double a, int q, double lambda, double xi, double guard = 1e-6);

}  // namespace bethe
