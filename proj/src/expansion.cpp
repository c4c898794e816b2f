#include "bethe/expansion.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

namespace bethe {

namespace {

constexpr double kPi = std::numbers::pi;

// Relative accuracy attributed to one transform value.
double transform_rel_error(const SingleSiteLaw& law) { return law.is_uniform() ? 1e-15 : 1e-12; }

cdouble monomial(const OccupationProfile& profile, const Eigen::ArrayXcd& s) {
  cdouble prod = 1.0;
  for (auto [k, m] : profile.multiplicities())
    for (int j = 0; j < m; ++j) prod *= s[k - 1];
  return prod;
}

void require_point_in_interval(const AnalyticWindow& window, double xi) {
  if (!window.interval().contains_open(xi))
    throw DomainError("xi = " + std::to_string(xi) + " is not inside the open interval I");
}

}  // namespace

// ------------------------------------------------------------------ budget

double RemainderBudget::bound(double lambda) const { return C_N_delta * std::pow(lambda, -order - 2); }

RemainderBudget remainder_budget(const AnalyticWindow& window, int q, const SingleSiteLaw& law, int order,
                                 bool spectral_radius_budget) {
  if (q < 1) throw DomainError("q must be >= 1");
  if (order < 0) throw DomainError("order must be nonnegative");
  const TransformConstant tc = transform_constant(law, window);
  const double norm_bound = spectral_radius_budget ? 2.0 * std::sqrt(static_cast<double>(q)) : q + 1.0;
  RemainderBudget b;
  b.order = order;
  b.C_delta = tc.C_delta;
  b.K_delta = std::max(1.0, tc.C_delta) / (window.delta0() - window.delta());
  b.Q_delta = norm_bound * b.K_delta;
  b.lambda0 = std::max(2.0 * b.Q_delta, 2.0 * norm_bound / window.delta());
  b.C_N_delta = 2.0 * b.K_delta * std::pow(b.Q_delta, order + 1);
  b.rigorous_constants = tc.rigorous && !spectral_radius_budget;
  return b;
}

const CoefficientTable& shared_coefficient_table(int max_order) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<CoefficientTable>> tables;
  std::lock_guard lock(mutex);
  auto& slot = tables[max_order];
  if (!slot) slot = std::make_unique<CoefficientTable>(CoefficientTable::build(max_order));
  return *slot;
}

// ------------------------------------------------------------------- cache

Eigen::ArrayXcd TransformCache::get(cdouble z, int kmax) {
  const Key key{z.real(), z.imag()};
  {
    std::shared_lock lock(mutex_);
    auto it = values_.find(key);
    if (it != values_.end() && it->second.size() >= kmax) return it->second.head(kmax);
  }
  // Upper-half-plane points outside the window need no continuation.
  Eigen::ArrayXcd s = window_.contains(z) || !(z.imag() > 0.0) ? s_continued_all(law_, kmax, z, window_)
                                                               : s_upper_all(law_, kmax, z);
  std::unique_lock lock(mutex_);
  auto& slot = values_[key];
  if (slot.size() < kmax) slot = s;
  return s;
}

std::size_t TransformCache::size() const {
  std::shared_lock lock(mutex_);
  return values_.size();
}

// ------------------------------------------------------------ coefficients

cdouble coefficient_from_transforms(const CoefficientRow& row, int n, int q, const Eigen::ArrayXcd& s,
                                    double* abs_sum) {
  if (s.size() < n + 1) throw DomainError("need s_1..s_{n+1} to evaluate M_n");
  cdouble acc = 0.0;
  double mag = 0.0;
  for (const auto& c : row) {
    const cdouble term = c.count.evaluate(static_cast<double>(q)) * monomial(c.profile, s);
    acc += term;
    mag += std::abs(term);
  }
  if (abs_sum) *abs_sum = mag;
  return n % 2 == 0 ? acc : -acc;
}

cdouble M_n(const CoefficientRow& row, int n, const SingleSiteLaw& law, const AnalyticWindow& window, int q,
            cdouble z) {
  if (n < 0) throw DomainError("order must be nonnegative");
  if (row.empty()) return 0.0;
  return coefficient_from_transforms(row, n, q, s_continued_all(law, n + 1, z, window));
}

// --------------------------------------------------------------- expansion

StrongDisorderExpansion::StrongDisorderExpansion(ExpansionParams params)
    : params_(std::move(params)),
      budget_(remainder_budget(params_.window, params_.q, params_.law, params_.order,
                               params_.spectral_radius_budget)),
      cache_(std::make_shared<TransformCache>(params_.law, params_.window)) {
  if (!(params_.lambda > 0.0)) throw DomainError("lambda must be positive");
  ensure_counts(params_.order);
}

bool StrongDisorderExpansion::rigorous() const {
  return budget_.rigorous_constants && params_.lambda >= budget_.lambda0;
}

void StrongDisorderExpansion::ensure_counts(int max_n) {
  if (static_cast<int>(counts_.size()) > max_n) return;
  const CoefficientTable& table = shared_coefficient_table(max_n);
  counts_.clear();
  for (int n = 0; n <= max_n; ++n) {
    std::vector<double> row;
    for (const auto& c : table.row(n)) row.push_back(c.count.evaluate(static_cast<double>(params_.q)));
    counts_.push_back(std::move(row));
  }
}

std::vector<cdouble> StrongDisorderExpansion::coefficients(cdouble z, int max_n, std::vector<double>* abs_sums) {
  ensure_counts(max_n);
  const CoefficientTable& table = shared_coefficient_table(static_cast<int>(counts_.size()) - 1);
  const Eigen::ArrayXcd s = cache_->get(z, max_n + 1);
  std::vector<cdouble> out(static_cast<std::size_t>(max_n) + 1, 0.0);
  if (abs_sums) abs_sums->assign(out.size(), 0.0);
  for (int n = 0; n <= max_n; n += 2) {
    const auto& row = table.row(n);
    cdouble acc = 0.0;
    double mag = 0.0;
    for (std::size_t i = 0; i < row.size(); ++i) {
      const cdouble term = counts_[n][i] * monomial(row[i].profile, s);
      acc += term;
      mag += std::abs(term);
    }
    out[static_cast<std::size_t>(n)] = acc;  // (-1)^n = 1, odd rows are empty
    if (abs_sums) (*abs_sums)[static_cast<std::size_t>(n)] = mag;
  }
  return out;
}

PartialSum StrongDisorderExpansion::partial_sum(cdouble z) {
  PartialSum out;
  out.coefficients = coefficients(z, params_.order);
  out.value = 0.0;
  for (int n = params_.order; n >= 0; --n)
    out.value += std::pow(params_.lambda, -n - 1) * out.coefficients[static_cast<std::size_t>(n)];
  if (params_.window.contains(z)) {
    out.remainder_bound = budget_.bound(params_.lambda);
    out.rigorous = rigorous();
  } else {
    out.remainder_bound = neumann_tail_bound(params_.q, params_.lambda, params_.order, z);
    out.rigorous = std::isfinite(out.remainder_bound);
  }
  return out;
}

cdouble StrongDisorderExpansion::partial_sum(cdouble z, int order, double lambda) {
  if (order < 0) throw DomainError("order must be nonnegative");
  const auto m = coefficients(z, order);
  cdouble value = 0.0;
  for (int n = order; n >= 0; --n) value += std::pow(lambda, -n - 1) * m[static_cast<std::size_t>(n)];
  return value;
}

double neumann_tail_bound(int q, double lambda, int order, cdouble z) {
  const double y = z.imag();
  if (!(y > 0.0)) return std::numeric_limits<double>::infinity();
  const double ratio = (q + 1.0) / (lambda * y);
  if (ratio >= 1.0) return std::numeric_limits<double>::infinity();
  return std::pow(ratio, order + 1) / (lambda * y * (1.0 - ratio));
}

PartialSum m_partial(const ExpansionParams& params, cdouble z) {
  StrongDisorderExpansion e(params);
  return e.partial_sum(z);
}

// --------------------------------------------------------------------- dos

double dos_coefficient(int n, const SingleSiteLaw& law, const AnalyticWindow& window, int q, double xi) {
  require_point_in_interval(window, xi);
  if (n < 0) throw DomainError("order must be nonnegative");
  if (n % 2 != 0) return 0.0;
  const CoefficientTable& table = shared_coefficient_table(n);
  return M_n(table.row(n), n, law, window, q, cdouble(xi, 0.0)).imag() / kPi;
}

DosValue dos_density(const ExpansionParams& params, double xi) {
  require_point_in_interval(params.window, xi);
  StrongDisorderExpansion e(params);
  std::vector<double> mags;
  const auto m = e.coefficients(cdouble(xi, 0.0), params.order, &mags);
  const double rel = transform_rel_error(params.law);
  DosValue d;
  d.xi = xi;
  for (int n = 0; n <= params.order; ++n) {
    const double a = m[static_cast<std::size_t>(n)].imag() / kPi;
    const double scale = std::pow(params.lambda, -n - 1);
    d.coefficients.push_back(a);
    d.terms.push_back(a * scale);
    d.numerical_error += scale * (n + 1) * rel * mags[static_cast<std::size_t>(n)] / kPi;
  }
  d.value = 0.0;
  for (auto it = d.terms.rbegin(); it != d.terms.rend(); ++it) d.value += *it;
  d.remainder_bound = e.budget().bound(params.lambda) / kPi;
  d.rigorous = e.rigorous();
  return d;
}

double uniform_two_term(double a, int q, double lambda, double xi, double guard) {
  if (!(a > 0.0)) throw DomainError("uniform half-width must be positive");
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  if (!(std::abs(xi) < a - guard))
    throw DomainError("xi too close to the endpoint singularities at +-a");
  const double lead = 1.0 / (2.0 * a * lambda);
  const double correction = (q + 1.0) / (2.0 * a * (a * a - xi * xi) * lambda * lambda * lambda);
  return lead - correction;
}

}  // namespace bethe
