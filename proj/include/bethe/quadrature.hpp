#pragma once

// Gauss-Legendre rules and the integrators built on them. Integrands may be
// scalar- or array-valued (Eigen arrays); convergence is judged on the
// largest component.

#include <cmath>
#include <complex>
#include <functional>
#include <memory>

#include <Eigen/Dense>

#include "bethe/errors.hpp"

namespace bethe {

using cdouble = std::complex<double>;

struct GaussLegendreRule {
  Eigen::ArrayXd nodes;    // on [-1, 1], ascending
  Eigen::ArrayXd weights;
};

/// n-point rule on [-1, 1]; rules are computed once and shared.
std::shared_ptr<const GaussLegendreRule> gauss_legendre(int n);

namespace detail {

template <typename T>
double max_abs(const T& v) {
  if constexpr (std::is_arithmetic_v<T>) {
    return std::abs(v);
  } else if constexpr (std::is_same_v<T, cdouble>) {
    return std::abs(v);
  } else {
    return v.abs().maxCoeff();
  }
}

}  // namespace detail

/// Fixed n-point rule on [a, b].
template <typename Value, typename F>
Value integrate_fixed(const F& f, double a, double b, int n, const Value& zero) {
  const auto rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  Value acc = zero;
  for (int j = 0; j < n; ++j) acc += rule->weights[j] * f(mid + half * rule->nodes[j]);
  return acc * half;
}

struct AdaptiveOptions {
  int base_nodes = 20;
  double abs_tol = 1e-13;
  double rel_tol = 1e-12;
  long max_nodes = 1L << 14;
};

/// Globally adaptive bisection on [a, b]: every panel is compared against
/// the sum over its two halves; panels that disagree are split further.
template <typename Value, typename F>
Value integrate_adaptive(const F& f, double a, double b, const Value& zero,
                         const AdaptiveOptions& opt = {}) {
  struct Panel {
    double lo, hi;
    Value estimate;
  };
  long used = 0;
  auto panel = [&](double lo, double hi) {
    used += opt.base_nodes;
    return Panel{lo, hi, integrate_fixed(f, lo, hi, opt.base_nodes, zero)};
  };
  Value total = zero;
  double worst = 0.0;
  std::vector<Panel> work{panel(a, b)};
  const double scale_hint = std::max(1.0, detail::max_abs(work.front().estimate));
  while (!work.empty()) {
    Panel p = std::move(work.back());
    work.pop_back();
    const double m = 0.5 * (p.lo + p.hi);
    Panel left = panel(p.lo, m);
    Panel right = panel(m, p.hi);
    const Value refined = left.estimate + right.estimate;
    const double err = detail::max_abs(Value(refined - p.estimate));
    const double width_share = (p.hi - p.lo) / (b - a);
    const double tol = std::max(opt.abs_tol, opt.rel_tol * scale_hint) * std::max(width_share, 1e-3);
    if (err <= tol) {
      total += refined;
      worst = std::max(worst, err);
      continue;
    }
    if (used > opt.max_nodes)
      throw ConvergenceError("adaptive Gauss-Legendre quadrature did not converge", err);
    work.push_back(std::move(left));
    work.push_back(std::move(right));
  }
  return total;
}

/// One smooth piece of a complex contour, parametrized over t in [-1, 1].
struct ContourPiece {
  std::function<cdouble(double)> point;
  std::function<cdouble(double)> derivative;
};

/// Nodes w_j and complex weights omega_j * w'(t_j) of an n-point rule on a piece.
struct ContourNodes {
  Eigen::ArrayXcd points;
  Eigen::ArrayXcd weights;
};

ContourNodes discretize(const ContourPiece& piece, int n);

}  // namespace bethe
