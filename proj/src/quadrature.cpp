#include "bethe/quadrature.hpp"

#include <map>
#include <mutex>
#include <numbers>

namespace bethe {

namespace {

GaussLegendreRule compute_rule(int n) {
  GaussLegendreRule r{Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // refresh the derivative at the converged root
    double p1 = 1.0, p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    dp = n * (z * p1 - p2) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.nodes[i] = -z;
    r.nodes[n - 1 - i] = z;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

}  // namespace

std::shared_ptr<const GaussLegendreRule> gauss_legendre(int n) {
  if (n < 1) throw DomainError("Gauss-Legendre rule needs n >= 1");
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const GaussLegendreRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const GaussLegendreRule>(compute_rule(n));
  return slot;
}

ContourNodes discretize(const ContourPiece& piece, int n) {
  const auto rule = gauss_legendre(n);
  ContourNodes out{Eigen::ArrayXcd(n), Eigen::ArrayXcd(n)};
  for (int j = 0; j < n; ++j) {
    const double t = rule->nodes[j];
    out.points[j] = piece.point(t);
    out.weights[j] = rule->weights[j] * piece.derivative(t);
  }
  return out;
}

}  // namespace bethe
