#pragma once

// Single-site laws and their transforms s_k(z) = int dmu(t) / (t - z)^k,
// on the upper half-plane and continued downward across an analytic window.

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "bethe/quadrature.hpp"
#include "bethe/treewalk.hpp"

namespace bethe {

/// Real interval I = (b1, b2) together with the radii delta < delta0 that
/// fix the evaluation stadium Omega_delta(I) and the deformation contour.
class AnalyticWindow {
 public:
  AnalyticWindow(Interval interval, double delta0, double delta);

  const Interval& interval() const { return interval_; }
  double delta0() const { return delta0_; }
  double delta() const { return delta_; }
  /// (b1 - delta0, b2 + delta0).
  Interval sharp() const { return {interval_.lo - delta0_, interval_.hi + delta0_}; }

  double distance_to_interval(cdouble z) const;
  /// dist(z, I) < delta.
  bool contains(cdouble z) const { return distance_to_interval(z) < delta_; }

  bool operator==(const AnalyticWindow&) const = default;

 private:
  Interval interval_;
  double delta0_;
  double delta_;
};

struct PointMass {
  double t = 0.0;
  double w = 0.0;
};

/// Absolutely continuous piece of mu outside the analytic interval.
struct DensitySegment {
  double lo = 0.0;
  double hi = 0.0;
  std::function<double(double)> density;
};

/// mu restricted to R \ I_sharp: exact point masses plus density segments
/// integrated adaptively.
struct OutsidePart {
  std::vector<PointMass> masses;
  std::vector<DensitySegment> segments;

  double total_mass() const;
  /// Contributions to s_1..s_kmax at z; z must stay off the support.
  Eigen::ArrayXcd transforms(int kmax, cdouble z) const;
};

struct UniformLaw {
  double a = 1.0;  // half-width, density 1/(2a) on [-a, a]
};

struct GenericAnalyticLaw {
  std::string name;
  /// Density on I_sharp, holomorphic on Omega_delta0(I).
  std::function<cdouble(cdouble)> density;
  Interval analytic_interval;
  /// sup |rho| on the deformation contour, if known.
  std::optional<double> density_bound_on_eta;
  OutsidePart outside;
};

class SingleSiteLaw {
 public:
  static SingleSiteLaw uniform(double a);
  /// Checks total mass (1 within 1e-10) and real nonnegative density on
  /// the analytic interval.
  static SingleSiteLaw generic(GenericAnalyticLaw law);

  bool is_uniform() const { return std::holds_alternative<UniformLaw>(v_); }
  const UniformLaw& uniform_params() const { return std::get<UniformLaw>(v_); }
  const GenericAnalyticLaw& generic_params() const { return std::get<GenericAnalyticLaw>(v_); }

  Interval support() const;
  /// Real density at t (0 off the absolutely continuous part).
  double density(double t) const;
  /// Mass of the density on I_sharp plus the outside mass (generic laws).
  double total_mass() const;
  std::string name() const;

 private:
  explicit SingleSiteLaw(std::variant<UniformLaw, GenericAnalyticLaw> v) : v_(std::move(v)) {}
  std::variant<UniformLaw, GenericAnalyticLaw> v_;
};

/// The uniform law on [-a, a] written as a generic law for a window: constant
/// density on I_sharp, the two leftover pieces of [-a, a] as outside segments.
SingleSiteLaw uniform_as_generic(double a, const AnalyticWindow& window);
/// Wigner semicircle (2 / (pi R^2)) sqrt(R^2 - t^2) on [-R, R].
SingleSiteLaw semicircle_law(double radius, const AnalyticWindow& window);
/// Density sum_j c_j T_j(x) on I_sharp (x affine onto [-1, 1]) plus point masses.
SingleSiteLaw chebyshev_law(std::vector<double> coefficients, const AnalyticWindow& window,
                            std::vector<PointMass> outside_masses);

/// Lower boundary arc of Omega_delta0(I): quarter circle around b1, bottom
/// segment, quarter circle around b2; runs from b1 - delta0 to b2 + delta0.
struct ContourEta {
  std::array<ContourPiece, 3> pieces;
  std::array<ContourNodes, 3> nodes;
  int nodes_per_piece = 0;
  double length = 0.0;

  cdouble start() const { return pieces.front().point(-1.0); }
  cdouble end() const { return pieces.back().point(1.0); }
};

ContourEta build_eta(const AnalyticWindow& window, int nodes_per_piece);

/// Closed-form transform of the uniform law, continued downward across
/// (-a, a). Real z in (-a, a) gives the boundary value from above.
cdouble s_uniform_closed(int k, cdouble z, double a);

/// s_1..s_kmax on the upper half-plane.
Eigen::ArrayXcd s_upper_all(const SingleSiteLaw& law, int kmax, cdouble z);
cdouble s_upper(const SingleSiteLaw& law, int k, cdouble z);

/// s_1..s_kmax of the holomorphic continuation at z in Omega_delta(I).
Eigen::ArrayXcd s_continued_all(const SingleSiteLaw& law, int kmax, cdouble z,
                                const AnalyticWindow& window);
cdouble s_continued(const SingleSiteLaw& law, int k, cdouble z, const AnalyticWindow& window);

/// C_delta = 1 + length(eta) * sup_eta |rho|. Not rigorous when sup |rho|
/// had to be estimated by sampling.
struct TransformConstant {
  double C_delta = 0.0;
  double sup_density_on_eta = 0.0;
  double eta_length = 0.0;
  bool rigorous = true;
};

TransformConstant transform_constant(const SingleSiteLaw& law, const AnalyticWindow& window);

/// C_delta (delta0 - delta)^{-k}, bounding |s_k| on Omega_delta(I).
double sk_bound(const SingleSiteLaw& law, const AnalyticWindow& window, int k);

}  // namespace bethe
