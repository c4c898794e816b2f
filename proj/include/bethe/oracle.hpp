#pragma once

// Monte Carlo ground truth for m_lambda(z) = E G(0,0;z): cavity recursion on
// depth-truncated trees with counter-based disorder, plus a dense solve on
// small balls to validate the recursion.

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>

#include "bethe/stieltjes.hpp"
#include "bethe/treewalk.hpp"

namespace bethe {

/// Maps u in [0, 1) to a draw from the single-site law.
using QuantileFunction = std::function<double(double)>;

/// Exact for the uniform law; tabulated inverse CDF for generic laws.
QuantileFunction quantile_function(const SingleSiteLaw& law);

/// Disorder omega_x as a function of vertex key.
using FrozenDisorder = std::function<double(std::uint64_t)>;

/// Counter-based disorder: omega depends only on (seed, sample, vertex), so
/// any partition of samples over workers sees the same values.
class DisorderStream {
 public:
  DisorderStream(std::uint64_t seed, QuantileFunction quantile) : seed_(seed), quantile_(std::move(quantile)) {}

  std::uint64_t sample_key(std::uint64_t sample) const { return mix64(seed_ ^ mix64(sample)); }
  /// Uniform variate for (sample_key, vertex).
  static double unit(std::uint64_t sample_key, std::uint64_t vertex) {
    return static_cast<double>(mix64(sample_key ^ vertex) >> 11) * 0x1.0p-53;
  }
  double omega(std::uint64_t sample, std::uint64_t vertex) const {
    return quantile_(unit(sample_key(sample), vertex));
  }
  FrozenDisorder frozen(std::uint64_t sample) const;
  const QuantileFunction& quantile() const { return quantile_; }

 private:
  std::uint64_t seed_;
  QuantileFunction quantile_;
};

/// Called with (distance from the root, Gamma) for every vertex evaluated.
using LevelObserver = std::function<void(int, cdouble)>;

/// Gamma of the vertex with key `top` at distance `top_depth` from the root:
/// Gamma_v = 1 / (lambda omega_v - z - sum_children Gamma_c), q forward
/// children per vertex, `depth` levels including v (depth 1 = leaf).
/// Evaluated iteratively with an O(depth) stack.
cdouble subtree_green(int q, double lambda, cdouble z, int depth, const FrozenDisorder& omega,
                      std::uint64_t top = root_key(), int top_depth = 1,
                      const LevelObserver* observer = nullptr);

/// Same recursion with fresh i.i.d. draws from `rng`.
cdouble subtree_green(int q, double lambda, cdouble z, int depth, std::mt19937_64& rng,
                      const QuantileFunction& quantile);

/// G_0 = 1 / (lambda omega_0 - z - sum_{i=1}^{q+1} Gamma_i) over a ball of
/// radius `depth` (depth 0: the root alone).
cdouble root_green(int q, double lambda, cdouble z, int depth, const FrozenDisorder& omega,
                   const LevelObserver* observer = nullptr);

cdouble root_green_sample(int q, double lambda, cdouble z, int depth, std::mt19937_64& rng,
                          const QuantileFunction& quantile);

/// (0,0) entry of (A + lambda diag(omega) - z)^{-1} on the radius-R ball,
/// by a dense LU solve. Limited to R <= 3, q <= 2.
cdouble dense_green_oracle(int radius, int q, double lambda, cdouble z, const FrozenDisorder& omega);

/// Bound on |G_0(radius L) - G_0(radius R)| for any R >= L:
/// (q+1) q^{L-1} (Im z)^{-2L} * 2 / Im z.
double truncation_sensitivity(int q, cdouble z, int radius);

struct MCConfig {
  int q = 2;
  double lambda = 1.0;
  cdouble z{0.0, 1.0};
  int depth = 20;
  long samples = 100000;
  std::uint64_t seed = 42;
  /// 0 = hardware concurrency. Results do not depend on it.
  int workers = 0;
  /// Radius actually evaluated is the smallest L <= depth whose
  /// truncation_sensitivity is below this; 0 disables the cut.
  double prune_tolerance = 1e-12;
  double stderr_ceiling = std::numeric_limits<double>::infinity();
};

struct MCEstimate {
  cdouble mean;
  /// max of the real and imaginary standard errors
  double stderr_ = 0.0;
  long samples_used = 0;
  int depth = 0;
  /// |estimate(depth) - estimate(depth - 2)| on the same disorder
  double depth_pair_gap = 0.0;
  std::uint64_t seed = 0;
  int effective_depth = 0;
  double prune_bound = 0.0;
  bool stderr_flagged = false;

  bool operator==(const MCEstimate&) const = default;
};

MCEstimate mc_average(const MCConfig& config, const SingleSiteLaw& law);

}  // namespace bethe
