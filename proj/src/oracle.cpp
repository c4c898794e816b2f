#include "bethe/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

#include <Eigen/Dense>

namespace bethe {

namespace {

// 1 / (x + iy) without the overflow guards of std::complex division;
// |x + iy| >= Im z > 0 here.
inline cdouble reciprocal(cdouble d) {
  const double n = d.real() * d.real() + d.imag() * d.imag();
  return {d.real() / n, -d.imag() / n};
}

void require_upper(cdouble z) {
  if (!(z.imag() > 0.0)) throw DomainError("the cavity recursion needs Im z > 0");
}

// Post-order walk of the q-ary subtree below `top` with an explicit stack.
template <typename Omega, typename Observer>
cdouble subtree_impl(int q, double lambda, cdouble z, int depth, const Omega& omega, std::uint64_t top,
                     int top_depth, const Observer& observe) {
  struct Frame {
    std::uint64_t key;
    int level;
    int remaining;
    int next_child;
    cdouble sum;
  };
  std::vector<Frame> stack;
  stack.reserve(static_cast<std::size_t>(depth) + 1);
  stack.push_back({top, top_depth, depth, 0, 0.0});
  for (;;) {
    Frame& f = stack.back();
    if (f.remaining > 1 && f.next_child < q) {
      ++f.next_child;
      stack.push_back({child_key(f.key, f.next_child), f.level + 1, f.remaining - 1, 0, 0.0});
      continue;
    }
    const cdouble gamma = reciprocal(lambda * omega(f.key) - z - f.sum);
    observe(f.level, gamma);
    stack.pop_back();
    if (stack.empty()) return gamma;
    stack.back().sum += gamma;
  }
}

template <typename Omega, typename Observer>
cdouble root_impl(int q, double lambda, cdouble z, int depth, const Omega& omega, const Observer& observe) {
  cdouble sum = 0.0;
  if (depth >= 1)
    for (int i = 1; i <= q + 1; ++i)
      sum += subtree_impl(q, lambda, z, depth, omega, child_key(root_key(), i), 1, observe);
  const cdouble g = reciprocal(lambda * omega(root_key()) - z - sum);
  observe(0, g);
  return g;
}

struct NoObserver {
  void operator()(int, cdouble) const {}
};

void check_tree_args(int q, double lambda, int depth) {
  if (q < 1) throw DomainError("q must be >= 1");
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  if (depth < 0) throw DomainError("depth must be nonnegative");
}

}  // namespace

// ---------------------------------------------------------------- sampling

QuantileFunction quantile_function(const SingleSiteLaw& law) {
  if (law.is_uniform()) {
    const double a = law.uniform_params().a;
    return [a](double u) { return -a + 2.0 * a * u; };
  }
  // Piecewise-linear inverse CDF on a midpoint-rule tabulation; point
  // masses are atoms of zero width.
  struct Cell {
    double lo, hi, mass;
  };
  std::vector<Cell> cells;
  const auto& g = law.generic_params();
  auto tabulate = [&](double lo, double hi, int n, const std::function<double(double)>& rho) {
    const double h = (hi - lo) / n;
    for (int i = 0; i < n; ++i) {
      const double a = lo + i * h;
      cells.push_back({a, a + h, std::max(0.0, rho(a + 0.5 * h)) * h});
    }
  };
  tabulate(g.analytic_interval.lo, g.analytic_interval.hi, 4096, [&](double t) { return g.density(t).real(); });
  for (const auto& seg : g.outside.segments) tabulate(seg.lo, seg.hi, 1024, seg.density);
  for (const auto& p : g.outside.masses) cells.push_back({p.t, p.t, p.w});
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.lo < b.lo; });
  std::vector<double> cdf;
  double total = 0.0;
  for (const auto& c : cells) cdf.push_back(total += c.mass);
  return [cells = std::move(cells), cdf = std::move(cdf), total](double u) {
    const double target = u * total;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cells.size() - 1);
    const Cell& c = cells[i];
    if (c.mass <= 0.0 || c.hi == c.lo) return c.lo;
    const double before = cdf[i] - c.mass;
    return c.lo + (c.hi - c.lo) * std::clamp((target - before) / c.mass, 0.0, 1.0);
  };
}

FrozenDisorder DisorderStream::frozen(std::uint64_t sample) const {
  return [this, sample](std::uint64_t vertex) { return omega(sample, vertex); };
}

// --------------------------------------------------------------- recursion

cdouble subtree_green(int q, double lambda, cdouble z, int depth, const FrozenDisorder& omega, std::uint64_t top,
                      int top_depth, const LevelObserver* observer) {
  check_tree_args(q, lambda, depth);
  require_upper(z);
  if (depth < 1) throw DomainError("a subtree needs depth >= 1");
  if (observer) return subtree_impl(q, lambda, z, depth, omega, top, top_depth, *observer);
  return subtree_impl(q, lambda, z, depth, omega, top, top_depth, NoObserver{});
}

cdouble subtree_green(int q, double lambda, cdouble z, int depth, std::mt19937_64& rng,
                      const QuantileFunction& quantile) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Each vertex is visited exactly once, so every call is a fresh draw.
  auto fresh = [&](std::uint64_t) { return quantile(unit(rng)); };
  check_tree_args(q, lambda, depth);
  require_upper(z);
  if (depth < 1) throw DomainError("a subtree needs depth >= 1");
  return subtree_impl(q, lambda, z, depth, fresh, root_key(), 1, NoObserver{});
}

cdouble root_green(int q, double lambda, cdouble z, int depth, const FrozenDisorder& omega,
                   const LevelObserver* observer) {
  check_tree_args(q, lambda, depth);
  require_upper(z);
  if (observer) return root_impl(q, lambda, z, depth, omega, *observer);
  return root_impl(q, lambda, z, depth, omega, NoObserver{});
}

cdouble root_green_sample(int q, double lambda, cdouble z, int depth, std::mt19937_64& rng,
                          const QuantileFunction& quantile) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto fresh = [&](std::uint64_t) { return quantile(unit(rng)); };
  check_tree_args(q, lambda, depth);
  require_upper(z);
  return root_impl(q, lambda, z, depth, fresh, NoObserver{});
}

cdouble dense_green_oracle(int radius, int q, double lambda, cdouble z, const FrozenDisorder& omega) {
  if (radius < 0 || radius > 3 || q < 1 || q > 2) throw CapExceeded("dense oracle limited to radius <= 3, q <= 2");
  if (z.imag() == 0.0) throw DomainError("dense oracle needs Im z != 0");
  std::vector<VertexPath> vertices{VertexPath{}};
  std::map<VertexPath, Eigen::Index> index{{VertexPath{}, 0}};
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const VertexPath v = vertices[i];
    if (v.depth() == radius) continue;
    const int branching = v.is_root() ? q + 1 : q;
    for (int c = 1; c <= branching; ++c) {
      index.emplace(v.child(c), static_cast<Eigen::Index>(vertices.size()));
      vertices.push_back(v.child(c));
    }
  }
  const auto n = static_cast<Eigen::Index>(vertices.size());
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const VertexPath& v = vertices[static_cast<std::size_t>(i)];
    H(i, i) = lambda * omega(v.key()) - z;
    if (!v.is_root()) {
      const Eigen::Index p = index.at(v.parent());
      H(i, p) = 1.0;
      H(p, i) = 1.0;
    }
  }
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(n);
  e0[0] = 1.0;
  const Eigen::VectorXcd x = H.partialPivLu().solve(e0);
  return x[0];
}

double truncation_sensitivity(int q, cdouble z, int radius) {
  require_upper(z);
  if (radius < 1) return 2.0 / z.imag();
  const double y = z.imag();
  const double log_bound = std::log(q + 1.0) + (radius - 1) * std::log(static_cast<double>(q)) -
                           2.0 * radius * std::log(y) + std::log(2.0 / y);
  return std::exp(log_bound);
}

// ------------------------------------------------------------- Monte Carlo

namespace {

int effective_radius(const MCConfig& c, int radius) {
  if (c.prune_tolerance <= 0.0) return radius;
  for (int r = 1; r < radius; ++r)
    if (truncation_sensitivity(c.q, c.z, r) <= c.prune_tolerance) return r;
  return radius;
}

// Fixed-shape pairwise reduction, independent of how samples were computed.
cdouble pairwise_sum(const cdouble* v, std::size_t n) {
  if (n <= 8) {
    cdouble s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

}  // namespace

MCEstimate mc_average(const MCConfig& c, const SingleSiteLaw& law) {
  check_tree_args(c.q, c.lambda, c.depth);
  require_upper(c.z);
  if (c.depth < 1) throw DomainError("MC depth must be >= 1");
  if (c.samples < 1) throw DomainError("MC needs at least one sample");

  const DisorderStream stream(c.seed, quantile_function(law));
  const bool uniform = law.is_uniform();
  const double half_width = uniform ? law.uniform_params().a : 0.0;
  const int r_full = effective_radius(c, c.depth);
  const bool want_gap = c.depth >= 2;
  const int r_short = want_gap ? effective_radius(c, c.depth - 2) : r_full;
  const bool second_pass = want_gap && r_short != r_full;

  const auto m = static_cast<std::size_t>(c.samples);
  std::vector<cdouble> values(m), shorter(second_pass ? m : 0);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      const std::uint64_t key = stream.sample_key(s);
      auto evaluate = [&](const auto& omega) {
        values[s] = root_impl(c.q, c.lambda, c.z, r_full, omega, NoObserver{});
        if (second_pass) shorter[s] = root_impl(c.q, c.lambda, c.z, r_short, omega, NoObserver{});
      };
      // The uniform branch inlines the same quantile as quantile_function().
      if (uniform)
        evaluate([&](std::uint64_t v) { return -half_width + 2.0 * half_width * DisorderStream::unit(key, v); });
      else
        evaluate([&](std::uint64_t v) { return stream.quantile()(DisorderStream::unit(key, v)); });
    }
  };
  unsigned workers = c.workers > 0 ? static_cast<unsigned>(c.workers) : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(std::min<std::size_t>(m, 256)));
  if (workers == 1) {
    work(0, m);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, m * w / workers, m * (w + 1) / workers);
    for (auto& t : pool) t.join();
  }

  MCEstimate est;
  est.mean = pairwise_sum(values.data(), m) / static_cast<double>(m);
  std::vector<double> re2(m), im2(m);
  for (std::size_t s = 0; s < m; ++s) {
    const cdouble d = values[s] - est.mean;
    re2[s] = d.real() * d.real();
    im2[s] = d.imag() * d.imag();
  }
  const double denom = m > 1 ? static_cast<double>(m - 1) : 1.0;
  const double se_re = std::sqrt(pairwise_sum(re2.data(), m) / denom / static_cast<double>(m));
  const double se_im = std::sqrt(pairwise_sum(im2.data(), m) / denom / static_cast<double>(m));
  est.stderr_ = std::max(se_re, se_im);
  est.samples_used = c.samples;
  est.depth = c.depth;
  est.seed = c.seed;
  est.effective_depth = r_full;
  est.prune_bound = r_full < c.depth ? truncation_sensitivity(c.q, c.z, r_full) : 0.0;
  if (second_pass) est.depth_pair_gap = std::abs(est.mean - pairwise_sum(shorter.data(), m) / static_cast<double>(m));
  est.stderr_flagged = est.stderr_ > c.stderr_ceiling;
  return est;
}

}  // namespace bethe
