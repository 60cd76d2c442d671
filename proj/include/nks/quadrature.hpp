#pragma once

// Gauss rules used throughout: Legendre on [-1, 1], the symmetric
// Gauss-Jacobi (Gegenbauer) rule for the sphere weight, and a split
// half-line rule for expectations under the standard normal.

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

#include "nks/errors.hpp"

namespace nks {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

namespace detail {

using ld = long double;

// Legendre P_n and P_n' at x, by the three-term recurrence.
inline std::pair<ld, ld> legendre_with_derivative(int n, ld x) {
  ld p0 = 1, p1 = x;
  for (int k = 1; k < n; ++k) {
    const ld p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
    p0 = p1;
    p1 = p2;
  }
  const ld dp = n * (x * p1 - p0) / (x * x - 1);
  return {p1, dp};
}

// Gegenbauer C_n^lambda and its derivative at x.
inline std::pair<ld, ld> gegenbauer_with_derivative(int n, ld lambda, ld x) {
  ld c0 = 1, c1 = 2 * lambda * x;
  for (int k = 1; k < n; ++k) {
    const ld c2 = (2 * (k + lambda) * x * c1 - (k + 2 * lambda - 1) * c0) / (k + 1);
    c0 = c1;
    c1 = c2;
  }
  const ld dc = (-n * x * c1 + (n + 2 * lambda - 1) * c0) / (1 - x * x);
  return {c1, dc};
}

template <class Build>
const QuadratureRule& memoized(std::map<std::pair<int, int>, std::unique_ptr<QuadratureRule>>& cache,
                               std::mutex& m, std::pair<int, int> key, Build&& build) {
  std::lock_guard lock(m);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<QuadratureRule>(build())).first;
  }
  return *it->second;
}

inline QuadratureRule build_gauss_legendre(int n) {
  QuadratureRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const ld pi = std::numbers::pi_v<ld>;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    ld x = std::cos(pi * (i + 0.75L) / (n + 0.5L));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre_with_derivative(n, x);
      const ld dx = p / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-19L) break;
    }
    const auto [p, dp] = legendre_with_derivative(n, x);
    (void)p;
    const ld w = 2 / ((1 - x * x) * dp * dp);
    // nodes ascending
    r.nodes[n - 1 - i] = static_cast<double>(x);
    r.nodes[i] = static_cast<double>(-x);
    r.weights[n - 1 - i] = static_cast<double>(w);
    r.weights[i] = static_cast<double>(w);
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

inline QuadratureRule build_sphere_rule(int n, int d) {
  QuadratureRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const ld pi = std::numbers::pi_v<ld>;
  if (d == 1) {
    // Chebyshev weight (1 - t^2)^{-1/2}: closed-form nodes, equal weights.
    for (int i = 0; i < n; ++i) {
      r.nodes[n - 1 - i] = static_cast<double>(std::cos(pi * (2 * i + 1) / (2.0L * n)));
      r.weights[i] = 1.0 / n;
    }
    return r;
  }
  const ld lambda = (d - 1) / 2.0L;
  std::vector<ld> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    ld xi = std::cos((i + 1 + lambda / 2 - 0.5L) * pi / (n + lambda));
    for (int it = 0; it < 200; ++it) {
      const auto [c, dc] = gegenbauer_with_derivative(n, lambda, xi);
      const ld dx = c / dc;
      xi -= dx;
      if (std::fabs(dx) < 1e-19L) break;
    }
    const auto [c, dc] = gegenbauer_with_derivative(n, lambda, xi);
    (void)c;
    const ld wi = 1 / ((1 - xi * xi) * dc * dc);
    x[n - 1 - i] = xi;
    x[i] = -xi;
    w[n - 1 - i] = wi;
    w[i] = wi;
  }
  if (n % 2 == 1) x[n / 2] = 0;
  ld total = 0;
  for (ld v : w) total += v;
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = static_cast<double>(x[i]);
    r.weights[i] = static_cast<double>(w[i] / total);
  }
  return r;
}

}  // namespace detail

/// n-point Gauss-Legendre rule on [-1, 1]; nodes ascending, weights sum to 2.
/// Nodes are refined by Newton iteration in extended precision.
inline const QuadratureRule& gauss_legendre(int n) {
  if (n < 1) throw ValidationError("gauss_legendre: n must be >= 1");
  static std::map<std::pair<int, int>, std::unique_ptr<QuadratureRule>> cache;
  static std::mutex m;
  return detail::memoized(cache, m, {n, 0}, [n] { return detail::build_gauss_legendre(n); });
}

/// Gauss rule for the probability measure on [-1, 1] proportional to
/// (1 - t^2)^{d/2 - 1}, i.e. Gauss-Jacobi with alpha = beta = d/2 - 1. This is
/// the push-forward of the uniform measure on S^d under x -> <x, e>.
inline const QuadratureRule& sphere_rule(int n, int d) {
  if (n < 1) throw ValidationError("sphere_rule: n must be >= 1");
  if (d < 1) throw ValidationError("sphere_rule: d must be >= 1");
  static std::map<std::pair<int, int>, std::unique_ptr<QuadratureRule>> cache;
  static std::mutex m;
  return detail::memoized(cache, m, {n, d}, [n, d] { return detail::build_sphere_rule(n, d); });
}

/// Gauss-Legendre mapped to [a, b].
inline QuadratureRule mapped_legendre(int n, double a, double b) {
  const auto& base = gauss_legendre(n);
  QuadratureRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double half = (b - a) / 2, mid = (a + b) / 2;
  for (int i = 0; i < n; ++i) {
    r.nodes[i] = mid + half * base.nodes[i];
    r.weights[i] = half * base.weights[i];
  }
  return r;
}

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

/// Rule for integrals against the standard normal density, split at 0:
/// each half-line is mapped onto [0, cutoff] with Gauss-Legendre nodes so
/// that integrands with a kink at the origin are integrated accurately.
/// Weights already include the normal density.
struct GaussHermiteRule {
  std::vector<double> half_nodes;    ///< positive nodes x_j in (0, cutoff)
  std::vector<double> half_weights;  ///< w_j * pdf(x_j)
  double cutoff = 12.0;

  /// Node count over the whole line.
  std::size_t size() const { return 2 * half_nodes.size(); }

  double total_weight() const {
    double s = 0;
    for (double w : half_weights) s += 2 * w;
    return s;
  }

  /// E[f(X)] for X ~ N(0, 1); f_pos is used on x > 0 and f_neg on x < 0.
  template <class Pos, class Neg>
  double expect(Pos&& f_pos, Neg&& f_neg) const {
    long double s = 0;
    for (std::size_t j = 0; j < half_nodes.size(); ++j) {
      const double x = half_nodes[j];
      s += static_cast<long double>(half_weights[j]) * (f_pos(x) + f_neg(-x));
    }
    return static_cast<double>(s);
  }
};

inline GaussHermiteRule split_normal_rule(int nodes_per_half = 2000, double cutoff = 12.0) {
  if (nodes_per_half < 2) throw ValidationError("split_normal_rule: need at least 2 nodes");
  if (!(cutoff > 0)) throw ValidationError("split_normal_rule: cutoff must be positive");
  const auto base = mapped_legendre(nodes_per_half, 0.0, cutoff);
  GaussHermiteRule r;
  r.cutoff = cutoff;
  r.half_nodes = base.nodes;
  r.half_weights.resize(base.size());
  for (std::size_t j = 0; j < base.size(); ++j) r.half_weights[j] = base.weights[j] * normal_pdf(base.nodes[j]);
  return r;
}

/// Shared default rule (2000 nodes per half-line on [0, 12]).
inline const GaussHermiteRule& default_normal_rule() {
  static const GaussHermiteRule rule = split_normal_rule();
  return rule;
}

}  // namespace nks
