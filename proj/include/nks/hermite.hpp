#pragma once

// Normalized probabilist's Hermite polynomials h_n (orthonormal in
// L2(N(0,1))), Hermite coefficients of activations, and the closed-form
// coefficients of the reference activations s_k.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "nks/activations.hpp"
#include "nks/errors.hpp"
#include "nks/parallel.hpp"
#include "nks/quadrature.hpp"

namespace nks {

/// Default truncation of Hermite expansions.
inline constexpr int kDefaultHermiteCoefficients = 512;

struct HermiteSeries {
  std::vector<double> coeffs;  ///< a_0 .. a_N
  int N = 0;
  std::string source;
  bool truncated = false;  ///< max(|a_N-1|, |a_N|) > 1e-6 ||a||; the series is still usable

  double squared_norm() const {
    long double s = 0;
    for (double a : coeffs) s += static_cast<long double>(a) * a;
    return static_cast<double>(s);
  }
};

/// h_n(x) via h_{k+1} = (x h_k - sqrt(k) h_{k-1}) / sqrt(k+1).
inline double hermite_eval(int n, double x) {
  if (n < 0) throw ValidationError("hermite_eval: n must be >= 0");
  double h0 = 1, h1 = x;
  if (n == 0) return h0;
  for (int k = 1; k < n; ++k) {
    const double h2 = (x * h1 - std::sqrt(static_cast<double>(k)) * h0) / std::sqrt(k + 1.0);
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

/// h_0(x) .. h_N(x) in one pass.
inline void hermite_all(int N, double x, std::vector<double>& out) {
  out.resize(N + 1);
  out[0] = 1;
  if (N >= 1) out[1] = x;
  for (int k = 1; k < N; ++k)
    out[k + 1] = (x * out[k] - std::sqrt(static_cast<double>(k)) * out[k - 1]) / std::sqrt(k + 1.0);
}

inline void flag_truncation(HermiteSeries& s) {
  const double norm = std::sqrt(s.squared_norm());
  // the last two slots cover both parities
  double tail = 0;
  for (std::size_t i = s.coeffs.size() >= 2 ? s.coeffs.size() - 2 : 0; i < s.coeffs.size(); ++i)
    tail = std::max(tail, std::fabs(s.coeffs[i]));
  s.truncated = tail > 1e-6 * norm;
}

/// a_n = E[phi(X) h_n(X)], computed on the split half-line rule so that the
/// kink at 0 sits on a panel boundary.
inline HermiteSeries expand(const ActivationSpec& act, int N, const GaussHermiteRule& rule = default_normal_rule()) {
  if (N < 0) throw ValidationError("expand: N must be >= 0");
  const std::size_t m = rule.half_nodes.size();
  // Node values of phi on both half-lines, then one Hermite sweep per node.
  std::vector<double> fp(m), fn(m);
  for (std::size_t j = 0; j < m; ++j) {
    fp[j] = act.pos.f(rule.half_nodes[j]);
    fn[j] = act.neg.f(-rule.half_nodes[j]);
  }
  // Per-node contributions are summed in node order per coefficient block so
  // results do not depend on the thread count.
  const std::size_t blocks = std::min<std::size_t>(m, 64);
  std::vector<std::vector<long double>> partial(blocks, std::vector<long double>(N + 1, 0.0L));
  parallel_for(blocks, [&](std::size_t b) {
    std::vector<double> h;
    auto& acc = partial[b];
    for (std::size_t j = b * m / blocks; j < (b + 1) * m / blocks; ++j) {
      hermite_all(N, rule.half_nodes[j], h);
      const double w = rule.half_weights[j];
      // h_n(-x) = (-1)^n h_n(x)
      const double even = w * (fp[j] + fn[j]);
      const double odd = w * (fp[j] - fn[j]);
      for (int n = 0; n <= N; ++n) acc[n] += h[n] * (n % 2 == 0 ? even : odd);
    }
  });
  HermiteSeries s;
  s.N = N;
  s.source = act.name;
  s.coeffs.assign(N + 1, 0.0);
  for (int n = 0; n <= N; ++n) {
    long double v = 0;
    for (const auto& p : partial) v += p[n];
    s.coeffs[n] = static_cast<double>(v);
  }
  flag_truncation(s);
  return s;
}

namespace detail {

/// log(n!!) with n!! = 1 for n <= 0.
inline double log_double_factorial(int n) {
  if (n <= 0) return 0.0;
  if (n % 2 == 0) {
    const int k = n / 2;  // (2k)!! = 2^k k!
    return k * std::numbers::ln2 + std::lgamma(k + 1.0);
  }
  const int k = (n + 1) / 2;  // (2k-1)!! = (2k)! / (2^k k!)
  return std::lgamma(2.0 * k + 1.0) - k * std::numbers::ln2 - std::lgamma(k + 1.0);
}

}  // namespace detail

/// Exact Hermite coefficients of s_k(x) = sgn(x) x^k / (2 k!):
/// a_n = odd(n-k) (-1)^((max(1,n-k)-1)/2) (n-k-2)!! / ((k-n)!! sqrt(2 pi n!)).
inline HermiteSeries s_k_coefficients(int k, int N) {
  if (k < 0) throw ValidationError("s_k_coefficients: k must be >= 0");
  if (N < 0) throw ValidationError("s_k_coefficients: N must be >= 0");
  HermiteSeries s;
  s.N = N;
  s.source = "s" + std::to_string(k);
  s.coeffs.assign(N + 1, 0.0);
  for (int n = 0; n <= N; ++n) {
    const int diff = n - k;
    if (diff % 2 == 0) continue;  // odd(n-k) vanishes
    const int e = (std::max(1, diff) - 1) / 2;
    const double sign = (e % 2 == 0) ? 1.0 : -1.0;
    const double log_mag = detail::log_double_factorial(diff - 2) - detail::log_double_factorial(k - n) -
                           0.5 * (std::log(2 * std::numbers::pi) + std::lgamma(n + 1.0));
    s.coeffs[n] = sign * std::exp(log_mag);
  }
  flag_truncation(s);
  return s;
}

/// Given coefficients of g = f', returns those of f for n >= 1:
/// a_n(f) = a_{n-1}(g) / sqrt(n). Slot 0 is set to 0 and left to the caller
/// because it depends on f(0).
inline HermiteSeries shift_by_pseudo_derivative(const HermiteSeries& g) {
  HermiteSeries f;
  f.N = g.N + 1;
  f.source = g.source.empty() ? std::string{} : "int(" + g.source + ")";
  f.coeffs.assign(f.N + 1, 0.0);
  for (int n = 1; n <= f.N; ++n) f.coeffs[n] = g.coeffs[n - 1] / std::sqrt(static_cast<double>(n));
  flag_truncation(f);
  return f;
}

}  // namespace nks
