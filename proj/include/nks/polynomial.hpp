#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace nks {

/// Degree reported for the zero polynomial.
inline constexpr int kZeroPolynomialDegree = std::numeric_limits<int>::min();

/// Dense polynomial in the monomial basis, coeffs[i] multiplies x^i.
struct Polynomial {
  std::vector<double> coeffs;

  double operator()(double x) const {
    double acc = 0;
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
    return acc;
  }

  int degree() const {
    for (std::size_t i = coeffs.size(); i-- > 0;)
      if (coeffs[i] != 0.0) return static_cast<int>(i);
    return kZeroPolynomialDegree;
  }

  /// Highest even (parity 0) or odd (parity 1) power with a nonzero coefficient.
  int parity_degree(int parity) const {
    for (std::size_t i = coeffs.size(); i-- > 0;)
      if (static_cast<int>(i % 2) == parity && coeffs[i] != 0.0) return static_cast<int>(i);
    return kZeroPolynomialDegree;
  }

  Polynomial derivative() const {
    Polynomial d;
    for (std::size_t i = 1; i < coeffs.size(); ++i) d.coeffs.push_back(static_cast<double>(i) * coeffs[i]);
    return d;
  }

  /// x -> p(a x)
  Polynomial rescaled(double a) const {
    Polynomial r = *this;
    double s = 1;
    for (auto& c : r.coeffs) {
      c *= s;
      s *= a;
    }
    return r;
  }

  Polynomial scaled(double lambda) const {
    Polynomial r = *this;
    for (auto& c : r.coeffs) c *= lambda;
    return r;
  }

  /// k-th derivative at 0.
  double derivative_at_zero(int k) const {
    if (k < 0 || static_cast<std::size_t>(k) >= coeffs.size()) return 0.0;
    return std::tgamma(k + 1.0) * coeffs[k];
  }

  /// (a p(x) + b p(-x)) style combinations are built from this.
  static Polynomial combine(const Polynomial& p, double a, const Polynomial& q_reflected_source, double b) {
    // returns a * p(x) + b * q(-x)
    Polynomial r;
    const std::size_t n = std::max(p.coeffs.size(), q_reflected_source.coeffs.size());
    r.coeffs.assign(n, 0.0);
    for (std::size_t i = 0; i < p.coeffs.size(); ++i) r.coeffs[i] += a * p.coeffs[i];
    for (std::size_t i = 0; i < q_reflected_source.coeffs.size(); ++i)
      r.coeffs[i] += b * (i % 2 == 0 ? 1.0 : -1.0) * q_reflected_source.coeffs[i];
    return r;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    const std::size_t n = std::max(a.coeffs.size(), b.coeffs.size());
    for (std::size_t i = 0; i < n; ++i) {
      const double x = i < a.coeffs.size() ? a.coeffs[i] : 0.0;
      const double y = i < b.coeffs.size() ? b.coeffs[i] : 0.0;
      if (std::fabs(x - y) > 1e-14 * (1 + std::fabs(x) + std::fabs(y))) return false;
    }
    return true;
  }
};

}  // namespace nks
