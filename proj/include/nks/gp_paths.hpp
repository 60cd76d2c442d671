#pragma once

// Gaussian-process sample paths on S^1 and S^2 drawn from a kernel spectrum,
// and the expected Sobolev-norm series that decides path smoothness.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "nks/errors.hpp"
#include "nks/random.hpp"
#include "nks/spectrum.hpp"

namespace nks {

/// Real orthonormal basis of L2(S^d) for d in {1, 2} under the uniform
/// probability measure, ordered by degree l and then index i < N_{l,d}.
class SphericalBasis {
 public:
  SphericalBasis(int d, int l_max) : d_(d), l_max_(l_max) {
    if (d != 1 && d != 2) throw ValidationError("SphericalBasis: only d = 1 and d = 2 are supported");
    if (l_max < 0) throw ValidationError("SphericalBasis: l_max must be >= 0");
  }

  int d() const { return d_; }
  int l_max() const { return l_max_; }

  /// Index of Y_{l,0} in the flattened vector.
  std::size_t offset(int l) const {
    if (l == 0) return 0;
    return d_ == 1 ? static_cast<std::size_t>(2 * l - 1) : static_cast<std::size_t>(l) * l;
  }
  std::size_t size() const { return offset(l_max_ + 1); }
  int count(int l) const { return l == 0 ? 1 : (d_ == 1 ? 2 : 2 * l + 1); }

  /// All basis functions at a point x of S^d (coordinates in R^{d+1}).
  void evaluate(const std::vector<double>& x, std::vector<double>& out) const {
    if (static_cast<int>(x.size()) != d_ + 1) throw ValidationError("SphericalBasis: point has wrong dimension");
    out.assign(size(), 0.0);
    out[0] = 1.0;
    const double r2 = std::sqrt(2.0);
    if (d_ == 1) {
      const double th = std::atan2(x[1], x[0]);
      for (int l = 1; l <= l_max_; ++l) {
        out[offset(l)] = r2 * std::cos(l * th);
        out[offset(l) + 1] = r2 * std::sin(l * th);
      }
      return;
    }
    // d = 2: Y_{l,0} = Pn_l^0(z), Y_{l,2m-1} = sqrt2 Pn_l^m(z) cos(m ph),
    // Y_{l,2m} = sqrt2 Pn_l^m(z) sin(m ph), with int Pn^2 dz/2 = 1.
    const double norm = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    const double z = std::clamp(x[2] / norm, -1.0, 1.0);
    const double s = std::sqrt(std::max(0.0, 1 - z * z));
    const double ph = std::atan2(x[1], x[0]);
    double pmm = 1.0;  // Pn_m^m
    for (int m = 0; m <= l_max_; ++m) {
      if (m > 0) pmm *= s * std::sqrt((2.0 * m + 1) / (2.0 * m));
      const double cm = m == 0 ? 1.0 : r2 * std::cos(m * ph);
      const double sm = m == 0 ? 0.0 : r2 * std::sin(m * ph);
      double p2 = 0, p1 = pmm;  // Pn_{l-2}^m, Pn_{l-1}^m
      for (int l = m; l <= l_max_; ++l) {
        double p;
        if (l == m) {
          p = pmm;
        } else if (l == m + 1) {
          p = std::sqrt(2.0 * m + 3) * z * pmm;
        } else {
          const double a = std::sqrt((4.0 * l * l - 1) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
          const double b = std::sqrt(((l - 1.0) * (l - 1.0) - static_cast<double>(m) * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1));
          p = a * (z * p1 - b * p2);
        }
        if (l > m) {
          p2 = p1;
          p1 = p;
        }
        if (m == 0) {
          out[offset(l)] = p;
        } else {
          out[offset(l) + 2 * m - 1] = p * cm;
          out[offset(l) + 2 * m] = p * sm;
        }
      }
    }
  }

 private:
  int d_;
  int l_max_;
};

/// f = sum_l sqrt(mu_l) sum_i xi_{l,i} Y_{l,i}.
class GPPath {
 public:
  GPPath(SphericalBasis basis, std::vector<double> coeffs) : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {}

  const std::vector<double>& coefficients() const { return coeffs_; }
  const SphericalBasis& basis() const { return basis_; }

  double operator()(const std::vector<double>& x) const {
    std::vector<double> y;
    basis_.evaluate(x, y);
    long double s = 0;
    for (std::size_t j = 0; j < y.size(); ++j) s += static_cast<long double>(coeffs_[j]) * y[j];
    return static_cast<double>(s);
  }

 private:
  SphericalBasis basis_;
  std::vector<double> coeffs_;
};

/// Draws one path. xi_{l,i} depends only on (seed, l, i). Eigenvalues at or
/// below zero_rel_threshold times the largest one are quadrature noise and
/// are treated as zero, since the square root would amplify them.
inline GPPath sample_path(const Spectrum& spec, const SphericalBasis& basis, std::uint64_t seed,
                          double zero_rel_threshold = kDefaultZeroThreshold) {
  if (spec.d != basis.d()) throw ValidationError("sample_path: spectrum and basis dimensions differ");
  const int l_max = std::min(spec.l_max(), basis.l_max());
  double top = 0;
  for (double m : spec.mu) top = std::max(top, m);
  std::vector<double> c(basis.size(), 0.0);
  for (int l = 0; l <= l_max; ++l) {
    if (!(spec.mu[l] > zero_rel_threshold * top)) continue;
    const double amp = std::sqrt(spec.mu[l]);
    for (int i = 0; i < basis.count(l); ++i)
      c[basis.offset(l) + i] = amp * counter_normal(seed, static_cast<std::uint64_t>(l), static_cast<std::uint64_t>(i));
  }
  return GPPath(basis, std::move(c));
}

/// Points on S^1 (n equispaced angles) or S^2 (n x 2n latitude-longitude grid).
inline std::vector<std::vector<double>> sphere_grid(int d, int n) {
  if (n < 1) throw ValidationError("sphere_grid: n must be >= 1");
  std::vector<std::vector<double>> pts;
  const double pi = std::numbers::pi;
  if (d == 1) {
    for (int j = 0; j < n; ++j) {
      const double th = 2 * pi * j / n;
      pts.push_back({std::cos(th), std::sin(th)});
    }
  } else if (d == 2) {
    for (int a = 0; a < n; ++a) {
      const double th = pi * (a + 0.5) / n;
      for (int b = 0; b < 2 * n; ++b) {
        const double ph = pi * b / n;
        pts.push_back({std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)});
      }
    }
  } else {
    throw ValidationError("sphere_grid: only d = 1 and d = 2 are supported");
  }
  return pts;
}

// ---------------------------------------------------------------------------
// Sobolev series

enum class Verdict { convergent, divergent, inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::convergent: return "convergent";
    case Verdict::divergent: return "divergent";
    default: return "inconclusive";
  }
}

struct SobolevSeries {
  double r = 0;
  std::vector<double> increments;    ///< (1+l)^{2r} mu_l N_{l,d}
  std::vector<double> partial_sums;  ///< S_L
  double tail_exponent = 0;          ///< fitted exponent of the increments
  Verdict verdict = Verdict::inconclusive;
  double threshold_estimate = 0;  ///< r at which the tail exponent crosses -1
};

struct SobolevOptions {
  int l_lo = 16;
  int l_hi = -1;  ///< -1: l_max / 2
  double zero_rel_threshold = kDefaultZeroThreshold;
  bool strict = false;  ///< throw InconclusiveTail instead of returning that verdict
};

namespace detail {

/// Slope of log(mu_l N_l) on log(1 + l) over the tail window.
inline double tail_slope(const Spectrum& spec, const SobolevOptions& opt) {
  const int hi = opt.l_hi < 0 ? spec.l_max() / 2 : opt.l_hi;
  if (opt.l_lo < 0 || hi < opt.l_lo || hi > spec.l_max()) throw ValidationError("sobolev_series: bad tail window");
  double top = 0;
  for (double m : spec.mu) top = std::max(top, m);
  std::vector<double> xs, ys;
  for (int l = opt.l_lo; l <= hi; ++l) {
    if (!(spec.mu[l] > opt.zero_rel_threshold * top)) continue;
    xs.push_back(std::log1p(static_cast<double>(l)));
    ys.push_back(std::log(spec.mu[l] * spec.multiplicities[l]));
  }
  if (xs.size() < 5) throw InsufficientData("sobolev_series: fewer than 5 positive eigenvalues in the tail window");
  const double k = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / k;
    my += ys[i] / k;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

inline Verdict verdict_for(double exponent) {
  if (exponent < -1.1) return Verdict::convergent;
  if (exponent > -0.9) return Verdict::divergent;
  return Verdict::inconclusive;
}

}  // namespace detail

/// Partial sums of sum_l (1+l)^{2r} mu_l N_{l,d}, the expected squared H^r
/// norm of a path. Convergent iff the increments decay faster than 1/l.
inline SobolevSeries sobolev_series(const Spectrum& spec, double r, const SobolevOptions& opt = {}) {
  if (!std::isfinite(r)) throw ValidationError("sobolev_series: r must be finite");
  SobolevSeries s;
  s.r = r;
  long double acc = 0;
  for (int l = 0; l <= spec.l_max(); ++l) {
    const double inc = std::pow(1.0 + l, 2 * r) * std::max(0.0, spec.mu[l]) * spec.multiplicities[l];
    s.increments.push_back(inc);
    acc += inc;
    s.partial_sums.push_back(static_cast<double>(acc));
  }
  const double slope = detail::tail_slope(spec, opt);
  s.tail_exponent = 2 * r + slope;
  s.threshold_estimate = (-1 - slope) / 2;
  s.verdict = detail::verdict_for(s.tail_exponent);
  if (opt.strict && s.verdict == Verdict::inconclusive)
    throw InconclusiveTail("sobolev_series: tail exponent " + std::to_string(s.tail_exponent) + " is within 0.1 of -1");
  return s;
}

/// Bisection on r in [lo, hi] for the order at which the series switches
/// from convergent to divergent.
inline double sobolev_threshold(const Spectrum& spec, double lo = 0.5, double hi = 4.0, double tol = 1e-4,
                                const SobolevOptions& opt = {}) {
  if (!(lo < hi)) throw ValidationError("sobolev_threshold: empty bracket");
  const double slope = detail::tail_slope(spec, opt);
  auto exponent = [slope](double r) { return 2 * r + slope; };
  if (exponent(lo) >= -1 || exponent(hi) <= -1)
    throw InconclusiveTail("sobolev_threshold: no sign change of the tail exponent in [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (exponent(mid) < -1 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace nks
