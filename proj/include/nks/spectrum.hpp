#pragma once

// Eigenvalues of dot-product kernels on S^d (Funk-Hecke), power-law decay
// fits, and predicted decay rates for NNGP/NTK spectra.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "nks/activations.hpp"
#include "nks/errors.hpp"
#include "nks/kernels.hpp"
#include "nks/parallel.hpp"
#include "nks/quadrature.hpp"

namespace nks {

/// P_{l,d}(t), the Gegenbauer polynomial for S^d normalized by P(1) = 1.
inline double gegenbauer_p(int l, int d, double t) {
  if (l < 0) throw ValidationError("gegenbauer_p: l must be >= 0");
  if (d < 1) throw ValidationError("gegenbauer_p: d must be >= 1");
  if (l == 0) return 1.0;
  double p0 = 1, p1 = t;
  for (int k = 1; k < l; ++k) {
    const double p2 = ((2.0 * k + d - 1) * t * p1 - k * p0) / (k + d - 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

/// P_{0,d}(t) .. P_{l_max,d}(t).
inline void gegenbauer_all(int l_max, int d, long double t, std::vector<long double>& out) {
  out.resize(l_max + 1);
  out[0] = 1;
  if (l_max >= 1) out[1] = t;
  for (int k = 1; k < l_max; ++k) out[k + 1] = ((2.0L * k + d - 1) * t * out[k] - k * out[k - 1]) / (k + d - 1.0L);
}

/// Dimension N_{l,d} of the degree-l spherical harmonics on S^d.
inline double multiplicity(int l, int d) {
  if (l < 0) throw ValidationError("multiplicity: l must be >= 0");
  if (d < 1) throw ValidationError("multiplicity: d must be >= 1");
  if (l == 0) return 1.0;
  // C(l+d-1, l) in log space keeps large (l, d) finite
  const double log_binom = std::lgamma(l + d + 0.0) - std::lgamma(l + 1.0) - std::lgamma(d + 0.0);
  return std::round((2.0 * l + d - 1) / (l + d - 1.0) * std::exp(log_binom));
}

struct Spectrum {
  int d = 2;
  std::vector<double> mu;
  std::vector<double> multiplicities;
  int n_quad = 0;
  double mercer_residual = 0;  ///< max |sum mu_l N_l P_l(t) - kappa(t)| on the check grid

  int l_max() const { return static_cast<int>(mu.size()) - 1; }

  double reconstruct(double t) const {
    std::vector<long double> p;
    gegenbauer_all(l_max(), d, t, p);
    long double s = 0;
    for (int l = 0; l <= l_max(); ++l) s += static_cast<long double>(mu[l]) * multiplicities[l] * p[l];
    return static_cast<double>(s);
  }
};

struct SpectrumOptions {
  bool check_mercer = true;
  double mercer_tolerance = 1e-5;  ///< relative to kappa(1)
  int mercer_points = 50;          ///< equispaced in [-0.9, 0.9]
};

inline constexpr int kDefaultQuadratureNodes = 1000;
inline constexpr int kDefaultLMax = 256;

/// mu_l = int kappa(t) P_{l,d}(t) w_d(t) dt with the probability weight
/// w_d ~ (1 - t^2)^(d/2 - 1), so that kappa(t) = sum_l mu_l N_{l,d} P_{l,d}(t).
inline Spectrum eigenvalues(const std::function<double(double)>& kappa, int d, int l_max = kDefaultLMax,
                            int n_quad = kDefaultQuadratureNodes, const SpectrumOptions& opt = {}) {
  if (d < 1) throw ValidationError("eigenvalues: d must be >= 1");
  if (l_max < 0) throw ValidationError("eigenvalues: l_max must be >= 0");
  if (n_quad < 2 * l_max) throw ValidationError("eigenvalues: n_quad must be >= 2 l_max");
  const QuadratureRule& rule = sphere_rule(n_quad, d);
  std::vector<double> kv(rule.size());
  parallel_for(rule.size(), [&](std::size_t i) { kv[i] = kappa(rule.nodes[i]); });

  // Accumulate per node block, then reduce blocks in order.
  const std::size_t n = rule.size();
  const std::size_t blocks = std::min<std::size_t>(n, 32);
  std::vector<std::vector<long double>> partial(blocks, std::vector<long double>(l_max + 1, 0.0L));
  parallel_for(blocks, [&](std::size_t b) {
    std::vector<long double> p;
    for (std::size_t i = b * n / blocks; i < (b + 1) * n / blocks; ++i) {
      gegenbauer_all(l_max, d, rule.nodes[i], p);
      const long double wk = static_cast<long double>(rule.weights[i]) * kv[i];
      for (int l = 0; l <= l_max; ++l) partial[b][l] += wk * p[l];
    }
  });
  Spectrum s;
  s.d = d;
  s.n_quad = n_quad;
  s.mu.assign(l_max + 1, 0.0);
  s.multiplicities.resize(l_max + 1);
  for (int l = 0; l <= l_max; ++l) {
    long double v = 0;
    for (const auto& p : partial) v += p[l];
    s.mu[l] = static_cast<double>(v);
    s.multiplicities[l] = multiplicity(l, d);
  }
  if (opt.check_mercer && opt.mercer_points > 0) {
    const double k1 = kappa(1.0);
    std::vector<double> resid(opt.mercer_points);
    parallel_for(resid.size(), [&](std::size_t j) {
      const double t = opt.mercer_points == 1 ? 0.0 : -0.9 + 1.8 * j / (opt.mercer_points - 1);
      resid[j] = std::fabs(s.reconstruct(t) - kappa(t));
    });
    s.mercer_residual = *std::max_element(resid.begin(), resid.end());
    if (s.mercer_residual > opt.mercer_tolerance * std::fabs(k1)) {
      char msg[128];
      std::snprintf(msg, sizeof msg, "Mercer reconstruction residual %.3g exceeds %.3g * kappa(1); raise l_max",
                    s.mercer_residual, opt.mercer_tolerance);
      throw QuadratureUnderResolved(msg);
    }
  }
  return s;
}

inline Spectrum eigenvalues(const KernelFunction& k, int d, int l_max = kDefaultLMax, int n_quad = kDefaultQuadratureNodes,
                            const SpectrumOptions& opt = {}) {
  return eigenvalues([&k](double t) { return k(t); }, d, l_max, n_quad, opt);
}

// ---------------------------------------------------------------------------
// Decay fits

enum class EigenParity { even, odd, all };

inline std::string to_string(EigenParity p) {
  switch (p) {
    case EigenParity::even: return "even";
    case EigenParity::odd: return "odd";
    default: return "all";
  }
}

inline bool matches(EigenParity p, int l) {
  return p == EigenParity::all || (p == EigenParity::even) == (l % 2 == 0);
}

struct DecayFit {
  EigenParity parity = EigenParity::all;
  int l_lo = 0, l_hi = 0;
  double slope = 0;  ///< mu_l ~ (l+1)^slope
  double intercept = 0;
  double max_residual = 0;  ///< in log space
  int n_points = 0;
  double zero_threshold = 0;
  std::vector<int> zero_set;  ///< indices in the window below the threshold
};

inline constexpr double kDefaultZeroThreshold = 1e-12;

/// Degrees of the parity in [l_lo, l_hi] whose eigenvalue is at or below
/// zero_rel_threshold times the largest eigenvalue of that parity.
inline std::vector<int> zero_set(const Spectrum& spec, EigenParity parity, int l_lo, int l_hi,
                                 double zero_rel_threshold = kDefaultZeroThreshold) {
  if (l_lo < 0 || l_hi < l_lo || l_hi > spec.l_max()) throw ValidationError("zero_set: window outside the spectrum");
  double top = 0;
  for (int l = 0; l <= spec.l_max(); ++l)
    if (matches(parity, l)) top = std::max(top, spec.mu[l]);
  std::vector<int> out;
  for (int l = l_lo; l <= l_hi; ++l)
    if (matches(parity, l) && (spec.mu[l] <= zero_rel_threshold * top || spec.mu[l] <= 0)) out.push_back(l);
  return out;
}

/// Least squares of log mu_l on log(l+1) over the window and parity.
/// Eigenvalues at or below zero_rel_threshold times the largest eigenvalue
/// of that parity are treated as zero and reported in zero_set.
inline DecayFit fit_decay(const Spectrum& spec, EigenParity parity, int l_lo, int l_hi,
                          double zero_rel_threshold = kDefaultZeroThreshold) {
  if (l_lo < 0 || l_hi < l_lo || l_hi > spec.l_max())
    throw ValidationError("fit_decay: window [" + std::to_string(l_lo) + ", " + std::to_string(l_hi) +
                          "] is empty or outside the spectrum");
  double top = 0;
  for (int l = 0; l <= spec.l_max(); ++l)
    if (matches(parity, l)) top = std::max(top, spec.mu[l]);
  DecayFit fit;
  fit.parity = parity;
  fit.l_lo = l_lo;
  fit.l_hi = l_hi;
  fit.zero_threshold = zero_rel_threshold * top;
  std::vector<double> xs, ys;
  for (int l = l_lo; l <= l_hi; ++l) {
    if (!matches(parity, l)) continue;
    if (spec.mu[l] <= fit.zero_threshold || spec.mu[l] <= 0) {
      fit.zero_set.push_back(l);
      continue;
    }
    xs.push_back(std::log(l + 1.0));
    ys.push_back(std::log(spec.mu[l]));
  }
  fit.n_points = static_cast<int>(xs.size());
  if (xs.size() < 5)
    throw InsufficientData("fit_decay: only " + std::to_string(xs.size()) + " eigenvalues above the zero threshold in the window");
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
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < xs.size(); ++i)
    fit.max_residual = std::max(fit.max_residual, std::fabs(ys[i] - fit.intercept - fit.slope * xs[i]));
  return fit;
}

// ---------------------------------------------------------------------------
// Predictions

enum class DecayClass { power_law, superpolynomial, finite_rank, zero };

inline std::string to_string(DecayClass c) {
  switch (c) {
    case DecayClass::power_law: return "power_law";
    case DecayClass::superpolynomial: return "superpolynomial";
    case DecayClass::finite_rank: return "finite_rank";
    default: return "zero";
  }
}

struct ExponentPrediction {
  KernelKind kind = KernelKind::nngp;
  EigenParity parity = EigenParity::all;
  DecayClass decay = DecayClass::power_law;
  /// mu_l ~ (l+1)^exponent for power_law; NaN otherwise.
  double exponent = std::numeric_limits<double>::quiet_NaN();
  /// Largest l of the parity with mu_l > 0 (finite_rank), -1 if none.
  long long max_degree = -1;
  int smoothness = kInfiniteSmoothness;  ///< of the simplified activation
  std::string simplified;                ///< "phi", "phi_even" or "phi_odd"
  std::string regime;  ///< vanishing, polynomial, smooth, discontinuous or finite_smoothness
};

namespace detail {

inline double degree_or_minus_inf(int deg) {
  return deg == kZeroPolynomialDegree ? -std::numeric_limits<double>::infinity() : static_cast<double>(deg);
}

/// Largest l <= N with l = r mod 2, or -1.
inline long long largest_with_parity(double N, int r) {
  if (!(N >= r)) return -1;
  auto l = static_cast<long long>(std::floor(std::min(N, 9.0e18)));
  if ((l - r) % 2 != 0) --l;
  return l;
}

inline ExponentPrediction predict_single(const ActivationSpec& act, const NetworkConfig& cfg, KernelKind kind, int r, int d,
                                         Parity act_parity) {
  ExponentPrediction p;
  p.kind = kind;
  p.parity = r == 0 ? EigenParity::even : EigenParity::odd;
  const double sigma = kind == KernelKind::nngp ? cfg.nngp_bias() : cfg.sigma_b2;
  const bool simplify = sigma == 0.0 && (cfg.depth == 2 || act_parity != Parity::neither);
  ActivationSpec tilde = act;
  p.simplified = "phi";
  if (simplify) {
    auto parts = even_odd_parts(act);
    tilde = r == 0 ? parts.first : parts.second;
    p.simplified = r == 0 ? "phi_even" : "phi_odd";
  }
  const PolynomialInfo poly = polynomial_info(tilde);
  if (poly.is_polynomial) {
    p.smoothness = kInfiniteSmoothness;
    if (poly.degree == kZeroPolynomialDegree) {
      p.regime = "vanishing";
      p.decay = DecayClass::zero;
      p.max_degree = (r == 0 && sigma > 0) ? 0 : -1;
      if (p.max_degree == 0) p.decay = DecayClass::finite_rank;
      return p;
    }
    p.regime = "polynomial";
    p.decay = DecayClass::finite_rank;
    const double de = degree_or_minus_inf(poly.even_degree);
    const double dodd = degree_or_minus_inf(poly.odd_degree);
    const double e = cfg.depth - 1.0;
    double n_even, n_odd;
    if (sigma > 0) {
      if (de > dodd) {
        n_even = std::pow(de, e);
        n_odd = std::pow(de, e) - 1;
      } else {
        n_even = std::pow(dodd, e) - 1;
        n_odd = std::pow(dodd, e);
      }
    } else {
      if (de > dodd) {
        n_even = std::pow(de, e);
        n_odd = std::pow(de, e) - de + dodd;
      } else {
        n_even = std::pow(dodd, e) - dodd + de;
        n_odd = std::pow(dodd, e);
      }
    }
    p.max_degree = largest_with_parity(r == 0 ? n_even : n_odd, r);
    if (p.max_degree < 0) p.decay = DecayClass::zero;
    return p;
  }
  const int s = smoothness(tilde);
  p.smoothness = s;
  if (s == kInfiniteSmoothness) {
    p.regime = "smooth";
    p.decay = DecayClass::superpolynomial;
    return p;
  }
  p.decay = DecayClass::power_law;
  if (kind == KernelKind::nngp) {
    if (s == 0) {
      p.regime = "discontinuous";
      p.exponent = -(d + std::pow(2.0, 2 - cfg.depth));
    } else {
      p.regime = "finite_smoothness";
      p.exponent = -(d + 2.0 * s + 1);
    }
  } else {
    if (s == 0) throw NTKUndefined("the NTK is undefined for activations of smoothness 0");
    p.regime = "finite_smoothness";
    p.exponent = -(d + 2.0 * s - 1);
  }
  return p;
}

}  // namespace detail

/// Predicted eigenvalue behaviour of kappa^NNGP_L or kappa^NTK_L on S^d for
/// the eigenvalues of the given parity. For EigenParity::all the slower of
/// the two parities is reported.
inline ExponentPrediction predict_exponent(const ActivationSpec& act, const NetworkConfig& cfg, KernelKind kind,
                                           EigenParity parity, int d) {
  cfg.validate();
  if (d < 1) throw ValidationError("predict_exponent: d must be >= 1");
  if (cfg.depth < 2) throw ValidationError("predict_exponent: depth must be >= 2 (L = 1 kernels are linear)");
  if (kind == KernelKind::ntk && jump_is_nonzero(jump(act, 0), act, 0))
    throw NTKUndefined("activation '" + act.name + "' is discontinuous at 0; its NTK is undefined");
  const Parity ap = parity_of(act);
  if (parity != EigenParity::all) return detail::predict_single(act, cfg, kind, parity == EigenParity::even ? 0 : 1, d, ap);
  const auto e = detail::predict_single(act, cfg, kind, 0, d, ap);
  const auto o = detail::predict_single(act, cfg, kind, 1, d, ap);
  auto rank = [](const ExponentPrediction& p) {
    switch (p.decay) {
      case DecayClass::power_law: return 3;
      case DecayClass::superpolynomial: return 2;
      case DecayClass::finite_rank: return 1;
      default: return 0;
    }
  };
  ExponentPrediction out = rank(e) >= rank(o) ? e : o;
  if (e.decay == DecayClass::power_law && o.decay == DecayClass::power_law) out = e.exponent >= o.exponent ? e : o;
  if (e.decay == DecayClass::finite_rank && o.decay == DecayClass::finite_rank) out = e.max_degree >= o.max_degree ? e : o;
  if (out.decay == DecayClass::finite_rank) out.max_degree = std::max(e.max_degree, o.max_degree);
  out.parity = EigenParity::all;
  out.smoothness = std::min(e.smoothness, o.smoothness);
  out.regime = e.regime == o.regime ? e.regime : e.regime + "/" + o.regime;
  out.simplified = e.simplified == o.simplified ? e.simplified : e.simplified + "/" + o.simplified;
  return out;
}

}  // namespace nks
