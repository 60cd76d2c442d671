#pragma once

// Piecewise-smooth activation functions phi = (phi_-, phi_+) with a possible
// non-smoothness only at the origin, their one-sided derivative jets at 0,
// smoothness classification, even/odd parts and the built-in registry.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nks/errors.hpp"
#include "nks/polynomial.hpp"

namespace nks {

using RealFn = std::function<double(double)>;
/// k -> one-sided k-th derivative at the origin.
using JetFn = std::function<double(int)>;

inline constexpr int kInfiniteSmoothness = std::numeric_limits<int>::max();

/// One side of a piecewise activation.
struct Piece {
  RealFn f;
  RealFn df;                       ///< first derivative; empty means "differentiate numerically"
  std::optional<Polynomial> poly;  ///< exact form when the piece is a polynomial
  JetFn jet;                       ///< phi^(k)(0+/-); empty when unknown

  double derivative(double x) const {
    if (df) return df(x);
    const double h = 1e-6 * std::max(1.0, std::fabs(x));
    return (f(x + h) - f(x - h)) / (2 * h);
  }
};

struct ActivationSpec {
  std::string name;
  Piece neg;  ///< phi_- on x < 0
  Piece pos;  ///< phi_+ on x > 0
  /// Both pieces are restrictions of one smooth function on R, so every
  /// jump Delta_k vanishes.
  bool smooth_at_zero = false;
  std::optional<int> declared_smoothness;
  std::optional<int> polynomial_degree;  ///< kZeroPolynomialDegree encodes the zero function
  std::map<std::string, double> params;

  /// Midpoint of the one-sided limits at 0.
  double value_at_zero() const {
    const double right = pos.jet ? pos.jet(0) : pos.f(0.0);
    const double left = neg.jet ? neg.jet(0) : neg.f(0.0);
    return 0.5 * (right + left);
  }

  double operator()(double x) const {
    if (x > 0) return pos.f(x);
    if (x < 0) return neg.f(x);
    return value_at_zero();
  }

  bool has_exact_jets() const { return smooth_at_zero || (pos.jet && neg.jet) || (pos.poly && neg.poly); }
};

inline double evaluate(const ActivationSpec& act, double x) { return act(x); }

enum class Parity { even, odd, neither };

inline std::string to_string(Parity p) {
  switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    default: return "neither";
  }
}

/// Polynomial structure of a function on R.
struct PolynomialInfo {
  bool is_polynomial = false;
  int degree = 0;       ///< valid when is_polynomial; kZeroPolynomialDegree for zero
  int even_degree = 0;  ///< highest even power (kZeroPolynomialDegree if none)
  int odd_degree = 0;
};

struct SmoothnessReport {
  int smoothness = kInfiniteSmoothness;
  std::vector<double> deltas;  ///< Delta_k = phi^(k)(0+) - phi^(k)(0-)
  bool deltas_exact = true;    ///< analytic (true) or finite-difference estimates
  Parity parity = Parity::neither;
  int even_smoothness = kInfiniteSmoothness;
  int odd_smoothness = kInfiniteSmoothness;
  PolynomialInfo polynomial;
  PolynomialInfo even_polynomial;
  PolynomialInfo odd_polynomial;
};

// ---------------------------------------------------------------------------
// Jets and jumps

namespace detail {

/// One-sided k-th derivative at 0 of a piece, from the interpolating
/// polynomial through f(s*h), ..., f(s*m*h), over a ladder of steps.
/// Returns (estimate, noise) with noise the spread between neighbouring steps.
inline std::pair<double, double> one_sided_derivative(const RealFn& f, int k, double side) {
  const int m = k + 4;
  const double steps[] = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5};
  std::vector<double> est;
  for (double h : steps) {
    // Solve the Vandermonde system in the scaled variable y = x / (side*h).
    std::vector<std::vector<double>> a(m, std::vector<double>(m + 1));
    for (int j = 0; j < m; ++j) {
      const double y = j + 1;
      double p = 1;
      for (int i = 0; i < m; ++i) {
        a[j][i] = p;
        p *= y;
      }
      a[j][m] = f(side * h * y);
    }
    for (int c = 0; c < m; ++c) {
      int piv = c;
      for (int r = c + 1; r < m; ++r)
        if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
      std::swap(a[c], a[piv]);
      for (int r = 0; r < m; ++r) {
        if (r == c) continue;
        const double fct = a[r][c] / a[c][c];
        for (int i = c; i <= m; ++i) a[r][i] -= fct * a[c][i];
      }
    }
    const double ck = a[k][m] / a[k][k];
    est.push_back(std::tgamma(k + 1.0) * ck / std::pow(side * h, k));
  }
  double best = est[0], noise = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < est.size(); ++i) {
    const double spread = std::fabs(est[i + 1] - est[i]);
    if (spread < noise) {
      noise = spread;
      best = est[i + 1];
    }
  }
  return {best, noise};
}

inline std::optional<double> exact_jet(const Piece& p, int k) {
  if (p.jet) return p.jet(k);
  if (p.poly) return p.poly->derivative_at_zero(k);
  return std::nullopt;
}

}  // namespace detail

/// A jump Delta_k(phi) with its uncertainty (0 for analytic values).
struct Jump {
  double value = 0;
  double noise = 0;
  double scale = 0;  ///< magnitude of the one-sided derivatives
};

inline Jump jump(const ActivationSpec& act, int k) {
  if (act.smooth_at_zero) return {0.0, 0.0, 0.0};
  const auto r = detail::exact_jet(act.pos, k);
  const auto l = detail::exact_jet(act.neg, k);
  if (r && l) return {*r - *l, 0.0, std::max(std::fabs(*r), std::fabs(*l))};
  const auto [re, rn] = r ? std::pair{*r, 0.0} : detail::one_sided_derivative(act.pos.f, k, +1.0);
  const auto [le, ln] = l ? std::pair{*l, 0.0} : detail::one_sided_derivative(act.neg.f, k, -1.0);
  return {re - le, rn + ln, std::max(std::fabs(re), std::fabs(le))};
}

/// Is Delta_k nonzero? Exact jets use a roundoff-level tolerance; numeric
/// estimates must clear 1e-4 (1 + scale) and their own noise.
inline bool jump_is_nonzero(const Jump& j, const ActivationSpec& act, int k) {
  if (j.noise == 0.0) return std::fabs(j.value) > 1e-12 * (1 + j.scale);
  const double threshold = 1e-4 * (1 + j.scale);
  if (std::fabs(j.value) > threshold && std::fabs(j.value) > 10 * j.noise) return true;
  if (std::fabs(j.value) <= threshold && j.noise < threshold) return false;
  std::ostringstream msg;
  msg << "cannot separate Delta_" << k << "(" << act.name << ") = " << j.value << " from estimator noise " << j.noise;
  throw AmbiguousSmoothness(msg.str());
}

/// smallest k <= max_order with Delta_k != 0, or kInfiniteSmoothness.
inline int smoothness(const ActivationSpec& act, int max_order = 8) {
  if (act.smooth_at_zero) return kInfiniteSmoothness;
  if (act.pos.poly && act.neg.poly) {
    // A difference of polynomials has finitely many nonzero jumps.
    const int deg = std::max(act.pos.poly->degree(), act.neg.poly->degree());
    for (int k = 0; k <= deg; ++k)
      if (jump_is_nonzero(jump(act, k), act, k)) return k;
    return kInfiniteSmoothness;
  }
  for (int k = 0; k <= max_order; ++k)
    if (jump_is_nonzero(jump(act, k), act, k)) return k;
  if (act.declared_smoothness) return *act.declared_smoothness;
  return kInfiniteSmoothness;
}

// ---------------------------------------------------------------------------
// Polynomial detection

/// Exact when both pieces carry polynomial forms; otherwise decided from
/// Chebyshev coefficients of phi on [-6, 6] (degree cap 16).
inline PolynomialInfo polynomial_info(const ActivationSpec& act) {
  PolynomialInfo info;
  if (act.polynomial_degree && *act.polynomial_degree == kZeroPolynomialDegree) {
    info.is_polynomial = true;
    info.degree = info.even_degree = info.odd_degree = kZeroPolynomialDegree;
    return info;
  }
  if (act.pos.poly && act.neg.poly) {
    if (*act.pos.poly == *act.neg.poly) {
      const auto& p = *act.pos.poly;
      info.is_polynomial = true;
      info.degree = p.degree();
      info.even_degree = p.parity_degree(0);
      info.odd_degree = p.parity_degree(1);
    }
    return info;
  }
  constexpr int n = 64, cap = 16;
  constexpr double half_width = 6.0;
  std::vector<double> fx(n);
  double scale = 0;
  for (int j = 0; j < n; ++j) {
    const double theta = std::numbers::pi * (j + 0.5) / n;
    fx[j] = act(half_width * std::cos(theta));
    scale = std::max(scale, std::fabs(fx[j]));
  }
  const double tol = 1e-10 * std::max(1.0, scale);
  int degree = kZeroPolynomialDegree, even_deg = kZeroPolynomialDegree, odd_deg = kZeroPolynomialDegree;
  for (int k = 0; k < n; ++k) {
    double c = 0;
    for (int j = 0; j < n; ++j) c += fx[j] * std::cos(k * std::numbers::pi * (j + 0.5) / n);
    c *= (k == 0 ? 1.0 : 2.0) / n;
    if (std::fabs(c) > tol) {
      if (k > cap) return info;
      degree = k;
      (k % 2 == 0 ? even_deg : odd_deg) = k;
    }
  }
  info.is_polynomial = true;
  info.degree = degree;
  info.even_degree = even_deg;
  info.odd_degree = odd_deg;
  return info;
}

// ---------------------------------------------------------------------------
// Transformations

/// x -> lambda * phi(x).
inline ActivationSpec scaled(const ActivationSpec& act, double lambda) {
  auto wrap = [lambda](const Piece& p) {
    Piece q;
    q.f = [f = p.f, lambda](double x) { return lambda * f(x); };
    if (p.df) q.df = [df = p.df, lambda](double x) { return lambda * df(x); };
    if (p.poly) q.poly = p.poly->scaled(lambda);
    if (p.jet) q.jet = [j = p.jet, lambda](int k) { return lambda * j(k); };
    return q;
  };
  ActivationSpec r = act;
  r.name = act.name + "*" + std::to_string(lambda);
  r.neg = wrap(act.neg);
  r.pos = wrap(act.pos);
  if (lambda == 0.0) r.polynomial_degree = kZeroPolynomialDegree;
  return r;
}

/// x -> phi(a x) for a > 0. Smoothness is preserved and Delta_k scales by a^k.
inline ActivationSpec rescale(const ActivationSpec& act, double a) {
  if (!(a > 0)) throw ValidationError("rescale: factor must be positive");
  auto wrap = [a](const Piece& p) {
    Piece q;
    q.f = [f = p.f, a](double x) { return f(a * x); };
    if (p.df) q.df = [df = p.df, a](double x) { return a * df(a * x); };
    if (p.poly) q.poly = p.poly->rescaled(a);
    if (p.jet) q.jet = [j = p.jet, a](int k) { return std::pow(a, k) * j(k); };
    return q;
  };
  ActivationSpec r = act;
  r.name = act.name + "(" + std::to_string(a) + "x)";
  r.neg = wrap(act.neg);
  r.pos = wrap(act.pos);
  return r;
}

/// Even and odd parts (phi(x) +- phi(-x)) / 2.
inline std::pair<ActivationSpec, ActivationSpec> even_odd_parts(const ActivationSpec& act) {
  auto part = [&act](double sign, const std::string& suffix) {
    ActivationSpec r;
    r.name = act.name + suffix;
    r.smooth_at_zero = act.smooth_at_zero;
    r.params = act.params;
    const Piece& P = act.pos;
    const Piece& N = act.neg;
    // pos piece: (phi_+(x) + sign * phi_-(-x)) / 2, neg piece mirrors it
    r.pos.f = [p = P.f, n = N.f, sign](double x) { return 0.5 * (p(x) + sign * n(-x)); };
    r.neg.f = [p = P.f, n = N.f, sign](double x) { return 0.5 * (n(x) + sign * p(-x)); };
    r.pos.df = [P, N, sign](double x) { return 0.5 * (P.derivative(x) - sign * N.derivative(-x)); };
    r.neg.df = [P, N, sign](double x) { return 0.5 * (N.derivative(x) - sign * P.derivative(-x)); };
    if (P.poly && N.poly) {
      r.pos.poly = Polynomial::combine(*P.poly, 0.5, *N.poly, 0.5 * sign);
      r.neg.poly = Polynomial::combine(*N.poly, 0.5, *P.poly, 0.5 * sign);
    }
    const bool jets_known = (P.jet || P.poly) && (N.jet || N.poly);
    if (jets_known) {
      r.pos.jet = [P, N, sign](int k) {
        const double s = (k % 2 == 0) ? 1.0 : -1.0;
        return 0.5 * (*detail::exact_jet(P, k) + sign * s * *detail::exact_jet(N, k));
      };
      r.neg.jet = [P, N, sign](int k) {
        const double s = (k % 2 == 0) ? 1.0 : -1.0;
        return 0.5 * (*detail::exact_jet(N, k) + sign * s * *detail::exact_jet(P, k));
      };
    }
    return r;
  };
  return {part(+1.0, "_even"), part(-1.0, "_odd")};
}

/// Pseudo-derivative phi' (pieces differentiated, jets shifted by one).
/// Requires phi continuous at 0.
inline ActivationSpec derivative(const ActivationSpec& act) {
  if (jump_is_nonzero(jump(act, 0), act, 0))
    throw NotPseudoDifferentiable("activation '" + act.name + "' is discontinuous at 0 and has no pseudo-derivative");
  auto wrap = [](const Piece& p) {
    Piece q;
    q.f = [p](double x) { return p.derivative(x); };
    if (p.poly) {
      q.poly = p.poly->derivative();
      q.df = [d2 = p.poly->derivative().derivative()](double x) { return d2(x); };
    }
    if (p.jet) q.jet = [j = p.jet](int k) { return j(k + 1); };
    else if (p.poly) q.jet = [poly = *p.poly](int k) { return poly.derivative_at_zero(k + 1); };
    return q;
  };
  ActivationSpec r;
  r.name = act.name + "'";
  r.smooth_at_zero = act.smooth_at_zero;
  r.params = act.params;
  r.neg = wrap(act.neg);
  r.pos = wrap(act.pos);
  if (act.declared_smoothness && *act.declared_smoothness != kInfiniteSmoothness)
    r.declared_smoothness = *act.declared_smoothness - 1;
  else
    r.declared_smoothness = act.declared_smoothness;
  if (act.polynomial_degree) {
    const int d = *act.polynomial_degree;
    r.polynomial_degree = d <= 0 ? kZeroPolynomialDegree : d - 1;
  }
  return r;
}

/// Value of the left-continuous derivative: phi'(x) for x != 0 and
/// phi'(0-) at the origin (the finite-width convention).
inline double left_derivative(const ActivationSpec& act, double x) {
  if (x > 0) return act.pos.derivative(x);
  if (x < 0) return act.neg.derivative(x);
  if (act.neg.jet) return act.neg.jet(1);
  if (act.neg.poly) return act.neg.poly->derivative_at_zero(1);
  return act.neg.derivative(0.0);
}

// ---------------------------------------------------------------------------
// Classification

/// Parity of phi judged on a sample grid of [-6, 6].
inline Parity parity_of(const ActivationSpec& act) {
  double scale = 0, even_dev = 0, odd_dev = 0;
  for (int i = 1; i <= 240; ++i) {
    const double x = 6.0 * i / 240.0;
    const double a = act(x), b = act(-x);
    scale = std::max({scale, std::fabs(a), std::fabs(b)});
    odd_dev = std::max(odd_dev, std::fabs(a + b));   // zero for odd phi
    even_dev = std::max(even_dev, std::fabs(a - b));  // zero for even phi
  }
  odd_dev = std::max(odd_dev, 2 * std::fabs(act.value_at_zero()));
  const double tol = 1e-12 * (1 + scale);
  if (even_dev <= tol) return Parity::even;
  if (odd_dev <= tol) return Parity::odd;
  return Parity::neither;
}

inline SmoothnessReport classify(const ActivationSpec& act, int max_order = 6) {
  if (max_order < 0) throw ValidationError("classify: max_order must be >= 0");
  SmoothnessReport rep;
  bool exact = true;
  for (int k = 0; k <= max_order; ++k) {
    const Jump j = jump(act, k);
    if (j.noise != 0.0) exact = false;
    rep.deltas.push_back(j.value);
  }
  rep.deltas_exact = exact;
  rep.smoothness = smoothness(act, max_order);
  rep.parity = parity_of(act);
  const auto [even, odd] = even_odd_parts(act);
  rep.polynomial = polynomial_info(act);
  rep.even_polynomial = polynomial_info(even);
  rep.odd_polynomial = polynomial_info(odd);
  auto part_smoothness = [max_order](const ActivationSpec& part, const PolynomialInfo& poly) {
    if (poly.is_polynomial) return kInfiniteSmoothness;
    return smoothness(part, std::max(max_order, 8));
  };
  rep.even_smoothness = part_smoothness(even, rep.even_polynomial);
  rep.odd_smoothness = part_smoothness(odd, rep.odd_polynomial);
  if (rep.polynomial.is_polynomial) rep.smoothness = kInfiniteSmoothness;
  return rep;
}

// ---------------------------------------------------------------------------
// Reference activations and the registry

/// s_k(x) = sgn(x) x^k / (2 k!), the canonical activation with a single
/// jump Delta_j(s_k) = delta_jk.
inline ActivationSpec reference_activation(int k) {
  if (k < 0) throw ValidationError("reference_activation: k must be >= 0");
  const double c = 0.5 / std::tgamma(k + 1.0);
  Polynomial mono;
  mono.coeffs.assign(k + 1, 0.0);
  mono.coeffs[k] = c;
  ActivationSpec r;
  r.name = "s" + std::to_string(k);
  r.pos.poly = mono;
  r.neg.poly = mono.scaled(-1.0);
  r.pos.f = [c, k](double x) { return c * std::pow(x, k); };
  r.neg.f = [c, k](double x) { return -c * std::pow(x, k); };
  if (k == 0) {
    r.pos.df = r.neg.df = [](double) { return 0.0; };
  } else {
    r.pos.df = [c, k](double x) { return c * k * std::pow(x, k - 1); };
    r.neg.df = [c, k](double x) { return -c * k * std::pow(x, k - 1); };
  }
  r.pos.jet = [k](int j) { return j == k ? 0.5 : 0.0; };
  r.neg.jet = [k](int j) { return j == k ? -0.5 : 0.0; };
  r.declared_smoothness = k;
  r.params["k"] = k;
  return r;
}

namespace detail {

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
inline double logistic(double x) { return x >= 0 ? 1 / (1 + std::exp(-x)) : std::exp(x) / (1 + std::exp(x)); }

inline ActivationSpec smooth_activation(std::string name, RealFn f, RealFn df, std::vector<double> taylor_derivs) {
  ActivationSpec r;
  r.name = std::move(name);
  r.smooth_at_zero = true;
  r.declared_smoothness = kInfiniteSmoothness;
  r.pos.f = r.neg.f = std::move(f);
  r.pos.df = r.neg.df = std::move(df);
  // Derivatives at 0 are tabulated to order 6; beyond that they are unused
  // because every jump of a smooth function vanishes.
  JetFn jet = [t = std::move(taylor_derivs)](int k) {
    return k < static_cast<int>(t.size()) ? t[k] : std::numeric_limits<double>::quiet_NaN();
  };
  r.pos.jet = r.neg.jet = jet;
  return r;
}

inline ActivationSpec polynomial_activation(std::string name, Polynomial p) {
  ActivationSpec r;
  r.name = std::move(name);
  r.smooth_at_zero = true;
  r.declared_smoothness = kInfiniteSmoothness;
  r.polynomial_degree = p.degree();
  r.pos.poly = r.neg.poly = p;
  r.pos.f = r.neg.f = [p](double x) { return p(x); };
  r.pos.df = r.neg.df = [d = p.derivative()](double x) { return d(x); };
  r.pos.jet = r.neg.jet = [p](int k) { return p.derivative_at_zero(k); };
  return r;
}

inline Polynomial linear(double slope) { return Polynomial{{0.0, slope}}; }

inline double param_or(const std::map<std::string, double>& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

}  // namespace detail

/// Standard SELU constants.
inline constexpr double kSeluLambda = 1.0507009873554805;
inline constexpr double kSeluAlpha = 1.6732632423543772;

inline std::vector<std::string> registry_names() {
  return {"relu", "leakyrelu", "selu",    "elu",  "celu",     "repu:m", "heaviside", "tanh",
          "sigmoid", "gelu",   "silu",    "rbf",  "softplus", "sin",    "sk:k",      "poly:c0,c1,..."};
}

/// Builds a registry activation from its lowercase identifier, e.g. "relu",
/// "repu:3", "sk:2", "poly:0,0,1". Parameters: leakyrelu {slope},
/// elu/celu {alpha}, selu {lambda, alpha}.
inline ActivationSpec make_activation(const std::string& id, const std::map<std::string, double>& params = {}) {
  using detail::param_or;
  const auto colon = id.find(':');
  const std::string base = id.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : id.substr(colon + 1);
  auto require_int_arg = [&](int lo) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(arg, &used);
      if (used != arg.size() || v < lo) throw std::invalid_argument(arg);
      return v;
    } catch (const std::exception&) {
      throw UnknownActivation("activation '" + id + "' needs an integer argument >= " + std::to_string(lo));
    }
  };

  ActivationSpec r;
  if (base == "relu" && arg.empty()) {
    r.name = "relu";
    r.pos = {[](double x) { return x; }, [](double) { return 1.0; }, detail::linear(1.0), [](int k) { return k == 1 ? 1.0 : 0.0; }};
    r.neg = {[](double) { return 0.0; }, [](double) { return 0.0; }, Polynomial{{0.0}}, [](int) { return 0.0; }};
    r.declared_smoothness = 1;
  } else if (base == "leakyrelu" && arg.empty()) {
    const double slope = param_or(params, "slope", 0.01);
    if (slope == 1.0) throw ValidationError("leakyrelu: slope 1 is the identity");
    r.name = "leakyrelu";
    r.params["slope"] = slope;
    r.pos = {[](double x) { return x; }, [](double) { return 1.0; }, detail::linear(1.0), [](int k) { return k == 1 ? 1.0 : 0.0; }};
    r.neg = {[slope](double x) { return slope * x; }, [slope](double) { return slope; }, detail::linear(slope),
             [slope](int k) { return k == 1 ? slope : 0.0; }};
    r.declared_smoothness = 1;
  } else if (base == "selu" && arg.empty()) {
    const double lam = param_or(params, "lambda", kSeluLambda);
    const double alpha = param_or(params, "alpha", kSeluAlpha);
    r.name = "selu";
    r.params = {{"lambda", lam}, {"alpha", alpha}};
    r.pos = {[lam](double x) { return lam * x; }, [lam](double) { return lam; }, detail::linear(lam),
             [lam](int k) { return k == 1 ? lam : 0.0; }};
    r.neg = {[lam, alpha](double x) { return lam * alpha * std::expm1(x); },
             [lam, alpha](double x) { return lam * alpha * std::exp(x); }, std::nullopt,
             [lam, alpha](int k) { return k == 0 ? 0.0 : lam * alpha; }};
  } else if ((base == "elu" || base == "celu") && arg.empty()) {
    const double alpha = param_or(params, "alpha", 1.0);
    if (!(alpha > 0)) throw ValidationError(base + ": alpha must be positive");
    r.name = base;
    r.params["alpha"] = alpha;
    r.pos = {[](double x) { return x; }, [](double) { return 1.0; }, detail::linear(1.0), [](int k) { return k == 1 ? 1.0 : 0.0; }};
    if (base == "elu") {
      r.neg = {[alpha](double x) { return alpha * std::expm1(x); }, [alpha](double x) { return alpha * std::exp(x); },
               std::nullopt, [alpha](int k) { return k == 0 ? 0.0 : alpha; }};
    } else {
      r.neg = {[alpha](double x) { return alpha * std::expm1(x / alpha); }, [alpha](double x) { return std::exp(x / alpha); },
               std::nullopt, [alpha](int k) { return k == 0 ? 0.0 : std::pow(alpha, 1 - k); }};
    }
  } else if (base == "repu") {
    const int m = require_int_arg(1);
    Polynomial mono;
    mono.coeffs.assign(m + 1, 0.0);
    mono.coeffs[m] = 1.0;
    r.name = id;
    r.params["m"] = m;
    r.pos = {[m](double x) { return std::pow(x, m); }, [m](double x) { return m * std::pow(x, m - 1); }, mono,
             [mono](int k) { return mono.derivative_at_zero(k); }};
    r.neg = {[](double) { return 0.0; }, [](double) { return 0.0; }, Polynomial{{0.0}}, [](int) { return 0.0; }};
    r.declared_smoothness = m;
  } else if (base == "heaviside" && arg.empty()) {
    r.name = "heaviside";
    r.pos = {[](double) { return 1.0; }, [](double) { return 0.0; }, Polynomial{{1.0}}, [](int k) { return k == 0 ? 1.0 : 0.0; }};
    r.neg = {[](double) { return 0.0; }, [](double) { return 0.0; }, Polynomial{{0.0}}, [](int) { return 0.0; }};
    r.declared_smoothness = 0;
  } else if (base == "sk") {
    r = reference_activation(require_int_arg(0));
  } else if (base == "poly") {
    Polynomial p;
    std::stringstream ss(arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t used = 0;
        p.coeffs.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw UnknownActivation("activation '" + id + "': bad coefficient '" + tok + "'");
      }
    }
    if (p.coeffs.empty()) throw UnknownActivation("activation '" + id + "' has no coefficients");
    if (p.degree() == kZeroPolynomialDegree) throw ValidationError("the zero function is not an admissible activation");
    r = detail::polynomial_activation(id, p);
  } else if (base == "tanh" && arg.empty()) {
    r = detail::smooth_activation("tanh", [](double x) { return std::tanh(x); },
                                  [](double x) { const double t = std::tanh(x); return 1 - t * t; },
                                  {0, 1, 0, -2, 0, 16, 0});
  } else if (base == "sigmoid" && arg.empty()) {
    r = detail::smooth_activation("sigmoid", detail::logistic,
                                  [](double x) { const double s = detail::logistic(x); return s * (1 - s); },
                                  {0.5, 0.25, 0, -0.125, 0, 0.25, 0});
  } else if (base == "gelu" && arg.empty()) {
    const double c = 1 / std::sqrt(2 * std::numbers::pi);
    r = detail::smooth_activation(
        "gelu", [](double x) { return x * detail::std_normal_cdf(x); },
        [c](double x) { return detail::std_normal_cdf(x) + x * c * std::exp(-0.5 * x * x); },
        {0, 0.5, 2 * c, 0, -4 * c, 0, 18 * c});
  } else if (base == "silu" && arg.empty()) {
    r = detail::smooth_activation("silu", [](double x) { return x * detail::logistic(x); },
                                  [](double x) { const double s = detail::logistic(x); return s * (1 + x * (1 - s)); },
                                  {0, 0.5, 0.5, 0, -0.5, 0, 1.5});
  } else if (base == "rbf" && arg.empty()) {
    r = detail::smooth_activation("rbf", [](double x) { return std::exp(-x * x); },
                                  [](double x) { return -2 * x * std::exp(-x * x); }, {1, 0, -2, 0, 12, 0, -120});
  } else if (base == "softplus" && arg.empty()) {
    r = detail::smooth_activation(
        "softplus", [](double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); },
        detail::logistic, {std::numbers::ln2, 0.5, 0.25, 0, -0.125, 0, 0.25});
  } else if (base == "sin" && arg.empty()) {
    r = detail::smooth_activation("sin", [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); },
                                  {0, 1, 0, -1, 0, 1, 0});
  } else {
    std::string known;
    for (const auto& n : registry_names()) known += (known.empty() ? "" : ", ") + n;
    throw UnknownActivation("unknown activation '" + id + "'; registry: " + known);
  }
  for (const auto& [k, v] : params) r.params.emplace(k, v);
  return r;
}

}  // namespace nks
