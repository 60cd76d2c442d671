#pragma once

// Dual activations phi^(t) = E[phi(U) phi(V)], (U, V) standard normal with
// correlation t. Three backends: Hermite power series, closed forms and a
// quadrant-wise 2-D Gauss-Legendre quadrature.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "nks/activations.hpp"
#include "nks/errors.hpp"
#include "nks/hermite.hpp"
#include "nks/quadrature.hpp"

namespace nks {

struct QuadrantRule {
  double c = 12.0;  ///< cutoff in standard deviations
  int n = 50;       ///< Gauss-Legendre points per axis and patch

  void validate() const {
    if (!(c > 0)) throw ValidationError("QuadrantRule: c must be positive");
    if (n < 2) throw ValidationError("QuadrantRule: n must be >= 2");
  }
};

enum class DualBackend { hermite, quadrature, closed_form };
enum class ClosedForm { s0, step, relu, linear };

inline std::string to_string(DualBackend b) {
  switch (b) {
    case DualBackend::hermite: return "hermite";
    case DualBackend::quadrature: return "quadrature";
    default: return "closed_form";
  }
}

/// |rho| at or beyond this is evaluated by the 1-D boundary integrals.
inline constexpr double kBoundaryBand = 1e-12;

namespace detail {

/// Nodes and weights of the (+,+) quadrant integral at correlation rho:
/// sum_j w_j f(u_j, v_j) = E[f(U, V); U > 0, V > 0]. Two patches, the second
/// covering the region beyond c along the first axis.
struct QuadrantGrid {
  std::vector<double> u, v, w;
};

inline QuadrantGrid quadrant_grid(double rho, const QuadrantRule& rule) {
  const auto& gl = gauss_legendre(rule.n);
  const double c = rule.c;
  const double sx = std::sqrt(std::max(0.0, (1 + rho) / 2));
  const double sy = std::sqrt(std::max(0.0, (1 - rho) / 2));
  QuadrantGrid g;
  const std::size_t m = static_cast<std::size_t>(rule.n) * rule.n;
  g.u.reserve(2 * m);
  g.v.reserve(2 * m);
  g.w.reserve(2 * m);
  for (int i = 0; i < rule.n; ++i) {
    const double x = (gl.nodes[i] + 1) / 2;
    const double wx = gl.weights[i] / 2;
    for (int j = 0; j < rule.n; ++j) {
      const double y = gl.nodes[j];
      const double wxy = wx * gl.weights[j];
      // inner patch: x' in (0,1), y' in (-1,1)
      g.u.push_back(c * sx * sy * x * (1 + y));
      g.v.push_back(c * sx * sy * x * (1 - y));
      g.w.push_back(wxy * c * sy * c * sx * x * normal_pdf(c * sy * x) * normal_pdf(c * sx * x * y));
      // outer patch
      g.u.push_back(c * sx * sy * (1 + y) + c * sx * x);
      g.v.push_back(c * sx * sy * (1 - y) + c * sx * x);
      g.w.push_back(wxy * c * c * sx * normal_pdf(c * sy + c * x) * normal_pdf(c * sx * y));
    }
  }
  return g;
}

/// phi^(rho) for several activations sharing the same two quadrant grids.
inline std::vector<double> quadrature_duals(const std::vector<const ActivationSpec*>& acts, double rho,
                                            const QuadrantRule& rule) {
  const QuadrantGrid same = quadrant_grid(rho, rule);
  const QuadrantGrid flip = quadrant_grid(-rho, rule);
  std::vector<double> out;
  out.reserve(acts.size());
  for (const ActivationSpec* a : acts) {
    const auto& P = a->pos.f;
    const auto& M = a->neg.f;
    long double s = 0;
    for (std::size_t j = 0; j < same.w.size(); ++j) {
      const double u = same.u[j], v = same.v[j];
      s += same.w[j] * (P(u) * P(v) + M(-u) * M(-v));
    }
    for (std::size_t j = 0; j < flip.w.size(); ++j) {
      const double u = flip.u[j], v = flip.v[j];
      s += flip.w[j] * (P(u) * M(-v) + M(-u) * P(v));
    }
    out.push_back(static_cast<double>(s));
  }
  return out;
}

/// Power-law model a_n^2 ~ c n^p exp(b / n) for the coefficients of one
/// parity past the truncation index. The exp(b / n) factor absorbs the first
/// correction term of the double-factorial asymptotics.
struct PowerTail {
  bool active = false;
  int parity = 0;
  int first = 0;  ///< first omitted index of this parity
  double log_c = 0;
  double exponent = 0;
  double correction = 0;

  double operator()(double t) const {
    if (!active || t == 0.0) return 0.0;
    const double at = std::fabs(t);
    const double sign = (t < 0 && parity == 1) ? -1.0 : 1.0;
    long double s = 0;
    int n = first;
    constexpr int cap = 400000;
    const double at2 = at * at;
    double power = std::pow(at, first);
    for (; n < first + cap; n += 2, power *= at2) {
      const double term = std::exp(log_c + exponent * std::log(n) + correction / n) * power;
      s += term;
      if (term <= 1e-19 * static_cast<double>(s)) break;
    }
    if (n >= first + cap) {
      // integral remainder for the slowly decaying part
      s += std::exp(log_c) * std::pow(n, exponent + 1) / (2 * (-exponent - 1)) * std::pow(at, n);
    }
    return sign * static_cast<double>(s);
  }
};

inline PowerTail fit_power_tail(const std::vector<double>& sq, int parity, double total) {
  PowerTail tail;
  tail.parity = parity;
  const int N = static_cast<int>(sq.size()) - 1;
  std::vector<double> ns, ys;
  for (int n = N; n >= 1 && ns.size() < 64; --n) {
    if (n % 2 != parity) continue;
    if (!(sq[n] > 1e-28 * total)) return tail;  // exact zeros or exponential decay
    ns.push_back(n);
    ys.push_back(std::log(sq[n]));
  }
  if (ns.size() < 16) return tail;
  // least squares on the basis (1, log n, 1/n)
  double A[3][3] = {}, r[3] = {};
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double b[3] = {1.0, std::log(ns[i]), 1.0 / ns[i]};
    for (int p = 0; p < 3; ++p) {
      r[p] += b[p] * ys[i];
      for (int q = 0; q < 3; ++q) A[p][q] += b[p] * b[q];
    }
  }
  for (int p = 0; p < 3; ++p) {
    for (int q = p + 1; q < 3; ++q) {
      const double f = A[q][p] / A[p][p];
      for (int c = p; c < 3; ++c) A[q][c] -= f * A[p][c];
      r[q] -= f * r[p];
    }
  }
  double x[3];
  for (int p = 2; p >= 0; --p) {
    double v = r[p];
    for (int c = p + 1; c < 3; ++c) v -= A[p][c] * x[c];
    x[p] = v / A[p][p];
  }
  double resid = 0;
  for (std::size_t i = 0; i < ns.size(); ++i)
    resid = std::max(resid, std::fabs(ys[i] - (x[0] + x[1] * std::log(ns[i]) + x[2] / ns[i])));
  if (!(x[1] < -1.0) || resid > 0.05) return tail;
  tail.active = true;
  tail.log_c = x[0];
  tail.exponent = x[1];
  tail.correction = x[2];
  tail.first = (N + 1) % 2 == parity ? N + 1 : N + 2;
  return tail;
}

inline double closed_form_value(ClosedForm f, double t) {
  const double pi = std::numbers::pi;
  switch (f) {
    case ClosedForm::s0: return 0.25 - std::acos(t) / (2 * pi);
    case ClosedForm::step: return 0.5 - std::acos(t) / (2 * pi);
    case ClosedForm::relu: return (std::sqrt(std::max(0.0, 1 - t * t)) + (pi - std::acos(t)) * t) / (2 * pi);
    default: return t;
  }
}

}  // namespace detail

/// tau = +1: E[phi(X)^2]; tau = -1: E[phi(X) phi(-X)].
inline double dual_at_boundary(const ActivationSpec& act, int tau, const GaussHermiteRule& rule = default_normal_rule()) {
  const auto& P = act.pos.f;
  const auto& M = act.neg.f;
  if (tau == 1) return rule.expect([&](double x) { return P(x) * P(x); }, [&](double y) { return M(y) * M(y); });
  if (tau == -1) return rule.expect([&](double x) { return P(x) * M(-x); }, [&](double y) { return M(y) * P(-y); });
  throw ValidationError("dual_at_boundary: tau must be +1 or -1");
}

/// phi^(rho) for rho in (-1, 1) by the quadrant decomposition.
inline double dual_via_quadrature(const ActivationSpec& act, double rho, const QuadrantRule& rule = {}) {
  rule.validate();
  if (!(std::fabs(rho) < 1.0)) throw DomainError("dual_via_quadrature: rho must lie in (-1, 1); use dual_at_boundary");
  return detail::quadrature_duals({&act}, rho, rule)[0];
}

/// Evaluator for phi^ on [-1, 1].
class DualActivation {
 public:
  DualBackend backend() const { return backend_; }
  const std::string& source() const { return source_; }
  double value_at_one() const { return at_one_; }
  double value_at_minus_one() const { return at_minus_one_; }

  /// Squared Hermite coefficients (hermite backend only).
  const std::vector<double>& squared_coefficients() const { return squared_; }
  const ActivationSpec* activation() const { return act_.get(); }
  const QuadrantRule& quadrant_rule() const { return rule_; }
  bool has_tail_model() const { return tail_even_.active || tail_odd_.active; }

  double operator()(double t) const {
    if (!std::isfinite(t) || std::fabs(t) > 1 + 1e-9)
      throw DomainError("dual activation evaluated outside [-1, 1] at t = " + std::to_string(t));
    t = std::clamp(t, -1.0, 1.0);
    switch (backend_) {
      case DualBackend::closed_form: return detail::closed_form_value(closed_, t);
      case DualBackend::quadrature:
        if (t >= 1 - kBoundaryBand) return at_one_;
        if (t <= -1 + kBoundaryBand) return at_minus_one_;
        return detail::quadrature_duals({act_.get()}, t, rule_)[0];
      default: return series_value(t);
    }
  }

  /// Hermite series without the tail model.
  double truncated_series_value(double t) const {
    long double acc = 0;
    for (std::size_t n = squared_.size(); n-- > 0;) acc = acc * t + squared_[n];
    return static_cast<double>(acc);
  }

  static DualActivation from_hermite(const HermiteSeries& series, bool tail_model) {
    DualActivation d;
    d.backend_ = DualBackend::hermite;
    d.source_ = series.source;
    d.squared_.resize(series.coeffs.size());
    long double total = 0;
    for (std::size_t n = 0; n < series.coeffs.size(); ++n) {
      d.squared_[n] = series.coeffs[n] * series.coeffs[n];
      total += d.squared_[n];
    }
    if (tail_model) {
      d.tail_even_ = detail::fit_power_tail(d.squared_, 0, static_cast<double>(total));
      d.tail_odd_ = detail::fit_power_tail(d.squared_, 1, static_cast<double>(total));
    }
    d.at_one_ = d.series_value(1.0);
    d.at_minus_one_ = d.series_value(-1.0);
    return d;
  }

  static DualActivation from_squared(std::vector<double> squared, std::string source) {
    DualActivation d;
    d.backend_ = DualBackend::hermite;
    d.source_ = std::move(source);
    d.squared_ = std::move(squared);
    d.at_one_ = d.series_value(1.0);
    d.at_minus_one_ = d.series_value(-1.0);
    return d;
  }

  static DualActivation from_quadrature(const ActivationSpec& act, const QuadrantRule& rule) {
    rule.validate();
    DualActivation d;
    d.backend_ = DualBackend::quadrature;
    d.source_ = act.name;
    d.act_ = std::make_shared<const ActivationSpec>(act);
    d.rule_ = rule;
    d.at_one_ = dual_at_boundary(act, 1);
    d.at_minus_one_ = dual_at_boundary(act, -1);
    return d;
  }

  static DualActivation from_closed_form(ClosedForm f) {
    DualActivation d;
    d.backend_ = DualBackend::closed_form;
    d.closed_ = f;
    const char* names[] = {"s0", "step", "relu", "linear"};
    d.source_ = names[static_cast<int>(f)];
    d.at_one_ = detail::closed_form_value(f, 1.0);
    d.at_minus_one_ = detail::closed_form_value(f, -1.0);
    return d;
  }

 private:
  double series_value(double t) const { return truncated_series_value(t) + tail_even_(t) + tail_odd_(t); }

  DualBackend backend_ = DualBackend::closed_form;
  std::string source_;
  ClosedForm closed_ = ClosedForm::linear;
  std::vector<double> squared_;
  detail::PowerTail tail_even_, tail_odd_;
  std::shared_ptr<const ActivationSpec> act_;
  QuadrantRule rule_;
  double at_one_ = 0, at_minus_one_ = 0;
};

/// t -> sum a_n^2 t^n. With tail_model set, coefficients past N whose
/// squares follow a clean power law n^p (p < -1) are summed from the fitted
/// law instead of being dropped.
inline DualActivation dual_from_hermite(const HermiteSeries& series, bool tail_model = true) {
  for (double a : series.coeffs)
    if (!std::isfinite(a)) throw NumericalError("dual_from_hermite: non-finite coefficient");
  return DualActivation::from_hermite(series, tail_model);
}

inline DualActivation dual_quadrature(const ActivationSpec& act, const QuadrantRule& rule = {}) {
  return DualActivation::from_quadrature(act, rule);
}

inline DualActivation dual_closed_form(ClosedForm f) { return DualActivation::from_closed_form(f); }

/// Dual of the pseudo-derivative phi'; equals d/dt phi^.
inline DualActivation dual_derivative(const ActivationSpec& act, const QuadrantRule& rule = {}) {
  return dual_quadrature(derivative(act), rule);
}

/// Term-wise derivative of a Hermite-backed dual: sum n a_n^2 t^(n-1).
inline DualActivation differentiate_series(const DualActivation& d) {
  if (d.backend() != DualBackend::hermite) throw ValidationError("differentiate_series needs the hermite backend");
  const auto& sq = d.squared_coefficients();
  std::vector<double> out(sq.size() > 1 ? sq.size() - 1 : 1, 0.0);
  for (std::size_t n = 1; n < sq.size(); ++n) out[n - 1] = static_cast<double>(n) * sq[n];
  return DualActivation::from_squared(std::move(out), d.source() + "'");
}

/// Dual by name of backend; "hermite" expands with N coefficients.
inline DualActivation make_dual(const ActivationSpec& act, DualBackend backend, int n_coeffs = kDefaultHermiteCoefficients,
                                const QuadrantRule& rule = {}) {
  switch (backend) {
    case DualBackend::hermite: return dual_from_hermite(expand(act, n_coeffs));
    case DualBackend::quadrature: return dual_quadrature(act, rule);
    default: throw ValidationError("make_dual: closed forms are built with dual_closed_form");
  }
}

}  // namespace nks
