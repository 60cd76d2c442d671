#pragma once

// NNGP and NTK kernels of deep fully connected networks on the unit sphere,
// as functions of t = <x, x'> in [-1, 1].

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "nks/activations.hpp"
#include "nks/dual.hpp"
#include "nks/errors.hpp"
#include "nks/parallel.hpp"

namespace nks {

struct NetworkConfig {
  int depth = 2;  ///< L, the number of layers
  double sigma_w2 = 1.0;
  double sigma_b2 = 0.0;
  double sigma_i2 = 0.0;

  void validate() const {
    if (depth < 1) throw ValidationError("depth must be >= 1");
    if (!(sigma_w2 > 0) || !std::isfinite(sigma_w2)) throw ValidationError("sigma_w2 must be positive");
    if (!(sigma_b2 >= 0) || !std::isfinite(sigma_b2)) throw ValidationError("sigma_b2 must be >= 0");
    if (!(sigma_i2 >= 0) || !std::isfinite(sigma_i2)) throw ValidationError("sigma_i2 must be >= 0");
  }

  double nngp_bias() const { return sigma_b2 * sigma_i2; }
  double ntk_bias() const { return sigma_b2 * (1 - sigma_i2); }
};

enum class KernelKind { nngp, ntk };

inline std::string to_string(KernelKind k) { return k == KernelKind::nngp ? "nngp" : "ntk"; }

struct KernelOptions {
  DualBackend backend = DualBackend::quadrature;
  QuadrantRule rule{};
  int n_coeffs = kDefaultHermiteCoefficients;
};

struct LayerTrace {
  std::vector<double> alpha;  ///< alpha[l-1] = alpha_l = kappa^NNGP_l(1), l = 1..L
  /// duals[l-1] is the dual of phi(sqrt(alpha_l) .), used by layer l+1.
  std::vector<DualActivation> duals;
  /// Same for phi'(sqrt(alpha_l) .); empty for NNGP kernels.
  std::vector<DualActivation> derivative_duals;
};

class KernelFunction {
 public:
  KernelFunction(KernelKind kind, NetworkConfig cfg, LayerTrace trace)
      : kind_(kind), cfg_(cfg), trace_(std::move(trace)) {}

  KernelKind kind() const { return kind_; }
  const NetworkConfig& config() const { return cfg_; }
  const LayerTrace& trace() const { return trace_; }

  double operator()(double t) const {
    if (!std::isfinite(t) || std::fabs(t) > 1.0) throw DomainError("kernel evaluated outside [-1, 1] at t = " + std::to_string(t));
    const double sw2 = cfg_.sigma_w2;
    double nngp = cfg_.nngp_bias() + sw2 * t;
    double ntk = cfg_.ntk_bias() + nngp;
    for (int l = 2; l <= cfg_.depth; ++l) {
      const double alpha = trace_.alpha[l - 2];
      // alpha = 0: the layer input vanishes and the duals are constants
      double rho = alpha > 0 ? nngp / alpha : 1.0;
      if (std::fabs(rho) > 1 + 1e-12)
        throw NumericalError("kernel recursion produced a correlation outside [-1, 1]: " + std::to_string(rho));
      rho = std::clamp(rho, -1.0, 1.0);
      const DualActivation& d = trace_.duals[l - 2];
      double value = 0, dvalue = 0;
      if (kind_ == KernelKind::ntk) {
        const DualActivation& dd = trace_.derivative_duals[l - 2];
        if (d.backend() == DualBackend::quadrature && dd.backend() == DualBackend::quadrature &&
            std::fabs(rho) < 1 - kBoundaryBand) {
          const auto both = detail::quadrature_duals({d.activation(), dd.activation()}, rho, d.quadrant_rule());
          value = both[0];
          dvalue = both[1];
        } else {
          value = d(rho);
          dvalue = dd(rho);
        }
      } else {
        value = d(rho);
      }
      nngp = cfg_.nngp_bias() + sw2 * value;
      if (kind_ == KernelKind::ntk) ntk = cfg_.ntk_bias() + nngp + sw2 * ntk * dvalue;
    }
    return kind_ == KernelKind::nngp ? nngp : ntk;
  }

 private:
  KernelKind kind_;
  NetworkConfig cfg_;
  LayerTrace trace_;
};

/// Below this alpha_l the next layer sees a zero input.
inline constexpr double kDegenerateAlpha = 1e-280;

namespace detail {

inline LayerTrace build_trace(const ActivationSpec& act, const NetworkConfig& cfg, bool with_derivative,
                              const KernelOptions& opt) {
  LayerTrace tr;
  std::optional<ActivationSpec> dact;
  if (with_derivative) dact = derivative(act);
  double alpha = cfg.nngp_bias() + cfg.sigma_w2;
  tr.alpha.push_back(alpha);
  for (int l = 2; l <= cfg.depth; ++l) {
    auto make = [&](const ActivationSpec& s) {
      if (alpha <= kDegenerateAlpha) return DualActivation::from_squared({s(0.0) * s(0.0)}, s.name + "(0)");
      const ActivationSpec scaled = rescale(s, std::sqrt(alpha));
      if (opt.backend == DualBackend::hermite) return dual_from_hermite(expand(scaled, opt.n_coeffs));
      return dual_quadrature(scaled, opt.rule);
    };
    tr.duals.push_back(make(act));
    if (with_derivative) tr.derivative_duals.push_back(make(*dact));
    // For the quadrature backend this is the 1-D integral E[phi(aX)^2]; using
    // the dual's own value keeps rho = 1 exact at t = 1.
    const double e2 = tr.duals.back().value_at_one();
    alpha = cfg.nngp_bias() + cfg.sigma_w2 * e2;
    if (!std::isfinite(alpha) || alpha > 1e300)
      throw NumericalOverflow("alpha_" + std::to_string(l) + " overflows for activation '" + act.name + "'");
    if (!(alpha >= 0)) throw NumericalError("alpha_" + std::to_string(l) + " is negative");
    if (alpha <= kDegenerateAlpha) alpha = 0;  // underflow, or an activation that vanishes a.e.
    tr.alpha.push_back(alpha);
  }
  return tr;
}

}  // namespace detail

inline KernelFunction build_nngp(const ActivationSpec& act, const NetworkConfig& cfg, const KernelOptions& opt = {}) {
  cfg.validate();
  return KernelFunction(KernelKind::nngp, cfg, detail::build_trace(act, cfg, false, opt));
}

inline KernelFunction build_ntk(const ActivationSpec& act, const NetworkConfig& cfg, const KernelOptions& opt = {}) {
  cfg.validate();
  // derivative() rejects activations that jump at 0
  return KernelFunction(KernelKind::ntk, cfg, detail::build_trace(act, cfg, true, opt));
}

inline KernelFunction build_kernel(KernelKind kind, const ActivationSpec& act, const NetworkConfig& cfg,
                                   const KernelOptions& opt = {}) {
  return kind == KernelKind::nngp ? build_nngp(act, cfg, opt) : build_ntk(act, cfg, opt);
}

inline std::vector<double> evaluate_kernel(const KernelFunction& k, const std::vector<double>& ts) {
  for (double t : ts)
    if (!std::isfinite(t) || std::fabs(t) > 1.0) throw DomainError("evaluate_kernel: grid point outside [-1, 1]");
  std::vector<double> out(ts.size());
  parallel_for(ts.size(), [&](std::size_t i) { out[i] = k(ts[i]); });
  return out;
}

}  // namespace nks
