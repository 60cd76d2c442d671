#pragma once

// Randomly initialized finite-width MLPs in the NTK parametrization and
// Monte-Carlo estimates of their output covariance and tangent kernel.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <tuple>
#include <vector>

#include "nks/activations.hpp"
#include "nks/errors.hpp"
#include "nks/kernels.hpp"
#include "nks/parallel.hpp"
#include "nks/random.hpp"

namespace nks {

/// z^(1) = sigma_w W^(1) x + sigma_b b^(1),
/// z^(l) = sigma_w / sqrt(d_{l-1}) W^(l) phi(z^(l-1)) + sigma_b b^(l).
struct MLPState {
  ActivationSpec act;
  NetworkConfig cfg;
  std::vector<int> widths;                 ///< d_0 .. d_L, d_L = 1
  std::vector<std::vector<double>> W;      ///< W[l-1] is d_l x d_{l-1}, row-major, entries N(0, 1)
  std::vector<std::vector<double>> b;      ///< b[l-1] has d_l entries, N(0, sigma_i^2)

  double layer_scale(int l) const {
    return l == 1 ? std::sqrt(cfg.sigma_w2) : std::sqrt(cfg.sigma_w2 / widths[l - 1]);
  }

  static MLPState random(const ActivationSpec& act, const NetworkConfig& cfg, int input_dim, int width,
                         std::uint64_t seed) {
    cfg.validate();
    if (input_dim < 1 || width < 1) throw ValidationError("MLPState: widths must be >= 1");
    MLPState s;
    s.act = act;
    s.cfg = cfg;
    s.widths.push_back(input_dim);
    for (int l = 1; l < cfg.depth; ++l) s.widths.push_back(width);
    s.widths.push_back(1);
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double si = std::sqrt(cfg.sigma_i2);
    for (int l = 1; l <= cfg.depth; ++l) {
      std::vector<double> w(static_cast<std::size_t>(s.widths[l]) * s.widths[l - 1]);
      for (auto& v : w) v = normal(gen);
      std::vector<double> bias(s.widths[l]);
      for (auto& v : bias) v = si * normal(gen);
      s.W.push_back(std::move(w));
      s.b.push_back(std::move(bias));
    }
    return s;
  }
};

struct ForwardTrace {
  std::vector<std::vector<double>> z;  ///< z[l-1] = z^(l)
  std::vector<std::vector<double>> x;  ///< x[0] = input, x[l] = phi(z^(l)) for l < L
  double output = 0;
};

inline ForwardTrace forward(const MLPState& s, const std::vector<double>& input) {
  if (static_cast<int>(input.size()) != s.widths[0]) throw ValidationError("forward: input has wrong dimension");
  ForwardTrace tr;
  tr.x.push_back(input);
  const double sb = std::sqrt(s.cfg.sigma_b2);
  const int L = s.cfg.depth;
  for (int l = 1; l <= L; ++l) {
    const int rows = s.widths[l], cols = s.widths[l - 1];
    const double scale = s.layer_scale(l);
    const auto& W = s.W[l - 1];
    const auto& prev = tr.x.back();
    std::vector<double> z(rows);
    for (int i = 0; i < rows; ++i) {
      double acc = 0;
      const double* row = &W[static_cast<std::size_t>(i) * cols];
      for (int j = 0; j < cols; ++j) acc += row[j] * prev[j];
      z[i] = scale * acc + sb * s.b[l - 1][i];
    }
    if (l < L) {
      std::vector<double> x(rows);
      for (int i = 0; i < rows; ++i) x[i] = s.act(z[i]);
      tr.x.push_back(std::move(x));
    }
    tr.z.push_back(std::move(z));
  }
  tr.output = tr.z.back()[0];
  return tr;
}

namespace detail {

/// delta_l = d z^(L) / d z^(l) for l = 1..L, using phi'(0) := phi'(0-).
inline std::vector<std::vector<double>> backprop(const MLPState& s, const ForwardTrace& tr) {
  const int L = s.cfg.depth;
  std::vector<std::vector<double>> delta(L);
  delta[L - 1] = {1.0};
  for (int l = L - 1; l >= 1; --l) {
    const int rows = s.widths[l + 1], cols = s.widths[l];
    const double scale = s.layer_scale(l + 1);
    const auto& W = s.W[l];
    std::vector<double> g(cols, 0.0);
    for (int i = 0; i < rows; ++i) {
      const double di = delta[l][i];
      const double* row = &W[static_cast<std::size_t>(i) * cols];
      for (int j = 0; j < cols; ++j) g[j] += row[j] * di;
    }
    for (int j = 0; j < cols; ++j) g[j] *= scale * left_derivative(s.act, tr.z[l - 1][j]);
    delta[l - 1] = std::move(g);
  }
  return delta;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

/// <grad_theta z^(L)(x), grad_theta z^(L)(xbar)> over all weights and biases.
inline double ntk_pair(const MLPState& s, const std::vector<double>& x, const std::vector<double>& xbar) {
  if (jump_is_nonzero(jump(s.act, 0), s.act, 0))
    throw NotPseudoDifferentiable("activation '" + s.act.name + "' is discontinuous at 0; the NTK is undefined");
  const auto a = forward(s, x);
  const auto b = forward(s, xbar);
  const auto da = detail::backprop(s, a);
  const auto db = detail::backprop(s, b);
  double theta = 0;
  for (int l = 1; l <= s.cfg.depth; ++l) {
    const double sl = s.layer_scale(l);
    theta += detail::dot(da[l - 1], db[l - 1]) * (sl * sl * detail::dot(a.x[l - 1], b.x[l - 1]) + s.cfg.sigma_b2);
  }
  return theta;
}

/// Gradient of z^(L)(x) with respect to all parameters, flattened as
/// W^(1), b^(1), W^(2), ... (used for finite-difference checks).
inline std::vector<double> parameter_gradient(const MLPState& s, const std::vector<double>& x) {
  const auto tr = forward(s, x);
  const auto delta = detail::backprop(s, tr);
  const double sb = std::sqrt(s.cfg.sigma_b2);
  std::vector<double> g;
  for (int l = 1; l <= s.cfg.depth; ++l) {
    const double sl = s.layer_scale(l);
    for (int i = 0; i < s.widths[l]; ++i)
      for (int j = 0; j < s.widths[l - 1]; ++j) g.push_back(delta[l - 1][i] * sl * tr.x[l - 1][j]);
    // b^(l) is stored pre-scaled by sigma_i; the parameter is b itself
    for (int i = 0; i < s.widths[l]; ++i) g.push_back(delta[l - 1][i] * sb);
  }
  return g;
}

struct PointPair {
  std::vector<double> x, xbar;
  double t() const { return detail::dot(x, xbar); }
};

/// n pairs of uniform random points on S^d.
inline std::vector<PointPair> random_pairs(int d, int n, std::uint64_t seed) {
  if (d < 1 || n < 0) throw ValidationError("random_pairs: need d >= 1 and n >= 0");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto point = [&] {
    std::vector<double> p(d + 1);
    double nrm = 0;
    do {
      nrm = 0;
      for (auto& v : p) {
        v = normal(gen);
        nrm += v * v;
      }
    } while (nrm == 0);
    for (auto& v : p) v /= std::sqrt(nrm);
    return p;
  };
  std::vector<PointPair> out;
  for (int i = 0; i < n; ++i) {
    PointPair p;
    p.x = point();
    p.xbar = point();
    out.push_back(std::move(p));
  }
  return out;
}

struct EmpiricalKernel {
  PointPair pair;
  int n_samples = 0;
  double nngp_mean = 0, nngp_se = 0;
  double ntk_mean = 0, ntk_se = 0;  ///< NaN when the activation has no NTK
};

namespace detail {

inline long double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    long double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  return pairwise_sum(v, n / 2) + pairwise_sum(v + n / 2, n - n / 2);
}

inline std::pair<double, double> mean_se(const std::vector<double>& v) {
  const std::size_t n = v.size();
  const double mean = static_cast<double>(pairwise_sum(v.data(), n) / n);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
  const double var = static_cast<double>(pairwise_sum(sq.data(), n) / (n - 1));
  return {mean, std::sqrt(var / n)};
}

}  // namespace detail

/// Monte-Carlo mean and standard error of z(x) z(xbar) and of the
/// empirical NTK over n_samples independent initializations. Sample i uses
/// the seed derive_seed(seed, i), so results do not depend on threading.
inline std::vector<EmpiricalKernel> estimate(const ActivationSpec& act, const NetworkConfig& cfg, int d,
                                             const std::vector<PointPair>& pairs, int width, int n_samples,
                                             std::uint64_t seed) {
  cfg.validate();
  if (width < 1) throw ValidationError("estimate: width must be >= 1");
  if (n_samples < 2) throw ValidationError("estimate: need at least 2 samples");
  for (const auto& p : pairs)
    if (static_cast<int>(p.x.size()) != d + 1 || static_cast<int>(p.xbar.size()) != d + 1)
      throw ValidationError("estimate: points must lie in R^{d+1}");
  const bool with_ntk = !jump_is_nonzero(jump(act, 0), act, 0);
  const std::size_t P = pairs.size();
  std::vector<std::vector<double>> nngp(P, std::vector<double>(n_samples));
  std::vector<std::vector<double>> ntk(P, std::vector<double>(n_samples));
  parallel_for(static_cast<std::size_t>(n_samples), [&](std::size_t i) {
    const MLPState s = MLPState::random(act, cfg, d + 1, width, derive_seed(seed, i));
    for (std::size_t p = 0; p < P; ++p) {
      nngp[p][i] = forward(s, pairs[p].x).output * forward(s, pairs[p].xbar).output;
      ntk[p][i] = with_ntk ? ntk_pair(s, pairs[p].x, pairs[p].xbar) : 0.0;
    }
  });
  std::vector<EmpiricalKernel> out;
  for (std::size_t p = 0; p < P; ++p) {
    EmpiricalKernel e;
    e.pair = pairs[p];
    e.n_samples = n_samples;
    std::tie(e.nngp_mean, e.nngp_se) = detail::mean_se(nngp[p]);
    if (with_ntk) {
      std::tie(e.ntk_mean, e.ntk_se) = detail::mean_se(ntk[p]);
    } else {
      e.ntk_mean = e.ntk_se = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace nks
