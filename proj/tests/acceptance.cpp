// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "nks/nks.hpp"

using namespace nks;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(const char* id, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = dt < budget_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s %s  %s  [%.1f s of %.0f s%s]\n", id, pass ? "PASS" : "FAIL", o.detail.c_str(), dt, budget_s,
              in_time ? "" : ", over budget");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = a + (b - a) * i / (n - 1);
  return t;
}

const std::vector<std::string>& registry() {
  static const std::vector<std::string> r{"relu", "leakyrelu", "selu", "elu",  "celu", "repu:2",   "repu:3", "heaviside",
                                          "tanh", "sigmoid",   "gelu", "silu", "rbf",  "softplus", "sin",    "sk:1"};
  return r;
}

bool has_ntk(const ActivationSpec& a) { return !jump_is_nonzero(jump(a, 0), a, 0); }

struct Check {
  bool ok = true;
  std::string first_failure;
  int count = 0;
  void expect(bool cond, const std::string& what) {
    ++count;
    if (!cond && ok) first_failure = what;
    ok = ok && cond;
  }
  Outcome outcome(std::string summary) const {
    while (!summary.empty() && (summary.back() == ' ' || summary.back() == ';')) summary.pop_back();
    return {ok, ok ? summary : summary + "; first failure: " + first_failure};
  }
};

}  // namespace

int main() {
  criterion("A1", 1, [] {
    const auto d = dual_from_hermite(s_k_coefficients(0, 512));
    double err = 0;
    for (double t : grid(-0.99, 0.99, 199))
      err = std::max(err, std::fabs(d(t) - (0.25 - std::acos(t) / (2 * std::numbers::pi))));
    return Outcome{err <= 1e-6, fmt("sup |s0_hat - closed form| = %.2e (tol 1e-6)", err)};
  });

  criterion("A2", 10, [] {
    double worst = 0;
    for (int k = 0; k <= 4; ++k) {
      const auto exact = s_k_coefficients(k, 60);
      const auto num = expand(reference_activation(k), 60);
      for (int n = 0; n <= 60; ++n)
        if (std::fabs(exact.coeffs[n]) > 1e-12)
          worst = std::max(worst, std::fabs(num.coeffs[n] - exact.coeffs[n]) / std::fabs(exact.coeffs[n]));
    }
    return Outcome{worst <= 1e-8, fmt("max relative error = %.2e (tol 1e-8)", worst)};
  });

  criterion("A3", 30, [] {
    double worst = 0;
    for (const auto* id : {"relu", "selu", "gelu", "heaviside"}) {
      const auto act = make_activation(id);
      const auto h = dual_from_hermite(expand(act, 512));
      const auto q = dual_quadrature(act, QuadrantRule{12.0, 50});
      for (double t : grid(-0.95, 0.95, 191)) worst = std::max(worst, std::fabs(h(t) - q(t)));
    }
    return Outcome{worst <= 1e-4, fmt("max |hermite - quadrature| = %.2e (tol 1e-4)", worst)};
  });

  criterion("A4", 300, [] {
    struct Target {
      std::string id;
      std::map<std::string, double> params;
      double ntk, ntk_tol, nngp, nngp_tol;
    };
    const std::vector<Target> targets{{"relu", {}, -3, 0.3, -5, 0.3},
                                      {"leakyrelu", {}, -3, 0.3, -5, 0.3},
                                      {"selu", {}, -3, 0.3, -5, 0.3},
                                      {"elu", {{"alpha", 0.5}}, -3, 0.3, -5, 0.3},
                                      {"celu", {}, -5, 0.4, -7, 0.5}};
    Check c;
    std::string slopes;
    for (const auto& t : targets) {
      const auto act = make_activation(t.id, t.params);
      for (auto kind : {KernelKind::ntk, KernelKind::nngp}) {
        const auto s = eigenvalues(build_kernel(kind, act, {3, 1, 1, 1}), 2, 256, 1000);
        const double slope = fit_decay(s, EigenParity::all, 16, 128, 0).slope;
        const double want = kind == KernelKind::ntk ? t.ntk : t.nngp;
        const double tol = kind == KernelKind::ntk ? t.ntk_tol : t.nngp_tol;
        const std::string tag = t.id + " " + to_string(kind) + fmt(" %.2f", slope);
        c.expect(std::fabs(slope - want) <= tol, tag + fmt(" vs %.0f", want));
        slopes += (slopes.empty() ? "" : ", ") + tag;
      }
    }
    return c.outcome("slopes: " + slopes);
  });

  criterion("A5", 180, [] {
    Check c;
    std::string detail;
    const NetworkConfig cfg{2, 1, 0, 0};
    for (const auto* id : {"relu", "gelu"}) {
      const auto s = eigenvalues(build_ntk(make_activation(id), cfg), 2, 256, 1000);
      double even_max = 0, odd_max = 0;
      for (int l = 0; l <= s.l_max(); ++l) {
        if (l % 2 == 0) even_max = std::max(even_max, s.mu[l]);
        else if (l >= 3) odd_max = std::max(odd_max, std::fabs(s.mu[l]));
      }
      c.expect(odd_max < 1e-10 * even_max, std::string(id) + " odd eigenvalues not negligible");
      detail += std::string(id) + fmt(" odd/even %.1e, ", odd_max / even_max);
    }
    auto slopes = [&](const ActivationSpec& act) {
      const auto s = eigenvalues(build_ntk(act, cfg), 2, 256, 1000);
      return std::pair{fit_decay(s, EigenParity::even, 16, 128, 0).slope,
                       fit_decay(s, EigenParity::odd, 16, 128, 0).slope};
    };
    const auto [se, so] = slopes(make_activation("selu"));
    c.expect(std::fabs(se + 3) <= 0.3 && std::fabs(so + 5) <= 0.4, "selu slopes");
    detail += fmt("selu even %.2f", se) + fmt(" odd %.2f", so);
    for (const auto* id : {"elu", "celu"}) {
      const auto [e, o] = slopes(make_activation(id));
      c.expect(std::fabs((o - e) - 2.0) <= 0.5, std::string(id) + " even/odd gap");
      detail += ", " + std::string(id) + fmt(" even-odd gap %.2f", o - e);
    }
    return c.outcome(detail);
  });

  criterion("A6", 60, [] {
    Check c;
    std::string detail;
    const auto act = make_activation("poly:0,0,1");
    for (int L : {2, 3}) {
      const int cap = L == 2 ? 2 : 4;
      const auto s = eigenvalues(build_nngp(act, {L, 1, 1, 1}), 2, 256, 1000);
      int top = -1;
      double rest = 0;
      for (int l = 0; l <= s.l_max(); ++l) {
        if (std::fabs(s.mu[l]) >= 1e-10 * s.mu[0]) top = l;
        if (l > cap) rest = std::max(rest, std::fabs(s.mu[l]) / s.mu[0]);
      }
      c.expect(top == cap && rest < 1e-10, fmt("L=%.0f", L));
      detail += fmt("L=%.0f: ", L) + fmt("last nonzero l=%.0f", top) + fmt(", max higher mu/mu0 %.1e; ", rest);
    }
    return c.outcome(detail);
  });

  criterion("A7", 120, [] {
    Check c;
    std::string detail;
    for (int L : {2, 3}) {
      const auto s = eigenvalues(build_nngp(make_activation("heaviside"), {L, 1, 1, 1}), 2, 256, 1000);
      const double slope = fit_decay(s, EigenParity::all, 16, 128).slope;
      const double want = -(2 + std::pow(2.0, 2 - L));
      c.expect(std::fabs(slope - want) <= 0.3, fmt("L=%.0f", L));
      detail += fmt("L=%.0f ", L) + fmt("slope %.2f", slope) + fmt(" vs %.1f; ", want);
    }
    return c.outcome(detail);
  });

  criterion("A8", 120, [] {
    const NetworkConfig cfg{2, 1, 1, 1};
    const auto act = make_activation("relu");
    const auto nngp = build_nngp(act, cfg);
    const auto ntk = build_ntk(act, cfg);
    auto pairs = random_pairs(1, 10, 2024);
    pairs.insert(pairs.begin(), PointPair{pairs.front().x, pairs.front().x});
    const auto est = estimate(act, cfg, 1, pairs, 1024, 2000, 77);
    int inside = 0, total = 0;
    for (std::size_t p = 1; p < est.size(); ++p) {
      const double t = std::clamp(est[p].pair.t(), -1.0, 1.0);
      inside += std::fabs((est[p].nngp_mean - nngp(t)) / est[p].nngp_se) < 3;
      inside += std::fabs((est[p].ntk_mean - ntk(t)) / est[p].ntk_se) < 3;
      total += 2;
    }
    const double frac = static_cast<double>(inside) / total;
    const double diag_z = (est[0].nngp_mean - 2.0) / est[0].nngp_se;
    return Outcome{frac >= 0.95 && std::fabs(diag_z) <= 5,
                   fmt("%.0f%% of z-scores within 3", 100 * frac) + fmt(", diagonal NNGP %.4f", est[0].nngp_mean) +
                       fmt(" (z = %.2f vs 2.0)", diag_z)};
  });

  criterion("A9", 60, [] {
    const auto s = eigenvalues(build_nngp(make_activation("relu"), {2, 1, 1, 1}), 1, 256, 1000);
    const auto lo = sobolev_series(s, 1.25), hi = sobolev_series(s, 1.75);
    const double r = sobolev_threshold(s);
    const bool ok = lo.verdict == Verdict::convergent && hi.verdict == Verdict::divergent && std::fabs(r - 1.5) <= 0.1;
    return Outcome{ok, "r=1.25 " + to_string(lo.verdict) + ", r=1.75 " + to_string(hi.verdict) +
                           fmt(", threshold %.3f (1.5 +- 0.1)", r)};
  });

  criterion("A10", 300, [] {
    Check c;
    // Dual invariants: nonnegative and nondecreasing on [0, 1], |dual(t)| < dual(1).
    for (const auto& id : registry()) {
      const auto act = make_activation(id);
      const auto [e, o] = even_odd_parts(act);
      for (const auto* a : {&act, &e, &o}) {
        const auto d = dual_quadrature(*a);
        const double tol = 1e-12 * (1 + d.value_at_one());
        double prev = -1e300;
        for (double t : grid(0, 1, 200)) {
          const double v = d(t);
          c.expect(v >= -tol && v >= prev - tol, a->name + fmt(" monotonicity at t=%.3f", t));
          prev = v;
        }
      }
      const auto d = dual_quadrature(act), de = dual_quadrature(e), dodd = dual_quadrature(o);
      for (double t : grid(-0.99, 0.99, 45)) c.expect(std::fabs(d(t)) < d.value_at_one(), id + " strict bound");
      for (double t : grid(-0.95, 0.95, 15)) {
        c.expect(std::fabs(de(t) - 0.5 * (d(t) + d(-t))) <= 1e-8, id + " even commutation");
        c.expect(std::fabs(dodd(t) - 0.5 * (d(t) - d(-t))) <= 1e-8, id + " odd commutation");
      }
      if (has_ntk(act)) {
        const auto dd = dual_derivative(act);
        const double h = 1e-5;
        for (double t : {-0.6, 0.0, 0.3, 0.8})
          c.expect(std::fabs((d(t + h) - d(t - h)) / (2 * h) - dd(t)) <= 1e-6, id + fmt(" derivative at t=%.1f", t));
      }
    }
    // Mercer reconstruction and Gram positivity on S^2, L = 3 with bias.
    std::mt19937_64 gen(7);
    std::normal_distribution<double> normal;
    std::vector<Eigen::Vector3d> pts;
    for (int i = 0; i < 40; ++i) pts.push_back(Eigen::Vector3d(normal(gen), normal(gen), normal(gen)).normalized());
    for (const auto& id : registry()) {
      const auto act = make_activation(id);
      for (auto kind : {KernelKind::nngp, KernelKind::ntk}) {
        if (kind == KernelKind::ntk && !has_ntk(act)) continue;
        const auto k = build_kernel(kind, act, {3, 1, 1, 1});
        SpectrumOptions opt;
        opt.mercer_tolerance = 1e-4;
        try {
          eigenvalues(k, 2, 256, 1000, opt);
        } catch (const QuadratureUnderResolved& e) {
          c.expect(false, id + " " + to_string(kind) + " Mercer: " + e.what());
        }
        Eigen::MatrixXd G(pts.size(), pts.size());
        for (std::size_t a = 0; a < pts.size(); ++a)
          for (std::size_t b = a; b < pts.size(); ++b) G(a, b) = G(b, a) = k(std::clamp(pts[a].dot(pts[b]), -1.0, 1.0));
        const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues().minCoeff();
        c.expect(lmin >= -1e-8 * G.trace(), id + " " + to_string(kind) + fmt(" Gram min eigenvalue %.2e", lmin));
      }
    }
    return c.outcome(fmt("%.0f checks across the registry", c.count));
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
