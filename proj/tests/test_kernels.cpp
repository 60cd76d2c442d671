#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "nks/kernels.hpp"

using namespace nks;

namespace {

std::vector<std::string> registry() {
  return {"relu", "leakyrelu", "selu", "elu",  "celu", "repu:2",   "repu:3", "heaviside",
          "tanh", "sigmoid",   "gelu", "silu", "rbf",  "softplus", "sin",    "sk:1"};
}

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = a + (b - a) * i / (n - 1);
  return t;
}

std::vector<Eigen::VectorXd> sphere_points(int d, int n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd p(d + 1);
    for (int j = 0; j <= d; ++j) p[j] = normal(gen);
    pts.push_back(p.normalized());
  }
  return pts;
}

}  // namespace

TEST(Nngp, OneLayer) {
  const auto k = build_nngp(make_activation("relu"), {1, 1, 1, 1});
  for (double t : grid(-1, 1, 9)) EXPECT_DOUBLE_EQ(k(t), 1 + t);
  EXPECT_DOUBLE_EQ(k.trace().alpha[0], 2.0);
}

TEST(Nngp, TwoLayerRelu) {
  const auto k = build_nngp(make_activation("relu"), {2, 1, 1, 1});
  EXPECT_NEAR(k(1.0), 2.0, 1e-12);
  const auto nb = build_nngp(make_activation("relu"), {2, 1, 0, 0});
  EXPECT_NEAR(nb(0.0), 1 / (2 * std::numbers::pi), 1e-12);  // a_0^2
}

TEST(Nngp, LinearFixedPoint) {
  const auto k = build_nngp(make_activation("poly:0,1"), {2, 1, 0, 0});
  for (double t : grid(-1, 1, 11)) EXPECT_NEAR(k(t), t, 1e-13);
}

TEST(Ntk, OneLayer) {
  const auto k = build_ntk(make_activation("tanh"), {1, 1, 1, 1});
  for (double t : grid(-1, 1, 9)) EXPECT_DOUBLE_EQ(k(t), 1 + t);
}

TEST(Ntk, LinearTwoLayer) {
  const auto k = build_ntk(make_activation("poly:0,1"), {2, 1, 0, 0});
  for (double t : grid(-1, 1, 11)) EXPECT_NEAR(k(t), 2 * t, 1e-12);
}

TEST(Ntk, ReluClosedForm) {
  // kappa = a(t) + t b(t) with a = relu dual, b = step dual
  const auto k = build_ntk(make_activation("relu"), {2, 1, 0, 0});
  const auto a = dual_closed_form(ClosedForm::relu);
  const auto b = dual_closed_form(ClosedForm::step);
  for (double t : grid(-1, 1, 21)) EXPECT_NEAR(k(t), a(t) + t * b(t), 1e-10) << t;
}

TEST(Ntk, HeavisideUndefined) {
  EXPECT_THROW(build_ntk(make_activation("heaviside"), {2, 1, 1, 1}), NotPseudoDifferentiable);
}

TEST(Kernel, DomainChecks) {
  const auto k = build_nngp(make_activation("relu"), {3, 1, 1, 1});
  EXPECT_THROW(k(1.5), DomainError);
  EXPECT_THROW(evaluate_kernel(k, {0.0, -1.2}), DomainError);
  EXPECT_THROW(build_nngp(make_activation("relu"), {0, 1, 1, 1}), ValidationError);
  EXPECT_THROW(build_nngp(make_activation("relu"), {2, 0, 1, 1}), ValidationError);
}

TEST(Kernel, MaximumAtOne) {
  for (const auto& id : registry()) {
    const auto act = make_activation(id);
    for (auto kind : {KernelKind::nngp, KernelKind::ntk}) {
      if (kind == KernelKind::ntk && id == "heaviside") continue;
      const auto k = build_kernel(kind, act, {3, 1, 1, 1});
      const auto v = evaluate_kernel(k, grid(-1, 1, 41));
      for (double x : v) EXPECT_LE(x, v.back() + 1e-12 * std::fabs(v.back())) << id;
    }
  }
}

TEST(Kernel, OddActivationGivesOddKernel) {
  const auto k = build_nngp(make_activation("tanh"), {3, 1, 0, 0});
  for (double t : grid(0, 1, 11)) EXPECT_NEAR(k(-t), -k(t), 1e-9);
  const auto n = build_ntk(make_activation("tanh"), {3, 1, 0, 0});
  for (double t : grid(0, 1, 11)) EXPECT_NEAR(n(-t), -n(t), 1e-9);
}

TEST(Kernel, TwoLayerEvenOddDecomposition) {
  for (const auto& id : registry()) {
    const auto act = make_activation(id);
    const auto [e, o] = even_odd_parts(act);
    const NetworkConfig cfg{2, 1, 0, 0};
    for (auto kind : {KernelKind::nngp, KernelKind::ntk}) {
      if (kind == KernelKind::ntk && id == "heaviside") continue;
      const auto k = build_kernel(kind, act, cfg);
      const auto ke = build_kernel(kind, e, cfg);
      const auto ko = build_kernel(kind, o, cfg);
      for (double t : grid(-0.95, 0.95, 9)) EXPECT_NEAR(k(t), ke(t) + ko(t), 1e-8) << id << " " << to_string(kind);
    }
  }
}

TEST(Kernel, AlphaPositiveAndFinite) {
  const std::vector<double> sw{0.5, 1, 2};
  const std::vector<double> sb{0, 0.5, 1, 2};
  for (const auto& id : registry()) {
    const auto act = make_activation(id);
    // RePU iterates alpha -> c alpha^m, which leaves double range within 10 layers
    const bool polynomial_growth = id.rfind("repu", 0) == 0;
    for (double w : sw)
      for (double b : sb)
        for (double i : sb) {
          const NetworkConfig cfg{10, w * w, b * b, i * i};
          try {
            const auto k = build_nngp(act, cfg);
            for (double a : k.trace().alpha) {
              EXPECT_TRUE(std::isfinite(a)) << id;
              if (polynomial_growth) EXPECT_GE(a, 0.0) << id;
              else EXPECT_GT(a, 0.0) << id;
            }
          } catch (const NumericalOverflow&) {
            EXPECT_TRUE(polynomial_growth) << id << " overflowed";
          }
        }
  }
}

TEST(Kernel, VanishingPartGivesBiasOnly) {
  const auto [e, o] = even_odd_parts(make_activation("rbf"));
  const auto k = build_ntk(o, {3, 1, 0.5, 0.5});
  EXPECT_EQ(k.trace().alpha[1], 0.25);
  for (double t : grid(-1, 1, 5)) EXPECT_NEAR(build_nngp(o, {3, 1, 0.5, 0.5})(t), 0.25, 1e-15);
}

TEST(Kernel, RepuOverflowIsReported) {
  EXPECT_THROW(build_nngp(make_activation("repu:3"), {10, 4, 4, 4}), NumericalOverflow);
}

TEST(Kernel, HermiteBackendAgrees) {
  KernelOptions h;
  h.backend = DualBackend::hermite;
  for (const auto& id : {"relu", "gelu", "selu", "tanh"}) {
    const auto act = make_activation(id);
    for (auto kind : {KernelKind::nngp, KernelKind::ntk}) {
      const auto kq = build_kernel(kind, act, {3, 1, 1, 1});
      const auto kh = build_kernel(kind, act, {3, 1, 1, 1}, h);
      for (double t : grid(-0.95, 0.95, 9)) EXPECT_NEAR(kq(t), kh(t), 1e-4 * kq(1.0)) << id;
    }
  }
}

namespace {

double min_gram_eigenvalue_ratio(const KernelFunction& k, const std::vector<Eigen::VectorXd>& pts) {
  const int n = static_cast<int>(pts.size());
  Eigen::MatrixXd G(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) G(a, b) = G(b, a) = k(std::clamp(pts[a].dot(pts[b]), -1.0, 1.0));
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues().minCoeff() / G.trace();
}

}  // namespace

TEST(Kernel, GramMatrixIsPositiveSemidefinite) {
  // Whole registry on the series backend, a sample on the quadrature backend.
  const auto pts = sphere_points(2, 40, 7);
  KernelOptions h;
  h.backend = DualBackend::hermite;
  for (const auto& id : registry()) {
    const auto act = make_activation(id);
    for (auto kind : {KernelKind::nngp, KernelKind::ntk}) {
      if (kind == KernelKind::ntk && id == "heaviside") continue;
      for (const NetworkConfig& cfg : {NetworkConfig{2, 1, 0, 0}, NetworkConfig{3, 1, 1, 1}})
        EXPECT_GE(min_gram_eigenvalue_ratio(build_kernel(kind, act, cfg, h), pts), -1e-8) << id << " " << to_string(kind);
    }
  }
  for (const auto& id : {"relu", "heaviside", "selu"})
    EXPECT_GE(min_gram_eigenvalue_ratio(build_nngp(make_activation(id), {3, 1, 1, 1}), pts), -1e-8) << id;
  for (const auto& id : {"gelu", "celu"})
    EXPECT_GE(min_gram_eigenvalue_ratio(build_ntk(make_activation(id), {2, 1, 0, 0}), pts), -1e-8) << id;
}
