#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nks/spectrum.hpp"

using namespace nks;

TEST(Gegenbauer, Values) {
  for (int d = 1; d <= 5; ++d) {
    EXPECT_NEAR(gegenbauer_p(1, d, 0.3), 0.3, 1e-15);
    for (int l = 0; l <= 20; ++l) EXPECT_NEAR(gegenbauer_p(l, d, 1.0), 1.0, 1e-13);
  }
  EXPECT_NEAR(gegenbauer_p(2, 2, 0.0), -0.5, 1e-15);
  EXPECT_NEAR(gegenbauer_p(5, 1, 0.4), std::cos(5 * std::acos(0.4)), 1e-14);
}

TEST(Gegenbauer, Orthogonality) {
  for (int d = 1; d <= 5; ++d) {
    const auto& rule = sphere_rule(64, d);
    for (int l = 0; l <= 30; ++l)
      for (int k = l; k <= 30; ++k) {
        long double s = 0;
        for (std::size_t i = 0; i < rule.size(); ++i)
          s += rule.weights[i] * gegenbauer_p(l, d, rule.nodes[i]) * gegenbauer_p(k, d, rule.nodes[i]);
        EXPECT_NEAR(static_cast<double>(s), l == k ? 1.0 / multiplicity(l, d) : 0.0, 1e-9) << d << " " << l << " " << k;
      }
  }
}

TEST(Multiplicity, Values) {
  for (int l = 1; l <= 50; ++l) {
    EXPECT_EQ(multiplicity(l, 1), 2.0);
    EXPECT_EQ(multiplicity(l, 2), 2.0 * l + 1);
  }
  for (int d = 1; d <= 6; ++d) EXPECT_EQ(multiplicity(0, d), 1.0);
  EXPECT_EQ(multiplicity(3, 3), 16.0);
}

TEST(Eigenvalues, SimpleKernels) {
  const auto lin = eigenvalues([](double t) { return t; }, 2, 40, 100);
  EXPECT_GT(lin.mu[1], 0.0);
  for (int l = 0; l <= 40; ++l)
    if (l != 1) {
      EXPECT_LT(std::fabs(lin.mu[l]), 1e-12);
    }
  const auto one = eigenvalues([](double) { return 1.0; }, 3, 40, 100);
  EXPECT_NEAR(one.mu[0], 1.0, 1e-14);
  for (int l = 1; l <= 40; ++l) EXPECT_LT(std::fabs(one.mu[l]), 1e-13);
  const auto sq = eigenvalues([](double t) { return 1 + 2 * t * t; }, 2, 40, 100);
  for (int l = 0; l <= 40; ++l) {
    if (l == 0 || l == 2) EXPECT_GT(sq.mu[l], 0.1);
    else EXPECT_LT(std::fabs(sq.mu[l]), 1e-13);
  }
}

TEST(Eigenvalues, MercerReconstruction) {
  for (const auto& id : {"relu", "selu", "celu", "gelu", "heaviside"}) {
    const auto k = build_nngp(make_activation(id), {3, 1, 1, 1});
    const auto s = eigenvalues(k, 2, 256, 1000);
    EXPECT_LT(s.mercer_residual, 1e-4 * k(1.0)) << id;
  }
}

TEST(Eigenvalues, UnderResolvedReported) {
  const auto k = build_nngp(make_activation("heaviside"), {2, 1, 1, 1});
  SpectrumOptions opt;
  opt.mercer_tolerance = 1e-9;
  EXPECT_THROW(eigenvalues(k, 2, 16, 40, opt), QuadratureUnderResolved);
  EXPECT_THROW(eigenvalues(k, 2, 100, 150), ValidationError);
}

TEST(Eigenvalues, OppositeParityVanishes) {
  for (const auto& id : {"tanh", "rbf", "sin", "sk:1", "sk:2"}) {
    const auto act = make_activation(id);
    const bool odd = parity_of(act) == Parity::odd;
    for (auto kind : {KernelKind::nngp, KernelKind::ntk}) {
      SpectrumOptions opt;
      opt.check_mercer = false;
      const auto s = eigenvalues(build_kernel(kind, act, {3, 1, 0, 0}), 2, 64, 400, opt);
      double top = 0;
      for (double m : s.mu) top = std::max(top, std::fabs(m));
      for (int l = odd ? 0 : 1; l <= 64; l += 2) EXPECT_LT(std::fabs(s.mu[l]), 1e-12 * top) << id << " l=" << l;
    }
  }
}

TEST(FitDecay, ExactPowerLaw) {
  Spectrum s;
  s.d = 2;
  for (int l = 0; l <= 200; ++l) {
    s.mu.push_back(std::pow(l + 1.0, -3));
    s.multiplicities.push_back(multiplicity(l, 2));
  }
  const auto f = fit_decay(s, EigenParity::all, 16, 128);
  EXPECT_NEAR(f.slope, -3.0, 1e-6);
  EXPECT_TRUE(f.zero_set.empty());
  EXPECT_THROW(fit_decay(s, EigenParity::even, 10, 14), InsufficientData);
  EXPECT_THROW(fit_decay(s, EigenParity::even, 10, 400), ValidationError);
}

TEST(FitDecay, ReluNtkOddZeros) {
  const auto s = eigenvalues(build_ntk(make_activation("relu"), {2, 1, 0, 0}), 2, 256, 1000);
  const auto z = zero_set(s, EigenParity::odd, 3, 255);
  for (int l = 3; l <= 255; l += 2) EXPECT_NE(std::find(z.begin(), z.end(), l), z.end()) << l;
  EXPECT_THROW(fit_decay(s, EigenParity::odd, 3, 255), InsufficientData);
  const auto f = fit_decay(s, EigenParity::all, 2, 128);
  EXPECT_EQ(f.zero_set.size(), 63u);
}

TEST(FitDecay, ReluNngpThreeLayers) {
  const auto s = eigenvalues(build_nngp(make_activation("relu"), {3, 1, 1, 1}), 2, 256, 1000);
  EXPECT_NEAR(fit_decay(s, EigenParity::all, 16, 128).slope, -5.0, 0.3);
}

TEST(Predict, Examples) {
  const auto relu = predict_exponent(make_activation("relu"), {3, 1, 1, 1}, KernelKind::ntk, EigenParity::even, 2);
  EXPECT_EQ(relu.decay, DecayClass::power_law);
  EXPECT_EQ(relu.exponent, -3.0);
  EXPECT_EQ(predict_exponent(make_activation("relu"), {3, 1, 1, 1}, KernelKind::ntk, EigenParity::odd, 2).exponent,
            -3.0);
  EXPECT_EQ(predict_exponent(make_activation("relu"), {3, 1, 1, 1}, KernelKind::nngp, EigenParity::all, 2).exponent,
            -5.0);
  const auto selu = predict_exponent(make_activation("selu"), {2, 1, 0, 0}, KernelKind::ntk, EigenParity::odd, 2);
  EXPECT_EQ(selu.exponent, -5.0);
  EXPECT_EQ(selu.smoothness, 2);
  EXPECT_EQ(selu.simplified, "phi_odd");
  const auto sq = predict_exponent(make_activation("poly:0,0,1"), {3, 1, 1, 1}, KernelKind::nngp, EigenParity::all, 2);
  EXPECT_EQ(sq.decay, DecayClass::finite_rank);
  EXPECT_EQ(sq.max_degree, 4);
}

TEST(Predict, Regimes) {
  const NetworkConfig bias{2, 1, 1, 1}, nobias{2, 1, 0, 0};
  // Heaviside NNGP exponent -(d + 2^(2-L))
  EXPECT_EQ(predict_exponent(make_activation("heaviside"), {3, 1, 1, 1}, KernelKind::nngp, EigenParity::all, 2).exponent,
            -2.5);
  EXPECT_THROW(predict_exponent(make_activation("heaviside"), bias, KernelKind::ntk, EigenParity::all, 2), NTKUndefined);
  EXPECT_EQ(predict_exponent(make_activation("tanh"), bias, KernelKind::nngp, EigenParity::all, 2).decay,
            DecayClass::superpolynomial);
  // relu without bias: odd part is linear, so odd eigenvalues stop at l = 1
  const auto odd = predict_exponent(make_activation("relu"), nobias, KernelKind::ntk, EigenParity::odd, 2);
  EXPECT_EQ(odd.decay, DecayClass::finite_rank);
  EXPECT_EQ(odd.max_degree, 1);
  EXPECT_EQ(predict_exponent(make_activation("tanh"), nobias, KernelKind::nngp, EigenParity::even, 2).decay,
            DecayClass::zero);
  EXPECT_EQ(predict_exponent(make_activation("celu"), nobias, KernelKind::ntk, EigenParity::even, 2).exponent, -7.0);
  EXPECT_EQ(predict_exponent(make_activation("celu"), nobias, KernelKind::ntk, EigenParity::odd, 2).exponent, -5.0);
  EXPECT_THROW(predict_exponent(make_activation("relu"), {1, 1, 1, 1}, KernelKind::nngp, EigenParity::all, 2),
               ValidationError);
}

TEST(Predict, MonomialRanks) {
  for (int m = 1; m <= 3; ++m) {
    std::string id = "poly:";
    for (int i = 0; i <= m; ++i) id += (i ? "," : "") + std::string(i == m ? "1" : "0");
    const auto act = make_activation(id);
    for (int L = 2; L <= 3; ++L) {
      const NetworkConfig cfg{L, 1, 1, 1};
      const auto p = predict_exponent(act, cfg, KernelKind::nngp, EigenParity::all, 2);
      ASSERT_EQ(p.decay, DecayClass::finite_rank);
      EXPECT_EQ(p.max_degree, static_cast<long long>(std::pow(m, L - 1))) << id << " L=" << L;
      const auto s = eigenvalues(build_nngp(act, cfg), 2, 32, 200);
      for (int l = 0; l <= 32; ++l) {
        if (l <= p.max_degree) EXPECT_GT(s.mu[l], 1e-10 * s.mu[0]) << id << " L=" << L << " l=" << l;
        else EXPECT_LT(std::fabs(s.mu[l]), 1e-10 * s.mu[0]) << id << " L=" << L << " l=" << l;
      }
    }
  }
}
