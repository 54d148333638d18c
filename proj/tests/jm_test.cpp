#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "jmsdp/constructions.hpp"
#include "jmsdp/jm.hpp"

namespace jmsdp {
namespace {

HermitianMatrix up(const HermitianMatrix& pauli) { return (HermitianMatrix::identity(2) + pauli) * 0.5; }

EffectTuple pauli_xz() { return EffectTuple({up(pauli_x()), up(pauli_z())}); }
EffectTuple pauli_xyz() { return EffectTuple({up(pauli_x()), up(pauli_y()), up(pauli_z())}); }

TEST(SignVector, IndexRoundTrip) {
  for (std::size_t g = 1; g <= 5; ++g)
    for (std::size_t k = 0; k < (std::size_t{1} << g); ++k) {
      const auto s = SignVector::from_index(k, g);
      EXPECT_EQ(s.index(), k);
      for (std::size_t i = 0; i < g; ++i) EXPECT_EQ(s.signs[i] == 1, plus_at(k, i));
    }
  EXPECT_THROW((SignVector{{1, 0}}.index()), Error);
}

TEST(AssembleJmSdp, SingleEffectForcesBlocks) {
  const auto e = random_effect_tuple(1, 3, 4);
  const auto p = assemble_jm_sdp(e);
  EXPECT_EQ(p.block_dims.size(), 2u);
  const auto sol = solve(p);
  ASSERT_EQ(sol.status, SdpStatus::Optimal);
  EXPECT_LT(max_abs_diff(sol.block_values[0], e[0]), 1e-7);
  EXPECT_LT(max_abs_diff(sol.block_values[1], HermitianMatrix::identity(3) - e[0]), 1e-7);
}

TEST(AssembleJmSdp, ConstraintCount) {
  const auto p = assemble_jm_sdp(pauli_xz());
  EXPECT_EQ(p.block_dims.size(), 4u);
  for (auto b : p.block_dims) EXPECT_EQ(b, 2u);
  EXPECT_EQ(p.constraints.size(), 3u * 4u);
}

TEST(AssembleJmSdp, GCap) {
  const auto t = random_effect_tuple(7, 2, 1);
  EXPECT_THROW(assemble_jm_sdp(t), Error);
  try {
    assemble_jm_sdp(t);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooManyMeasurements);
  }
  JmOptions opts;
  opts.max_g = 7;
  EXPECT_NO_THROW(assemble_jm_sdp(t, opts));
}

TEST(CheckCompatibility, CommutingEffectsHaveClassicalWitness) {
  const EffectTuple t({HermitianMatrix::diagonal({1.0, 0.0}), HermitianMatrix::identity(2) * 0.5});
  const auto v = check_compatibility(t);
  ASSERT_EQ(v.status, JmStatus::Compatible);
  ASSERT_TRUE(v.witness);
  EXPECT_TRUE(v.witness->check(t.effects()).valid);
  // The product distribution G_eta = diag(p1(eta_1), p1(...)) * 1/2 is an
  // explicit parent; confirm it independently.
  JointPovm product{2, 2, {}};
  for (std::size_t k = 0; k < 4; ++k) {
    const auto first = plus_at(k, 0) ? t[0] : HermitianMatrix::identity(2) - t[0];
    product.elements.push_back(first * 0.5);
  }
  EXPECT_TRUE(product.check(t.effects(), 1e-15).valid);
}

TEST(CheckCompatibility, PauliXZIncompatible) {
  const auto v = check_compatibility(pauli_xz());
  EXPECT_EQ(v.status, JmStatus::Incompatible);
  EXPECT_FALSE(v.witness);
  EXPECT_LE(v.certificate_residual, 1e-8);
  EXPECT_LT(v.margin, 0.0);
  EXPECT_FALSE(v.certificate.empty());
}

TEST(CheckCompatibility, TrivialEffectsProductWitness) {
  const EffectTuple t({HermitianMatrix::identity(2) * 0.5, HermitianMatrix::identity(2) * 0.5});
  const auto v = check_compatibility(t);
  ASSERT_EQ(v.status, JmStatus::Compatible);
  EXPECT_GE(v.margin, 0.0);
  JointPovm product{2, 2, std::vector<HermitianMatrix>(4, HermitianMatrix::identity(2) * 0.25)};
  EXPECT_TRUE(product.check(t.effects(), 1e-15).valid);
}

TEST(CheckCompatibility, NoisyPaulisInsideQuarterCircle) {
  const auto t = add_noise(pauli_xz(), {0.7, 0.7}, NoiseModel::balanced());
  const auto v = check_compatibility(t);
  ASSERT_EQ(v.status, JmStatus::Compatible);
  EXPECT_TRUE(v.witness->check(t.effects()).valid);
}

TEST(CheckCompatibility, WitnessesPassIndependentCheck) {
  Rng rng(5);
  int compatible = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t g = 2 + seed % 2;
    const double s = 0.4 + 0.6 * rng.uniform();
    const auto t = add_noise(random_effect_tuple(g, 2, 40 + seed), ScalingVector::constant(g, s), NoiseModel::balanced());
    const auto v = check_compatibility(t);
    EXPECT_NE(v.status, JmStatus::Indeterminate) << v.message;
    if (v.status != JmStatus::Compatible) continue;
    ++compatible;
    ASSERT_TRUE(v.witness);
    const auto& w = *v.witness;
    for (const auto& gm : w.elements) EXPECT_GE(min_eigenvalue(gm), -1e-8);
    auto sum = HermitianMatrix::zero(2);
    for (const auto& gm : w.elements) sum += gm;
    EXPECT_LE(max_abs_diff(sum, HermitianMatrix::identity(2)), 1e-8);
    for (std::size_t i = 0; i < g; ++i) {
      auto m = HermitianMatrix::zero(2);
      for (std::size_t k = 0; k < w.elements.size(); ++k)
        if (SignVector::from_index(k, g).signs[i] == 1) m += w.elements[k];
      EXPECT_LE(max_abs_diff(m, t[i]), 1e-8);
    }
  }
  EXPECT_GT(compatible, 10);
}

TEST(Robustness, PauliPair) {
  const auto r = robustness(pauli_xz(), {1.0, 1.0}, NoiseModel::balanced());
  ASSERT_EQ(r.status, SdpStatus::Optimal);
  EXPECT_NEAR(r.t_star, 1.0 / std::numbers::sqrt2, 1e-6);
  EXPECT_FALSE(r.capped);
  ASSERT_TRUE(r.witness);
}

TEST(Robustness, PauliTriple) {
  const auto r = robustness(pauli_xyz(), {1.0, 1.0, 1.0}, NoiseModel::balanced());
  ASSERT_EQ(r.status, SdpStatus::Optimal);
  EXPECT_NEAR(r.t_star, 1.0 / std::sqrt(3.0), 1e-6);
}

TEST(Robustness, TrivialEffectsHitCap) {
  const EffectTuple t({HermitianMatrix::identity(2) * 0.5, HermitianMatrix::identity(2) * 0.5});
  const auto r = robustness(t, {0.5, 0.25}, NoiseModel::balanced());
  EXPECT_DOUBLE_EQ(r.t_cap, 2.0);
  EXPECT_NEAR(r.t_star, 2.0, 1e-6);
  EXPECT_TRUE(r.capped);
  const auto r2 = robustness(t, {1.0, 1.0}, NoiseModel::linear(), 0.5);
  EXPECT_NEAR(r2.t_star, 0.5, 1e-6);
  EXPECT_TRUE(r2.capped);
}

TEST(Robustness, Errors) {
  const auto t = pauli_xz();
  EXPECT_THROW(robustness(t, {1.0}, NoiseModel::balanced()), Error);
  EXPECT_THROW(robustness(t, {0.0, 0.0}, NoiseModel::balanced()), Error);
  try {
    robustness(t, {1.0, 1.0}, NoiseModel::general({0.5, 0.5}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedModel);
  }
}

TEST(Robustness, AgreesWithFeasibilityEitherSide) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto t = random_effect_tuple(3, 2, 60 + seed);
    const ScalingVector dir{1.0, 0.8, 0.6};
    const auto r = robustness(t, dir, NoiseModel::linear());
    ASSERT_EQ(r.status, SdpStatus::Optimal);
    if (r.capped) continue;
    const auto inside = add_noise(t, dir.scaled(r.t_star * 0.99), NoiseModel::linear());
    const auto outside = add_noise(t, dir.scaled(std::min(r.t_cap, r.t_star * 1.02)), NoiseModel::linear());
    EXPECT_EQ(check_compatibility(inside).status, JmStatus::Compatible) << seed;
    EXPECT_EQ(check_compatibility(outside).status, JmStatus::Incompatible) << seed;
  }
}

TEST(Robustness, MonotoneInDirection) {
  Rng rng(8);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto t = random_effect_tuple(2, 3, 80 + seed);
    const double a = 0.2 + 0.8 * rng.uniform(), b = 0.2 + 0.8 * rng.uniform();
    const double bump = a + (1.0 - a) * rng.uniform();
    const auto r = robustness(t, {a, b}, NoiseModel::balanced(), 10.0);
    const auto rb = robustness(t, {bump, b}, NoiseModel::balanced(), 10.0);
    EXPECT_LE(rb.t_star, r.t_star + 1e-6) << seed;
  }
}

TEST(Robustness, MidpointOfCompatibleScalingsIsCompatible) {
  Rng rng(9);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto t = random_effect_tuple(2, 2, 90 + seed);
    const ScalingVector d1{1.0, 0.3 * rng.uniform()}, d2{0.3 * rng.uniform(), 1.0};
    const auto r1 = robustness(t, d1, NoiseModel::balanced());
    const auto r2 = robustness(t, d2, NoiseModel::balanced());
    const auto s1 = d1.scaled(r1.t_star * (1.0 - 1e-6)), s2 = d2.scaled(r2.t_star * (1.0 - 1e-6));
    const auto n1 = add_noise(t, s1, NoiseModel::balanced()), n2 = add_noise(t, s2, NoiseModel::balanced());
    ASSERT_EQ(check_compatibility(n1).status, JmStatus::Compatible);
    ASSERT_EQ(check_compatibility(n2).status, JmStatus::Compatible);
    const ScalingVector mid{(s1[0] + s2[0]) / 2, (s1[1] + s2[1]) / 2};
    EXPECT_EQ(check_compatibility(add_noise(t, mid, NoiseModel::balanced())).status, JmStatus::Compatible);
  }
}

TEST(Robustness, SymmetricLowerBounds) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t g = 2 + seed % 3, d = 2 + seed % 2;
    const auto t = random_effect_tuple(g, d, 120 + seed);
    const auto r = robustness(t, ScalingVector::constant(g, 1.0), NoiseModel::balanced());
    ASSERT_EQ(r.status, SdpStatus::Optimal);
    EXPECT_GE(r.t_star, 1.0 / static_cast<double>(g) - 1e-6);
    EXPECT_GE(r.t_star, 1.0 / (2.0 * static_cast<double>(d)) - 1e-6);
  }
}

TEST(Robustness, QuarterCircleLowerBound) {
  Rng rng(10);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto t = random_effect_tuple(3, 3, 140 + seed);
    std::vector<double> v(3);
    double n2 = 0.0;
    for (auto& x : v) {
      x = rng.uniform();
      n2 += x * x;
    }
    for (auto& x : v) x /= std::sqrt(n2);
    const auto r = robustness(t, ScalingVector(v), NoiseModel::balanced());
    EXPECT_GE(r.t_star, 1.0 - 1e-5) << seed;
  }
}

TEST(RegionSweep, SingletonEmptyAndOrder) {
  const auto t = pauli_xz();
  EXPECT_TRUE(region_sweep(t, {}, NoiseModel::balanced()).empty());
  const auto one = region_sweep(t, {ScalingVector{1.0, 1.0}}, NoiseModel::balanced());
  ASSERT_EQ(one.size(), 1u);
  ASSERT_TRUE(one[0].result);
  EXPECT_NEAR(one[0].result->t_star, robustness(t, {1.0, 1.0}, NoiseModel::balanced()).t_star, 1e-12);
}

TEST(RegionSweep, QuarterCircleBoundary) {
  std::vector<ScalingVector> dirs;
  for (int k = 0; k < 64; ++k) {
    const double th = (k + 0.5) * std::numbers::pi / 2.0 / 64.0;
    dirs.push_back(ScalingVector{std::cos(th), std::sin(th)});
  }
  const auto out = region_sweep(pauli_xz(), dirs, NoiseModel::balanced(), {}, 4);
  ASSERT_EQ(out.size(), dirs.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    EXPECT_EQ(out[k].direction.values(), dirs[k].values());
    ASSERT_TRUE(out[k].result) << out[k].error;
    EXPECT_NEAR(out[k].result->t_star, 1.0, 1e-4) << k;
  }
}

TEST(RegionSweep, ErrorsAreCapturedPerEntry) {
  const auto out = region_sweep(pauli_xz(), {ScalingVector{1.0, 1.0}, ScalingVector{1.0}}, NoiseModel::balanced(), {}, 2);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_TRUE(out[0].result);
  EXPECT_FALSE(out[1].result);
  EXPECT_FALSE(out[1].error.empty());
}

TEST(RegionSweep, ThreadCountDoesNotChangeResults) {
  const auto t = random_effect_tuple(2, 3, 5);
  std::vector<ScalingVector> dirs;
  for (int k = 1; k <= 8; ++k) dirs.push_back(ScalingVector{1.0, k / 8.0});
  const auto a = region_sweep(t, dirs, NoiseModel::linear(), {}, 1);
  const auto b = region_sweep(t, dirs, NoiseModel::linear(), {}, 4);
  for (std::size_t k = 0; k < dirs.size(); ++k) EXPECT_EQ(a[k].result->t_star, b[k].result->t_star);
}

}  // namespace
}  // namespace jmsdp
