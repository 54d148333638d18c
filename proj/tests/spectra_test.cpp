#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "jmsdp/spectra.hpp"

namespace jmsdp {
namespace {

// Oracle: largest eigenvalue over all 2^g sign sums, eigenvalues of 2x2
// Hermitian matrices in closed form.
double max_eig_2x2(const HermitianMatrix& m) {
  const double a = m(0, 0).real(), d = m(1, 1).real();
  return 0.5 * (a + d) + std::sqrt(0.25 * (a - d) * (a - d) + std::norm(m(0, 1)));
}

double brute_gauge_2x2(const MatrixTuple& x) {
  double worst = -1e300;
  for (std::size_t k = 0; k < (std::size_t{1} << x.size()); ++k) {
    auto s = HermitianMatrix::zero(2);
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * (((k >> i) & 1U) ? -1.0 : 1.0);
    worst = std::max(worst, max_eig_2x2(s));
  }
  return worst;
}

TEST(MatrixTuple, Validation) {
  EXPECT_THROW(MatrixTuple(std::vector<HermitianMatrix>{}), Error);
  EXPECT_THROW(MatrixTuple({pauli_x(), HermitianMatrix::identity(3)}), Error);
  const auto s = MatrixTuple::scalars({0.5, -0.25});
  EXPECT_EQ(s.level(), 1u);
  EXPECT_EQ(s.size(), 2u);
}

TEST(Diamond, Examples) {
  const auto vertex = diamond_membership(MatrixTuple::scalars({1.0, 0.0, 0.0}));
  EXPECT_TRUE(vertex.member);
  EXPECT_NEAR(vertex.margin, 0.0, 1e-15);

  const auto half = diamond_membership(MatrixTuple({pauli_x() * 0.5, pauli_z() * 0.5}));
  EXPECT_TRUE(half.member);
  EXPECT_NEAR(half.margin, 1.0 - std::numbers::sqrt2 / 2.0, 1e-12);

  const auto full = diamond_membership(MatrixTuple({pauli_x(), pauli_z()}));
  EXPECT_FALSE(full.member);
  EXPECT_NEAR(full.margin, 1.0 - std::numbers::sqrt2, 1e-12);
}

TEST(Diamond, GaugeMatchesBruteForce) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<HermitianMatrix> xs;
    for (std::size_t i = 0; i < 1 + static_cast<std::size_t>(trial) % 4; ++i) xs.push_back(random_hermitian(2, rng));
    const MatrixTuple x(xs);
    EXPECT_NEAR(diamond_gauge(x), brute_gauge_2x2(x), 1e-10);
  }
}

TEST(Diamond, GCap) {
  const auto x = MatrixTuple::scalars(std::vector<double>(5, 0.1));
  EXPECT_NO_THROW(diamond_membership(x));
  try {
    diamond_membership(x, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooManyMeasurements);
  }
}

TEST(Diamond, LevelOneIsL1Ball) {
  Rng rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> v(1 + trial % 5);
    double l1 = 0.0;
    for (auto& x : v) {
      x = rng.uniform(-0.6, 0.6);
      l1 += std::abs(x);
    }
    EXPECT_EQ(diamond_membership(MatrixTuple::scalars(v)).member, l1 <= 1.0 + 1e-12);
  }
}

TEST(MatrixBall, Examples) {
  const auto one = matrix_ball_membership(MatrixTuple({pauli_x()}));
  EXPECT_TRUE(one.member);
  EXPECT_NEAR(one.margin, 0.0, 1e-12);
  const double r = 1.0 / std::numbers::sqrt2;
  const auto two = matrix_ball_membership(MatrixTuple({pauli_x() * r, pauli_y() * r}));
  EXPECT_TRUE(two.member);
  EXPECT_NEAR(two.margin, 0.0, 1e-12);
  const auto out = matrix_ball_membership(MatrixTuple({pauli_x(), pauli_z()}));
  EXPECT_FALSE(out.member);
  EXPECT_NEAR(out.margin, -1.0, 1e-12);
}

TEST(DiamondInBall, SampledMembers) {
  for (std::size_t g = 1; g <= 4; ++g)
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto samples = sample_diamond(g, n, 100 * g + n, 150);
      for (const auto& x : samples) {
        const auto dm = diamond_membership(x);
        EXPECT_TRUE(dm.member);
        EXPECT_GE(dm.margin, 0.0);
        EXPECT_GE(matrix_ball_membership(x).margin, -1e-9);
      }
    }
}

TEST(SampleDiamond, Reproducible) {
  const auto a = sample_diamond(3, 2, 42, 10), b = sample_diamond(3, 2, 42, 10);
  ASSERT_EQ(a.size(), 10u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(ScaleTuple, Examples) {
  Rng rng(6);
  const MatrixTuple x({random_hermitian(3, rng), random_hermitian(3, rng)});
  EXPECT_EQ(scale_tuple(x, {1.0, 1.0}), x);
  const auto z = scale_tuple(x, {0.0, 0.0});
  for (const auto& m : z.matrices()) EXPECT_EQ(m.max_abs(), 0.0);
  EXPECT_THROW(scale_tuple(x, {1.0}), Error);
}

TEST(ScaleTuple, MembersStayMembers) {
  Rng rng(7);
  for (const auto& x : sample_diamond(3, 3, 7, 200)) {
    const ScalingVector s{rng.uniform(), rng.uniform(), rng.uniform()};
    EXPECT_TRUE(diamond_membership(scale_tuple(x, s)).member);
  }
}

TEST(Level1Inclusion, Examples) {
  EXPECT_TRUE(diamond_level1_inclusion(random_effect_tuple(3, 3, 1).effects()));
  EXPECT_FALSE(diamond_level1_inclusion({HermitianMatrix::identity(2) * 2.0}));
  EXPECT_FALSE(diamond_level1_inclusion({HermitianMatrix::identity(2) * -0.1}));
}

TEST(Level1Inclusion, AgreesWithEffectValidation) {
  Rng rng(8);
  int valid = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<HermitianMatrix> es;
    for (std::size_t i = 0; i < 2; ++i) {
      auto h = random_hermitian(2, rng, 0.3) + HermitianMatrix::identity(2) * 0.5;
      es.push_back(h);
    }
    bool direct = true;
    for (const auto& e : es) direct = direct && is_effect(e);
    valid += direct;
    EXPECT_EQ(diamond_level1_inclusion(es), direct);
  }
  EXPECT_GT(valid, 100);
  EXPECT_LT(valid, 900);
}

TEST(FreeInclusion, Examples) {
  const auto id = HermitianMatrix::identity(2);
  const EffectTuple paulis({(id + pauli_x()) * 0.5, (id + pauli_z()) * 0.5});
  EXPECT_EQ(diamond_free_inclusion(paulis).status, JmStatus::Incompatible);
  EXPECT_EQ(diamond_free_inclusion(random_effect_tuple(1, 3, 2)).status, JmStatus::Compatible);
  const double s = 0.99 / std::sqrt(3.0);
  const auto scaled = add_noise(random_effect_tuple(3, 2, 3), {s, s, s}, NoiseModel::balanced());
  EXPECT_EQ(diamond_free_inclusion(scaled).status, JmStatus::Compatible);
}

TEST(FreeInclusion, MatchesJointMeasurability) {
  Rng rng(9);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t g = 2 + seed % 2;
    const auto t = add_noise(random_effect_tuple(g, 2, 300 + seed), ScalingVector::constant(g, 0.5 + 0.5 * rng.uniform()),
                             NoiseModel::balanced());
    EXPECT_EQ(diamond_free_inclusion(t).status, check_compatibility(t).status) << seed;
  }
}

}  // namespace
}  // namespace jmsdp
