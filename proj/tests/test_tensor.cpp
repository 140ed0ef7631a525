#include <gtest/gtest.h>

#include "kinship/errors.hpp"
#include "kinship/tensor.hpp"
#include "test_util.hpp"

using namespace kinship;

namespace {

Tensor random_tensor(std::vector<std::size_t> dims, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor t(std::move(dims));
  for (double& v : t.data()) v = u(gen);
  return t;
}

Eigen::MatrixXd random_matrix(int r, int c, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = u(gen);
  return m;
}

std::vector<double> as_vector(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

}  // namespace

TEST(Tensor, OffsetsAreFirstIndexFastest) {
  Tensor t({2, 3, 4});
  const std::size_t idx[] = {1, 2, 3};
  EXPECT_EQ(t.offset(idx), 1u + 2 * 2 + 3 * 6);
  EXPECT_EQ(t.index_of(23), (std::vector<std::size_t>{1, 2, 3}));
}

TEST(Unfold, MatrixModeZeroIsItself) {
  const Tensor t({2, 2}, {1.0, 2.0, 3.0, 4.0});
  const Eigen::MatrixXd m = unfold(t, 0);
  EXPECT_EQ(m(0, 0), 1.0);
  EXPECT_EQ(m(1, 0), 2.0);
  EXPECT_EQ(m(0, 1), 3.0);
  EXPECT_EQ(m(1, 1), 4.0);
}

TEST(Unfold, ShapeAndRefold) {
  const Tensor t = random_tensor({2, 3, 4}, 1);
  const Eigen::MatrixXd m = unfold(t, 1);
  EXPECT_EQ(m.rows(), 3);
  EXPECT_EQ(m.cols(), 8);
  EXPECT_EQ(refold(m, 1, t.dims()), t);
}

TEST(Unfold, MatchesIndexFormulaOracle) {
  const Tensor t = random_tensor({3, 4, 5}, 2);
  for (int mode = 0; mode < 3; ++mode) {
    const Eigen::MatrixXd m = unfold(t, static_cast<std::size_t>(mode));
    const auto ref = oracle::unfold3(as_vector(t), 3, 4, 5, mode);
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c) ASSERT_EQ(m(r, c), ref[r][c]);
  }
}

TEST(Unfold, RoundTripProperty) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 gen(seed);
    std::vector<std::size_t> dims(1 + gen() % 4);
    for (auto& d : dims) d = 1 + gen() % 5;
    const Tensor t = random_tensor(dims, seed);
    for (std::size_t k = 0; k < dims.size(); ++k) EXPECT_EQ(refold(unfold(t, k), k, dims), t);
  }
}

TEST(Unfold, InvalidMode) {
  EXPECT_THROW(unfold(Tensor({2, 2}), 2), UsageError);
  EXPECT_THROW(refold(Eigen::MatrixXd::Zero(3, 3), 0, {2, 2}), UsageError);
}

TEST(ModeProduct, IdentityLeavesTensor) {
  const Tensor t = random_tensor({3, 4, 2}, 3);
  EXPECT_EQ(mode_product(t, Eigen::MatrixXd::Identity(4, 4), 1), t);
}

TEST(ModeProduct, MatchesTripleLoopOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Tensor t = random_tensor({3, 3, 3}, 10 + seed);
    for (int mode = 0; mode < 3; ++mode) {
      const Eigen::MatrixXd a = random_matrix(2 + mode, 3, 20 + seed);
      const Tensor got = mode_product(t, a, static_cast<std::size_t>(mode));
      const auto [ref, dims] = oracle::mode_product3(as_vector(t), 3, 3, 3, testutil::to_grid(a), mode);
      ASSERT_EQ(got.size(), ref.size());
      for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(got[i], ref[i], 1e-10);
      EXPECT_EQ(static_cast<int>(got.dim(static_cast<std::size_t>(mode))), dims[mode]);
    }
  }
}

TEST(ModeProduct, EqualsRefoldOfMatrixProduct) {
  const Tensor t = random_tensor({4, 5, 3}, 4);
  const Eigen::MatrixXd a = random_matrix(2, 5, 5);
  std::vector<std::size_t> dims = t.dims();
  dims[1] = 2;
  const Tensor ref = refold(a * unfold(t, 1), 1, dims);
  const Tensor got = mode_product(t, a, 1);
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], ref[i], 1e-12);
}

TEST(ModeProduct, DisjointModesCommute) {
  const Tensor t = random_tensor({4, 5, 3}, 6);
  const Eigen::MatrixXd a = random_matrix(2, 4, 7);
  const Eigen::MatrixXd b = random_matrix(3, 5, 8);
  const Tensor ab = mode_product(mode_product(t, a, 0), b, 1);
  const Tensor ba = mode_product(mode_product(t, b, 1), a, 0);
  ASSERT_EQ(ab.dims(), ba.dims());
  for (std::size_t i = 0; i < ab.size(); ++i) EXPECT_NEAR(ab[i], ba[i], 1e-12);
}

TEST(ModeProduct, DimensionMismatch) {
  EXPECT_THROW(mode_product(Tensor({2, 3}), Eigen::MatrixXd::Zero(2, 2), 1), UsageError);
}

TEST(Tensor, SubtractAndShapeChecks) {
  const Tensor a({2, 2}, {1, 2, 3, 4});
  const Tensor b({2, 2}, {1, 1, 1, 1});
  EXPECT_EQ(subtract(a, b), Tensor({2, 2}, {0, 1, 2, 3}));
  EXPECT_THROW(subtract(a, Tensor({4})), UsageError);
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>{1.0}), UsageError);
}
