#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "sirl/basis.hpp"
#include "support.hpp"

using namespace sirl;

namespace {

BasisSet case1_critic() { return BasisSet(2, {{2, 0}, {1, 1}, {0, 2}}); }

BasisSet case2_critic() {
  return BasisSet(2, {{2, 0}, {0, 2}, {1, 1}, {4, 0}, {0, 4}, {3, 1}, {2, 2}, {1, 3}});
}

BasisSet case2_actor() {
  return BasisSet(2, {{1, 0}, {0, 1}, {2, 0}, {0, 2}, {1, 1}, {3, 0}, {0, 3}, {2, 1}, {1, 2}});
}

}  // namespace

TEST(Basis, EvaluatesMonomials) {
  const Eigen::VectorXd phi = case1_critic().eval(Eigen::Vector2d(2, 3));
  EXPECT_EQ(phi, Eigen::Vector3d(4, 6, 9));
}

TEST(Basis, VanishesAtOrigin) {
  for (const BasisSet& b : {case1_critic(), case2_critic(), case2_actor()}) {
    EXPECT_EQ(b.eval(Eigen::VectorXd::Zero(2)).norm(), 0.0);
  }
}

TEST(Basis, AllOnesAtUnitState) {
  const Eigen::VectorXd phi = case2_actor().eval(Eigen::Vector2d(1, 1));
  EXPECT_EQ(phi, Eigen::VectorXd::Ones(9));
}

TEST(Basis, JacobianHandEvaluated) {
  const Eigen::MatrixXd j = case1_critic().jacobian(Eigen::Vector2d(1, 0));
  Eigen::MatrixXd expected(3, 2);
  expected << 2, 0, 0, 1, 0, 0;
  EXPECT_EQ(j, expected);
}

TEST(Basis, JacobianOfHigherDegreeIsZeroAtOrigin) {
  EXPECT_EQ(case2_critic().jacobian(Eigen::VectorXd::Zero(2)).norm(), 0.0);
}

TEST(Basis, JacobianMatchesCentralDifferences) {
  std::mt19937_64 rng(11);
  const double step = 1e-5;
  for (const BasisSet& b : {case1_critic(), case2_critic(), case2_actor(), BasisSet::homogeneous(3, 3)}) {
    const int n = b.input_dim();
    for (int trial = 0; trial < 100; ++trial) {
      const Eigen::VectorXd x = reference::random_vector(rng, n, -1.0, 1.0);
      const Eigen::MatrixXd j = b.jacobian(x);
      Eigen::MatrixXd fd(b.size(), n);
      for (int k = 0; k < n; ++k) {
        Eigen::VectorXd xp = x, xm = x;
        xp(k) += step;
        xm(k) -= step;
        fd.col(k) = (b.eval(xp) - b.eval(xm)) / (2 * step);
      }
      EXPECT_LE((j - fd).norm(), 1e-6 * std::max(1.0, j.norm()));
    }
  }
}

TEST(Basis, HomogeneousOrdering) {
  const BasisSet q = BasisSet::homogeneous(2, 2);
  ASSERT_EQ(q.size(), 3);
  EXPECT_EQ(q.terms()[0], (Exponents{2, 0}));
  EXPECT_EQ(q.terms()[1], (Exponents{1, 1}));
  EXPECT_EQ(q.terms()[2], (Exponents{0, 2}));
  EXPECT_EQ(BasisSet::homogeneous(3, 2).size(), 6);
  EXPECT_EQ(BasisSet::homogeneous(2, 4).size(), 5);
}

TEST(Basis, DescribeAndDegree) {
  const BasisSet b = case2_actor();
  EXPECT_EQ(b.describe(0), "x1");
  EXPECT_EQ(b.describe(7), "x1^2*x2");
  EXPECT_EQ(b.degree(5), 3);
}

TEST(Basis, RejectsMalformedTerms) {
  EXPECT_THROW(BasisSet(2, {{1, 0, 0}}), std::invalid_argument);
  EXPECT_THROW(BasisSet(2, {{0, 0}}), std::invalid_argument);
  EXPECT_THROW(BasisSet(2, {{-1, 2}}), std::invalid_argument);
  EXPECT_THROW(BasisSet(2, {{1, 1}, {1, 1}}), std::invalid_argument);
  EXPECT_THROW(BasisSet(2, {}), std::invalid_argument);
}

TEST(Basis, WrongStateDimensionThrows) {
  EXPECT_THROW(case1_critic().eval(Eigen::Vector3d(1, 2, 3)), std::invalid_argument);
}
