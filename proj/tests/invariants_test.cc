//
// Copyright 2026 The cdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "cdp/invariants.h"

#include <vector>

#include "cdp/hierarchy.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "testing/generators.h"
#include "testing/status_matchers.h"

namespace cdp {
namespace {

using ::cdp::testing::StatusIs;
using ::testing::ElementsAre;

Vector Vec(std::initializer_list<double> v) {
  Vector out(v.size());
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

TEST(AffineEqualityTest, Validation) {
  Matrix square = Matrix::Identity(2, 2);
  EXPECT_THAT(AffineEquality::Create(square, Vector::Zero(2)),
              StatusIs(absl::StatusCode::kInvalidArgument, ""));
  Matrix dup(2, 3);
  dup << 1, 1, 1, 2, 2, 2;
  EXPECT_THAT(AffineEquality::Create(dup, Vector::Zero(2)),
              StatusIs(absl::StatusCode::kFailedPrecondition, "RankDeficient"));
  Matrix row(1, 3);
  row << 1, 1, 1;
  EXPECT_THAT(AffineEquality::Create(row, Vector::Zero(2)),
              StatusIs(absl::StatusCode::kInvalidArgument, ""));
}

TEST(ContainsTest, SumZero) {
  const AffineEquality eq = AffineEquality::SumEquals(3, 0.0);
  EXPECT_TRUE(*Contains(eq, Vec({2, -1, -1})));
  EXPECT_FALSE(*Contains(eq, Vec({1, 1, 1})));
  EXPECT_THAT(Contains(eq, Vec({1, 1})),
              StatusIs(absl::StatusCode::kInvalidArgument, "DimensionMismatch"));
}

TEST(ContainsTest, InequalityAndIntersection) {
  const AffineInequality nonneg = AffineInequality::NonNegative(2);
  EXPECT_TRUE(*Contains(nonneg, Vec({0, 3})));
  EXPECT_TRUE(*Contains(nonneg, Vec({-1e-10, 3})));  // within tolerance
  EXPECT_FALSE(*Contains(nonneg, Vec({-1e-3, 3})));
  ASSERT_OK_AND_ASSIGN(
      Invariant both,
      Invariant::Intersection(AffineEquality::SumEquals(2, 1.0), nonneg));
  EXPECT_TRUE(*Contains(both, Vec({0.25, 0.75})));
  EXPECT_FALSE(*Contains(both, Vec({-0.5, 1.5})));
  EXPECT_FALSE(*Contains(both, Vec({0.5, 0.6})));
  EXPECT_TRUE(nonneg.IsCoordinateBox());
}

TEST(FreeParametrizationTest, SumZeroThree) {
  ASSERT_OK_AND_ASSIGN(FreeParametrization p,
                       SolveFreeParametrization(AffineEquality::SumEquals(3, 0.0)));
  EXPECT_THAT(p.free_indices(), ElementsAre(0, 1));
  EXPECT_THAT(p.pivot_indices(), ElementsAre(2));
  const Vector z = p.Solve(Vec({0.4, 1.1}));
  EXPECT_DOUBLE_EQ(z[0], 0.4);
  EXPECT_DOUBLE_EQ(z[1], 1.1);
  EXPECT_DOUBLE_EQ(z[2], -1.5);
  EXPECT_EQ(p.Solve(Vector::Zero(2)), Vector::Zero(3));
}

TEST(FreeParametrizationTest, SumZeroTwo) {
  ASSERT_OK_AND_ASSIGN(FreeParametrization p,
                       SolveFreeParametrization(AffineEquality::SumEquals(2, 0.0)));
  EXPECT_THAT(p.free_indices(), ElementsAre(0));
  EXPECT_DOUBLE_EQ(p.Solve(Vec({2.5}))[1], -2.5);
}

TEST(FreeParametrizationTest, TaxiShapedHierarchy) {
  // 263 leaves under 6 boroughs under one root.
  std::vector<HierarchyNode> nodes = {{"NYC", "", 1}};
  for (int b = 0; b < 6; ++b) nodes.push_back({absl::StrCat("B", b), "NYC", 2});
  for (int z = 0; z < 263; ++z) {
    nodes.push_back({absl::StrCat("Z", z), absl::StrCat("B", z % 6), 3});
  }
  ASSERT_OK_AND_ASSIGN(Hierarchy h, Hierarchy::Create(nodes));
  EXPECT_EQ(h.size(), 270);
  ASSERT_OK_AND_ASSIGN(AffineEquality eq, HierarchyToEqualities(h));
  EXPECT_EQ(eq.rows(), 7);
  EXPECT_EQ(eq.dim(), 270);
  ASSERT_OK_AND_ASSIGN(FreeParametrization p, SolveFreeParametrization(eq));
  EXPECT_EQ(p.free_dim(), 263);
  for (int i = 0; i < 263; ++i) EXPECT_TRUE(h.is_leaf(p.free_indices()[i]));
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const Vector z = p.Solve(testing::RandomVector(rng, 263, 100.0));
    EXPECT_LE(eq.Residual(z).lpNorm<Eigen::Infinity>(), 1e-9);
  }
}

TEST(HierarchyToEqualitiesTest, RootWithTwoLeaves) {
  ASSERT_OK_AND_ASSIGN(Hierarchy h, Hierarchy::Create({{"r", "", 1},
                                                       {"a", "r", 2},
                                                       {"b", "r", 2}}));
  ASSERT_OK_AND_ASSIGN(AffineEquality eq, HierarchyToEqualities(h));
  ASSERT_EQ(eq.rows(), 1);
  EXPECT_EQ(eq.a(), (Matrix(1, 3) << 1, 1, -1).finished());
  EXPECT_EQ(eq.b(), Vector::Zero(1));
  EXPECT_THAT(h.order(), ElementsAre("a", "b", "r"));
}

TEST(HierarchyToEqualitiesTest, SingleNodeIsVacuous) {
  ASSERT_OK_AND_ASSIGN(Hierarchy h, Hierarchy::Create({{"only", "", 1}}));
  ASSERT_OK_AND_ASSIGN(AffineEquality eq, HierarchyToEqualities(h));
  EXPECT_EQ(eq.rows(), 0);
  EXPECT_TRUE(*Contains(eq, Vec({123.0})));
}

TEST(InvariantTest, ProductStacksBlocks) {
  const Invariant a(AffineEquality::SumEquals(3, 0.0));
  const Invariant b(AffineInequality::NonNegative(2));
  const Invariant ab = Invariant::Product(a, b);
  EXPECT_EQ(ab.dim(), 5);
  EXPECT_TRUE(*Contains(ab, Vec({1, 1, -2, 0, 4})));
  EXPECT_FALSE(*Contains(ab, Vec({1, 1, -2, -1, 4})));
  EXPECT_FALSE(*Contains(ab, Vec({1, 1, 1, 0, 4})));
}

class InvariantProperties : public ::testing::TestWithParam<uint64_t> {};

TEST_P(InvariantProperties, ChartIsOntoAndExact) {
  Rng rng(GetParam());
  for (int trial = 0; trial < 50; ++trial) {
    const int n = testing::UniformInt(rng, 2, 8);
    const int rows = testing::UniformInt(rng, 1, n - 1);
    const AffineEquality eq = testing::RandomEquality(rng, rows, n);
    ASSERT_OK_AND_ASSIGN(FreeParametrization p, SolveFreeParametrization(eq));
    EXPECT_EQ(p.free_dim(), n - rows);
    const Vector w = testing::RandomVector(rng, p.free_dim());
    const Vector z = p.Solve(w);
    EXPECT_LE(eq.Residual(z).lpNorm<Eigen::Infinity>(), 1e-9);
    EXPECT_LE((p.FreeCoordinates(z) - w).lpNorm<Eigen::Infinity>(), 1e-12);
    // Every member is recovered from its free coordinates.
    const Vector member = testing::RandomMember(rng, eq);
    EXPECT_LE((p.Solve(p.FreeCoordinates(member)) - member).lpNorm<Eigen::Infinity>(),
              1e-9 * (1 + member.lpNorm<Eigen::Infinity>()));
  }
}

TEST_P(InvariantProperties, MidpointsStayInside) {
  Rng rng(GetParam() + 7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = testing::UniformInt(rng, 2, 6);
    const AffineEquality eq = testing::RandomEquality(rng, 1, n);
    const Vector a = testing::RandomMember(rng, eq);
    const Vector b = testing::RandomMember(rng, eq);
    EXPECT_TRUE(*Contains(eq, 0.5 * (a + b)));
    // A random halfspace through both points' convex hull.
    Matrix g = testing::RandomVector(rng, n).transpose();
    const double lower = std::min((g * a)(0), (g * b)(0));
    ASSERT_OK_AND_ASSIGN(AffineInequality h,
                         AffineInequality::Create(g, Vector::Constant(1, lower)));
    EXPECT_TRUE(*Contains(h, 0.5 * (a + b)));
  }
}

TEST_P(InvariantProperties, ConsistentHierarchyVectorsAreMembers) {
  Rng rng(GetParam() + 13);
  for (int trial = 0; trial < 20; ++trial) {
    const Hierarchy h = testing::RandomHierarchy(rng, testing::UniformInt(rng, 1, 4), 4);
    ASSERT_OK_AND_ASSIGN(AffineEquality eq, HierarchyToEqualities(h));
    Vector leaves(h.num_leaves());
    for (int i = 0; i < h.num_leaves(); ++i) {
      leaves[i] = static_cast<double>(testing::UniformInt(rng, 0, 1000));
    }
    const Vector x = h.Aggregate(leaves);
    EXPECT_TRUE(*Contains(eq, x, 0.0));  // integer sums are exact
    ASSERT_OK_AND_ASSIGN(FreeParametrization p, SolveFreeParametrization(eq));
    EXPECT_EQ(p.free_dim(), h.num_leaves());
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, InvariantProperties, ::testing::Values(1, 2, 3));

}  // namespace
}  // namespace cdp
