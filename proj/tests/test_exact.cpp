#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace flagframe;

TEST(Rational, ParsesAndCanonicalizes) {
  EXPECT_EQ(parse_rational("6/4"), Rational(3, 2));
  EXPECT_EQ(parse_rational(" -2 "), Rational(-2));
  EXPECT_EQ(format_rational(parse_rational("-3/6")), "-1/2");
  EXPECT_THROW(parse_rational("1/0"), InputError);
  EXPECT_THROW(parse_rational("1.5"), InputError);
  EXPECT_THROW(parse_rational(""), InputError);
}

TEST(QMatrixOps, KernelAndRank) {
  QMatrix m = QMatrix::from_rows({{1, 2, 3}, {2, 4, 6}, {1, 0, 1}}, 3);
  EXPECT_EQ(rank(m), 2u);
  QMatrix k = kernel(m);
  ASSERT_EQ(k.rows(), 1u);
  QVec z = m * k.row(0);
  EXPECT_TRUE(is_zero(z));
}

TEST(QMatrixOps, InverseAndSolve) {
  QMatrix m = QMatrix::from_rows({{2, 1}, {1, 1}}, 2);
  auto inv = inverse(m);
  ASSERT_TRUE(inv);
  EXPECT_TRUE(m * *inv == QMatrix::identity(2));
  auto x = solve(m, {3, 2});
  ASSERT_TRUE(x);
  EXPECT_EQ((*x)[0], 1);
  EXPECT_EQ((*x)[1], 1);
  EXPECT_FALSE(inverse(QMatrix::from_rows({{1, 2}, {2, 4}}, 2)));
}

class SubspaceTest : public ::testing::Test {
 protected:
  AlgebraPtr sl4 = build_sl_flag({1, 1, 1, 1});
};

TEST_F(SubspaceTest, IntersectAndSumIdentities) {
  auto U = GradedSubspace::span(sl4, {unit_vec(sl4->dim(), *sl4->index_of("E10")),
                                      unit_vec(sl4->dim(), *sl4->index_of("E21"))});
  auto I = intersect(U, U);
  EXPECT_EQ(I.dim(), U.dim());
  EXPECT_EQ(sum(U, GradedSubspace(sl4)).dim(), U.dim());
  EXPECT_TRUE(I.contains(unit_vec(sl4->dim(), *sl4->index_of("E10"))));
}

TEST_F(SubspaceTest, ComplementOfCartanDirection) {
  auto sl2 = build_sl_flag({1, 1});
  auto g0 = GradedSubspace::degree_space(sl2, 0);
  ASSERT_EQ(g0.dim(), 1u);
  EXPECT_EQ(complement(g0, g0).dim(), 0u);
  // In sl(3) the Cartan is 2-dimensional; removing one direction leaves one.
  auto sl3 = build_sl_flag({1, 1, 1});
  auto h = GradedSubspace::span(sl3, {sl3->grading_element()});
  EXPECT_EQ(complement(GradedSubspace::degree_space(sl3, 0), h).dim(), 1u);
}

TEST_F(SubspaceTest, RandomComplementDimensions) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coef(-3, 3);
  for (int trial = 0; trial < 50; ++trial) {
    int d = static_cast<int>(rng() % 7) - 3;
    auto amb = GradedSubspace::degree_space(sl4, d);
    auto idx = sl4->indices_of_degree(d);
    std::vector<QVec> vs;
    std::size_t count = rng() % (idx.size() + 1);
    for (std::size_t r = 0; r < count; ++r) {
      QVec v = zero_vec(sl4->dim());
      for (auto i : idx) v[i] = coef(rng);
      vs.push_back(v);
    }
    auto S = GradedSubspace::span(sl4, vs);
    auto C = complement(amb, S);
    EXPECT_EQ(amb.dim(), S.dim() + C.dim());
    EXPECT_EQ(intersect(S, C).dim(), 0u);
  }
}

TEST_F(SubspaceTest, RejectsInhomogeneousVectors) {
  QVec v = unit_vec(sl4->dim(), *sl4->index_of("E10"));
  v[*sl4->index_of("E01")] = 1;
  EXPECT_THROW(GradedSubspace::span(sl4, {v}), InputError);
}
