#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace flagframe;
using namespace fftest;

namespace {

SolutionGrid solve(const OdeProblem& p, std::vector<double> init, double dt, std::size_t n, bool fund = true) {
  return integrate_ode(p, Eigen::Map<Eigen::VectorXd>(init.data(), static_cast<Eigen::Index>(init.size())), 0.0, dt,
                       n, fund);
}

StructureVerdict verdict(int order, const std::string& f, double tol = 1e-6) {
  VerdictOptions o;
  o.tol = tol;
  return structure_verdict(OdeProblem::make(order, f), o);
}

}  // namespace

TEST(OdeProblem, Validation) {
  EXPECT_THROW(OdeProblem::make(2, "y"), InputError);
  EXPECT_THROW(OdeProblem::make(13, "y"), InputError);
  EXPECT_THROW(OdeProblem::make(3, "y'''"), ParseError);
  auto p = OdeProblem::make(4, "x * y'' + y");
  EXPECT_EQ(p.k, 3);
  EXPECT_EQ(p.partials.size(), 4u);
}

TEST(Integrate, PolynomialExactness) {
  auto s = solve(OdeProblem::make(3, "0"), {0, 1, 0}, 0.01, 101, false);
  for (std::size_t j = 0; j < s.size(); ++j) {
    EXPECT_NEAR(s.y[j](0), s.t(j), 1e-14);
    EXPECT_NEAR(s.y[j](1), 1.0, 1e-15);
    EXPECT_EQ(s.y[j](2), 0.0);
  }
}

TEST(Integrate, ConstantWronskian) {
  auto s = solve(OdeProblem::make(3, "y"), {0.1, 0.2, 0.3}, 0.005, 401);
  for (const auto& Z : s.Z) EXPECT_NEAR(Z.determinant(), 1.0, 1e-8);
}

TEST(Integrate, FundamentalMatrixSolvesLinearization) {
  // z''' = z has fundamental matrix exp(tK) with K the companion matrix.
  auto s = solve(OdeProblem::make(3, "y"), {0, 0, 0}, 0.01, 101);
  Eigen::Matrix3d K;
  K << 0, 1, 0, 0, 0, 1, 1, 0, 0;
  Eigen::MatrixXd E = (1.0 * K).exp();
  EXPECT_LT((s.Z.back() - E).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Integrate, FourthOrderStepHalving) {
  auto p = OdeProblem::make(3, "sin(y)");
  std::vector<double> end;
  for (double dt : {0.1, 0.05, 0.025}) {
    auto n = static_cast<std::size_t>(std::llround(2.0 / dt)) + 1;
    end.push_back(solve(p, {0.5, 1.0, -0.3}, dt, n, false).y.back()(0));
  }
  double ratio = std::abs(end[0] - end[1]) / std::abs(end[1] - end[2]);
  EXPECT_GE(ratio, 14.0);
}

TEST(Integrate, Errors) {
  auto p = OdeProblem::make(3, "log(y)");
  EXPECT_THROW(solve(p, {0, 0, 0}, 0.01, 10), DomainError);
  auto blow = OdeProblem::make(3, "y^2 * 1e300");
  EXPECT_THROW(solve(blow, {10, 0, 0}, 0.1, 100, false), DomainError);
  EXPECT_THROW(solve(OdeProblem::make(3, "0"), {0, 0}, 0.01, 10), InputError);
}

TEST(Linearize, Examples) {
  auto zero = OdeProblem::make(3, "0");
  auto L0 = linearize(zero, solve(zero, {1, 2, 3}, 0.01, 20, false));
  for (const auto& p : L0.p) EXPECT_EQ(p.cwiseAbs().maxCoeff(), 0.0);

  auto sq = OdeProblem::make(3, "y''^2");
  const double c = 0.4;
  auto ssq = solve(sq, {0, 0, c}, 0.01, 20, false);
  auto Lsq = linearize(sq, ssq);
  EXPECT_DOUBLE_EQ(Lsq.p[0](2), 2 * c);
  for (std::size_t j = 0; j < Lsq.p.size(); ++j) {
    EXPECT_DOUBLE_EQ(Lsq.p[j](2), 2 * ssq.y[j](2));
    EXPECT_EQ(Lsq.p[j](0), 0.0);
    EXPECT_EQ(Lsq.p[j](1), 0.0);
  }

  auto lin = OdeProblem::make(3, "y");
  auto Ll = linearize(lin, solve(lin, {0.3, 0, 0}, 0.01, 20, false));
  for (const auto& p : Ll.p) {
    EXPECT_EQ(p(0), 1.0);
    EXPECT_EQ(p(1), 0.0);
    EXPECT_EQ(p(2), 0.0);
  }
}

TEST(GeneralizedWilczynski, Examples) {
  auto flat = OdeProblem::make(3, "0");
  auto t0 = generalized_wilczynski(flat, solve(flat, {0.2, 0.1, 0}, 0.005, 201));
  EXPECT_LE(max_abs(t0.values), 1e-8);

  auto lin = OdeProblem::make(3, "y");
  auto t1 = generalized_wilczynski(lin, solve(lin, {0.2, 0.1, 0}, 0.005, 201));
  for (const auto& v : t1.values) EXPECT_NEAR(v(0), 6.0, 1e-6);
}

TEST(GeneralizedWilczynski, TrivialEquationsAreFlat) {
  for (int order = 3; order <= 7; ++order) {
    auto p = OdeProblem::make(order, "0");
    std::vector<double> init(static_cast<std::size_t>(order), 0.1);
    // Roundoff from the nested differences grows like dt^-5 at order 5.
    auto tr = generalized_wilczynski(p, solve(p, init, 0.01, 101));
    EXPECT_EQ(tr.labels.size(), static_cast<std::size_t>(order - 2));
    EXPECT_LE(max_abs(tr.values), 1e-8) << "order " << order;
  }
}

TEST(GeneralizedWilczynski, ConstantCoefficientsGiveConstantTraces) {
  for (auto [order, f] : std::vector<std::pair<int, std::string>>{
           {3, "0.5*y' - 0.3*y + 0.2*y''"}, {4, "y'"}, {4, "0.4*y'' - y + 0.1*y'''"}, {5, "y - 0.3*y'''"}}) {
    auto p = OdeProblem::make(order, f);
    std::vector<double> init(static_cast<std::size_t>(order), 0.0);
    // Roundoff from the nested differences grows like dt^-5 at order 5.
    auto tr = generalized_wilczynski(p, solve(p, init, 0.01, 101));
    for (Eigen::Index c = 0; c < tr.values[0].size(); ++c) {
      double lo = INFINITY, hi = -INFINITY;
      for (const auto& v : tr.values) {
        lo = std::min(lo, v(c));
        hi = std::max(hi, v(c));
      }
      EXPECT_LE(hi - lo, 1e-6) << f << " column " << c;
    }
  }
}

TEST(GeneralizedWilczynski, DegenerateWronskian) {
  auto p = OdeProblem::make(3, "0");
  auto s = solve(p, {0, 0, 0}, 0.01, 20);
  s.Z[5].setZero();
  EXPECT_THROW(fundamental_curve(p, s), DegenerateFrame);
  auto no_z = solve(p, {0, 0, 0}, 0.01, 20, false);
  EXPECT_THROW(fundamental_curve(p, no_z), InputError);
}

TEST(Verdict, ThirdOrderFlatIsConformal) {
  auto v = verdict(3, "0");
  EXPECT_EQ(v.kind, StructureKind::conformal);
  ASSERT_TRUE(v.bilinear);
  EXPECT_EQ(v.bilinear->parity, MeasuredParity::symmetric);
  EXPECT_TRUE(v.bilinear->nondegenerate);
  EXPECT_LE(v.isotropy_residual, 1e-6);
  EXPECT_LE(v.cross_validation, 1e-4);
  EXPECT_EQ(v.samples.size(), 3u);
}

TEST(Verdict, FourthOrderFlatIsSymplectic) {
  auto v = verdict(4, "0");
  EXPECT_EQ(v.kind, StructureKind::symplectic);
  ASSERT_TRUE(v.bilinear);
  EXPECT_EQ(v.bilinear->parity, MeasuredParity::skew);
  EXPECT_TRUE(v.bilinear->nondegenerate);
}

TEST(Verdict, FifthOrderFlatIsConformal) { EXPECT_EQ(verdict(5, "0").kind, StructureKind::conformal); }

TEST(Verdict, SeventhOrderFlatIsG2) {
  auto v = verdict(7, "0");
  EXPECT_EQ(v.kind, StructureKind::g2);
  ASSERT_TRUE(v.three_form);
  EXPECT_TRUE(v.three_form->split());
}

TEST(Verdict, LinearThirdOrderIsNone) {
  auto v = verdict(3, "y");
  EXPECT_EQ(v.kind, StructureKind::none);
  ASSERT_EQ(v.max_theta.size(), 1u);
  EXPECT_GE(v.max_theta[0], 5.99);
  EXPECT_LE(v.max_theta[0], 6.01);
  EXPECT_FALSE(v.bilinear);
}

TEST(Verdict, NonlinearAndNonSelfDualAreNone) {
  auto a = verdict(3, "y''^2");
  EXPECT_EQ(a.kind, StructureKind::none);
  EXPECT_GT(a.max_theta[0], 1e-6);
  EXPECT_EQ(verdict(4, "y'").kind, StructureKind::none);
}

TEST(Verdict, SelfAdjointFourthOrderIsSymplectic) {
  // Even-order self-adjoint linear operators preserve a symplectic form.
  EXPECT_EQ(verdict(4, "0.5*y'' - 0.2*y").kind, StructureKind::symplectic);
}

TEST(Verdict, Options) {
  VerdictOptions o;
  o.t1 = 0.05;
  EXPECT_THROW(structure_verdict(OdeProblem::make(3, "0"), o), InputError);
  VerdictOptions bad;
  bad.tol = 0;
  EXPECT_THROW(structure_verdict(OdeProblem::make(3, "0"), bad), InputError);
  std::vector<Eigen::VectorXd> two(2, Eigen::VectorXd::Zero(3));
  EXPECT_THROW(structure_verdict(OdeProblem::make(3, "0"), VerdictOptions{}, two), InputError);
}

TEST(Verdict, TighteningToleranceNeverSwitchesStructure) {
  for (auto [order, f] : std::vector<std::pair<int, std::string>>{
           {3, "1e-4*y"}, {4, "1e-4*y'"}, {3, "1e-3*y''^2"}, {5, "1e-5*y*y'"}, {4, "1e-3*(y'' - y)"}}) {
    std::optional<StructureKind> structure;
    bool seen_none = false;
    for (double tol : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-8}) {
      auto k = verdict(order, f, tol).kind;
      if (k == StructureKind::none) {
        seen_none = true;
        continue;
      }
      EXPECT_FALSE(seen_none) << f << " regained a structure at tol " << tol;
      if (structure) {
        EXPECT_EQ(*structure, k) << f;
      }
      structure = k;
    }
  }
}
