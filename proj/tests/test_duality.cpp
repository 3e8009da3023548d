#include <gtest/gtest.h>

#include <unsupported/Eigen/Polynomials>

#include "test_util.hpp"

using namespace flagframe;
using namespace fftest;

namespace {

Eigen::MatrixXd companion(const Eigen::VectorXd& p) {
  const auto n = p.size();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) K(i + 1, i) = 1.0;
  K.col(n - 1) = p;
  return K;
}

bool proportional(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol) {
  Eigen::Index r, c;
  b.cwiseAbs().maxCoeff(&r, &c);
  double s = a(r, c) / b(r, c);
  return (a - s * b).cwiseAbs().maxCoeff() <= tol * a.cwiseAbs().maxCoeff();
}

// Orbit of a binary cubic via its roots in t/s; a vanishing leading
// coefficient puts the missing roots at infinity.
int cubic_orbit_by_roots(const std::array<double, 4>& c) {
  int deg = 3;
  while (deg > 0 && std::abs(c[static_cast<std::size_t>(deg)]) < 1e-14) --deg;
  std::vector<std::complex<double>> roots;
  if (deg > 0) {
    Eigen::VectorXd coeffs(deg + 1);
    for (int i = 0; i <= deg; ++i) coeffs(i) = c[static_cast<std::size_t>(i)];
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(coeffs);
    for (Eigen::Index i = 0; i < solver.roots().size(); ++i) roots.push_back(solver.roots()(i));
  }
  const int at_infinity = 3 - deg;
  int complex_pairs = 0;
  for (auto& z : roots)
    if (std::abs(z.imag()) > 1e-3) ++complex_pairs;  // triple roots split by ~eps^(1/3)
  if (complex_pairs > 0) return 3;
  std::vector<double> real;
  for (auto& z : roots) real.push_back(z.real());
  std::sort(real.begin(), real.end());
  int clusters = at_infinity > 0 ? 1 : 0;
  for (std::size_t i = 0; i < real.size(); ++i)
    if (i == 0 || real[i] - real[i - 1] > 1e-3) ++clusters;
  return clusters == 1 ? 1 : clusters == 2 ? 2 : 4;
}

}  // namespace

TEST(Bilinear, ConicGivesQuadric) {
  auto r = find_compatible_bilinear(monomial_curve(2, 0.0, 0.005, 200));
  ASSERT_TRUE(r.form);
  EXPECT_EQ(r.kernel_dimension, 1);
  EXPECT_EQ(r.form->parity, MeasuredParity::symmetric);
  EXPECT_TRUE(r.form->nondegenerate);
  Eigen::Matrix3d q;
  q << 0, 0, 0.5, 0, -1, 0, 0.5, 0, 0;
  EXPECT_TRUE(proportional(r.form->matrix, q, 1e-8)) << r.form->matrix;
  EXPECT_LT(r.form->residual, 1e-10);
}

TEST(Bilinear, TwistedCubicGivesSymplecticForm) {
  auto r = find_compatible_bilinear(monomial_curve(3, 0.0, 0.005, 200));
  ASSERT_TRUE(r.form);
  EXPECT_EQ(r.form->parity, MeasuredParity::skew);
  EXPECT_TRUE(r.form->nondegenerate);
}

TEST(Bilinear, ParityFollowsDimension) {
  for (int k = 2; k <= 6; ++k) {
    auto r = find_compatible_bilinear(monomial_curve(k, -1.0, 0.01, 201));
    ASSERT_TRUE(r.form) << "k=" << k;
    EXPECT_EQ(r.form->parity, k % 2 == 0 ? MeasuredParity::symmetric : MeasuredParity::skew) << "k=" << k;
  }
}

TEST(Bilinear, NonSelfDualEquationsHaveNone) {
  Eigen::VectorXd p4 = Eigen::VectorXd::Zero(4);
  p4(1) = 1.0;  // z'''' = z'
  auto a = find_compatible_bilinear(exp_curve(companion(p4), 0.0, 0.01, 101));
  EXPECT_FALSE(a.form);
  EXPECT_EQ(a.kernel_dimension, 0);
  auto b = find_compatible_bilinear(zppp_eq_z_curve(0.0, 0.005, 200));
  EXPECT_FALSE(b.form);
  EXPECT_EQ(b.kernel_dimension, 0);
}

TEST(Bilinear, SelfAdjointConstantCoefficientsAdmitForm) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(4);
  p(2) = 0.7;  // z'''' = 0.7 z''
  p(0) = -0.2;
  auto r = find_compatible_bilinear(exp_curve(companion(p), 0.0, 0.01, 101));
  ASSERT_TRUE(r.form);
  EXPECT_EQ(r.form->parity, MeasuredParity::skew);
}

TEST(Bilinear, TooFewNodes) {
  EXPECT_THROW(find_compatible_bilinear(monomial_curve(3, 0.0, 0.01, 15)), InputError);
}

TEST(Bilinear, DegenerateSamplingIsAmbiguous) {
  // A line in P^2 sampled as a conic would be degenerate; a constant curve
  // is already rejected by the frame, so use a planar curve with a tiny span.
  auto c = monomial_curve(2, 0.0, 1e-9, 20);
  EXPECT_ANY_THROW(find_compatible_bilinear(c));
}

TEST(ThreeForm, SexticIsSplit) {
  auto r = find_compatible_three_form(monomial_curve(6, -1.0, 0.01, 201));
  ASSERT_TRUE(r.form) << r.reason;
  EXPECT_EQ(r.kernel_dimension, 1);
  EXPECT_TRUE(r.form->split());
  EXPECT_EQ(r.form->positive + r.form->negative, 7);
  EXPECT_LT(r.form->residual, 1e-8);
}

TEST(ThreeForm, TopInvariantOnlyCurveIsCompatible) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(7);
  p(1) = 0.8;  // y^(7) = 0.8 y'
  auto r = find_compatible_three_form(exp_curve(companion(p), -1.0, 0.01, 201));
  ASSERT_TRUE(r.form) << r.reason;
  EXPECT_TRUE(r.form->split());
}

TEST(ThreeForm, PerturbedCurveHasNone) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(7);
  p(1) = 0.8;
  p(0) = 0.3;
  p(3) = -0.4;
  auto r = find_compatible_three_form(exp_curve(companion(p), -1.0, 0.01, 201));
  EXPECT_FALSE(r.form);
}

TEST(ThreeForm, WrongDimension) {
  EXPECT_THROW(find_compatible_three_form(monomial_curve(5, 0.0, 0.01, 100)), InputError);
}

TEST(ThreeForm, MetricOfSplitFormHasSignatureThreeFour) {
  auto r = find_compatible_three_form(monomial_curve(6, -1.0, 0.01, 201));
  ASSERT_TRUE(r.form);
  EXPECT_EQ(std::min(r.form->positive, r.form->negative), 3);
  EXPECT_EQ(std::max(r.form->positive, r.form->negative), 4);
}

TEST(ClassifyCubic, CanonicalRepresentatives) {
  EXPECT_EQ(classify_cubic({1, 0, 0, 0}), 1);
  EXPECT_EQ(classify_cubic({0, 0, 0, 1}), 1);
  EXPECT_EQ(classify_cubic({0, 1, 0, 0}), 2);
  EXPECT_EQ(classify_cubic({0, 0, 1, 0}), 2);
  EXPECT_EQ(classify_cubic({1, 0, 0, 1}), 3);
  EXPECT_EQ(classify_cubic({1, 0, 1, 0}), 3);
  EXPECT_EQ(classify_cubic({0, 1, 1, 0}), 4);
  EXPECT_EQ(classify_cubic({0, 1, -1, 0}), 4);
  EXPECT_THROW(classify_cubic({0, 0, 0, 0}), InputError);
  EXPECT_THROW(classify_cubic({NAN, 0, 0, 1}), InputError);
}

TEST(ClassifyCubic, AgreesWithRootClustering) {
  std::mt19937 rng(123);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_int_distribution<int> kind(0, 4);
  for (int trial = 0; trial < 1000; ++trial) {
    std::array<double, 4> c{};
    int shape = kind(rng);
    if (shape == 0) {
      for (auto& x : c) x = u(rng);
    } else {
      // (t - r1)(t - r2)(t - r3) style products with forced coincidences.
      double r1 = std::round(4 * u(rng)) / 2, r2 = std::round(4 * u(rng)) / 2, r3 = std::round(4 * u(rng)) / 2;
      if (shape == 1) r2 = r3 = r1;
      if (shape == 2) r3 = r2;
      double a = 1 + std::abs(u(rng));
      if (shape == 4) {
        // (t - r1)(t^2 + q^2)
        double q = 0.5 + std::abs(u(rng));
        c = {-r1 * q * q * a, q * q * a, -r1 * a, a};
      } else {
        c = {-r1 * r2 * r3 * a, (r1 * r2 + r1 * r3 + r2 * r3) * a, -(r1 + r2 + r3) * a, a};
      }
    }
    EXPECT_EQ(classify_cubic(c), cubic_orbit_by_roots(c)) << c[0] << " " << c[1] << " " << c[2] << " " << c[3];
  }
}

TEST(G2Cases, Report) {
  auto b = g2_case_report("B-nondeg");
  EXPECT_EQ(b.sg_dim, 3u);
  EXPECT_TRUE(b.reductive);
  EXPECT_EQ(b.w_degrees, std::vector<int>({5}));
  EXPECT_TRUE(b.invariant);
  EXPECT_EQ(b.h1_dim, 1u);
  EXPECT_EQ(b.cubic_orbit, 0);

  auto o2 = g2_case_report("P2-orbit2");
  EXPECT_EQ(o2.cubic_orbit, 2);
  EXPECT_EQ(o2.sg_dim, 5u);
  EXPECT_FALSE(o2.reductive);
  EXPECT_EQ(o2.w_degrees, std::vector<int>({1, 2}));
  EXPECT_TRUE(o2.invariant);
  EXPECT_EQ(o2.construction, "weight_family");
  EXPECT_EQ(o2.h1_dim, 2u);

  for (std::string name : {"P2-orbit3", "P2-orbit4"}) {
    auto r = g2_case_report(name);
    EXPECT_EQ(r.cubic_orbit, name == "P2-orbit3" ? 3 : 4);
    EXPECT_EQ(r.sg_dim, 3u);
    EXPECT_TRUE(r.reductive);
    EXPECT_EQ(r.codim, 3u);
    EXPECT_TRUE(r.invariant);
    EXPECT_EQ(r.h1_dim, r.codim);
  }
  EXPECT_THROW(g2_case_report("P1-orbit9"), InputError);
}
