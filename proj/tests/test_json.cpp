#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace flagframe;
using namespace fftest;

namespace {

void expect_same_algebra(const GradedAlgebra& a, const GradedAlgebra& b) {
  EXPECT_EQ(a.name(), b.name());
  EXPECT_EQ(a.labels(), b.labels());
  EXPECT_EQ(a.degrees(), b.degrees());
  EXPECT_EQ(a.grading_element(), b.grading_element());
  EXPECT_EQ(a.cartan(), b.cartan());
  ASSERT_EQ(a.dim(), b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) {
      const auto& x = a.bracket_basis(i, j);
      const auto& y = b.bracket_basis(i, j);
      ASSERT_EQ(x.size(), y.size());
      for (std::size_t t = 0; t < x.size(); ++t) {
        EXPECT_EQ(x[t].index, y[t].index);
        EXPECT_EQ(x[t].coeff, y[t].coeff);
      }
    }
  EXPECT_EQ(a.has_representation(), b.has_representation());
}

}  // namespace

TEST(JsonAlgebra, RoundTrip) {
  for (std::string spec : {"sl:1,1,1", "sl:2,2,1", "g2:B", "g2:P2", "so:5:2", "sp:4:2"}) {
    auto A = builtin_algebra(spec);
    auto j = algebra_to_json(*A);
    auto B = algebra_from_json(Json::parse(j.dump()));
    expect_same_algebra(*A, *B);
    EXPECT_EQ(algebra_to_json(*B).dump(), j.dump()) << spec;
  }
}

TEST(JsonAlgebra, RejectsBadInput) {
  auto j = algebra_to_json(*builtin_algebra("sl:1,1,1"));
  auto missing = j;
  missing.erase("labels");
  EXPECT_THROW(algebra_from_json(missing), InputError);
  auto bad_entry = j;
  bad_entry["structure_constants"][0] = Json::array({0, 1});
  EXPECT_THROW(algebra_from_json(bad_entry), InputError);
  auto bad_rat = j;
  bad_rat["grading_element"][0] = "1/0";
  EXPECT_THROW(algebra_from_json(bad_rat), InputError);
  auto not_jacobi = j;
  not_jacobi["structure_constants"][0][3] = "5";
  EXPECT_THROW(algebra_from_json(not_jacobi), InputError);
  EXPECT_THROW(read_json_file("/nonexistent/x.json"), InputError);
}

TEST(JsonSubspace, RoundTrip) {
  auto A = builtin_algebra("sl:1,1,1,1");
  auto S = symmetry_algebra(A, principal_x(*A));
  auto j = subspace_to_json(S.sg);
  EXPECT_EQ(j["dim"], 3);
  auto back = subspace_from_json(Json::parse(j.dump()), A);
  EXPECT_TRUE(back == S.sg);
  auto other = builtin_algebra("g2:B");
  EXPECT_THROW(subspace_from_json(j, other), AlgebraMismatch);
}

TEST(JsonCurve, RoundTrip) {
  auto c = monomial_curve(3, 0.25, 0.01, 30);
  auto j = curve_to_json(c);
  auto d = curve_from_json(Json::parse(j.dump()));
  EXPECT_EQ(d.k, 3);
  EXPECT_EQ(d.t0, 0.25);
  EXPECT_EQ(d.dt, 0.01);
  ASSERT_EQ(d.size(), c.size());
  ASSERT_TRUE(d.has_jets());
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(d.values[i], c.values[i]);
    for (std::size_t m = 0; m < c.derivatives.size(); ++m) EXPECT_EQ(d.derivatives[m][i], c.derivatives[m][i]);
  }
  auto no_jets = monomial_curve(2, 0.0, 0.01, 30, false);
  EXPECT_FALSE(curve_from_json(curve_to_json(no_jets)).has_jets());
}

TEST(JsonCurve, RejectsBadInput) {
  auto j = curve_to_json(monomial_curve(2, 0.0, 0.01, 10));
  auto short_row = j;
  short_row["values"][3] = Json::array({1.0, 2.0});
  EXPECT_THROW(curve_from_json(short_row), InputError);
  auto neg_dt = j;
  neg_dt["dt"] = -0.1;
  EXPECT_THROW(curve_from_json(neg_dt), InputError);
  auto wrong_type = j;
  wrong_type["k"] = "two";
  EXPECT_THROW(curve_from_json(wrong_type), InputError);
}

TEST(JsonCurve, ShippedDataFiles) {
  const std::string dir = FLAGFRAME_DATA_DIR;
  for (auto [name, k] : std::vector<std::pair<std::string, int>>{
           {"conic", 2}, {"twisted_cubic", 3}, {"sextic", 6}, {"zppp_eq_z", 2}}) {
    auto c = curve_from_json(read_json_file(dir + "/" + name + ".json"));
    EXPECT_EQ(c.k, k) << name;
    EXPECT_TRUE(c.has_jets()) << name;
    EXPECT_GE(c.size(), 16u);
  }
}

TEST(Builtins, Parsing) {
  EXPECT_EQ(builtin_algebra("sl:1,1,1")->dim(), 8u);
  EXPECT_EQ(builtin_algebra("sl:2,2,1")->dim(), 24u);
  EXPECT_EQ(builtin_algebra("g2:P1")->dim(), 14u);
  EXPECT_EQ(builtin_algebra("so:5:1")->dim(), 10u);
  EXPECT_EQ(builtin_algebra("sp:4:1")->dim(), 10u);
  for (std::string bad : {"", "sl", "sl:", "sl:1,x", "g2:Q", "so:5", "su:3:1", "so:a:1"})
    EXPECT_THROW(builtin_algebra(bad), InputError) << bad;
}

TEST(ParseElement, Forms) {
  auto A = builtin_algebra("sl:1,1,1");
  EXPECT_EQ(parse_element(*A, "principal"), principal_x(*A));
  auto x = parse_element(*A, "E10,E21");
  EXPECT_EQ(x, principal_x(*A));
  auto y = parse_element(*A, "E10=2,E21=-1/2");
  EXPECT_EQ(y[*A->index_of("E10")], Rational(2));
  EXPECT_EQ(y[*A->index_of("E21")], Rational(-1, 2));
  QVec full = zero_vec(A->dim());
  full[3] = Rational(3, 4);
  std::string txt;
  for (std::size_t i = 0; i < full.size(); ++i) txt += (i ? "," : "") + format_rational(full[i]);
  EXPECT_EQ(parse_element(*A, txt), full);
  EXPECT_THROW(parse_element(*A, "E99"), InputError);
  EXPECT_THROW(parse_element(*A, "E10=abc"), InputError);
}
