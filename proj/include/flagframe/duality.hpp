#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flagframe/frames.hpp"

namespace flagframe {

enum class MeasuredParity { symmetric, skew, mixed };

inline const char* to_string(MeasuredParity p) {
  switch (p) {
    case MeasuredParity::symmetric: return "symmetric";
    case MeasuredParity::skew: return "skew";
    case MeasuredParity::mixed: return "mixed";
  }
  return "?";
}

struct KernelInfo {
  int dimension = 0;
  Eigen::MatrixXd basis;  // columns
  std::vector<double> singular_values;
};

// Numerical kernel by singular-value gap: the rank is the first position where
// consecutive singular values drop by more than `ratio` (missing rows count as
// zero singular values). No such drop means full column rank.
inline KernelInfo numerical_kernel(const Eigen::MatrixXd& M, double ratio = 1e6) {
  const Eigen::Index N = M.cols();
  KernelInfo k;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  for (Eigen::Index i = 0; i < N; ++i) k.singular_values.push_back(i < s.size() ? s(i) : 0.0);
  Eigen::Index rank = N;
  if (k.singular_values.empty() || k.singular_values[0] == 0.0) rank = 0;
  for (Eigen::Index i = 1; i < N && rank == N; ++i) {
    double prev = k.singular_values[static_cast<std::size_t>(i - 1)];
    double cur = k.singular_values[static_cast<std::size_t>(i)];
    if (cur * ratio < prev) rank = i;
  }
  k.dimension = static_cast<int>(N - rank);
  k.basis = svd.matrixV().rightCols(N - rank);
  return k;
}

namespace detail {

// Unit norm, first entry above 1e-8 of the largest made positive.
inline Eigen::VectorXd canonical_direction(Eigen::VectorXd v) {
  v.normalize();
  double m = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > 1e-8 * m) {
      if (v(i) < 0) v = -v;
      break;
    }
  return v;
}

// Per-coordinate scale d_a = 1 / max |s_j(a, i)| over the frame; the searches
// run in the balanced coordinates D v and map the result back.
inline Eigen::VectorXd coordinate_scale(const FramePath& f) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(f.k + 1);
  for (const auto& s : f.s) d = d.cwiseMax(s.cwiseAbs().rowwise().maxCoeff());
  for (Eigen::Index a = 0; a < d.size(); ++a) d(a) = d(a) > 0 ? 1.0 / d(a) : 1.0;
  return d;
}

inline void normalize_rows(Eigen::MatrixXd& M) {
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    double n = M.row(r).norm();
    if (n > 0) M.row(r) /= n;
  }
}

}  // namespace detail

struct BilinearForm {
  Eigen::MatrixXd matrix;
  MeasuredParity parity = MeasuredParity::mixed;
  bool nondegenerate = false;
  double condition = 0.0;  // sigma_max / sigma_min
  double residual = 0.0;   // max |b(v_a, v_c)| / (|b| |v_a| |v_c|) over conditions
};

struct BilinearSearch {
  std::optional<BilinearForm> form;
  int kernel_dimension = 0;
  std::string reason;
};

// b(v_a(t_j), v_c(t_j)) = 0 for all a + c <= k - 1 and all nodes.
inline BilinearSearch find_compatible_bilinear(const ProjectiveCurve& c) {
  const int k = c.k;
  const int N = (k + 1) * (k + 1);
  if (static_cast<int>(c.size()) < N)
    throw InputError("bilinear search needs at least (k+1)^2 = " + std::to_string(N) + " nodes");
  FramePath f = osculating_frame(c);
  const Eigen::VectorXd D = detail::coordinate_scale(f);
  auto v = [&](std::size_t j, int i) -> Eigen::VectorXd {
    return i <= k ? Eigen::VectorXd(f.s[j].col(i)) : f.next[j];
  };
  auto vs = [&](std::size_t j, int i) -> Eigen::VectorXd { return D.cwiseProduct(v(j, i)); };
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a <= k - 1; ++a)
    for (int b = 0; a + b <= k - 1; ++b) pairs.push_back({a, b});
  Eigen::MatrixXd M(static_cast<Eigen::Index>(f.size() * pairs.size()), N);
  Eigen::Index row = 0;
  for (std::size_t j = 0; j < f.size(); ++j)
    for (auto [a, b] : pairs) {
      Eigen::VectorXd va = vs(j, a), vb = vs(j, b);
      for (int r = 0; r <= k; ++r)
        for (int s = 0; s <= k; ++s) M(row, r * (k + 1) + s) = va(r) * vb(s);
      ++row;
    }
  detail::normalize_rows(M);
  auto ker = numerical_kernel(M);
  BilinearSearch out;
  out.kernel_dimension = ker.dimension;
  if (ker.dimension > 1)
    throw RankAmbiguity("bilinear conditions leave a " + std::to_string(ker.dimension) +
                            "-dimensional kernel; curve too degenerate or grid too small",
                        ker.dimension);
  if (ker.dimension == 0) {
    out.reason = "no nonzero bilinear form satisfies the conditions";
    return out;
  }
  Eigen::VectorXd w = ker.basis.col(0);
  Eigen::MatrixXd bs = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      w.data(), k + 1, k + 1);
  Eigen::MatrixXd bm = D.asDiagonal() * bs * D.asDiagonal();
  Eigen::VectorXd flat = Eigen::Map<const Eigen::VectorXd>(Eigen::MatrixXd(bm.transpose()).data(), bm.size());
  flat = detail::canonical_direction(flat);
  BilinearForm b;
  b.matrix = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(flat.data(),
                                                                                                     k + 1, k + 1);
  double bn = b.matrix.norm();
  if ((b.matrix - b.matrix.transpose()).norm() <= 1e-8 * bn)
    b.parity = MeasuredParity::symmetric;
  else if ((b.matrix + b.matrix.transpose()).norm() <= 1e-8 * bn)
    b.parity = MeasuredParity::skew;
  Eigen::JacobiSVD<Eigen::MatrixXd> sv(b.matrix);
  const auto& s = sv.singularValues();
  b.nondegenerate = s(s.size() - 1) > 1e-6 * s(0);
  b.condition = s(s.size() - 1) > 0 ? s(0) / s(s.size() - 1) : INFINITY;
  for (std::size_t j = 0; j < f.size(); ++j)
    for (auto [a, c2] : pairs) {
      Eigen::VectorXd va = v(j, a), vc = v(j, c2);
      b.residual = std::max(b.residual, std::abs(va.dot(b.matrix * vc)) / (bn * va.norm() * vc.norm()));
    }
  if (!b.nondegenerate) {
    out.reason = "the only compatible form is degenerate";
    return out;
  }
  out.form = b;
  return out;
}

// Alternating 3-forms on R^7, coefficients indexed by a < b < c in
// lexicographic order.
inline const std::vector<std::array<int, 3>>& three_form_index() {
  static const std::vector<std::array<int, 3>> idx = [] {
    std::vector<std::array<int, 3>> v;
    for (int a = 0; a < 7; ++a)
      for (int b = a + 1; b < 7; ++b)
        for (int c = b + 1; c < 7; ++c) v.push_back({a, b, c});
    return v;
  }();
  return idx;
}

using Tensor3 = std::array<std::array<std::array<double, 7>, 7>, 7>;

inline Tensor3 expand_three_form(const Eigen::VectorXd& coeffs) {
  if (coeffs.size() != 35) throw InputError("a 3-form on R^7 has 35 coefficients");
  Tensor3 t{};
  const auto& idx = three_form_index();
  for (std::size_t n = 0; n < idx.size(); ++n) {
    auto [a, b, c] = idx[n];
    double w = coeffs(static_cast<Eigen::Index>(n));
    t[a][b][c] = t[b][c][a] = t[c][a][b] = w;
    t[b][a][c] = t[a][c][b] = t[c][b][a] = -w;
  }
  return t;
}

namespace detail {

struct WedgeTerm {
  std::array<int, 7> idx;  // i1 i2 | j1 j2 | k1 k2 k3
  int sign;
};

inline int permutation_sign(std::array<int, 7> p) {
  int s = 1;
  for (int i = 0; i < 7; ++i)
    for (int j = i + 1; j < 7; ++j)
      if (p[i] > p[j]) s = -s;
  return s;
}

// Partitions of {0..6} into increasing blocks of sizes 2, 2, 3.
inline const std::vector<WedgeTerm>& wedge_terms() {
  static const std::vector<WedgeTerm> terms = [] {
    std::vector<WedgeTerm> out;
    for (int i1 = 0; i1 < 7; ++i1)
      for (int i2 = i1 + 1; i2 < 7; ++i2)
        for (int j1 = 0; j1 < 7; ++j1)
          for (int j2 = j1 + 1; j2 < 7; ++j2) {
            if (j1 == i1 || j1 == i2 || j2 == i1 || j2 == i2) continue;
            std::array<int, 7> p{i1, i2, j1, j2, 0, 0, 0};
            int n = 4;
            for (int r = 0; r < 7; ++r)
              if (r != i1 && r != i2 && r != j1 && r != j2) p[n++] = r;
            out.push_back({p, permutation_sign(p)});
          }
    return out;
  }();
  return terms;
}

}  // namespace detail

// B(u, v) vol = (i_u Omega) ^ (i_v Omega) ^ Omega, vol = e^0 ^ ... ^ e^6.
inline Eigen::MatrixXd three_form_metric(const Eigen::VectorXd& coeffs) {
  Tensor3 t = expand_three_form(coeffs);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(7, 7);
  for (const auto& w : detail::wedge_terms()) {
    const auto& p = w.idx;
    double tail = t[p[4]][p[5]][p[6]];
    if (tail == 0.0) continue;
    for (int u = 0; u < 7; ++u) {
      double a = t[u][p[0]][p[1]];
      if (a == 0.0) continue;
      for (int v = 0; v < 7; ++v) B(u, v) += w.sign * a * t[v][p[2]][p[3]] * tail;
    }
  }
  return 0.5 * (B + B.transpose());
}

struct ThreeForm {
  Eigen::VectorXd coeffs;  // 35
  Eigen::MatrixXd B;
  int positive = 0;
  int negative = 0;
  bool nondegenerate = false;
  double residual = 0.0;

  int signature() const { return positive - negative; }
  bool split() const { return nondegenerate && positive > 0 && negative > 0 && std::abs(signature()) == 1; }
};

inline void classify_metric(ThreeForm& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w.B);
  const auto& ev = es.eigenvalues();
  double m = ev.cwiseAbs().maxCoeff();
  w.nondegenerate = m > 0 && ev.cwiseAbs().minCoeff() > 1e-6 * m;
  w.positive = w.negative = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > 1e-6 * m) ++w.positive;
    if (ev(i) < -1e-6 * m) ++w.negative;
  }
}

struct ThreeFormSearch {
  std::optional<ThreeForm> form;
  std::optional<ThreeForm> candidate;  // the kernel element even when rejected
  int kernel_dimension = 0;
  std::string reason;
};

// Omega(v0, v2, e_r) = 0 for r = 0..6 at every node. Short parameter ranges
// make the system ill-conditioned; sample the curve over a span of order 1.
inline ThreeFormSearch find_compatible_three_form(const ProjectiveCurve& c) {
  if (c.k != 6) throw InputError("three-form search needs a curve in P^6 (k = 6)");
  FramePath f = osculating_frame(c);
  const auto& idx = three_form_index();
  const Eigen::VectorXd D = detail::coordinate_scale(f);
  Eigen::MatrixXd M(static_cast<Eigen::Index>(7 * f.size()), 35);
  Eigen::Index row = 0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    Eigen::VectorXd v0 = D.cwiseProduct(f.s[j].col(0));
    Eigen::VectorXd v2 = D.cwiseProduct(f.s[j].col(2));
    for (int r = 0; r < 7; ++r, ++row)
      for (std::size_t n = 0; n < idx.size(); ++n) {
        auto [a, b, cc] = idx[n];
        Eigen::Matrix3d m;
        m << v0(a), v0(b), v0(cc), v2(a), v2(b), v2(cc), (r == a), (r == b), (r == cc);
        M(row, static_cast<Eigen::Index>(n)) = m.determinant();
      }
  }
  Eigen::MatrixXd Mn = M;
  detail::normalize_rows(Mn);
  auto ker = numerical_kernel(Mn);
  ThreeFormSearch out;
  out.kernel_dimension = ker.dimension;
  if (ker.dimension > 1)
    throw RankAmbiguity("three-form conditions leave a " + std::to_string(ker.dimension) + "-dimensional kernel",
                        ker.dimension);
  if (ker.dimension == 0) {
    out.reason = "no nonzero 3-form satisfies the conditions";
    return out;
  }
  ThreeForm w;
  Eigen::VectorXd scaled = ker.basis.col(0);
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    double rn = M.row(r).cwiseAbs().maxCoeff();
    if (rn > 0) w.residual = std::max(w.residual, std::abs(M.row(r).dot(scaled)) / (rn * scaled.cwiseAbs().maxCoeff()));
  }
  Eigen::VectorXd coeffs(35);
  for (std::size_t n = 0; n < idx.size(); ++n) {
    auto [a, b, cc] = idx[n];
    coeffs(static_cast<Eigen::Index>(n)) = scaled(static_cast<Eigen::Index>(n)) * D(a) * D(b) * D(cc);
  }
  w.coeffs = detail::canonical_direction(coeffs);
  w.B = three_form_metric(w.coeffs);
  classify_metric(w);
  out.candidate = w;
  if (!w.nondegenerate)
    out.reason = "derived metric is degenerate";
  else if (!w.split())
    out.reason = "derived metric has signature (" + std::to_string(w.positive) + "," + std::to_string(w.negative) +
                 "); not the split open orbit";
  else
    out.form = w;
  return out;
}

// Binary cubic c0 s^3 + c1 s^2 t + c2 s t^2 + c3 t^3 (ascending powers of t).
// 1: triple root, 2: double + simple, 3: one real + complex pair,
// 4: three distinct real roots. Roots at infinity count.
inline int classify_cubic(const std::array<double, 4>& coeffs, double tol = 1e-9) {
  double m = 0;
  for (double c : coeffs) {
    if (!std::isfinite(c)) throw InputError("cubic coefficients must be finite");
    m = std::max(m, std::abs(c));
  }
  if (m == 0) throw InputError("classify_cubic: zero polynomial");
  const double a = coeffs[3] / m, b = coeffs[2] / m, c = coeffs[1] / m, d = coeffs[0] / m;
  const double disc = b * b * c * c - 4 * a * c * c * c - 4 * b * b * b * d - 27 * a * a * d * d + 18 * a * b * c * d;
  if (disc > tol) return 4;
  if (disc < -tol) return 3;
  // Hessian covariant vanishes exactly for a triple root.
  const double h0 = b * b - 3 * a * c, h1 = b * c - 9 * a * d, h2 = c * c - 3 * b * d;
  if (std::max({std::abs(h0), std::abs(h1), std::abs(h2)}) <= std::sqrt(tol)) return 1;
  return 2;
}

struct G2CaseReport {
  std::string name;
  std::string algebra;
  std::string x;
  int cubic_orbit = 0;  // 0 when x is not in a G2/P2 grading
  std::map<int, std::size_t> sg_dims;
  std::size_t sg_dim = 0;
  bool reductive = false;
  std::size_t codim = 0;  // codim of (sg + [x, pg]) in pg
  std::vector<std::string> w_basis;
  std::vector<int> w_degrees;
  bool invariant = false;
  std::string construction;
  std::size_t h1_dim = 0;
};

inline const std::vector<std::string>& g2_case_names() {
  static const std::vector<std::string> names = {"B-nondeg", "P2-orbit2", "P2-orbit3", "P2-orbit4"};
  return names;
}

inline G2CaseReport g2_case_report(const std::string& name) {
  AlgebraPtr A;
  std::map<std::string, Rational> terms;
  if (name == "B-nondeg") {
    A = build_g2(G2Parabolic::B);
    terms = {{"X_{-a1}", 1}, {"X_{-a2}", 1}};
  } else if (name == "P2-orbit2") {
    A = build_g2(G2Parabolic::P2);
    terms = {{"X_{-a1-a2}", 1}};
  } else if (name == "P2-orbit3") {
    A = build_g2(G2Parabolic::P2);
    terms = {{"X_{-a1}", 1}, {"X_{-a1-3a2}", 1}};
  } else if (name == "P2-orbit4") {
    A = build_g2(G2Parabolic::P2);
    terms = {{"X_{-a1-a2}", 1}, {"X_{-a1-2a2}", 1}};
  } else {
    std::string all;
    for (const auto& n : g2_case_names()) all += " " + n;
    throw InputError("unknown G2 case '" + name + "'; expected one of:" + all);
  }
  QVec x = element_from_labels(*A, terms);
  G2CaseReport r;
  r.name = name;
  r.algebra = A->name();
  r.x = A->describe(x);
  if (name != "B-nondeg") {
    // g_{-1} of P2 is the binary cubics; X_{-a1-j a2} <-> s^{3-j} t^j.
    std::array<double, 4> cub{};
    for (int j = 0; j < 4; ++j) {
      std::string lbl = g2_root_label(-1, -j);
      cub[static_cast<std::size_t>(j)] = x[*A->index_of(lbl)].get_d();
    }
    r.cubic_orbit = classify_cubic(cub);
  }
  auto S = symmetry_algebra(A, x);
  for (int d : S.sg.degrees()) r.sg_dims[d] = S.sg.dim(d);
  r.sg_dim = S.sg.dim();
  r.reductive = S.reductive;
  NormalizationSpace N;
  if (S.reductive) {
    N = reductive_invariant_complement(S, complete_sl2(*A, x));
  } else {
    auto cert = invariant_complement_certificate(S);
    if (cert.outcome == CertificateOutcome::exists && cert.space)
      N = *cert.space;
    else
      N = generic_complement(S);
  }
  for (const auto& b : N.W.basis()) {
    r.w_basis.push_back(A->describe(b));
    r.w_degrees.push_back(*A->homogeneous_degree(b));
  }
  r.codim = N.W.dim();
  r.invariant = N.invariant;
  r.construction = to_string(N.construction);
  r.h1_dim = h1_plus(S).dimension;
  return r;
}

}  // namespace flagframe
