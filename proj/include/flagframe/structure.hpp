#pragma once

#include <string>
#include <vector>

#include "flagframe/subspace.hpp"

namespace flagframe {

// [h,x] = -2x, [h,y] = 2y, [y,x] = h with deg x = -1, deg h = 0, deg y = 1.
struct Sl2Triple {
  QVec x, h, y;
};

enum class SymmetryMode { unparametrized, parametrized };

struct SymmetryAlgebra {
  AlgebraPtr algebra;
  std::vector<QVec> xg;  // basis of sg_{-1}
  GradedSubspace sg;
  SymmetryMode mode = SymmetryMode::unparametrized;
  bool reductive = false;

  // sg^(0): the non-negative part.
  GradedSubspace nonnegative() const {
    GradedSubspace s(algebra);
    for (int d : sg.degrees())
      if (d >= 0) s.set_part(d, sg.part(d));
    return s;
  }
};

namespace detail {

inline void require_degree(const GradedAlgebra& a, const QVec& v, int d, const char* what) {
  if (is_zero(v)) throw InputError(std::string(what) + " must be nonzero");
  auto deg = a.homogeneous_degree(v);
  if (!deg || *deg != d)
    throw InputError(std::string(what) + " must be homogeneous of degree " + std::to_string(d) + ": " +
                     a.describe(v));
}

// Solve sum_a c_a M_a = rhs for coefficients over the given index set, where
// M_a are coordinate vectors. Free coefficients are zero.
inline std::optional<QVec> solve_combination(const std::vector<QVec>& cols, const QVec& rhs) {
  QMatrix m(rhs.size(), cols.size());
  for (std::size_t a = 0; a < cols.size(); ++a)
    for (std::size_t i = 0; i < rhs.size(); ++i) m(i, a) = cols[a][i];
  return solve(m, rhs);
}

}  // namespace detail

inline Sl2Triple complete_sl2(const GradedAlgebra& A, const QVec& x) {
  detail::require_degree(A, x, -1, "x");
  auto g1 = A.indices_of_degree(1);
  std::size_t n = A.dim();
  // h = [y0, x] for y0 in g_1 with [h, x] = -2x.
  std::vector<QVec> cols;
  for (auto i : g1) cols.push_back(A.bracket(A.bracket(unit_vec(n, i), x), x));
  QVec rhs = x;
  for (auto& q : rhs) q *= -2;
  auto c = detail::solve_combination(cols, rhs);
  if (!c) throw InputError("complete_sl2: no h in [g_1, x] with [h,x] = -2x (x = " + A.describe(x) + ")");
  QVec y0 = zero_vec(n);
  for (std::size_t a = 0; a < g1.size(); ++a) y0[g1[a]] = (*c)[a];
  QVec h = A.bracket(y0, x);
  // y in g_1 with [y, x] = h and [h, y] = 2y, stacked.
  QMatrix m(2 * n, g1.size());
  QVec b = zero_vec(2 * n);
  for (std::size_t a = 0; a < g1.size(); ++a) {
    QVec e = unit_vec(n, g1[a]);
    QVec yx = A.bracket(e, x), hy = A.bracket(h, e);
    for (std::size_t i = 0; i < n; ++i) {
      m(i, a) = yx[i];
      m(n + i, a) = hy[i] - 2 * e[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] = h[i];
  auto s = solve(m, b);
  if (!s) throw InputError("complete_sl2: no y completing the triple");
  QVec y = zero_vec(n);
  for (std::size_t a = 0; a < g1.size(); ++a) y[g1[a]] = (*s)[a];
  QVec two_x = x, two_y = y;
  for (auto& q : two_x) q *= -2;
  for (auto& q : two_y) q *= 2;
  if (A.bracket(h, x) != two_x || A.bracket(h, y) != two_y || A.bracket(y, x) != h)
    throw InternalError("complete_sl2: triple relations fail");
  return {x, h, y};
}

namespace detail {

// {u in g_d : [u, a] in target for every a in xs}; `target` is the subspace
// in degree d-1.
inline QMatrix preimage(const GradedAlgebra& A, const std::vector<QVec>& xs, int d, const QMatrix& target) {
  auto idx = A.indices_of_degree(d);
  std::size_t n = A.dim();
  if (idx.empty()) return QMatrix(0, n);
  // Conditions: for each a, [u, a] projected onto a complement of target
  // vanishes. Use the annihilator of target: rows f with f . t = 0.
  QMatrix ann = kernel(target.rows() ? target : QMatrix(0, n));
  // Restrict annihilator to degree d-1 coordinates.
  auto low = A.indices_of_degree(d - 1);
  std::vector<QVec> ann_rows;
  for (std::size_t r = 0; r < ann.rows(); ++r) {
    QVec f = zero_vec(n);
    bool any = false;
    for (auto i : low) {
      f[i] = ann(r, i);
      if (sgn(f[i]) != 0) any = true;
    }
    if (any) ann_rows.push_back(f);
  }
  QMatrix anns = row_space(ann_rows, n);
  QMatrix sys(anns.rows() * xs.size(), idx.size());
  for (std::size_t a = 0; a < xs.size(); ++a)
    for (std::size_t k = 0; k < idx.size(); ++k) {
      QVec br = A.bracket(unit_vec(n, idx[k]), xs[a]);
      for (std::size_t r = 0; r < anns.rows(); ++r) {
        Rational s = 0;
        for (auto i : low)
          if (sgn(br[i]) != 0) s += anns(r, i) * br[i];
        sys(a * anns.rows() + r, k) = s;
      }
    }
  QMatrix ker = kernel(sys);
  std::vector<QVec> out;
  for (std::size_t r = 0; r < ker.rows(); ++r) {
    QVec v = zero_vec(n);
    for (std::size_t k = 0; k < idx.size(); ++k) v[idx[k]] = ker(r, k);
    out.push_back(v);
  }
  return row_space(out, n);
}

inline bool restricted_killing_nondegenerate(const GradedAlgebra& A, const GradedSubspace& s) {
  auto b = s.basis();
  QMatrix g(b.size(), b.size());
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) g(i, j) = A.killing(b[i], b[j]);
  return rank(g) == b.size();
}

}  // namespace detail

// Symmetry algebra of the flat curve through x (or the flat submanifold
// through an abelian subspace xg of g_{-1} when several vectors are given):
// sg_{-1} = xg, sg_i = {u in g_i : [u, xg] in sg_{i-1}}. In parametrized
// mode (single x only) sg_0 = {u : [x, u] = 0}.
inline SymmetryAlgebra symmetry_algebra(const AlgebraPtr& A, const std::vector<QVec>& xg,
                                        SymmetryMode mode = SymmetryMode::unparametrized) {
  if (xg.empty()) throw InputError("symmetry_algebra: empty xg");
  for (const auto& x : xg) detail::require_degree(*A, x, -1, "x");
  for (std::size_t i = 0; i < xg.size(); ++i)
    for (std::size_t j = i + 1; j < xg.size(); ++j)
      if (!is_zero(A->bracket(xg[i], xg[j]))) throw InputError("symmetry_algebra: xg is not abelian");
  if (mode == SymmetryMode::parametrized && xg.size() != 1)
    throw InputError("parametrized mode needs a single x");
  SymmetryAlgebra S;
  S.algebra = A;
  S.mode = mode;
  S.sg = GradedSubspace::span(A, xg);
  S.xg = S.sg.basis(-1);
  QMatrix prev = S.sg.part(-1);
  for (int d = 0; d <= A->max_degree(); ++d) {
    QMatrix target = (d == 0 && mode == SymmetryMode::parametrized) ? QMatrix(0, A->dim()) : prev;
    QMatrix cur = detail::preimage(*A, S.xg, d, target);
    if (cur.rows() == 0) break;
    S.sg.set_part(d, cur);
    prev = cur;
  }
  if (!bracket_closed(S.sg)) throw InternalError("symmetry algebra is not bracket-closed");
  S.reductive = detail::restricted_killing_nondegenerate(*A, S.sg);
  return S;
}

inline SymmetryAlgebra symmetry_algebra(const AlgebraPtr& A, const QVec& x,
                                        SymmetryMode mode = SymmetryMode::unparametrized) {
  return symmetry_algebra(A, std::vector<QVec>{x}, mode);
}

// hg^(k) = sum_{i=0..k} sg_i + sum_{i>k} g_i
inline GradedSubspace h_filtration(const SymmetryAlgebra& S, int k) {
  if (k < 0) throw InputError("h_filtration: k must be non-negative");
  GradedSubspace h(S.algebra);
  for (int d = 0; d <= S.algebra->max_degree(); ++d) {
    if (d <= k)
      h.set_part(d, S.sg.part(d));
    else
      h.set_part(d, GradedSubspace::degree_space(S.algebra, d).part(d));
  }
  return h;
}

// Radical of the Killing form restricted to sg (empty when reductive).
inline std::vector<QVec> killing_radical(const SymmetryAlgebra& S) {
  auto b = S.sg.basis();
  const auto& A = *S.algebra;
  QMatrix g(b.size(), b.size());
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) g(i, j) = A.killing(b[i], b[j]);
  QMatrix ker = kernel(g);
  std::vector<QVec> out;
  for (std::size_t r = 0; r < ker.rows(); ++r) {
    QVec v = zero_vec(A.dim());
    for (std::size_t i = 0; i < b.size(); ++i) axpy(v, ker(r, i), b[i]);
    out.push_back(v);
  }
  return out;
}

struct H1Result {
  std::size_t dimension = 0;
  std::map<int, std::size_t> by_degree;
  // Representative cocycles: for each, the images of the xg basis vectors.
  std::vector<std::vector<QVec>> representatives;
  std::vector<int> representative_degrees;
  bool complex_ok = true;  // d1 o d0 = 0
};

// Positive part of H^1(xg, g/sg) for the abelian action of xg = sg_{-1}.
// A cochain of degree d maps xg (degree -1) into (g/sg)_{d-1}; positive
// means d >= 1.
inline H1Result h1_plus(const SymmetryAlgebra& S) {
  const auto& A = *S.algebra;
  std::size_t n = A.dim();
  const auto& xs = S.xg;
  std::size_t r = xs.size();
  // Quotient model M_j = g_j / sg_j via a fixed complement Q_j and the
  // projection onto Q_j along sg_j.
  std::map<int, QMatrix> Q;
  std::map<int, QMatrix> proj;  // rows: coordinate functionals on Q_j basis
  auto ensure = [&](int j) {
    if (Q.count(j)) return;
    auto amb = GradedSubspace::degree_space(S.algebra, j);
    QMatrix sgj = S.sg.part(j);
    QMatrix q = detail::complement_rows(amb.part(j), sgj);
    Q[j] = q;
    // Projection: solve v = sum a_i q_i + sum b_k s_k for all unit vectors in g_j.
    auto idx = A.indices_of_degree(j);
    std::vector<QVec> cols = q.row_list();
    for (auto& s : sgj.row_list()) cols.push_back(s);
    QMatrix P(q.rows(), n);
    for (auto i : idx) {
      auto sol = detail::solve_combination(cols, unit_vec(n, i));
      if (!sol) throw InternalError("h1_plus: complement does not span");
      for (std::size_t a = 0; a < q.rows(); ++a) P(a, i) = (*sol)[a];
    }
    proj[j] = P;
  };
  auto project = [&](int j, const QVec& v) {
    ensure(j);
    return proj[j] * v;
  };
  H1Result res;
  std::size_t pairs = r * (r - 1) / 2;
  for (int d = 1; d <= A.max_degree() + 1; ++d) {
    ensure(d);
    ensure(d - 1);
    ensure(d - 2);
    std::size_t m0 = Q[d].rows(), m1 = Q[d - 1].rows(), m2 = Q[d - 2].rows();
    std::size_t c1 = r * m1, c2 = pairs * m2;
    if (c1 == 0) continue;
    // d0: m -> (a_s -> [a_s, m])
    QMatrix d0(c1, m0);
    for (std::size_t a = 0; a < m0; ++a) {
      QVec q = Q[d].row(a);
      for (std::size_t s = 0; s < r; ++s) {
        QVec img = project(d - 1, A.bracket(xs[s], q));
        for (std::size_t b = 0; b < m1; ++b) d0(s * m1 + b, a) = img[b];
      }
    }
    // d1: phi -> ((s<t) -> [a_s, phi(a_t)] - [a_t, phi(a_s)])
    QMatrix d1(c2, c1);
    for (std::size_t s = 0; s < r; ++s)
      for (std::size_t b = 0; b < m1; ++b) {
        std::size_t col = s * m1 + b;
        QVec q = Q[d - 1].row(b);
        std::size_t pi = 0;
        for (std::size_t u = 0; u < r; ++u)
          for (std::size_t v = u + 1; v < r; ++v, ++pi) {
            // phi is nonzero only at a_s with value q.
            QVec val = zero_vec(n);
            if (v == s) axpy(val, 1, A.bracket(xs[u], q));
            if (u == s) axpy(val, -1, A.bracket(xs[v], q));
            QVec img = project(d - 2, val);
            for (std::size_t e = 0; e < m2; ++e) d1(pi * m2 + e, col) = img[e];
          }
      }
    if (c2 > 0 && m0 > 0) {
      QMatrix comp = d1 * d0;
      for (std::size_t i = 0; i < comp.rows(); ++i)
        for (std::size_t j = 0; j < comp.cols(); ++j)
          if (sgn(comp(i, j)) != 0) res.complex_ok = false;
    }
    QMatrix Z = c2 > 0 ? kernel(d1) : QMatrix::identity(c1);
    std::size_t rb = m0 > 0 ? rank(d0) : 0;
    std::size_t h = Z.rows() - rb;
    if (h == 0) continue;
    res.by_degree[d] = h;
    res.dimension += h;
    // Representatives: extend the image of d0 inside Z.
    QMatrix B = m0 > 0 ? row_space(d0.transpose()) : QMatrix(0, c1);
    QMatrix reps = detail::complement_rows(row_space(Z), B);
    for (std::size_t k = 0; k < reps.rows(); ++k) {
      std::vector<QVec> images;
      for (std::size_t s = 0; s < r; ++s) {
        QVec v = zero_vec(n);
        for (std::size_t b = 0; b < m1; ++b) axpy(v, reps(k, s * m1 + b), Q[d - 1].row(b));
        images.push_back(v);
      }
      res.representatives.push_back(images);
      res.representative_degrees.push_back(d);
    }
  }
  return res;
}

}  // namespace flagframe
