#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "flagframe/algebra.hpp"

namespace flagframe {

// Graded subspace of an algebra: per degree, a basis in reduced row echelon
// form over the full coordinate vector. Equal subspaces have equal matrices.
class GradedSubspace {
 public:
  GradedSubspace() = default;
  explicit GradedSubspace(AlgebraPtr a) : alg_(std::move(a)) {}

  // Span of homogeneous vectors; zero vectors are ignored.
  static GradedSubspace span(AlgebraPtr a, const std::vector<QVec>& vectors) {
    GradedSubspace s(a);
    std::map<int, std::vector<QVec>> by_deg;
    for (const auto& v : vectors) {
      if (v.size() != a->dim()) throw AlgebraMismatch("vector length does not match algebra");
      if (is_zero(v)) continue;
      auto d = a->homogeneous_degree(v);
      if (!d) throw InputError("span: vector is not homogeneous: " + a->describe(v));
      by_deg[*d].push_back(v);
    }
    for (auto& [d, vs] : by_deg) s.set_part(d, row_space(vs, a->dim()));
    return s;
  }

  static GradedSubspace degree_space(AlgebraPtr a, int d) {
    std::vector<QVec> vs;
    for (auto i : a->indices_of_degree(d)) vs.push_back(unit_vec(a->dim(), i));
    return span(a, vs);
  }

  const AlgebraPtr& algebra() const { return alg_; }

  // Basis rows in degree d (possibly 0 x dim).
  QMatrix part(int d) const {
    auto it = parts_.find(d);
    if (it == parts_.end()) return QMatrix(0, alg_ ? alg_->dim() : 0);
    return it->second;
  }
  std::vector<QVec> basis(int d) const { return part(d).row_list(); }
  std::vector<QVec> basis() const {
    std::vector<QVec> out;
    for (const auto& [d, m] : parts_)
      for (std::size_t r = 0; r < m.rows(); ++r) out.push_back(m.row(r));
    return out;
  }
  std::vector<int> degrees() const {
    std::vector<int> ds;
    for (const auto& [d, m] : parts_) ds.push_back(d);
    return ds;
  }
  std::size_t dim(int d) const { return part(d).rows(); }
  std::size_t dim() const {
    std::size_t s = 0;
    for (const auto& [d, m] : parts_) s += m.rows();
    return s;
  }

  bool contains(const QVec& v) const {
    if (is_zero(v)) return true;
    // Split v into homogeneous pieces; each must lie in its degree part.
    std::map<int, QVec> pieces;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (sgn(v[i]) == 0) continue;
      int d = alg_->degree(i);
      auto& p = pieces[d];
      if (p.empty()) p = zero_vec(v.size());
      p[i] = v[i];
    }
    for (const auto& [d, p] : pieces) {
      QMatrix m = part(d);
      std::vector<QVec> rows = m.row_list();
      rows.push_back(p);
      if (rank(QMatrix::from_rows(rows, v.size())) != m.rows()) return false;
    }
    return true;
  }

  bool operator==(const GradedSubspace& o) const {
    if (alg_.get() != o.alg_.get()) return false;
    std::set<int> ds;
    for (const auto& [d, m] : parts_) ds.insert(d);
    for (const auto& [d, m] : o.parts_) ds.insert(d);
    for (int d : ds)
      if (!(part(d) == o.part(d))) return false;
    return true;
  }

  void set_part(int d, const QMatrix& rows) {
    if (rows.rows() == 0) {
      parts_.erase(d);
      return;
    }
    for (std::size_t r = 0; r < rows.rows(); ++r)
      for (std::size_t c = 0; c < rows.cols(); ++c)
        if (sgn(rows(r, c)) != 0 && alg_->degree(c) != d)
          throw InputError("subspace part of degree " + std::to_string(d) + " leaves g_" + std::to_string(d));
    parts_[d] = row_space(rows);
  }

 private:
  AlgebraPtr alg_;
  std::map<int, QMatrix> parts_;
};

namespace detail {
inline void same_alg(const GradedSubspace& a, const GradedSubspace& b) {
  if (a.algebra().get() != b.algebra().get()) throw AlgebraMismatch("subspaces of different algebras");
}

inline std::set<int> all_degrees(const GradedSubspace& a, const GradedSubspace& b) {
  std::set<int> ds;
  for (int d : a.degrees()) ds.insert(d);
  for (int d : b.degrees()) ds.insert(d);
  return ds;
}

// Rows spanning the intersection of two row spaces.
inline QMatrix intersect_rows(const QMatrix& U, const QMatrix& V) {
  std::size_t n = U.cols();
  if (U.rows() == 0 || V.rows() == 0) return QMatrix(0, n);
  // a U = b V  <=>  [U^T | -V^T] (a; b) = 0
  QMatrix sys(n, U.rows() + V.rows());
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < U.rows(); ++r) sys(c, r) = U(r, c);
    for (std::size_t r = 0; r < V.rows(); ++r) sys(c, U.rows() + r) = -V(r, c);
  }
  QMatrix ker = kernel(sys);
  std::vector<QVec> rows;
  for (std::size_t k = 0; k < ker.rows(); ++k) {
    QVec v = zero_vec(n);
    for (std::size_t r = 0; r < U.rows(); ++r) axpy(v, ker(k, r), U.row(r));
    rows.push_back(v);
  }
  return row_space(rows, n);
}

// Deterministic complement of row space `sub` inside row space `amb`: walk the
// ambient echelon rows in order and keep each that raises the rank.
inline QMatrix complement_rows(const QMatrix& amb, const QMatrix& sub) {
  std::size_t n = amb.cols();
  std::vector<QVec> acc = sub.row_list();
  std::size_t rk = rank(QMatrix::from_rows(acc, n));
  std::vector<QVec> chosen;
  for (std::size_t r = 0; r < amb.rows(); ++r) {
    acc.push_back(amb.row(r));
    std::size_t nr = rank(QMatrix::from_rows(acc, n));
    if (nr > rk) {
      chosen.push_back(amb.row(r));
      rk = nr;
    } else {
      acc.pop_back();
    }
  }
  return row_space(chosen, n);
}
}  // namespace detail

inline GradedSubspace sum(const GradedSubspace& a, const GradedSubspace& b) {
  detail::same_alg(a, b);
  GradedSubspace s(a.algebra());
  for (int d : detail::all_degrees(a, b)) {
    auto rows = a.basis(d);
    for (auto& r : b.basis(d)) rows.push_back(r);
    s.set_part(d, row_space(rows, a.algebra()->dim()));
  }
  return s;
}

inline GradedSubspace intersect(const GradedSubspace& a, const GradedSubspace& b) {
  detail::same_alg(a, b);
  GradedSubspace s(a.algebra());
  for (int d : detail::all_degrees(a, b)) s.set_part(d, detail::intersect_rows(a.part(d), b.part(d)));
  return s;
}

// Complement of `sub` inside `ambient`, degree by degree. Requires sub to be
// contained in ambient.
inline GradedSubspace complement(const GradedSubspace& ambient, const GradedSubspace& sub) {
  detail::same_alg(ambient, sub);
  GradedSubspace s(ambient.algebra());
  for (int d : detail::all_degrees(ambient, sub)) {
    QMatrix amb = ambient.part(d), sb = sub.part(d);
    if (detail::intersect_rows(amb, sb).rows() != sb.rows())
      throw InputError("complement: subspace not contained in ambient in degree " + std::to_string(d));
    s.set_part(d, detail::complement_rows(amb, sb));
  }
  return s;
}

inline GradedSubspace complement_in_degree(const GradedSubspace& ambient_degree_space, const GradedSubspace& sub,
                                           int d) {
  detail::same_alg(ambient_degree_space, sub);
  QMatrix amb = ambient_degree_space.part(d), sb = sub.part(d);
  if (detail::intersect_rows(amb, sb).rows() != sb.rows())
    throw InputError("complement_in_degree: dimension mismatch in degree " + std::to_string(d));
  GradedSubspace s(ambient_degree_space.algebra());
  s.set_part(d, detail::complement_rows(amb, sb));
  return s;
}

// Degrees >= k of the algebra.
inline GradedSubspace filtration(const AlgebraPtr& a, int k) {
  GradedSubspace s(a);
  for (int d = std::max(k, a->min_degree()); d <= a->max_degree(); ++d)
    s = sum(s, GradedSubspace::degree_space(a, d));
  return s;
}

inline bool bracket_closed(const GradedSubspace& s) {
  auto b = s.basis();
  const auto& a = *s.algebra();
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j)
      if (!s.contains(a.bracket(b[i], b[j]))) return false;
  return true;
}

// [sub, V] where sub is a set of vectors; result as a graded subspace.
inline GradedSubspace bracket_span(const AlgebraPtr& a, const std::vector<QVec>& lhs, const std::vector<QVec>& rhs) {
  std::vector<QVec> out;
  for (const auto& u : lhs)
    for (const auto& v : rhs) out.push_back(a->bracket(u, v));
  // Split into homogeneous pieces.
  std::vector<QVec> pieces;
  for (const auto& w : out) {
    std::map<int, QVec> by;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (sgn(w[i]) == 0) continue;
      auto& p = by[a->degree(i)];
      if (p.empty()) p = zero_vec(w.size());
      p[i] = w[i];
    }
    for (auto& [d, p] : by) pieces.push_back(p);
  }
  return GradedSubspace::span(a, pieces);
}

}  // namespace flagframe
