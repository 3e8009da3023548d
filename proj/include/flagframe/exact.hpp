#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "flagframe/errors.hpp"

namespace flagframe {

using Rational = mpq_class;
using QVec = std::vector<Rational>;

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }

inline bool is_zero(const QVec& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& q) { return sgn(q) == 0; });
}

// Accepts "p", "p/q", "-p/q" with optional surrounding whitespace.
inline Rational parse_rational(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != ' ' && c != '\t') s.push_back(c);
  if (s.empty()) throw InputError("empty rational literal");
  if (s.front() == '+') s.erase(s.begin());
  std::size_t slash = s.find('/');
  auto valid_int = [](const std::string& t) {
    std::size_t i = (!t.empty() && t[0] == '-') ? 1 : 0;
    if (i >= t.size()) return false;
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  std::string num = slash == std::string::npos ? s : s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!valid_int(num) || !valid_int(den) || den[0] == '-')
    throw InputError("malformed rational literal '" + text + "'");
  mpz_class d(den);
  if (d == 0) throw InputError("zero denominator in '" + text + "'");
  Rational q(mpz_class(num), d);
  q.canonicalize();
  return q;
}

inline std::string format_rational(const Rational& q) { return q.get_str(); }

inline QVec zero_vec(std::size_t n) { return QVec(n, Rational(0)); }

inline QVec unit_vec(std::size_t n, std::size_t i) {
  QVec v = zero_vec(n);
  v[i] = 1;
  return v;
}

inline void axpy(QVec& y, const Rational& a, const QVec& x) {
  if (is_zero(a)) return;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (sgn(x[i]) != 0) y[i] += a * x[i];
}

// Dense row-major rational matrix.
class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static QMatrix from_rows(const std::vector<QVec>& rows, std::size_t cols) {
    QMatrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols) throw InputError("row length mismatch");
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
  }

  static QMatrix identity(std::size_t n) {
    QMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  QVec row(std::size_t r) const {
    return QVec(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
  }
  std::vector<QVec> row_list() const {
    std::vector<QVec> out;
    for (std::size_t r = 0; r < rows_; ++r) out.push_back(row(r));
    return out;
  }

  QMatrix transpose() const {
    QMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  QMatrix operator*(const QMatrix& o) const {
    if (cols_ != o.rows_) throw InputError("matrix product dimension mismatch");
    QMatrix m(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const Rational& a = (*this)(i, k);
        if (sgn(a) == 0) continue;
        for (std::size_t j = 0; j < o.cols_; ++j)
          if (sgn(o(k, j)) != 0) m(i, j) += a * o(k, j);
      }
    return m;
  }

  QVec operator*(const QVec& v) const {
    if (v.size() != cols_) throw InputError("matrix-vector dimension mismatch");
    QVec out = zero_vec(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k)
        if (sgn((*this)(i, k)) != 0 && sgn(v[k]) != 0) out[i] += (*this)(i, k) * v[k];
    return out;
  }

  bool operator==(const QMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Rational> data_;
};

// In-place reduced row echelon form. Pivots are the leftmost nonzero
// columns, normalized to 1. Returns pivot columns in order.
inline std::vector<std::size_t> rref_in_place(QMatrix& m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && sgn(m(p, c)) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    Rational inv = 1 / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || sgn(m(i, c)) == 0) continue;
      Rational f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j)
        if (sgn(m(r, j)) != 0) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

// Canonical basis of the row space: nonzero rows of the RREF.
inline QMatrix row_space(const QMatrix& m) {
  QMatrix a = m;
  auto piv = rref_in_place(a);
  QMatrix out(piv.size(), m.cols());
  for (std::size_t r = 0; r < piv.size(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = a(r, c);
  return out;
}

inline QMatrix row_space(const std::vector<QVec>& rows, std::size_t cols) {
  return row_space(QMatrix::from_rows(rows, cols));
}

inline std::size_t rank(const QMatrix& m) {
  QMatrix a = m;
  return rref_in_place(a).size();
}

// Right kernel {v : m v = 0}; one basis vector per free column with that
// free entry equal to 1. Returned as rows.
inline QMatrix kernel(const QMatrix& m) {
  QMatrix a = m;
  auto piv = rref_in_place(a);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : piv) is_pivot[p] = true;
  std::vector<QVec> basis;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    QVec v = zero_vec(m.cols());
    v[f] = 1;
    for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -a(r, f);
    basis.push_back(std::move(v));
  }
  return QMatrix::from_rows(basis, m.cols());
}

// Particular solution of m v = b with free variables set to zero.
inline std::optional<QVec> solve(const QMatrix& m, const QVec& b) {
  if (b.size() != m.rows()) throw InputError("solve: right-hand side length mismatch");
  QMatrix a(m.rows(), m.cols() + 1);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) a(r, c) = m(r, c);
    a(r, m.cols()) = b[r];
  }
  auto piv = rref_in_place(a);
  if (!piv.empty() && piv.back() == m.cols()) return std::nullopt;
  QVec v = zero_vec(m.cols());
  for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = a(r, m.cols());
  return v;
}

inline std::optional<QMatrix> inverse(const QMatrix& m) {
  if (m.rows() != m.cols()) throw InputError("inverse of non-square matrix");
  std::size_t n = m.rows();
  QMatrix a(n, 2 * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) a(r, c) = m(r, c);
    a(r, n + r) = 1;
  }
  auto piv = rref_in_place(a);
  if (piv.size() < n || piv[n - 1] != n - 1) return std::nullopt;
  QMatrix inv(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) inv(r, c) = a(r, n + c);
  return inv;
}

}  // namespace flagframe
