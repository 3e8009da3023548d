#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flagframe/errors.hpp"
#include "flagframe/exact.hpp"

namespace flagframe {

struct Term {
  std::size_t index;
  Rational coeff;
};
using SparseVec = std::vector<Term>;

// [b_i, b_j] = coeff * b_k
struct StructureEntry {
  std::size_t i, j, k;
  Rational coeff;
};

// Finite-dimensional graded Lie algebra with exact structure constants.
// Optionally carries a faithful matrix representation (one matrix per basis
// element), used to translate matrix-valued data into basis coordinates.
class GradedAlgebra {
 public:
  GradedAlgebra(std::string name, std::vector<std::string> labels, std::vector<int> degrees,
                QVec grading_element, const std::vector<StructureEntry>& entries,
                std::vector<std::size_t> cartan, std::vector<QMatrix> representation = {})
      : name_(std::move(name)),
        labels_(std::move(labels)),
        degrees_(std::move(degrees)),
        grading_(std::move(grading_element)),
        cartan_(std::move(cartan)),
        rep_(std::move(representation)) {
    dim_ = labels_.size();
    if (degrees_.size() != dim_ || grading_.size() != dim_)
      throw InputError("algebra '" + name_ + "': labels, degrees and grading element differ in length");
    table_.assign(dim_ * dim_, {});
    std::map<std::pair<std::size_t, std::size_t>, std::map<std::size_t, Rational>> acc;
    for (const auto& e : entries) {
      if (e.i >= dim_ || e.j >= dim_ || e.k >= dim_)
        throw InputError("algebra '" + name_ + "': structure constant index out of range");
      if (e.i == e.j) {
        if (sgn(e.coeff) != 0) throw InputError("algebra '" + name_ + "': [b_i, b_i] must vanish");
        continue;
      }
      if (e.i < e.j)
        acc[{e.i, e.j}][e.k] += e.coeff;
      else
        acc[{e.j, e.i}][e.k] -= e.coeff;
    }
    for (auto& [ij, terms] : acc) {
      for (auto& [k, c] : terms) {
        if (sgn(c) == 0) continue;
        table_[ij.first * dim_ + ij.second].push_back({k, c});
        table_[ij.second * dim_ + ij.first].push_back({k, -c});
      }
    }
    for (auto c : cartan_)
      if (c >= dim_) throw InputError("algebra '" + name_ + "': Cartan index out of range");
    min_deg_ = dim_ ? *std::min_element(degrees_.begin(), degrees_.end()) : 0;
    max_deg_ = dim_ ? *std::max_element(degrees_.begin(), degrees_.end()) : 0;
    build_float_ad();
    build_killing();
    if (!rep_.empty()) build_coordinate_map();
  }

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  int degree(std::size_t i) const { return degrees_.at(i); }
  const std::vector<int>& degrees() const { return degrees_; }
  int min_degree() const { return min_deg_; }
  int max_degree() const { return max_deg_; }
  const QVec& grading_element() const { return grading_; }
  const std::vector<std::size_t>& cartan() const { return cartan_; }
  const std::vector<QMatrix>& representation() const { return rep_; }
  bool has_representation() const { return !rep_.empty(); }

  std::vector<std::size_t> indices_of_degree(int d) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < dim_; ++i)
      if (degrees_[i] == d) out.push_back(i);
    return out;
  }
  std::size_t degree_dim(int d) const { return indices_of_degree(d).size(); }

  std::optional<std::size_t> index_of(const std::string& label) const {
    for (std::size_t i = 0; i < dim_; ++i)
      if (labels_[i] == label) return i;
    return std::nullopt;
  }

  const SparseVec& bracket_basis(std::size_t i, std::size_t j) const { return table_[i * dim_ + j]; }

  QVec bracket(const QVec& a, const QVec& b) const {
    check_len(a);
    check_len(b);
    QVec out = zero_vec(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      if (sgn(a[i]) == 0) continue;
      for (std::size_t j = 0; j < dim_; ++j) {
        if (sgn(b[j]) == 0) continue;
        const auto& terms = table_[i * dim_ + j];
        if (terms.empty()) continue;
        Rational ab = a[i] * b[j];
        for (const auto& t : terms) out[t.index] += ab * t.coeff;
      }
    }
    return out;
  }

  Eigen::VectorXd bracket(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return ad_float(a) * b;
  }

  // Matrix of ad(u) acting on coordinate columns.
  QMatrix ad(const QVec& u) const {
    check_len(u);
    QMatrix m(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
      if (sgn(u[i]) == 0) continue;
      for (std::size_t j = 0; j < dim_; ++j)
        for (const auto& t : table_[i * dim_ + j]) m(t.index, j) += u[i] * t.coeff;
    }
    return m;
  }

  Eigen::MatrixXd ad_float(const Eigen::VectorXd& u) const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
    for (std::size_t i = 0; i < dim_; ++i)
      if (u(static_cast<Eigen::Index>(i)) != 0.0) m += u(static_cast<Eigen::Index>(i)) * ad_basis_[i];
    return m;
  }
  const Eigen::MatrixXd& ad_basis_float(std::size_t i) const { return ad_basis_[i]; }

  const QMatrix& killing_matrix() const { return killing_; }

  Rational killing(const QVec& a, const QVec& b) const {
    check_len(a);
    check_len(b);
    Rational s = 0;
    for (std::size_t i = 0; i < dim_; ++i) {
      if (sgn(a[i]) == 0) continue;
      for (std::size_t j = 0; j < dim_; ++j)
        if (sgn(b[j]) != 0 && sgn(killing_(i, j)) != 0) s += a[i] * killing_(i, j) * b[j];
    }
    return s;
  }

  bool killing_nondegenerate() const { return rank(killing_) == dim_; }

  // Degree of a nonzero homogeneous vector, nullopt if zero or mixed.
  std::optional<int> homogeneous_degree(const QVec& v) const {
    check_len(v);
    std::optional<int> d;
    for (std::size_t i = 0; i < dim_; ++i) {
      if (sgn(v[i]) == 0) continue;
      if (d && *d != degrees_[i]) return std::nullopt;
      d = degrees_[i];
    }
    return d;
  }

  std::string describe(const QVec& v) const {
    check_len(v);
    std::string s;
    for (std::size_t i = 0; i < dim_; ++i) {
      if (sgn(v[i]) == 0) continue;
      if (!s.empty()) s += " + ";
      if (v[i] != 1) s += "(" + format_rational(v[i]) + ")*";
      s += labels_[i];
    }
    return s.empty() ? "0" : s;
  }

  // Exact verification helpers; each returns the first failing description
  // or an empty string.
  std::string jacobi_violation() const {
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = i + 1; j < dim_; ++j)
        for (std::size_t k = j + 1; k < dim_; ++k) {
          QVec s = zero_vec(dim_);
          add_double_bracket(s, i, j, k);
          add_double_bracket(s, j, k, i);
          add_double_bracket(s, k, i, j);
          if (!is_zero(s))
            return "Jacobi fails on (" + labels_[i] + ", " + labels_[j] + ", " + labels_[k] + ")";
        }
    return {};
  }

  std::string grading_violation() const {
    for (std::size_t i = 0; i < dim_; ++i) {
      QVec b = bracket(grading_, unit_vec(dim_, i));
      QVec expect = unit_vec(dim_, i);
      for (auto& q : expect) q *= degrees_[i];
      if (b != expect) return "[e, " + labels_[i] + "] != deg * " + labels_[i];
    }
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        for (const auto& t : table_[i * dim_ + j])
          if (degrees_[t.index] != degrees_[i] + degrees_[j])
            return "bracket of " + labels_[i] + ", " + labels_[j] + " leaves the expected degree";
    return {};
  }

  std::string killing_grading_violation() const {
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        if (degrees_[i] + degrees_[j] != 0 && sgn(killing_(i, j)) != 0)
          return "K(" + labels_[i] + ", " + labels_[j] + ") != 0";
    return {};
  }

  // Coordinates of a matrix in the representation basis. Requires the matrix
  // to lie in the span; returns nullopt otherwise.
  std::optional<QVec> coordinates_of(const QMatrix& m) const {
    if (rep_.empty()) throw InputError("algebra '" + name_ + "' has no matrix representation");
    std::size_t n = rep_[0].rows();
    if (m.rows() != n || m.cols() != n) throw InputError("matrix size does not match representation");
    QVec sel(dim_);
    for (std::size_t a = 0; a < dim_; ++a) sel[a] = m(coord_rows_[a] / n, coord_rows_[a] % n);
    QVec c = coord_inverse_ * sel;
    QMatrix back(n, n);
    for (std::size_t i = 0; i < dim_; ++i)
      if (sgn(c[i]) != 0)
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t s = 0; s < n; ++s)
            if (sgn(rep_[i](r, s)) != 0) back(r, s) += c[i] * rep_[i](r, s);
    if (!(back == m)) return std::nullopt;
    return c;
  }

  // Float coordinates plus the residual of the reconstruction (max-abs).
  std::pair<Eigen::VectorXd, double> coordinates_of(const Eigen::MatrixXd& m) const {
    if (rep_.empty()) throw InputError("algebra '" + name_ + "' has no matrix representation");
    auto n = static_cast<Eigen::Index>(rep_[0].rows());
    if (m.rows() != n || m.cols() != n) throw InputError("matrix size does not match representation");
    Eigen::VectorXd sel(static_cast<Eigen::Index>(dim_));
    for (std::size_t a = 0; a < dim_; ++a)
      sel(static_cast<Eigen::Index>(a)) = m(static_cast<Eigen::Index>(coord_rows_[a]) / n,
                                            static_cast<Eigen::Index>(coord_rows_[a]) % n);
    Eigen::VectorXd c = coord_inverse_f_ * sel;
    Eigen::MatrixXd back = matrix_of(c);
    return {c, (back - m).cwiseAbs().maxCoeff()};
  }

  Eigen::MatrixXd matrix_of(const Eigen::VectorXd& c) const {
    if (rep_.empty()) throw InputError("algebra '" + name_ + "' has no matrix representation");
    auto n = static_cast<Eigen::Index>(rep_[0].rows());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < dim_; ++i)
      if (c(static_cast<Eigen::Index>(i)) != 0.0) m += c(static_cast<Eigen::Index>(i)) * rep_f_[i];
    return m;
  }

  QMatrix matrix_of(const QVec& c) const {
    if (rep_.empty()) throw InputError("algebra '" + name_ + "' has no matrix representation");
    std::size_t n = rep_[0].rows();
    QMatrix m(n, n);
    for (std::size_t i = 0; i < dim_; ++i)
      if (sgn(c[i]) != 0)
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t s = 0; s < n; ++s)
            if (sgn(rep_[i](r, s)) != 0) m(r, s) += c[i] * rep_[i](r, s);
    return m;
  }

 private:
  void check_len(const QVec& v) const {
    if (v.size() != dim_) throw AlgebraMismatch("vector length does not match algebra '" + name_ + "'");
  }

  // s += [[b_a, b_b], b_c]
  void add_double_bracket(QVec& s, std::size_t a, std::size_t b, std::size_t c) const {
    for (const auto& t : table_[a * dim_ + b])
      for (const auto& u : table_[t.index * dim_ + c]) s[u.index] += t.coeff * u.coeff;
  }

  void build_float_ad() {
    auto n = static_cast<Eigen::Index>(dim_);
    ad_basis_.assign(dim_, Eigen::MatrixXd::Zero(n, n));
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        for (const auto& t : table_[i * dim_ + j])
          ad_basis_[i](static_cast<Eigen::Index>(t.index), static_cast<Eigen::Index>(j)) = t.coeff.get_d();
  }

  void build_killing() {
    // K_ij = sum_k sum_l (ad_i)_{k l} (ad_j)_{l k}
    killing_ = QMatrix(dim_, dim_);
    auto coeff_of = [&](std::size_t a, std::size_t b, std::size_t k) -> const Rational* {
      for (const auto& t : table_[a * dim_ + b])
        if (t.index == k) return &t.coeff;
      return nullptr;
    };
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = i; j < dim_; ++j) {
        Rational s = 0;
        for (std::size_t k = 0; k < dim_; ++k)
          for (const auto& t : table_[j * dim_ + k]) {
            const Rational* c = coeff_of(i, t.index, k);
            if (c) s += t.coeff * *c;
          }
        killing_(i, j) = s;
        killing_(j, i) = s;
      }
  }

  void build_coordinate_map() {
    if (rep_.size() != dim_) throw InputError("representation size does not match basis");
    std::size_t n = rep_[0].rows();
    // Column a of M is vec(rep_a); pick dim_ independent rows of M.
    QMatrix mt(dim_, n * n);
    for (std::size_t a = 0; a < dim_; ++a) {
      if (rep_[a].rows() != n || rep_[a].cols() != n) throw InputError("representation matrices differ in size");
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) mt(a, r * n + s) = rep_[a](r, s);
    }
    QMatrix red = mt;
    auto piv = rref_in_place(red);
    if (piv.size() != dim_) throw InputError("representation matrices are linearly dependent");
    coord_rows_ = piv;
    QMatrix sub(dim_, dim_);
    for (std::size_t a = 0; a < dim_; ++a)
      for (std::size_t b = 0; b < dim_; ++b) sub(a, b) = mt(b, piv[a]);
    auto inv = inverse(sub);
    if (!inv) throw InternalError("coordinate map is singular");
    coord_inverse_ = *inv;
    auto d = static_cast<Eigen::Index>(dim_);
    coord_inverse_f_.resize(d, d);
    for (std::size_t a = 0; a < dim_; ++a)
      for (std::size_t b = 0; b < dim_; ++b)
        coord_inverse_f_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = coord_inverse_(a, b).get_d();
    auto nn = static_cast<Eigen::Index>(n);
    for (const auto& m : rep_) {
      Eigen::MatrixXd f(nn, nn);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s)
          f(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) = m(r, s).get_d();
      rep_f_.push_back(f);
    }
  }

  std::string name_;
  std::vector<std::string> labels_;
  std::vector<int> degrees_;
  QVec grading_;
  std::vector<std::size_t> cartan_;
  std::vector<QMatrix> rep_;
  std::size_t dim_ = 0;
  int min_deg_ = 0, max_deg_ = 0;
  std::vector<SparseVec> table_;
  std::vector<Eigen::MatrixXd> ad_basis_;
  QMatrix killing_;
  std::vector<std::size_t> coord_rows_;
  QMatrix coord_inverse_;
  Eigen::MatrixXd coord_inverse_f_;
  std::vector<Eigen::MatrixXd> rep_f_;
};

using AlgebraPtr = std::shared_ptr<const GradedAlgebra>;

// Algebra element in exact (Rational) or numeric (double) mode. Mixing modes
// does not compile; mixing algebras throws AlgebraMismatch.
template <class Scalar>
struct Element {
  AlgebraPtr algebra;
  std::vector<Scalar> coeffs;

  Element(AlgebraPtr a, std::vector<Scalar> c) : algebra(std::move(a)), coeffs(std::move(c)) {
    if (!algebra) throw InputError("element without algebra");
    if (coeffs.size() != algebra->dim())
      throw AlgebraMismatch("element length " + std::to_string(coeffs.size()) + " does not match dimension " +
                            std::to_string(algebra->dim()));
  }
  static Element basis(AlgebraPtr a, std::size_t i) {
    std::vector<Scalar> c(a->dim(), Scalar(0));
    c.at(i) = Scalar(1);
    return Element(a, std::move(c));
  }
};

namespace detail {
template <class S>
void same_algebra(const Element<S>& a, const Element<S>& b) {
  if (a.algebra.get() != b.algebra.get())
    throw AlgebraMismatch("elements belong to different algebras ('" + a.algebra->name() + "' vs '" +
                          b.algebra->name() + "')");
}
}  // namespace detail

inline Element<Rational> bracket(const Element<Rational>& a, const Element<Rational>& b) {
  detail::same_algebra(a, b);
  return Element<Rational>(a.algebra, a.algebra->bracket(a.coeffs, b.coeffs));
}

inline Element<double> bracket(const Element<double>& a, const Element<double>& b) {
  detail::same_algebra(a, b);
  Eigen::Map<const Eigen::VectorXd> va(a.coeffs.data(), static_cast<Eigen::Index>(a.coeffs.size()));
  Eigen::Map<const Eigen::VectorXd> vb(b.coeffs.data(), static_cast<Eigen::Index>(b.coeffs.size()));
  Eigen::VectorXd r = a.algebra->bracket(Eigen::VectorXd(va), Eigen::VectorXd(vb));
  return Element<double>(a.algebra, std::vector<double>(r.data(), r.data() + r.size()));
}

inline Rational killing(const Element<Rational>& a, const Element<Rational>& b) {
  detail::same_algebra(a, b);
  return a.algebra->killing(a.coeffs, b.coeffs);
}

inline double killing(const Element<double>& a, const Element<double>& b) {
  detail::same_algebra(a, b);
  const auto& k = a.algebra->killing_matrix();
  double s = 0;
  for (std::size_t i = 0; i < k.rows(); ++i)
    for (std::size_t j = 0; j < k.cols(); ++j) s += a.coeffs[i] * k(i, j).get_d() * b.coeffs[j];
  return s;
}

inline Eigen::VectorXd to_float(const QVec& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i].get_d();
  return out;
}

inline Eigen::MatrixXd to_float(const QMatrix& m) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(r, c).get_d();
  return out;
}

}  // namespace flagframe
