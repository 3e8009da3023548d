#pragma once

#include <array>
#include <optional>
#include <vector>

#include "flagframe/algebra.hpp"
#include "flagframe/constructors.hpp"

namespace flagframe {

// Split octonions in Zorn vector-matrix form. An element (a, u, v, b) with
// scalars a, b and u, v in R^3 has coordinates c0 = a, c1..c3 = u,
// c4..c6 = v, c7 = b, and
//   (a,u,v,b)(a',u',v',b') = (aa' + u.v', au' + b'u - v x v',
//                             a'v + bv' + u x u', bb' + v.u').
// The imaginary part V has basis e0 = c0 - c7, e1..e3 = u, e4..e6 = v.
class OctonionAlgebra {
 public:
  using Vec8 = std::array<Rational, 8>;
  using Vec7 = std::array<Rational, 7>;

  OctonionAlgebra() {
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j) {
        Vec8 x{}, y{};
        x[i] = 1;
        y[j] = 1;
        table_[i][j] = multiply_formula(x, y);
      }
    for (std::size_t i = 0; i < 7; ++i)
      for (std::size_t j = 0; j < 7; ++j) B_(i, j) = B(basis7(i), basis7(j));
    for (std::size_t i = 0; i < 7; ++i)
      for (std::size_t j = 0; j < 7; ++j)
        for (std::size_t k = 0; k < 7; ++k) omega_[i][j][k] = Omega(basis7(i), basis7(j), basis7(k));
  }

  Vec8 multiply(const Vec8& x, const Vec8& y) const {
    Vec8 out{};
    for (std::size_t i = 0; i < 8; ++i) {
      if (sgn(x[i]) == 0) continue;
      for (std::size_t j = 0; j < 8; ++j) {
        if (sgn(y[j]) == 0) continue;
        for (std::size_t k = 0; k < 8; ++k)
          if (sgn(table_[i][j][k]) != 0) out[k] += x[i] * y[j] * table_[i][j][k];
      }
    }
    return out;
  }

  const Vec8& table(std::size_t i, std::size_t j) const { return table_[i][j]; }

  static Vec8 unit() {
    Vec8 e{};
    e[0] = 1;
    e[7] = 1;
    return e;
  }
  static Vec8 embed(const Vec7& v) {
    Vec8 x{};
    x[0] = v[0];
    x[7] = -v[0];
    for (std::size_t i = 1; i < 7; ++i) x[i] = v[i];
    return x;
  }
  static Vec8 basis7(std::size_t i) {
    Vec7 v{};
    v[i] = 1;
    return embed(v);
  }
  static Rational real_part(const Vec8& x) { return (x[0] + x[7]) / 2; }
  static Vec7 imaginary_part(const Vec8& x) {
    Vec7 v{};
    v[0] = (x[0] - x[7]) / 2;
    for (std::size_t i = 1; i < 7; ++i) v[i] = x[i];
    return v;
  }

  Rational B(const Vec8& x, const Vec8& y) const { return real_part(multiply(x, y)); }
  Rational Omega(const Vec8& x, const Vec8& y, const Vec8& z) const {
    return B(embed(imaginary_part(multiply(x, y))), z);
  }

  const QMatrix& B_matrix() const { return B_; }
  const Rational& omega(std::size_t i, std::size_t j, std::size_t k) const { return omega_[i][j][k]; }

 private:
  static Vec8 multiply_formula(const Vec8& x, const Vec8& y) {
    const Rational &a = x[0], &b = x[7], &a2 = y[0], &b2 = y[7];
    Rational u[3] = {x[1], x[2], x[3]}, v[3] = {x[4], x[5], x[6]};
    Rational u2[3] = {y[1], y[2], y[3]}, v2[3] = {y[4], y[5], y[6]};
    auto cross = [](const Rational* p, const Rational* q, std::size_t i) {
      std::size_t j = (i + 1) % 3, k = (i + 2) % 3;
      return Rational(p[j] * q[k] - p[k] * q[j]);
    };
    Vec8 out{};
    out[0] = a * a2 + u[0] * v2[0] + u[1] * v2[1] + u[2] * v2[2];
    out[7] = b * b2 + v[0] * u2[0] + v[1] * u2[1] + v[2] * u2[2];
    for (std::size_t i = 0; i < 3; ++i) {
      out[1 + i] = a * u2[i] + b2 * u[i] - cross(v, v2, i);
      out[4 + i] = a2 * v[i] + b * v2[i] + cross(u, u2, i);
    }
    return out;
  }

  std::array<std::array<Vec8, 8>, 8> table_{};
  QMatrix B_ = QMatrix(7, 7);
  std::array<std::array<std::array<Rational, 7>, 7>, 7> omega_{};
};

inline const OctonionAlgebra& split_octonions() {
  static const OctonionAlgebra o;
  return o;
}

// Derivations of the multiplication, returned as 7x7 matrices acting on V
// (every derivation kills 1 and preserves V). Rows of the canonical echelon
// basis of the solution space, reshaped.
inline std::vector<QMatrix> derivations(const OctonionAlgebra& o) {
  // Unknown D (8x8, row-major index r*8+c) with D(e_i e_j) = D(e_i) e_j + e_i D(e_j).
  QMatrix sys(8 * 8 * 8, 64);
  std::size_t row = 0;
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) {
      const auto& p = o.table(i, j);
      for (std::size_t k = 0; k < 8; ++k, ++row) {
        // (D p)_k = sum_m D_{k m} p_m
        for (std::size_t m = 0; m < 8; ++m)
          if (sgn(p[m]) != 0) sys(row, k * 8 + m) += p[m];
        // (D e_i) e_j = sum_m D_{m i} (e_m e_j)
        for (std::size_t m = 0; m < 8; ++m) {
          const auto& q = o.table(m, j);
          if (sgn(q[k]) != 0) sys(row, m * 8 + i) -= q[k];
          const auto& s = o.table(i, m);
          if (sgn(s[k]) != 0) sys(row, m * 8 + j) -= s[k];
        }
      }
    }
  QMatrix ker = row_space(kernel(sys));
  // Change to the V basis: x = embed(v) = P v with P 8x7; D restricted to V is
  // P^+ D P where P^+ maps an imaginary octonion back to V coordinates.
  std::vector<QMatrix> out;
  for (std::size_t r = 0; r < ker.rows(); ++r) {
    QMatrix D8(8, 8);
    for (std::size_t idx = 0; idx < 64; ++idx) D8(idx / 8, idx % 8) = ker(r, idx);
    QMatrix D7(7, 7);
    for (std::size_t c = 0; c < 7; ++c) {
      auto ec = OctonionAlgebra::basis7(c);
      OctonionAlgebra::Vec8 img{};
      for (std::size_t a = 0; a < 8; ++a)
        for (std::size_t b = 0; b < 8; ++b) img[a] += D8(a, b) * ec[b];
      if (sgn(OctonionAlgebra::real_part(img)) != 0) throw InternalError("derivation leaves the imaginary part");
      auto v = OctonionAlgebra::imaginary_part(img);
      for (std::size_t a = 0; a < 7; ++a) D7(a, c) = v[a];
    }
    out.push_back(D7);
  }
  return out;
}

// Explicit isomorphism from the Chevalley G2 (build_g2) onto the derivation
// algebra: images of the 14 basis elements as 7x7 matrices such that every
// structure constant is reproduced exactly. nullopt if none is found.
inline std::optional<std::vector<QMatrix>> find_g2_isomorphism(const GradedAlgebra& g2,
                                                               const std::vector<QMatrix>& derivs) {
  const std::size_t n = 7, d = derivs.size();
  if (d != 14 || g2.dim() != 14) return std::nullopt;
  auto flat = [&](const QMatrix& m) {
    QVec v(n * n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) v[r * n + c] = m(r, c);
    return v;
  };
  auto unflat = [&](const QVec& v) {
    QMatrix m(n, n);
    for (std::size_t i = 0; i < n * n; ++i) m(i / n, i % n) = v[i];
    return m;
  };
  std::vector<QVec> span_rows;
  for (const auto& D : derivs) span_rows.push_back(flat(D));
  // Intersection of the derivation span with a coordinate subspace of gl(V):
  // solve sum_a c_a D_a with all entries outside `allowed` equal to zero.
  auto span_within = [&](const std::vector<bool>& allowed) {
    QMatrix sys(n * n, d);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t i = 0; i < n * n; ++i)
        if (!allowed[i]) sys(i, a) = span_rows[a][i];
    QMatrix ker = kernel(sys);
    std::vector<QMatrix> out;
    for (std::size_t r = 0; r < ker.rows(); ++r) {
      QVec v = zero_vec(n * n);
      for (std::size_t a = 0; a < d; ++a) axpy(v, ker(r, a), span_rows[a]);
      out.push_back(unflat(v));
    }
    return out;
  };
  std::vector<bool> diag(n * n, false);
  for (std::size_t i = 0; i < n; ++i) diag[i * n + i] = true;
  auto torus = span_within(diag);
  if (torus.size() != 2) return std::nullopt;
  // Weight of E_rs under the torus: (t_r - t_s) for each torus generator.
  using Weight = std::pair<Rational, Rational>;
  auto weight_of = [&](std::size_t r, std::size_t s) {
    return Weight(torus[0](r, r) - torus[0](s, s), torus[1](r, r) - torus[1](s, s));
  };
  std::vector<Weight> roots;
  std::vector<QMatrix> root_vecs;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = 0; s < n; ++s) {
      Weight w = weight_of(r, s);
      if (sgn(w.first) == 0 && sgn(w.second) == 0) continue;
      if (std::find(roots.begin(), roots.end(), w) != roots.end()) continue;
      std::vector<bool> allowed(n * n, false);
      for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q)
          if (weight_of(p, q) == w) allowed[p * n + q] = true;
      auto sp = span_within(allowed);
      if (sp.empty()) continue;
      if (sp.size() != 1) return std::nullopt;
      roots.push_back(w);
      root_vecs.push_back(sp[0]);
    }
  if (roots.size() != 12) return std::nullopt;

  auto comm = [](const QMatrix& a, const QMatrix& b) { return detail::commutator(a, b); };
  auto scale = [](QMatrix m, const Rational& c) {
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t s = 0; s < m.cols(); ++s) m(r, s) *= c;
    return m;
  };
  // Value of a root functional on a diagonal derivation T = x T0 + y T1.
  auto torus_coords = [&](const QMatrix& T) -> std::optional<std::pair<Rational, Rational>> {
    // Solve T = x torus0 + y torus1 on the diagonal.
    QMatrix sys(n, 2);
    QVec rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
      sys(i, 0) = torus[0](i, i);
      sys(i, 1) = torus[1](i, i);
      rhs[i] = T(i, i);
    }
    auto s = solve(sys, rhs);
    if (!s) return std::nullopt;
    return std::make_pair((*s)[0], (*s)[1]);
  };
  auto eval = [&](const Weight& w, const QMatrix& T) -> std::optional<Rational> {
    auto c = torus_coords(T);
    if (!c) return std::nullopt;
    return Rational(w.first * c->first + w.second * c->second);
  };
  auto index_of_root = [&](const Weight& w) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < roots.size(); ++i)
      if (roots[i] == w) return i;
    return std::nullopt;
  };
  const auto& pos = g2_positive_roots();
  for (std::size_t i1 = 0; i1 < roots.size(); ++i1)
    for (std::size_t i2 = 0; i2 < roots.size(); ++i2) {
      if (i1 == i2) continue;
      const Weight &b1 = roots[i1], &b2 = roots[i2];
      bool ok = true;
      for (int sign : {1, -1})
        for (auto [a, b] : pos) {
          Weight w(sign * (a * b1.first + b * b2.first), sign * (a * b1.second + b * b2.second));
          if (!index_of_root(w)) ok = false;
        }
      if (!ok) continue;
      auto root_vec = [&](int a, int b) { return root_vecs[*index_of_root(Weight(a * b1.first + b * b2.first,
                                                                                    a * b1.second + b * b2.second))]; };
      std::vector<QMatrix> img(14, QMatrix(n, n));
      // Simple root vectors and their opposite partners, scaled so that
      // beta_i([E_i, F_i]) = 2.
      QMatrix E1 = root_vec(1, 0), E2 = root_vec(0, 1);
      QMatrix F1 = root_vec(-1, 0), F2 = root_vec(0, -1);
      auto v1 = eval(b1, comm(E1, F1));
      auto v2 = eval(b2, comm(E2, F2));
      if (!v1 || !v2 || sgn(*v1) == 0 || sgn(*v2) == 0) continue;
      F1 = scale(F1, 2 / *v1);
      F2 = scale(F2, 2 / *v2);
      // Coroots: a1v = 2 H1 - H2, a2v = -3 H1 + 2 H2  =>  H1 = 2 a1v + a2v, H2 = 3 a1v + 2 a2v.
      QMatrix c1 = comm(E1, F1), c2 = comm(E2, F2);
      QMatrix H1(n, n), H2(n, n);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) {
          H1(r, s) = 2 * c1(r, s) + c2(r, s);
          H2(r, s) = 3 * c1(r, s) + 2 * c2(r, s);
        }
      img[0] = H1;
      img[1] = H2;
      img[2] = E1;
      img[3] = E2;
      img[8] = F1;
      img[9] = F2;
      // Remaining positive (negative) root vectors from brackets with
      // simple ones, following the table: [b_i, b_j] = c b_k.
      bool progress = true;
      std::vector<bool> known(14, false);
      for (std::size_t k : {0, 1, 2, 3, 8, 9}) known[k] = true;
      while (progress) {
        progress = false;
        for (std::size_t i = 0; i < 14; ++i)
          for (std::size_t j = 0; j < 14; ++j) {
            if (!known[i] || !known[j]) continue;
            const auto& terms = g2.bracket_basis(i, j);
            if (terms.size() != 1 || known[terms[0].index]) continue;
            img[terms[0].index] = scale(comm(img[i], img[j]), 1 / terms[0].coeff);
            known[terms[0].index] = true;
            progress = true;
          }
      }
      if (std::find(known.begin(), known.end(), false) != known.end()) continue;
      bool all = true;
      for (std::size_t i = 0; i < 14 && all; ++i)
        for (std::size_t j = i + 1; j < 14 && all; ++j) {
          QMatrix expect(n, n);
          for (const auto& t : g2.bracket_basis(i, j))
            for (std::size_t r = 0; r < n; ++r)
              for (std::size_t s = 0; s < n; ++s) expect(r, s) += t.coeff * img[t.index](r, s);
          if (!(comm(img[i], img[j]) == expect)) all = false;
        }
      if (all) return img;
    }
  return std::nullopt;
}

}  // namespace flagframe
