#pragma once

#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "flagframe/algebra.hpp"

namespace flagframe {

enum class FormParity { symmetric, skew };
enum class G2Parabolic { B, P1, P2 };

namespace detail {

inline QMatrix commutator(const QMatrix& a, const QMatrix& b) {
  QMatrix ab = a * b, ba = b * a;
  QMatrix c(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t s = 0; s < a.cols(); ++s) c(r, s) = ab(r, s) - ba(r, s);
  return c;
}

inline QMatrix single_entry(std::size_t n, std::size_t r, std::size_t c) {
  QMatrix m(n, n);
  m(r, c) = 1;
  return m;
}

inline std::string entry_label(char prefix, std::size_t r, std::size_t c, std::size_t n) {
  if (n <= 10) return std::string(1, prefix) + std::to_string(r) + std::to_string(c);
  return std::string(1, prefix) + std::to_string(r) + "_" + std::to_string(c);
}

}  // namespace detail

// Builds a graded algebra from a basis of matrices closed under commutators.
// The grading element is given as a matrix in the span; degrees are read off
// from its adjoint action and must be integers.
inline AlgebraPtr from_matrix_basis(const std::string& name, const std::vector<std::string>& labels,
                                    const std::vector<QMatrix>& basis, const QMatrix& grading_matrix,
                                    const std::vector<std::size_t>& cartan) {
  std::size_t d = basis.size();
  std::vector<int> zero_deg(d, 0);
  GradedAlgebra probe(name, labels, zero_deg, zero_vec(d), {}, {}, basis);
  auto e = probe.coordinates_of(grading_matrix);
  if (!e) throw InputError("grading element does not lie in the algebra");
  std::vector<int> degrees(d);
  for (std::size_t a = 0; a < d; ++a) {
    QMatrix c = detail::commutator(grading_matrix, basis[a]);
    auto coords = probe.coordinates_of(c);
    if (!coords) throw InputError("algebra not closed under the grading element");
    Rational deg = (*coords)[a];
    QVec expect = zero_vec(d);
    expect[a] = deg;
    if (*coords != expect || deg.get_den() != 1)
      throw InputError("basis element " + labels[a] + " is not an integral eigenvector of the grading element");
    degrees[a] = static_cast<int>(deg.get_num().get_si());
  }
  std::vector<StructureEntry> entries;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      QMatrix c = detail::commutator(basis[i], basis[j]);
      auto coords = probe.coordinates_of(c);
      if (!coords) throw InputError("matrix basis is not closed under commutators");
      for (std::size_t k = 0; k < d; ++k)
        if (sgn((*coords)[k]) != 0) entries.push_back({i, j, k, (*coords)[k]});
    }
  return std::make_shared<GradedAlgebra>(name, labels, degrees, *e, entries, cartan, basis);
}

// sl(n) graded by a partition of the index set into consecutive blocks. The
// entry (r, c) has degree blk(c) - blk(r), so the block upper triangular part
// is the parabolic and the block subdiagonal is degree -1.
inline AlgebraPtr build_sl_flag(const std::vector<int>& block_sizes) {
  if (block_sizes.empty()) throw InputError("build_sl_flag: empty block list");
  std::vector<int> blk;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) {
    if (block_sizes[b] <= 0) throw InputError("build_sl_flag: block sizes must be positive");
    for (int i = 0; i < block_sizes[b]; ++i) blk.push_back(static_cast<int>(b));
  }
  std::size_t n = blk.size();
  if (n < 2) throw InputError("build_sl_flag: need n >= 2");
  std::vector<QMatrix> basis;
  std::vector<std::string> labels;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      if (r == c) continue;
      basis.push_back(detail::single_entry(n, r, c));
      labels.push_back(detail::entry_label('E', r, c, n));
    }
  std::vector<std::size_t> cartan;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    QMatrix h(n, n);
    h(i, i) = 1;
    h(i + 1, i + 1) = -1;
    cartan.push_back(basis.size());
    basis.push_back(h);
    labels.push_back("H" + std::to_string(i));
  }
  Rational mean(std::accumulate(blk.begin(), blk.end(), 0), static_cast<long>(n));
  mean.canonicalize();
  QMatrix e(n, n);
  for (std::size_t i = 0; i < n; ++i) e(i, i) = mean - blk[i];
  std::string name = "sl(" + std::to_string(n) + ")[";
  for (std::size_t b = 0; b < block_sizes.size(); ++b)
    name += (b ? "," : "") + std::to_string(block_sizes[b]);
  name += "]";
  return from_matrix_basis(name, labels, basis, e, cartan);
}

// Principal (irreducible) lowering element of sl(n) in the Borel grading.
inline QVec principal_x(const GradedAlgebra& sl) {
  if (!sl.has_representation()) throw InputError("principal_x needs a matrix algebra");
  std::size_t n = sl.representation()[0].rows();
  QMatrix x(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) x(i + 1, i) = 1;
  auto c = sl.coordinates_of(x);
  if (!c) throw InputError("lower shift is not in the algebra");
  return *c;
}

// so or sp of the antidiagonal form, graded by an isotropic flag of the given
// dimensions.
inline AlgebraPtr build_slb(int n, FormParity parity, const std::vector<int>& flag) {
  if (n < 2) throw InputError("build_slb: n must be at least 2");
  if (parity == FormParity::skew && n % 2 != 0) throw InputError("build_slb: skew form needs even n");
  int prev = 0;
  for (int r : flag) {
    if (r <= prev) throw InputError("build_slb: flag dimensions must be strictly increasing and positive");
    prev = r;
  }
  if (prev * 2 > n) throw InputError("build_slb: flag is not isotropic (dimension exceeds n/2)");
  auto un = static_cast<std::size_t>(n);
  QMatrix J(un, un);
  for (std::size_t i = 0; i < un; ++i)
    J(i, un - 1 - i) = (parity == FormParity::skew && i >= un / 2) ? -1 : 1;

  // Linear conditions A^T J + J A = 0 on the n^2 entries (row-major).
  QMatrix cond(un * un, un * un);
  for (std::size_t r = 0; r < un; ++r)
    for (std::size_t c = 0; c < un; ++c) {
      std::size_t row = r * un + c;
      // (A^T J)_{rc} = sum_k A_{kr} J_{kc};  (J A)_{rc} = sum_k J_{rk} A_{kc}
      for (std::size_t k = 0; k < un; ++k) {
        if (sgn(J(k, c)) != 0) cond(row, k * un + r) += J(k, c);
        if (sgn(J(r, k)) != 0) cond(row, k * un + c) += J(r, k);
      }
    }
  QMatrix ker = kernel(cond);

  int m = static_cast<int>(flag.size());
  bool middle = prev * 2 < n;
  std::vector<int> blk(un);
  {
    std::vector<int> sizes;
    int p = 0;
    for (int r : flag) {
      sizes.push_back(r - p);
      p = r;
    }
    std::size_t i = 0;
    for (int b = 0; b < m; ++b)
      for (int s = 0; s < sizes[static_cast<std::size_t>(b)]; ++s) blk[i++] = b;
    if (middle)
      for (int s = 0; s < n - 2 * prev; ++s) blk[i++] = m;
    int base = middle ? 2 * m : 2 * m - 1;
    for (int b = m - 1; b >= 0; --b)
      for (int s = 0; s < sizes[static_cast<std::size_t>(b)]; ++s) blk[i++] = base - b;
  }
  Rational shift = middle ? Rational(m) : Rational(2 * m - 1, 2);
  shift.canonicalize();
  QMatrix e(un, un);
  for (std::size_t i = 0; i < un; ++i) e(i, i) = shift - blk[i];

  std::vector<QMatrix> basis;
  std::vector<std::string> labels;
  std::vector<std::size_t> cartan;
  for (std::size_t v = 0; v < ker.rows(); ++v) {
    QMatrix a(un, un);
    std::size_t lead = un * un;
    bool diagonal = true;
    for (std::size_t idx = 0; idx < un * un; ++idx) {
      if (sgn(ker(v, idx)) == 0) continue;
      a(idx / un, idx % un) = ker(v, idx);
      if (lead == un * un) lead = idx;
      if (idx / un != idx % un) diagonal = false;
    }
    if (diagonal) cartan.push_back(basis.size());
    basis.push_back(a);
    labels.push_back(detail::entry_label('A', lead / un, lead % un, un));
  }
  std::string name = std::string(parity == FormParity::skew ? "sp(" : "so(") + std::to_string(n) + ")[";
  for (std::size_t b = 0; b < flag.size(); ++b) name += (b ? "," : "") + std::to_string(flag[b]);
  name += "]";
  return from_matrix_basis(name, labels, basis, e, cartan);
}

// Split G2 on the basis H1, H2, X_r (positive roots), X_-r (negative roots).
// H1, H2 are dual to the simple roots a1 (long) and a2 (short), so
// [H1, X_(a,b)] = a X_(a,b) and [H2, X_(a,b)] = b X_(a,b).
inline const std::vector<std::pair<int, int>>& g2_positive_roots() {
  static const std::vector<std::pair<int, int>> roots = {{1, 0}, {0, 1}, {1, 1}, {1, 2}, {1, 3}, {2, 3}};
  return roots;
}

inline std::string g2_root_label(int a, int b) {
  auto term = [](int c, const char* name) -> std::string {
    if (c == 0) return "";
    std::string s = c < 0 ? "-" : "+";
    int ac = c < 0 ? -c : c;
    if (ac != 1) s += std::to_string(ac);
    return s + name;
  };
  std::string s = term(a, "a1") + term(b, "a2");
  if (!s.empty() && s[0] == '+') s.erase(0, 1);
  return "X_{" + s + "}";
}

inline AlgebraPtr build_g2(G2Parabolic parabolic) {
  static const int table[][4] = {
      {0, 2, 2, 1},    {0, 4, 4, 1},    {0, 5, 5, 1},    {0, 6, 6, 1},    {0, 7, 7, 2},   {0, 8, 8, -1},
      {0, 10, 10, -1}, {0, 11, 11, -1}, {0, 12, 12, -1}, {0, 13, 13, -2}, {1, 3, 3, 1},   {1, 4, 4, 1},
      {1, 5, 5, 2},    {1, 6, 6, 3},    {1, 7, 7, 3},    {1, 9, 9, -1},   {1, 10, 10, -1}, {1, 11, 11, -2},
      {1, 12, 12, -3}, {1, 13, 13, -3}, {2, 3, 4, 1},    {2, 6, 7, 1},    {2, 8, 0, 2},   {2, 8, 1, -1},
      {2, 10, 9, -1},  {2, 13, 12, -1}, {3, 4, 5, 2},    {3, 5, 6, 3},    {3, 9, 0, -3},  {3, 9, 1, 2},
      {3, 10, 8, 3},   {3, 11, 10, -2}, {3, 12, 11, -1}, {4, 5, 7, 3},    {4, 8, 3, -1},  {4, 9, 2, 3},
      {4, 10, 0, 3},   {4, 10, 1, -1},  {4, 11, 9, 2},   {4, 13, 11, -1}, {5, 9, 4, -2},  {5, 10, 3, 2},
      {5, 11, 1, 1},   {5, 12, 9, 1},   {5, 13, 10, 1},  {6, 9, 5, -1},   {6, 11, 3, 1},  {6, 12, 0, -1},
      {6, 12, 1, 1},   {6, 13, 8, 1},   {7, 8, 6, -1},   {7, 10, 5, -1},  {7, 11, 4, 1},  {7, 12, 2, 1},
      {7, 13, 0, 1},   {8, 9, 10, -1},  {8, 12, 13, -1}, {9, 10, 11, -2}, {9, 11, 12, -3}, {10, 11, 13, -3}};
  std::vector<StructureEntry> entries;
  for (const auto& t : table)
    entries.push_back({static_cast<std::size_t>(t[0]), static_cast<std::size_t>(t[1]),
                       static_cast<std::size_t>(t[2]), Rational(t[3])});
  std::vector<std::string> labels = {"H1", "H2"};
  std::vector<int> degrees = {0, 0};
  auto deg = [&](int a, int b) {
    switch (parabolic) {
      case G2Parabolic::B: return a + b;
      case G2Parabolic::P1: return b;
      case G2Parabolic::P2: return a;
    }
    return 0;
  };
  for (int sign : {1, -1})
    for (auto [a, b] : g2_positive_roots()) {
      labels.push_back(g2_root_label(sign * a, sign * b));
      degrees.push_back(deg(sign * a, sign * b));
    }
  QVec e = zero_vec(14);
  const char* tag = "B";
  switch (parabolic) {
    case G2Parabolic::B: e[0] = 1; e[1] = 1; break;
    case G2Parabolic::P1: e[1] = 1; tag = "P1"; break;
    case G2Parabolic::P2: e[0] = 1; tag = "P2"; break;
  }
  return std::make_shared<GradedAlgebra>(std::string("g2[") + tag + "]", labels, degrees, e, entries,
                                         std::vector<std::size_t>{0, 1});
}

inline G2Parabolic parse_g2_parabolic(const std::string& s) {
  if (s == "B") return G2Parabolic::B;
  if (s == "P1") return G2Parabolic::P1;
  if (s == "P2") return G2Parabolic::P2;
  throw InputError("unknown G2 parabolic '" + s + "' (expected B, P1 or P2)");
}

// Element from label=coefficient pairs.
inline QVec element_from_labels(const GradedAlgebra& a, const std::map<std::string, Rational>& terms) {
  QVec v = zero_vec(a.dim());
  for (const auto& [label, c] : terms) {
    auto i = a.index_of(label);
    if (!i) throw InputError("unknown basis label '" + label + "' in algebra '" + a.name() + "'");
    v[*i] += c;
  }
  return v;
}

}  // namespace flagframe
