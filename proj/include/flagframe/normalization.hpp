#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flagframe/structure.hpp"

namespace flagframe {

enum class Construction { generic, killing_highest_weight, user_supplied, weight_family };

inline const char* to_string(Construction c) {
  switch (c) {
    case Construction::generic: return "generic";
    case Construction::killing_highest_weight: return "killing_highest_weight";
    case Construction::user_supplied: return "user_supplied";
    case Construction::weight_family: return "weight_family";
  }
  return "?";
}

struct NormalizationSpace {
  GradedSubspace W;
  bool invariant = false;
  Construction construction = Construction::generic;
};

class ReductivePreconditionError : public PreconditionError {
 public:
  ReductivePreconditionError(const std::string& msg, std::vector<QVec> rad)
      : PreconditionError(msg), radical(std::move(rad)) {}
  std::vector<QVec> radical;
};

// U_i = sg_i + [xg, g_{i+1}] for i >= 0.
inline GradedSubspace normalization_image(const SymmetryAlgebra& S) {
  const auto& A = S.algebra;
  GradedSubspace U(A);
  for (int i = 0; i <= A->max_degree(); ++i) {
    std::vector<QVec> rows = S.sg.basis(i);
    for (auto k : A->indices_of_degree(i + 1))
      for (const auto& x : S.xg) rows.push_back(A->bracket(x, unit_vec(A->dim(), k)));
    U.set_part(i, row_space(rows, A->dim()));
  }
  return U;
}

inline bool is_invariant(const GradedSubspace& W, const SymmetryAlgebra& S) {
  const auto& A = *S.algebra;
  auto sb = S.nonnegative().basis();
  auto wb = W.basis();
  for (const auto& s : sb)
    for (const auto& w : wb)
      if (!W.contains(A.bracket(s, w))) return false;
  return true;
}

// Exact check that W_i and U_i are complementary in g_i for every i >= 0 and
// that W has no negative part.
inline bool is_complementary(const GradedSubspace& W, const SymmetryAlgebra& S) {
  const auto& A = S.algebra;
  for (int d : W.degrees())
    if (d < 0) return false;
  auto U = normalization_image(S);
  for (int i = 0; i <= A->max_degree(); ++i) {
    std::size_t gi = A->degree_dim(i);
    auto rows = W.basis(i);
    for (auto& r : U.basis(i)) rows.push_back(r);
    if (W.dim(i) + U.dim(i) != gi) return false;
    if (rows.size() > 0 && rank(QMatrix::from_rows(rows, A->dim())) != gi) return false;
  }
  return true;
}

inline NormalizationSpace generic_complement(const SymmetryAlgebra& S) {
  const auto& A = S.algebra;
  auto U = normalization_image(S);
  GradedSubspace W(A);
  for (int i = 0; i <= A->max_degree(); ++i) {
    auto amb = GradedSubspace::degree_space(A, i);
    W.set_part(i, detail::complement_rows(amb.part(i), U.part(i)));
  }
  if (!is_complementary(W, S)) throw InternalError("generic complement is not complementary");
  return {W, is_invariant(W, S), Construction::generic};
}

// W = {u in sg^perp intersect pg : [u, y] = 0}.
inline NormalizationSpace reductive_invariant_complement(const SymmetryAlgebra& S, const Sl2Triple& triple) {
  const auto& A = S.algebra;
  if (!S.reductive) {
    auto rad = killing_radical(S);
    std::string msg = "restricted Killing form on sg is degenerate; radical:";
    for (const auto& r : rad) msg += " [" + A->describe(r) + "]";
    throw ReductivePreconditionError(msg, rad);
  }
  auto sgb = S.sg.basis();
  std::size_t n = A->dim();
  GradedSubspace W(A);
  for (int i = 0; i <= A->max_degree(); ++i) {
    auto idx = A->indices_of_degree(i);
    if (idx.empty()) continue;
    std::vector<QVec> rows;
    for (const auto& s : sgb) {
      QVec r(idx.size());
      for (std::size_t k = 0; k < idx.size(); ++k) r[k] = A->killing(unit_vec(n, idx[k]), s);
      rows.push_back(r);
    }
    for (std::size_t c = 0; c < n; ++c) {
      QVec r(idx.size());
      for (std::size_t k = 0; k < idx.size(); ++k) r[k] = A->bracket(unit_vec(n, idx[k]), triple.y)[c];
      rows.push_back(r);
    }
    QMatrix ker = kernel(QMatrix::from_rows(rows, idx.size()));
    std::vector<QVec> ws;
    for (std::size_t r = 0; r < ker.rows(); ++r) {
      QVec v = zero_vec(n);
      for (std::size_t k = 0; k < idx.size(); ++k) v[idx[k]] = ker(r, k);
      ws.push_back(v);
    }
    W.set_part(i, row_space(ws, n));
  }
  if (!is_complementary(W, S)) throw InternalError("highest weight space is not complementary");
  bool inv = is_invariant(W, S);
  if (!inv) throw InternalError("highest weight space is not sg(0)-invariant");
  return {W, inv, Construction::killing_highest_weight};
}

enum class CertificateOutcome { exists, none, unknown };

inline const char* to_string(CertificateOutcome o) {
  switch (o) {
    case CertificateOutcome::exists: return "exists";
    case CertificateOutcome::none: return "none";
    case CertificateOutcome::unknown: return "unknown";
  }
  return "?";
}

// One torus-weight block of a degree: candidate complements are graphs of
// linear maps base -> directions, i.e. w_a = base_a + sum_u p_{a,u} dir_u.
struct WeightFamily {
  int degree = 0;
  QVec weight;
  std::vector<QVec> base;
  std::vector<QVec> directions;
  std::size_t first_param = 0;  // p_{a,u} has index first_param + a*|dirs| + u
  std::size_t param_count() const { return base.size() * directions.size(); }
};

// A degree where the invariance conditions alone admit no member of the
// weight families.
struct Obstruction {
  int degree = 0;
  std::size_t required_dim = 0;
  std::size_t min_orbit_span = 0;
};

struct ComplementCertificate {
  CertificateOutcome outcome = CertificateOutcome::unknown;
  std::optional<NormalizationSpace> space;
  std::string reason;
  std::vector<WeightFamily> families;
  std::size_t parameters = 0;
  std::vector<Obstruction> obstructions;  // witness for None
};

namespace detail {

struct Poly {
  Rational constant = 0;
  std::map<std::size_t, Rational> linear;
  std::map<std::pair<std::size_t, std::size_t>, Rational> quadratic;

  void add_lin(std::size_t p, const Rational& c) {
    if (sgn(c) != 0) linear[p] += c;
  }
  void add_quad(std::size_t p, std::size_t q, const Rational& c) {
    if (sgn(c) == 0) return;
    if (p > q) std::swap(p, q);
    quadratic[{p, q}] += c;
  }
  bool is_linear() const {
    for (const auto& [k, c] : quadratic)
      if (sgn(c) != 0) return false;
    return true;
  }
  Rational eval(const QVec& p) const {
    Rational s = constant;
    for (const auto& [k, c] : linear) s += c * p[k];
    for (const auto& [k, c] : quadratic) s += c * p[k.first] * p[k.second];
    return s;
  }
};

}  // namespace detail

// Members of the weight-family parametrization for concrete parameters.
inline GradedSubspace family_member(const AlgebraPtr& A, const std::vector<WeightFamily>& fams, const QVec& p) {
  std::vector<QVec> vs;
  for (const auto& f : fams)
    for (std::size_t a = 0; a < f.base.size(); ++a) {
      QVec w = f.base[a];
      for (std::size_t u = 0; u < f.directions.size(); ++u)
        axpy(w, p[f.first_param + a * f.directions.size() + u], f.directions[u]);
      vs.push_back(w);
    }
  return GradedSubspace::span(A, vs);
}

inline ComplementCertificate invariant_complement_certificate(const SymmetryAlgebra& S) {
  ComplementCertificate cert;
  const auto& A = S.algebra;
  std::size_t n = A->dim();
  if (S.reductive && S.xg.size() == 1) {
    auto triple = complete_sl2(*A, S.xg[0]);
    cert.space = reductive_invariant_complement(S, triple);
    cert.outcome = CertificateOutcome::exists;
    cert.reason = "sg is reductive; Killing-orthogonal highest weight complement";
    return cert;
  }
  // Split torus t = Cartan intersect sg_0.
  std::vector<QVec> cartan;
  for (auto c : A->cartan()) {
    if (A->degree(c) != 0) {
      cert.reason = "Cartan basis element outside degree 0";
      return cert;
    }
    cartan.push_back(unit_vec(n, c));
  }
  QMatrix t = detail::intersect_rows(row_space(cartan, n), S.sg.part(0));
  std::vector<QVec> tb = t.row_list();
  // Weights of basis vectors; the torus must act diagonally on the basis.
  std::vector<QVec> weight(n, QVec(tb.size()));
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t m = 0; m < tb.size(); ++m) {
      QVec br = A->bracket(tb[m], unit_vec(n, b));
      QVec expect = unit_vec(n, b);
      Rational lam = br[b];
      for (auto& q : expect) q *= lam;
      if (br != expect) {
        cert.reason = "torus does not act diagonally on the basis";
        return cert;
      }
      weight[b][m] = lam;
    }
  auto U = normalization_image(S);
  std::map<int, QMatrix> Cdeg, Udeg;  // per degree: rows of C_j and U_j ordered by block
  std::size_t nparams = 0;
  for (int i = 0; i <= A->max_degree(); ++i) {
    std::map<QVec, std::vector<std::size_t>> blocks;
    for (auto k : A->indices_of_degree(i)) blocks[weight[k]].push_back(k);
    std::vector<QVec> crows, urows;
    std::size_t usum = 0;
    for (const auto& [w, idx] : blocks) {
      std::vector<QVec> units;
      for (auto k : idx) units.push_back(unit_vec(n, k));
      QMatrix g = row_space(units, n);
      QMatrix u = detail::intersect_rows(U.part(i), g);
      QMatrix c = detail::complement_rows(g, u);
      usum += u.rows();
      WeightFamily f;
      f.degree = i;
      f.weight = w;
      f.base = c.row_list();
      if (c.rows() > 0 && u.rows() > 0) f.directions = u.row_list();
      f.first_param = nparams;
      nparams += f.param_count();
      if (!f.base.empty()) cert.families.push_back(f);
      for (auto& r : c.row_list()) crows.push_back(r);
      for (auto& r : u.row_list()) urows.push_back(r);
    }
    if (usum != U.dim(i)) {
      cert.reason = "sg_i + [x, g_{i+1}] is not stable under the torus in degree " + std::to_string(i);
      return cert;
    }
    Cdeg[i] = QMatrix::from_rows(crows, n);
    Udeg[i] = QMatrix::from_rows(urows, n);
  }
  cert.parameters = nparams;
  // Decomposition of g_j into C_j + U_j coordinates.
  std::map<int, QMatrix> decomp;  // rows: first |C_j| give C coords, rest U coords
  for (int j = 0; j <= A->max_degree(); ++j) {
    auto idx = A->indices_of_degree(j);
    std::vector<QVec> cols = Cdeg[j].row_list();
    for (auto& r : Udeg[j].row_list()) cols.push_back(r);
    QMatrix P(cols.size(), n);
    for (auto k : idx) {
      auto sol = detail::solve_combination(cols, unit_vec(n, k));
      if (!sol) throw InternalError("certificate: C + U does not span g_j");
      for (std::size_t a = 0; a < cols.size(); ++a) P(a, k) = (*sol)[a];
    }
    decomp[j] = P;
  }
  // Parameter attached to (C_j row a, U_j row m), if the two lie in the same
  // parametrized block.
  std::map<int, std::map<std::pair<std::size_t, std::size_t>, std::size_t>> phi;
  {
    // Re-walk blocks in the same order as above to align row offsets.
    for (int i = 0; i <= A->max_degree(); ++i) {
      std::map<QVec, std::vector<std::size_t>> blocks;
      for (auto k : A->indices_of_degree(i)) blocks[weight[k]].push_back(k);
      std::size_t co = 0, uo = 0;
      for (const auto& [w, idx] : blocks) {
        std::vector<QVec> units;
        for (auto k : idx) units.push_back(unit_vec(n, k));
        QMatrix g = row_space(units, n);
        QMatrix u = detail::intersect_rows(U.part(i), g);
        QMatrix c = detail::complement_rows(g, u);
        const WeightFamily* fam = nullptr;
        for (const auto& f : cert.families)
          if (f.degree == i && f.weight == w) fam = &f;
        if (fam && !fam->directions.empty())
          for (std::size_t a = 0; a < c.rows(); ++a)
            for (std::size_t m = 0; m < u.rows(); ++m)
              phi[i][{co + a, uo + m}] = fam->first_param + a * u.rows() + m;
        co += c.rows();
        uo += u.rows();
      }
    }
  }
  auto s0 = S.nonnegative().basis();
  std::vector<detail::Poly> conds;
  std::vector<int> cond_degree;
  for (const auto& s : s0) {
    int ds = *A->homogeneous_degree(s);
    for (const auto& f : cert.families)
      for (std::size_t a = 0; a < f.base.size(); ++a) {
        int j = ds + f.degree;
        if (j > A->max_degree()) continue;
        const QMatrix& P = decomp[j];
        std::size_t nc = Cdeg[j].rows(), nu = Udeg[j].rows();
        QVec v0 = P * A->bracket(s, f.base[a]);
        std::vector<std::pair<std::size_t, QVec>> vp;
        for (std::size_t u = 0; u < f.directions.size(); ++u)
          vp.push_back({f.first_param + a * f.directions.size() + u, P * A->bracket(s, f.directions[u])});
        for (std::size_t m = 0; m < nu; ++m) {
          detail::Poly poly;
          poly.constant = v0[nc + m];
          for (const auto& [p, v] : vp) poly.add_lin(p, v[nc + m]);
          for (std::size_t c = 0; c < nc; ++c) {
            auto it = phi[j].find({c, m});
            if (it == phi[j].end()) continue;
            std::size_t q = it->second;
            poly.add_lin(q, -v0[c]);
            for (const auto& [p, v] : vp) poly.add_quad(q, p, -v[c]);
          }
          if (sgn(poly.constant) == 0 && poly.linear.empty() && poly.quadratic.empty()) continue;
          conds.push_back(poly);
          cond_degree.push_back(j);
        }
      }
  }
  auto linear_system = [&](const std::vector<std::size_t>& which) {
    QMatrix M(which.size(), nparams);
    QVec b(which.size());
    for (std::size_t r = 0; r < which.size(); ++r) {
      const auto& pc = conds[which[r]];
      for (const auto& [p, c] : pc.linear) M(r, p) = c;
      b[r] = -pc.constant;
    }
    return std::make_pair(M, b);
  };
  std::vector<std::size_t> lin_idx;
  bool any_quadratic = false;
  for (std::size_t c = 0; c < conds.size(); ++c) {
    if (conds[c].is_linear())
      lin_idx.push_back(c);
    else
      any_quadratic = true;
  }
  auto [M, b] = linear_system(lin_idx);
  auto sol = solve(M, b);
  auto witness = [&]() {
    cert.outcome = CertificateOutcome::none;
    auto sg0 = S.sg.basis(0);
    // Degrees whose linear conditions alone are already inconsistent, with
    // the smallest sg_0-closure of a sampled candidate W_j(p).
    for (int j = 0; j <= A->max_degree(); ++j) {
      std::vector<std::size_t> sub;
      for (auto c : lin_idx)
        if (cond_degree[c] == j) sub.push_back(c);
      auto [Mj, bj] = linear_system(sub);
      if (solve(Mj, bj)) continue;
      Obstruction ob;
      ob.degree = j;
      ob.required_dim = Cdeg[j].rows();
      ob.min_orbit_span = n + 1;
      for (int sample = 0; sample < 8; ++sample) {
        QVec p = zero_vec(nparams);
        if (sample > 0)
          for (std::size_t k = 0; k < nparams; ++k)
            p[k] = Rational(static_cast<long>((k * 7 + static_cast<std::size_t>(sample) * 3) % 5) - 2);
        std::vector<QVec> span_rows = family_member(A, cert.families, p).basis(j);
        std::size_t dimv = span_rows.size();
        while (true) {
          std::vector<QVec> next = span_rows;
          for (const auto& s : sg0)
            for (const auto& w : span_rows) next.push_back(A->bracket(s, w));
          QMatrix r = row_space(next, n);
          span_rows = r.row_list();
          if (r.rows() == dimv) break;
          dimv = r.rows();
        }
        ob.min_orbit_span = std::min(ob.min_orbit_span, dimv);
      }
      cert.obstructions.push_back(ob);
    }
    cert.reason = "no torus-stable complement in the weight families is sg(0)-invariant";
    for (const auto& ob : cert.obstructions)
      cert.reason += "; degree " + std::to_string(ob.degree) + " needs dimension " + std::to_string(ob.required_dim) +
                     " but sg_0 generates >= " + std::to_string(ob.min_orbit_span) + " dimensions from every sample";
    if (cert.obstructions.empty()) cert.reason += " (conditions inconsistent only jointly across degrees)";
  };
  if (!sol) {
    witness();
    return cert;
  }
  QVec p = *sol;
  if (any_quadratic) {
    if (rank(M) != nparams) {
      cert.reason = "invariance conditions are quadratic in the family parameters";
      return cert;
    }
    for (const auto& c : conds)
      if (sgn(c.eval(p)) != 0) {
        witness();
        return cert;
      }
  }
  NormalizationSpace ns;
  ns.W = family_member(A, cert.families, p);
  ns.invariant = is_invariant(ns.W, S);
  ns.construction = Construction::weight_family;
  if (!ns.invariant || !is_complementary(ns.W, S))
    throw InternalError("certificate solution fails verification");
  cert.space = ns;
  cert.outcome = CertificateOutcome::exists;
  cert.reason = "linear invariance conditions on torus weight families are solvable";
  return cert;
}

}  // namespace flagframe
