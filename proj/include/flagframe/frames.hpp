#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "flagframe/constructors.hpp"
#include "flagframe/normalization.hpp"
#include "flagframe/numeric.hpp"
#include "flagframe/structure.hpp"

namespace flagframe {

// Sampled curve v0(t_j) in R^{k+1} on t_j = t0 + j*dt. derivatives[m-1][j] is
// the m-th derivative at t_j; all orders 1..k+1 must be present to be used.
struct ProjectiveCurve {
  int k = 0;
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<Eigen::VectorXd> values;
  std::vector<std::vector<Eigen::VectorXd>> derivatives;

  std::size_t size() const { return values.size(); }
  double t(std::size_t j) const { return t0 + static_cast<double>(j) * dt; }
  bool has_jets() const { return static_cast<int>(derivatives.size()) >= k + 1; }

  void validate() const {
    if (k < 1) throw InputError("curve: k must be at least 1");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError("curve: dt must be positive");
    if (values.empty()) throw InputError("curve: no samples");
    auto check = [&](const std::vector<Eigen::VectorXd>& vs, const std::string& what) {
      if (vs.size() != values.size()) throw InputError("curve: " + what + " has wrong sample count");
      for (const auto& v : vs) {
        if (v.size() != k + 1) throw InputError("curve: " + what + " entries must have length k+1");
        if (!v.allFinite()) throw InputError("curve: " + what + " contains non-finite values");
      }
    };
    check(values, "values");
    for (std::size_t m = 0; m < derivatives.size(); ++m) check(derivatives[m], "derivative " + std::to_string(m + 1));
  }

  // jet(t, m) returns the m-th derivative of v0 at t.
  static ProjectiveCurve sample(int k, double t0, double dt, std::size_t n,
                                const std::function<Eigen::VectorXd(double, int)>& jet, bool with_jets = true) {
    ProjectiveCurve c;
    c.k = k;
    c.t0 = t0;
    c.dt = dt;
    for (std::size_t j = 0; j < n; ++j) c.values.push_back(jet(c.t(j), 0));
    if (with_jets) {
      c.derivatives.resize(static_cast<std::size_t>(k) + 1);
      for (int m = 1; m <= k + 1; ++m)
        for (std::size_t j = 0; j < n; ++j) c.derivatives[m - 1].push_back(jet(c.t(j), m));
    }
    c.validate();
    return c;
  }
};

// s[j] has columns v_0..v_k; next[j] = v_{k+1}; p[j] solves v_{k+1} = sum p_i v_i.
struct FramePath {
  int k = 0;
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<Eigen::MatrixXd> s;
  std::vector<Eigen::VectorXd> next;
  std::vector<Eigen::VectorXd> p;

  std::size_t size() const { return s.size(); }
  double t(std::size_t j) const { return t0 + static_cast<double>(j) * dt; }
};

namespace detail {

inline void fill_coefficients(FramePath& f) {
  f.p.clear();
  for (std::size_t j = 0; j < f.size(); ++j) {
    const auto& s = f.s[j];
    double det = s.determinant();
    double hadamard = 1.0;
    for (Eigen::Index c = 0; c < s.cols(); ++c) hadamard *= std::max(s.col(c).norm(), 1e-300);
    if (std::abs(det) < 1e-10 || std::abs(det) < 1e-14 * hadamard)
      throw DegenerateFrame("degenerate osculating frame at t = " + std::to_string(f.t(j)), f.t(j));
    f.p.push_back(s.partialPivLu().solve(f.next[j]));
  }
}

}  // namespace detail

inline FramePath osculating_frame(const ProjectiveCurve& c) {
  c.validate();
  const int k = c.k;
  FramePath f;
  f.k = k;
  f.dt = c.dt;
  std::vector<std::vector<Eigen::VectorXd>> d(static_cast<std::size_t>(k) + 2);
  std::size_t offset = 0, n = c.size();
  if (c.has_jets()) {
    d[0] = c.values;
    for (int m = 1; m <= k + 1; ++m) d[m] = c.derivatives[m - 1];
  } else {
    // Nested central differences; order m loses 2 samples per side.
    offset = 2 * static_cast<std::size_t>(k + 1);
    if (n < 2 * offset + 5) throw InputError("curve: too few samples for finite-difference frame");
    d[0] = c.values;
    for (int m = 1; m <= k + 1; ++m) d[m] = fd_central(d[m - 1], c.dt);
    for (int m = 0; m <= k + 1; ++m) {
      std::size_t skip = offset - 2 * static_cast<std::size_t>(m);
      std::size_t len = n - 2 * offset;
      d[m] = std::vector<Eigen::VectorXd>(d[m].begin() + static_cast<std::ptrdiff_t>(skip),
                                          d[m].begin() + static_cast<std::ptrdiff_t>(skip + len));
    }
    n -= 2 * offset;
  }
  f.t0 = c.t0 + static_cast<double>(offset) * c.dt;
  for (std::size_t j = 0; j < n; ++j) {
    Eigen::MatrixXd s(k + 1, k + 1);
    for (int m = 0; m <= k; ++m) s.col(m) = d[m][j];
    f.s.push_back(s);
    f.next.push_back(d[k + 1][j]);
  }
  detail::fill_coefficients(f);
  return f;
}

class OrientationError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// Rescale v0 by lambda = det(s)^(-1/(k+1)) and rebuild the osculating frame of
// lambda*v0. With r_m = lambda^(m)/lambda, r_{m+1} = r_m' + q r_m where
// q = lambda'/lambda = -p_k/(k+1).
inline FramePath sl_normalize(const FramePath& f) {
  const int k = f.k;
  const std::size_t n = f.size();
  if (n < 5) throw InputError("sl_normalize: too few samples");
  std::vector<double> lambda(n), q(n);
  for (std::size_t j = 0; j < n; ++j) {
    double det = f.s[j].determinant();
    double mag = std::pow(std::abs(det), -1.0 / (k + 1));
    if (det < 0) {
      if ((k + 1) % 2 == 0)
        throw OrientationError("negative frame determinant at t = " + std::to_string(f.t(j)) +
                               " has no real (k+1)-th root; negate v0");
      mag = -mag;
    }
    lambda[j] = mag;
    q[j] = -f.p[j](k) / (k + 1);
  }
  std::vector<std::vector<double>> r(static_cast<std::size_t>(k) + 2, std::vector<double>(n));
  r[0].assign(n, 1.0);
  for (int m = 0; m <= k; ++m) {
    auto dr = fd_derivative(r[m], f.dt);
    for (std::size_t j = 0; j < n; ++j) r[m + 1][j] = dr[j] + q[j] * r[m][j];
  }
  FramePath g;
  g.k = k;
  g.t0 = f.t0;
  g.dt = f.dt;
  for (std::size_t j = 0; j < n; ++j) {
    auto v = [&](int i) -> Eigen::VectorXd { return i <= k ? Eigen::VectorXd(f.s[j].col(i)) : f.next[j]; };
    Eigen::MatrixXd s(k + 1, k + 1);
    Eigen::VectorXd nx = Eigen::VectorXd::Zero(k + 1);
    for (int i = 0; i <= k + 1; ++i) {
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(k + 1);
      for (int l = 0; l <= i; ++l) acc += binomial(i, l) * r[i - l][j] * v(l);
      acc *= lambda[j];
      if (i <= k)
        s.col(i) = acc;
      else
        nx = acc;
    }
    g.s.push_back(s);
    g.next.push_back(nx);
  }
  detail::fill_coefficients(g);
  return g;
}

struct ConnectionPath {
  AlgebraPtr algebra;
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<Eigen::VectorXd> kappa;

  std::size_t size() const { return kappa.size(); }
  double t(std::size_t j) const { return t0 + static_cast<double>(j) * dt; }
};

// kappa = s^{-1} s' with s' = [v_1, ..., v_k, v_{k+1}].
inline ConnectionPath maurer_cartan_pullback(const FramePath& f, const AlgebraPtr& A) {
  if (!A->has_representation() || static_cast<int>(A->representation()[0].rows()) != f.k + 1)
    throw AlgebraMismatch("maurer_cartan_pullback: algebra must act on R^{k+1}");
  ConnectionPath c{A, f.t0, f.dt, {}};
  for (std::size_t j = 0; j < f.size(); ++j) {
    Eigen::MatrixXd ds(f.k + 1, f.k + 1);
    ds.leftCols(f.k) = f.s[j].rightCols(f.k);
    ds.col(f.k) = f.next[j];
    auto lu = f.s[j].fullPivLu();
    if (!lu.isInvertible()) throw DegenerateFrame("singular frame at t = " + std::to_string(f.t(j)), f.t(j));
    Eigen::MatrixXd m = lu.solve(ds);
    auto [coords, res] = A->coordinates_of(m);
    if (res > 1e-8 * (1.0 + m.cwiseAbs().maxCoeff()))
      throw InputError("connection leaves the algebra at t = " + std::to_string(f.t(j)) +
                       " (frame not sl-normalized?)");
    c.kappa.push_back(coords);
  }
  return c;
}

// Zero-order normalization by pointwise scaling of the whole frame: s -> lambda s
// with lambda^(k+1) det s = 1. Same flag and the same degree -1 part, so the
// normal form agrees with that of sl_normalize, but no derivatives of lambda
// are needed: kappa = s^{-1} s' - (p_k / (k+1)) I.
inline ConnectionPath trace_free_pullback(const FramePath& f, const AlgebraPtr& A) {
  if (!A->has_representation() || static_cast<int>(A->representation()[0].rows()) != f.k + 1)
    throw AlgebraMismatch("trace_free_pullback: algebra must act on R^{k+1}");
  ConnectionPath c{A, f.t0, f.dt, {}};
  const auto N = static_cast<Eigen::Index>(f.k + 1);
  for (std::size_t j = 0; j < f.size(); ++j) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < f.k; ++i) m(i + 1, i) = 1.0;
    m.col(f.k) = f.p[j];
    m -= (f.p[j](f.k) / (f.k + 1)) * Eigen::MatrixXd::Identity(N, N);
    auto [coords, res] = A->coordinates_of(m);
    if (res > 1e-8 * (1.0 + m.cwiseAbs().maxCoeff())) throw InternalError("trace-free connection leaves sl(k+1)");
    c.kappa.push_back(coords);
  }
  return c;
}

struct NormalFormResult {
  AlgebraPtr algebra;
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<Eigen::VectorXd> connection;  // gauged connection x + w + sigma
  std::vector<Eigen::VectorXd> w;           // full coordinates, in W
  std::vector<Eigen::VectorXd> w_coords;    // along the basis of W
  std::vector<Eigen::VectorXd> sigma;       // full coordinates, in sg^(0)
  // gauge[k-1][j] = u_k(t_j); the total gauge is exp(u_1) exp(u_2) ...
  std::vector<std::vector<Eigen::VectorXd>> gauge;
  double residual = 0.0;  // largest component outside W + sg^(0) after reduction

  std::size_t size() const { return w.size(); }
  double t(std::size_t j) const { return t0 + static_cast<double>(j) * dt; }
};

// kappa -> Ad(exp(-u)) kappa + sum_n ad(-u)^n u' / (n+1)!  (u nilpotent).
inline Eigen::VectorXd gauge_transform(const GradedAlgebra& A, const Eigen::VectorXd& kappa,
                                       const Eigen::VectorXd& u, const Eigen::VectorXd& du) {
  Eigen::MatrixXd ad = -A.ad_float(u);
  Eigen::VectorXd out = kappa + du;
  Eigen::VectorXd a = kappa, b = du;
  for (int m = 1; m <= static_cast<int>(A.dim()) + 1; ++m) {
    a = ad * a / m;
    b = ad * b / (m + 1);
    if (a.isZero(0.0) && b.isZero(0.0)) break;
    out += a + b;
  }
  return out;
}

inline ConnectionPath gauge_path(const ConnectionPath& c, const std::vector<Eigen::VectorXd>& u,
                                 const std::vector<Eigen::VectorXd>& du) {
  if (u.size() != c.size() || du.size() != c.size()) throw InputError("gauge path length mismatch");
  ConnectionPath out{c.algebra, c.t0, c.dt, {}};
  for (std::size_t j = 0; j < c.size(); ++j) out.kappa.push_back(gauge_transform(*c.algebra, c.kappa[j], u[j], du[j]));
  return out;
}

// Precomputed exact data for stepwise reduction to W-normal form. Step k
// solves in g_k along a fixed set of basis directions q whose brackets with x
// complete W_{k-1} + sg_{k-1} to a basis of g_{k-1}.
class NormalFormReducer {
 public:
  NormalFormReducer(const SymmetryAlgebra& S, const GradedSubspace& W) : A_(S.algebra), W_(W) {
    if (S.xg.size() != 1) throw PreconditionError("normal form reduction needs a single x");
    if (W.algebra().get() != A_.get()) throw AlgebraMismatch("W belongs to a different algebra");
    const auto& A = *A_;
    const std::size_t n = A.dim();
    x_exact_ = S.xg[0];
    x_ = to_float(x_exact_);
    depth_ = A.max_degree();
    wbasis_ = W.basis();
    const auto N = static_cast<Eigen::Index>(n);
    wproj_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(wbasis_.size()), N);
    sproj_ = Eigen::MatrixXd::Zero(N, N);
    rproj_ = Eigen::MatrixXd::Zero(N, N);
    std::size_t woff = 0;
    for (int d = 0; d <= depth_; ++d) {
      auto idx = A.indices_of_degree(d);
      auto wd = W.basis(d);
      auto sd = S.sg.basis(d);
      std::vector<QVec> cols = wd;
      for (auto& s : sd) cols.push_back(s);
      std::size_t fixed = cols.size();
      std::vector<QVec> qs;
      for (auto b : A.indices_of_degree(d + 1)) {
        QVec e = unit_vec(n, b);
        QVec img = A.bracket(x_exact_, e);
        cols.push_back(img);
        if (rank(QMatrix::from_rows(cols, n)) == cols.size())
          qs.push_back(e);
        else
          cols.pop_back();
      }
      if (cols.size() != idx.size())
        throw InternalError("W + sg + [x, g] does not span g_" + std::to_string(d) + "; W not complementary");
      q_.push_back(qs);
      Eigen::MatrixXd R = Eigen::MatrixXd::Zero(N, N);
      for (auto i : idx) {
        auto c = detail::solve_combination(cols, unit_vec(n, i));
        if (!c) throw InternalError("reduction basis solve failed");
        auto I = static_cast<Eigen::Index>(i);
        for (std::size_t a = 0; a < wd.size(); ++a) wproj_(static_cast<Eigen::Index>(woff + a), I) = (*c)[a].get_d();
        for (std::size_t a = wd.size(); a < fixed; ++a) sproj_.col(I) += (*c)[a].get_d() * to_float(cols[a]);
        for (std::size_t a = fixed; a < cols.size(); ++a) {
          rproj_.col(I) += (*c)[a].get_d() * to_float(cols[a]);
          R.col(I) -= (*c)[a].get_d() * to_float(qs[a - fixed]);
        }
      }
      woff += wd.size();
      solve_.push_back(R);
    }
  }

  const AlgebraPtr& algebra() const { return A_; }
  const std::vector<QVec>& w_basis() const { return wbasis_; }
  int depth() const { return depth_; }
  // Directions in g_k used by step k (k >= 1); they span a complement of the
  // part of g_k that the reduction never touches.
  const std::vector<QVec>& gauge_directions(int k) const { return q_.at(static_cast<std::size_t>(k - 1)); }

  NormalFormResult reduce(const ConnectionPath& c) const {
    if (c.algebra.get() != A_.get()) throw AlgebraMismatch("connection lives in a different algebra");
    if (c.size() < 5) throw InputError("reduction needs at least 5 samples");
    const auto& A = *A_;
    for (std::size_t j = 0; j < c.size(); ++j) {
      const auto& kap = c.kappa[j];
      double scale = 1.0 + kap.cwiseAbs().maxCoeff();
      for (std::size_t i = 0; i < A.dim(); ++i) {
        int d = A.degree(i);
        if (d >= 0) continue;
        auto I = static_cast<Eigen::Index>(i);
        double want = d == -1 ? x_(I) : 0.0;
        if (std::abs(kap(I) - want) > 1e-8 * scale)
          throw InputError("connection is not of constant type x at t = " + std::to_string(c.t(j)));
      }
    }
    NormalFormResult r;
    r.algebra = A_;
    r.t0 = c.t0;
    r.dt = c.dt;
    std::vector<Eigen::VectorXd> kap = c.kappa;
    for (int k = 1; k <= depth_; ++k) {
      const auto& R = solve_[static_cast<std::size_t>(k - 1)];
      std::vector<Eigen::VectorXd> u(kap.size());
      for (std::size_t j = 0; j < kap.size(); ++j) u[j] = R * kap[j];
      auto du = fd_derivative(u, c.dt);
      for (std::size_t j = 0; j < kap.size(); ++j) kap[j] = gauge_transform(A, kap[j], u[j], du[j]);
      r.gauge.push_back(std::move(u));
    }
    for (const auto& kp : kap) {
      Eigen::VectorXd nonneg = kp;
      for (std::size_t i = 0; i < A.dim(); ++i)
        if (A.degree(i) < 0) nonneg(static_cast<Eigen::Index>(i)) = 0.0;
      Eigen::VectorXd wc = wproj_ * nonneg;
      Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(A.dim()));
      for (std::size_t a = 0; a < wbasis_.size(); ++a) w += wc(static_cast<Eigen::Index>(a)) * to_float(wbasis_[a]);
      r.residual = std::max(r.residual, (rproj_ * nonneg).cwiseAbs().maxCoeff());
      r.w_coords.push_back(wc);
      r.w.push_back(w);
      r.sigma.push_back(sproj_ * nonneg);
      r.connection.push_back(kp);
    }
    return r;
  }

 private:
  AlgebraPtr A_;
  GradedSubspace W_;
  QVec x_exact_;
  Eigen::VectorXd x_;
  int depth_ = 0;
  std::vector<QVec> wbasis_;
  std::vector<std::vector<QVec>> q_;
  std::vector<Eigen::MatrixXd> solve_;
  Eigen::MatrixXd wproj_, sproj_, rproj_;
};

inline NormalFormResult reduce_to_normal_form(const ConnectionPath& c, const SymmetryAlgebra& S,
                                              const GradedSubspace& W) {
  return NormalFormReducer(S, W).reduce(c);
}

inline bool is_flat(const NormalFormResult& r, double tol) { return max_abs(r.w) <= tol; }

// Closed form for theta_3 from the coefficient paths (pointwise, with
// difference derivatives). Invariant under v0 -> lambda(t) v0.
inline std::vector<double> wilczynski_theta3(const std::vector<Eigen::VectorXd>& p, int k, double dt) {
  if (k < 2) throw InputError("wilczynski_theta3 needs k >= 2");
  const std::size_t n = p.size();
  std::vector<double> pk(n), pk1(n), pk2(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (p[j].size() != k + 1) throw InputError("wilczynski_theta3: coefficient vectors must have length k+1");
    pk[j] = p[j](k);
    pk1[j] = p[j](k - 1);
    pk2[j] = p[j](k - 2);
  }
  auto dpk = fd_derivative(pk, dt);
  auto ddpk = fd_derivative(dpk, dt);
  auto dpk1 = fd_derivative(pk1, dt);
  const double K = k;
  std::vector<double> th(n);
  for (std::size_t j = 0; j < n; ++j)
    th[j] = ddpk[j] - 6.0 / (K + 1) * pk[j] * dpk[j] + 4.0 / ((K + 1) * (K + 1)) * pk[j] * pk[j] * pk[j] -
            6.0 / K * dpk1[j] + 12.0 / (K * (K + 1)) * pk[j] * pk1[j] + 12.0 / (K * (K - 1)) * pk2[j];
  return th;
}

// sl(k+1) with its Borel grading, the principal x, and the normalization data
// used for curves in P^k.
struct ProjectiveModel {
  int k = 0;
  SymmetryMode mode = SymmetryMode::unparametrized;
  AlgebraPtr algebra;
  Sl2Triple triple;
  SymmetryAlgebra symmetry;
  NormalizationSpace normalization;
  std::shared_ptr<const NormalFormReducer> reducer;
  std::vector<std::string> labels;  // one per W basis vector
  std::vector<double> scale;        // trace = scale * W coordinate
  std::vector<QVec> y_powers;       // y^i in algebra coordinates, i = 0..k
};

namespace detail {

inline std::shared_ptr<const ProjectiveModel> build_projective_model(int k, SymmetryMode mode) {
  auto m = std::make_shared<ProjectiveModel>();
  m->k = k;
  m->mode = mode;
  m->algebra = build_sl_flag(std::vector<int>(static_cast<std::size_t>(k) + 1, 1));
  const auto& A = m->algebra;
  QVec x = principal_x(*A);
  m->triple = complete_sl2(*A, x);
  m->symmetry = symmetry_algebra(A, x, mode);
  if (mode == SymmetryMode::unparametrized)
    m->normalization = reductive_invariant_complement(m->symmetry, m->triple);
  else
    m->normalization = generic_complement(m->symmetry);
  m->reducer = std::make_shared<NormalFormReducer>(m->symmetry, m->normalization.W);
  const auto& W = m->normalization.W;
  const auto wb = m->reducer->w_basis();
  QMatrix ym = A->matrix_of(m->triple.y);
  QMatrix pw = QMatrix::identity(static_cast<std::size_t>(k) + 1);
  for (int i = 0; i <= k; ++i) {
    auto c = A->coordinates_of(pw);
    m->y_powers.push_back(c ? *c : zero_vec(A->dim()));
    pw = pw * ym;
  }
  auto U = normalization_image(m->symmetry);
  for (const auto& b : wb) {
    int i = *A->homogeneous_degree(b);
    if (mode == SymmetryMode::parametrized || W.dim(i) != 1 || i < 2) {
      m->labels.push_back(A->describe(b));
      m->scale.push_back(1.0);
      continue;
    }
    // b = alpha y^i; E_{k-i,k} = a y^i + (part in U_i).
    const QVec& yi = m->y_powers[static_cast<std::size_t>(i)];
    Rational alpha;
    for (std::size_t c = 0; c < b.size(); ++c)
      if (sgn(yi[c]) != 0) {
        alpha = b[c] / yi[c];
        break;
      }
    std::vector<QVec> cols{b};
    for (auto& u : U.basis(i)) cols.push_back(u);
    auto e = A->index_of("E" + std::to_string(k - i) + std::to_string(k));
    if (!e) throw InternalError("missing matrix unit in sl(k+1)");
    auto sol = solve_combination(cols, unit_vec(A->dim(), *e));
    if (!sol) throw InternalError("W + U does not span g_i");
    Rational a = (*sol)[0] * alpha;
    Rational fact = 1, binom = 1;
    for (int t = 2; t <= i + 1; ++t) fact *= t;
    for (int t = 1; t <= i; ++t) binom = binom * (k - i + t) / t;
    Rational nu = fact / binom / a;
    m->labels.push_back("theta" + std::to_string(i + 1));
    m->scale.push_back(Rational(nu * alpha).get_d());
  }
  return m;
}

}  // namespace detail

// Cached per (k, mode); construction is exact and costs more than a reduction.
inline std::shared_ptr<const ProjectiveModel> projective_model(int k, SymmetryMode mode) {
  if (k < 1 || k > 12) throw InputError("projective model: k must be in 1..12");
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const ProjectiveModel>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(k, static_cast<int>(mode));
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto m = detail::build_projective_model(k, mode);
  cache.emplace(key, m);
  return m;
}

struct InvariantTraces {
  std::vector<std::string> labels;
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<Eigen::VectorXd> values;  // values[j](c) for column c
  FramePath frame;                      // sl-normalized frame
  NormalFormResult normal_form;
  std::shared_ptr<const ProjectiveModel> model;

  std::size_t size() const { return values.size(); }
  double t(std::size_t j) const { return t0 + static_cast<double>(j) * dt; }
};

inline InvariantTraces projective_invariants(const ProjectiveCurve& c,
                                             SymmetryMode mode = SymmetryMode::unparametrized) {
  if (c.k < 2) throw InputError("projective invariants need k >= 2");
  auto model = projective_model(c.k, mode);
  InvariantTraces out;
  out.model = model;
  auto raw = osculating_frame(c);
  out.frame = sl_normalize(raw);
  // Same normal form as the pullback of out.frame, with less roundoff: the
  // lambda recursion in sl_normalize stacks k+1 difference quotients.
  out.normal_form = model->reducer->reduce(trace_free_pullback(raw, model->algebra));
  out.labels = model->labels;
  out.t0 = out.frame.t0;
  out.dt = out.frame.dt;
  for (const auto& wc : out.normal_form.w_coords) {
    Eigen::VectorXd v(wc.size());
    for (Eigen::Index a = 0; a < wc.size(); ++a) v(a) = model->scale[static_cast<std::size_t>(a)] * wc(a);
    out.values.push_back(v);
  }
  return out;
}

// Projective parameter tau(t) from the sg^(0) residual: sigma = alpha h + beta y
// gives the sl(2) transport g' = g [[alpha, beta], [1, -alpha]], g(t0) = I, and
// tau = g10 / g00. Flat-parameter input yields tau(t) = t - t0.
inline std::vector<double> fix_parameter(const NormalFormResult& r, const ProjectiveModel& m) {
  if (m.mode != SymmetryMode::unparametrized) throw PreconditionError("fix-parameter needs the unparametrized model");
  const std::size_t n = r.size();
  if (n < 4) throw InputError("fix-parameter needs at least 4 samples");
  Eigen::MatrixXd basis(static_cast<Eigen::Index>(m.algebra->dim()), 2);
  basis.col(0) = to_float(m.triple.h);
  basis.col(1) = to_float(m.triple.y);
  auto qr = basis.colPivHouseholderQr();
  std::vector<Eigen::Matrix2d> om(n);
  for (std::size_t j = 0; j < n; ++j) {
    Eigen::Vector2d ab = qr.solve(r.sigma[j]);
    om[j] << ab(0), ab(1), 1.0, -ab(0);
  }
  auto mid = [&](std::size_t j) -> Eigen::Matrix2d {
    if (j == 0) return (5.0 * om[0] + 15.0 * om[1] - 5.0 * om[2] + om[3]) / 16.0;
    if (j + 2 >= n) return (om[n - 4] - 5.0 * om[n - 3] + 15.0 * om[n - 2] + 5.0 * om[n - 1]) / 16.0;
    return (-om[j - 1] + 9.0 * om[j] + 9.0 * om[j + 1] - om[j + 2]) / 16.0;
  };
  std::vector<double> tau(n);
  Eigen::Matrix2d g = Eigen::Matrix2d::Identity();
  tau[0] = 0.0;
  const double h = r.dt;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    Eigen::Matrix2d wm = mid(j);
    Eigen::Matrix2d k1 = g * om[j];
    Eigen::Matrix2d k2 = (g + 0.5 * h * k1) * wm;
    Eigen::Matrix2d k3 = (g + 0.5 * h * k2) * wm;
    Eigen::Matrix2d k4 = (g + h * k3) * om[j + 1];
    g += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    tau[j + 1] = g(1, 0) / g(0, 0);
  }
  return tau;
}

}  // namespace flagframe
