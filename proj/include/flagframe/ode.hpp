#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "flagframe/duality.hpp"
#include "flagframe/expr.hpp"
#include "flagframe/frames.hpp"

namespace flagframe {

// y^(k+1) = f(x, y_0, ..., y_k) with order k+1 >= 3.
struct OdeProblem {
  int k = 0;
  ExprPtr f;
  std::vector<ExprPtr> partials;  // df/dy_i

  int order() const { return k + 1; }

  static OdeProblem make(int order, const std::string& src) {
    if (order < 3) throw InputError("ODE order must be at least 3");
    if (order > 12) throw InputError("ODE order must be at most 12");
    OdeProblem p;
    p.k = order - 1;
    p.f = parse_expr(src, p.k);
    for (int i = 0; i <= p.k; ++i) p.partials.push_back(differentiate(p.f, i));
    return p;
  }
};

// State y(t_j) = (y, y', ..., y^(k)); Z[j] is the fundamental matrix of the
// linearization (row m holds the m-th derivatives, Z(t0) = I) when requested.
struct SolutionGrid {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<Eigen::VectorXd> y;
  std::vector<Eigen::MatrixXd> Z;

  std::size_t size() const { return y.size(); }
  double t(std::size_t j) const { return t0 + static_cast<double>(j) * dt; }
};

namespace detail {

inline double eval_at(const ExprPtr& e, double t, const Eigen::VectorXd& y) {
  return evaluate(e, t, y.data(), static_cast<int>(y.size()) - 1);
}

inline Eigen::VectorXd coefficients_at(const OdeProblem& p, double t, const Eigen::VectorXd& y) {
  Eigen::VectorXd c(p.k + 1);
  for (int i = 0; i <= p.k; ++i) c(i) = eval_at(p.partials[static_cast<std::size_t>(i)], t, y);
  return c;
}

}  // namespace detail

inline SolutionGrid integrate_ode(const OdeProblem& p, const Eigen::VectorXd& init, double t0, double dt, std::size_t n,
                                  bool fundamental = false) {
  const int k = p.k;
  if (init.size() != k + 1) throw InputError("initial state must have k+1 = " + std::to_string(k + 1) + " entries");
  if (!(dt > 0) || n < 2) throw InputError("integration grid needs dt > 0 and at least 2 nodes");
  SolutionGrid g;
  g.t0 = t0;
  g.dt = dt;
  auto rhs = [&](double t, const Eigen::VectorXd& y) {
    Eigen::VectorXd d(k + 1);
    d.head(k) = y.tail(k);
    d(k) = detail::eval_at(p.f, t, y);
    return d;
  };
  auto zrhs = [&](double t, const Eigen::VectorXd& y, const Eigen::MatrixXd& Z) {
    Eigen::MatrixXd d(k + 1, k + 1);
    d.topRows(k) = Z.bottomRows(k);
    d.row(k) = detail::coefficients_at(p, t, y).transpose() * Z;
    return d;
  };
  Eigen::VectorXd y = init;
  Eigen::MatrixXd Z = Eigen::MatrixXd::Identity(k + 1, k + 1);
  auto check = [&](double t) {
    if (!y.allFinite() || (fundamental && !Z.allFinite()))
      throw DomainError("non-finite state at t = " + std::to_string(t));
  };
  check(t0);
  g.y.push_back(y);
  if (fundamental) g.Z.push_back(Z);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    double t = g.t(j);
    Eigen::VectorXd k1 = rhs(t, y);
    Eigen::VectorXd y2 = y + 0.5 * dt * k1;
    Eigen::VectorXd k2 = rhs(t + 0.5 * dt, y2);
    Eigen::VectorXd y3 = y + 0.5 * dt * k2;
    Eigen::VectorXd k3 = rhs(t + 0.5 * dt, y3);
    Eigen::VectorXd y4 = y + dt * k3;
    Eigen::VectorXd k4 = rhs(t + dt, y4);
    if (fundamental) {
      Eigen::MatrixXd m1 = zrhs(t, y, Z);
      Eigen::MatrixXd m2 = zrhs(t + 0.5 * dt, y2, Z + 0.5 * dt * m1);
      Eigen::MatrixXd m3 = zrhs(t + 0.5 * dt, y3, Z + 0.5 * dt * m2);
      Eigen::MatrixXd m4 = zrhs(t + dt, y4, Z + dt * m3);
      Z += dt / 6.0 * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
    }
    y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    check(g.t(j + 1));
    g.y.push_back(y);
    if (fundamental) g.Z.push_back(Z);
  }
  return g;
}

struct LinearizationPath {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<Eigen::VectorXd> y;
  std::vector<Eigen::VectorXd> p;  // p_i = df/dy_i along the solution
};

inline LinearizationPath linearize(const OdeProblem& p, const SolutionGrid& sol) {
  LinearizationPath L{sol.t0, sol.dt, sol.y, {}};
  for (std::size_t j = 0; j < sol.size(); ++j) {
    Eigen::VectorXd c = detail::coefficients_at(p, sol.t(j), sol.y[j]);
    if (!c.allFinite()) throw DomainError("non-finite linearization coefficient at t = " + std::to_string(sol.t(j)));
    L.p.push_back(c);
  }
  return L;
}

// v0(t) = (z_1, ..., z_{k+1}) with exact jets from the fundamental matrix.
inline ProjectiveCurve fundamental_curve(const OdeProblem& p, const SolutionGrid& sol) {
  if (sol.Z.size() != sol.size()) throw InputError("solution grid lacks the fundamental matrix");
  const int k = p.k;
  ProjectiveCurve c;
  c.k = k;
  c.t0 = sol.t0;
  c.dt = sol.dt;
  c.derivatives.resize(static_cast<std::size_t>(k) + 1);
  for (std::size_t j = 0; j < sol.size(); ++j) {
    const auto& Z = sol.Z[j];
    if (std::abs(Z.determinant()) < 1e-10)
      throw DegenerateFrame("degenerate Wronskian at t = " + std::to_string(sol.t(j)), sol.t(j));
    c.values.push_back(Z.row(0).transpose());
    for (int m = 1; m <= k; ++m) c.derivatives[static_cast<std::size_t>(m - 1)].push_back(Z.row(m).transpose());
    Eigen::VectorXd pc = detail::coefficients_at(p, sol.t(j), sol.y[j]);
    c.derivatives[static_cast<std::size_t>(k)].push_back((pc.transpose() * Z).transpose());
  }
  c.validate();
  return c;
}

inline InvariantTraces generalized_wilczynski(const OdeProblem& p, const SolutionGrid& sol) {
  return projective_invariants(fundamental_curve(p, sol));
}

enum class StructureKind { none, conformal, symplectic, g2 };

inline const char* to_string(StructureKind k) {
  switch (k) {
    case StructureKind::none: return "none";
    case StructureKind::conformal: return "conformal";
    case StructureKind::symplectic: return "symplectic";
    case StructureKind::g2: return "g2";
  }
  return "?";
}

struct VerdictOptions {
  double t0 = 0.0;
  double t1 = 1.0;
  double dt = 0.005;
  std::size_t solutions = 3;
  double tol = 1e-6;
  double agreement = 1e-4;  // cross-validation of recovered structures
};

struct SolutionSummary {
  Eigen::VectorXd init;
  std::vector<double> max_theta;  // per Theta_3 .. Theta_{k+1}
};

struct StructureVerdict {
  StructureKind kind = StructureKind::none;
  int order = 0;
  std::vector<std::string> labels;
  std::vector<double> max_theta;  // over all sampled solutions
  std::vector<SolutionSummary> samples;
  std::optional<BilinearForm> bilinear;
  std::optional<ThreeForm> three_form;
  double isotropy_residual = 0.0;     // recovered b on every sampled fundamental curve
  double cross_validation = 0.0;      // relative deviation between base solutions
  std::string note;
  InvariantTraces traces;             // Theta traces at the first base solution
};

// Deterministic spread of initial states; sample 0 is the zero state.
inline Eigen::VectorXd default_initial_state(int k, std::size_t s) {
  Eigen::VectorXd v(k + 1);
  // + 0.0 keeps sample 0 free of negative zeros in reports.
  for (int i = 0; i <= k; ++i) v(i) = 0.1 * static_cast<double>(s) * std::cos(1.3 * i + 0.7 * static_cast<double>(s)) + 0.0;
  return v;
}

namespace detail {

inline double relative_projective_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd x = a / a.norm(), y = b / b.norm();
  return std::min((x - y).norm(), (x + y).norm());
}

inline Eigen::MatrixXd transport_bilinear(const Eigen::MatrixXd& b, const Eigen::MatrixXd& M) {
  return M.transpose() * b * M;
}

}  // namespace detail

inline StructureVerdict structure_verdict(const OdeProblem& p, const VerdictOptions& opt,
                                          std::vector<Eigen::VectorXd> inits = {}) {
  if (!(opt.tol > 0)) throw InputError("tolerance must be positive");
  if (!(opt.t1 > opt.t0) || !(opt.dt > 0)) throw InputError("need t1 > t0 and dt > 0");
  const int k = p.k;
  const auto n = static_cast<std::size_t>(std::llround((opt.t1 - opt.t0) / opt.dt)) + 1;
  if (n < 16) throw InputError("grid needs at least 16 nodes");
  if (inits.empty())
    for (std::size_t s = 0; s < std::max<std::size_t>(opt.solutions, 3); ++s) inits.push_back(default_initial_state(k, s));
  if (inits.size() < 3) throw InputError("structure verdict needs at least 3 base solutions");
  StructureVerdict v;
  v.order = p.order();
  std::vector<SolutionGrid> sols;
  std::vector<ProjectiveCurve> curves;
  for (std::size_t s = 0; s < inits.size(); ++s) {
    sols.push_back(integrate_ode(p, inits[s], opt.t0, opt.dt, n, true));
    curves.push_back(fundamental_curve(p, sols.back()));
    InvariantTraces tr = projective_invariants(curves.back());
    SolutionSummary sum{inits[s], std::vector<double>(tr.labels.size(), 0.0)};
    for (const auto& row : tr.values)
      for (Eigen::Index c = 0; c < row.size(); ++c)
        sum.max_theta[static_cast<std::size_t>(c)] = std::max(sum.max_theta[static_cast<std::size_t>(c)], std::abs(row(c)));
    if (s == 0) {
      v.labels = tr.labels;
      v.max_theta.assign(tr.labels.size(), 0.0);
      v.traces = std::move(tr);
    }
    for (std::size_t c = 0; c < sum.max_theta.size(); ++c) v.max_theta[c] = std::max(v.max_theta[c], sum.max_theta[c]);
    v.samples.push_back(std::move(sum));
  }
  // max_theta[i] is Theta_{i+3}.
  auto theta = [&](int idx) { return v.max_theta[static_cast<std::size_t>(idx - 3)]; };
  bool odd_vanish = true;
  for (int i = 3; i <= k + 1; i += 2) odd_vanish = odd_vanish && theta(i) <= opt.tol;
  if (!odd_vanish) {
    v.note = "odd invariants do not vanish";
    return v;
  }
  // Middle node for comparing bases between solutions.
  const std::size_t mid = n / 2;
  // Curve vectors are rows of Z_s(t); w = v Z_s(t_m)^{-1} are coordinates in
  // the basis of jets at the middle node, so b becomes Z b Z^T there.
  auto to_mid = [&](std::size_t s) -> Eigen::MatrixXd { return sols[s].Z[mid].transpose(); };
  if (p.order() == 7 && theta(4) <= opt.tol) {
    ThreeFormSearch a = find_compatible_three_form(curves[0]);
    ThreeFormSearch b = find_compatible_three_form(curves[1]);
    if (a.form && b.form) {
      // Omega in jet coordinates at the middle node for both solutions.
      auto to_jets = [&](const ThreeForm& w, std::size_t s) {
        Eigen::MatrixXd M = to_mid(s);
        Tensor3 t = expand_three_form(w.coeffs);
        Eigen::VectorXd out(35);
        const auto& idx = three_form_index();
        for (std::size_t q = 0; q < idx.size(); ++q) {
          auto [i, j, l] = idx[q];
          double acc = 0;
          for (int a1 = 0; a1 < 7; ++a1)
            for (int b1 = 0; b1 < 7; ++b1)
              for (int c1 = 0; c1 < 7; ++c1) acc += t[a1][b1][c1] * M(a1, i) * M(b1, j) * M(c1, l);
          out(static_cast<Eigen::Index>(q)) = acc;
        }
        return out;
      };
      Eigen::VectorXd ja = to_jets(*a.form, 0), jb = to_jets(*b.form, 1);
      v.cross_validation = detail::relative_projective_distance(ja, jb);
      if (v.cross_validation <= opt.agreement) {
        v.kind = StructureKind::g2;
        v.three_form = a.form;
        return v;
      }
      v.note = "three-forms at two base solutions disagree";
    } else {
      v.note = "no split three-form: " + (a.form ? b.reason : a.reason);
    }
  }
  BilinearSearch a = find_compatible_bilinear(curves[0]);
  BilinearSearch b = find_compatible_bilinear(curves[1]);
  if (!a.form || !b.form) {
    v.note = "no nondegenerate compatible bilinear form: " + (a.form ? b.reason : a.reason);
    return v;
  }
  Eigen::MatrixXd ja = detail::transport_bilinear(a.form->matrix, to_mid(0));
  Eigen::MatrixXd jb = detail::transport_bilinear(b.form->matrix, to_mid(1));
  v.cross_validation = detail::relative_projective_distance(ja, jb);
  if (v.cross_validation > opt.agreement) {
    v.note = "bilinear forms at two base solutions disagree";
    return v;
  }
  // Isotropy of every sampled fundamental curve after transport of b.
  for (std::size_t s = 0; s < curves.size(); ++s) {
    Eigen::MatrixXd bs = detail::transport_bilinear(ja, to_mid(s).inverse());
    bs /= bs.norm();
    const auto& c = curves[s];
    for (std::size_t j = 0; j < c.size(); ++j) {
      auto vec = [&](int i) -> const Eigen::VectorXd& { return i == 0 ? c.values[j] : c.derivatives[static_cast<std::size_t>(i - 1)][j]; };
      for (int x = 0; x <= k - 1; ++x)
        for (int y = 0; x + y <= k - 1; ++y) {
          const auto& vx = vec(x);
          const auto& vy = vec(y);
          v.isotropy_residual = std::max(v.isotropy_residual, std::abs(vx.dot(bs * vy)) / (vx.norm() * vy.norm()));
        }
    }
  }
  if (v.isotropy_residual > 1e-6) {
    v.note = "recovered form leaves sampled curves non-isotropic";
    return v;
  }
  bool odd_dim = p.order() % 2 == 1;
  MeasuredParity want = odd_dim ? MeasuredParity::symmetric : MeasuredParity::skew;
  if (a.form->parity != want) {
    v.note = std::string("recovered form is ") + to_string(a.form->parity) + ", expected " + to_string(want);
    return v;
  }
  v.kind = odd_dim ? StructureKind::conformal : StructureKind::symplectic;
  v.bilinear = a.form;
  return v;
}

}  // namespace flagframe
