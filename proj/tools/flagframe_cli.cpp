#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "flagframe.hpp"

using namespace flagframe;

namespace {

const char* kExprHelp =
    "Expression grammar for --f:\n"
    "  numbers, x, y, y', y'', ..., or y0..yk (yi is the i-th derivative, i <= order-1)\n"
    "  binary + - * / and ^ (right-associative, binds tighter than unary minus)\n"
    "  unary minus; functions sin cos exp log sqrt; parentheses\n"
    "  precedence: ^ > unary - > * / > + -\n";

struct Output {
  std::string path;

  void write(const std::string& text) const {
    if (path.empty() || path == "-") {
      std::cout << text;
      return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
  }
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

Json dims_json(const GradedSubspace& s) {
  Json j = Json::object();
  for (int d : s.degrees()) j[std::to_string(d)] = s.dim(d);
  return j;
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    a.push_back(row);
  }
  return a;
}

Json bilinear_json(const BilinearForm& b) {
  Json j;
  j["parity"] = to_string(b.parity);
  j["nondegenerate"] = b.nondegenerate;
  j["condition"] = b.condition;
  j["residual"] = b.residual;
  j["matrix"] = matrix_json(b.matrix);
  return j;
}

Json three_form_json(const ThreeForm& w) {
  Json j;
  Json terms = Json::object();
  const auto& idx = three_form_index();
  for (std::size_t n = 0; n < idx.size(); ++n) {
    double c = w.coeffs(static_cast<Eigen::Index>(n));
    if (std::abs(c) < 1e-12) continue;
    auto [a, b, d] = idx[n];
    terms["e" + std::to_string(a) + std::to_string(b) + std::to_string(d)] = c;
  }
  j["coefficients"] = terms;
  j["metric_signature"] = Json::array({w.positive, w.negative});
  j["nondegenerate"] = w.nondegenerate;
  j["split"] = w.split();
  j["residual"] = w.residual;
  j["metric"] = matrix_json(w.B);
  return j;
}

SymmetryMode parse_mode(const std::string& s) {
  if (s == "unparametrized") return SymmetryMode::unparametrized;
  if (s == "parametrized") return SymmetryMode::parametrized;
  throw InputError("mode must be 'unparametrized' or 'parametrized'");
}

const char* mode_name(SymmetryMode m) { return m == SymmetryMode::parametrized ? "parametrized" : "unparametrized"; }

struct AlgebraArgs {
  std::string algebra;
  std::string x;
  bool parametrized = false;
};

void add_algebra_x(CLI::App* c, AlgebraArgs& a) {
  c->add_option("--algebra", a.algebra, "algebra JSON file or builtin (sl:1,1,1 | so:<n>:<dims> | sp:<n>:<dims> | g2:B|P1|P2)")
      ->required();
  c->add_option("--x", a.x, "degree -1 element: 'principal', LABEL[=coef],... or a full coefficient list")->required();
  c->add_flag("--parametrized", a.parametrized, "parametrized symmetry algebra (sg_0 centralizes x)");
}

Json algebra_report(const GradedAlgebra& A) {
  Json j;
  j["name"] = A.name();
  j["dim"] = A.dim();
  Json g = Json::object();
  for (int d = A.min_degree(); d <= A.max_degree(); ++d) g[std::to_string(d)] = A.degree_dim(d);
  j["graded_dims"] = g;
  std::string jac = A.jacobi_violation(), gr = A.grading_violation();
  j["jacobi_ok"] = jac.empty();
  j["grading_ok"] = gr.empty();
  if (!jac.empty()) j["jacobi_violation"] = jac;
  if (!gr.empty()) j["grading_violation"] = gr;
  j["killing_nondegenerate"] = A.killing_nondegenerate();
  j["definition"] = algebra_to_json(A);
  return j;
}

Json symmetry_report(const SymmetryAlgebra& S, const QVec& x) {
  Json j;
  j["algebra"] = S.algebra->name();
  j["x"] = S.algebra->describe(x);
  j["mode"] = mode_name(S.mode);
  j["dim"] = S.sg.dim();
  j["graded_dims"] = dims_json(S.sg);
  j["reductive"] = S.reductive;
  j["sg"] = subspace_to_json(S.sg);
  return j;
}

Json normalization_json(const NormalizationSpace& N) {
  Json j;
  j["construction"] = to_string(N.construction);
  j["invariant"] = N.invariant;
  j["dim"] = N.W.dim();
  j["W"] = subspace_to_json(N.W);
  return j;
}

Json complement_report(const SymmetryAlgebra& S, const QVec& x, bool invariant) {
  Json j;
  j["algebra"] = S.algebra->name();
  j["x"] = S.algebra->describe(x);
  j["reductive"] = S.reductive;
  if (!invariant) {
    j["normalization"] = normalization_json(generic_complement(S));
    return j;
  }
  if (S.reductive) {
    j["method"] = "reductive";
    j["normalization"] = normalization_json(reductive_invariant_complement(S, complete_sl2(*S.algebra, x)));
    return j;
  }
  auto cert = invariant_complement_certificate(S);
  j["method"] = "certificate";
  Json c;
  c["outcome"] = to_string(cert.outcome);
  c["reason"] = cert.reason;
  c["parameters"] = cert.parameters;
  Json obs = Json::array();
  for (const auto& o : cert.obstructions)
    obs.push_back(Json{{"degree", o.degree}, {"required_dim", o.required_dim}, {"min_orbit_span", o.min_orbit_span}});
  c["obstructions"] = obs;
  j["certificate"] = c;
  if (cert.space) j["normalization"] = normalization_json(*cert.space);
  return j;
}

std::string invariants_csv(const InvariantTraces& tr, const std::vector<double>* tau) {
  std::ostringstream out;
  out << "t";
  for (const auto& l : tr.labels) out << "," << l;
  if (tau) out << ",tau";
  out << "\n";
  for (std::size_t j = 0; j < tr.values.size(); ++j) {
    out << fmt(tr.t0 + static_cast<double>(j) * tr.dt);
    for (Eigen::Index c = 0; c < tr.values[j].size(); ++c) out << "," << fmt(tr.values[j](c));
    if (tau) out << "," << fmt((*tau)[j]);
    out << "\n";
  }
  return out.str();
}

Json g2_report_json(const G2CaseReport& r) {
  Json j;
  j["case"] = r.name;
  j["algebra"] = r.algebra;
  j["x"] = r.x;
  if (r.cubic_orbit) j["cubic_orbit"] = r.cubic_orbit;
  Json d = Json::object();
  for (auto [deg, n] : r.sg_dims) d[std::to_string(deg)] = n;
  j["sg_dim"] = r.sg_dim;
  j["sg_graded_dims"] = d;
  j["reductive"] = r.reductive;
  j["w_dim"] = r.codim;
  j["w_basis"] = r.w_basis;
  j["w_degrees"] = r.w_degrees;
  j["invariant"] = r.invariant;
  j["construction"] = r.construction;
  j["h1_plus_dim"] = r.h1_dim;
  return j;
}

Json verdict_json(const OdeProblem& p, const StructureVerdict& v, const VerdictOptions& o) {
  Json j;
  j["order"] = v.order;
  j["f"] = print(p.f);
  j["kind"] = to_string(v.kind);
  j["t0"] = o.t0;
  j["t1"] = o.t1;
  j["dt"] = o.dt;
  j["tol"] = o.tol;
  j["solutions"] = v.samples.size();
  Json mt = Json::object();
  for (std::size_t i = 0; i < v.labels.size(); ++i) mt[v.labels[i]] = v.max_theta[i];
  j["max_theta"] = mt;
  Json samples = Json::array();
  for (const auto& s : v.samples) {
    Json e;
    Json init = Json::array();
    for (Eigen::Index i = 0; i < s.init.size(); ++i) init.push_back(s.init(i));
    e["init"] = init;
    e["max_theta"] = s.max_theta;
    samples.push_back(e);
  }
  j["samples"] = samples;
  j["cross_validation"] = v.cross_validation;
  j["isotropy_residual"] = v.isotropy_residual;
  if (!v.note.empty()) j["note"] = v.note;
  if (v.bilinear) j["bilinear_form"] = bilinear_json(*v.bilinear);
  if (v.three_form) j["three_form"] = three_form_json(*v.three_form);
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flagframe: moving frames for curves in flag varieties, Wilczynski invariants, ODE structures"};
  app.require_subcommand(1);
  Output out;
  app.add_option("-o,--output", out.path, "write the report to this file instead of stdout");

  // algebra
  std::string alg_name;
  auto* c_alg = app.add_subcommand("algebra", "print a graded algebra with consistency checks");
  c_alg->add_option("--algebra", alg_name, "algebra JSON file or builtin name")->required();

  AlgebraArgs sym_args, comp_args, coh_args;
  auto* c_sym = app.add_subcommand("symmetry", "symmetry algebra of the flat curve of type x");
  add_algebra_x(c_sym, sym_args);
  bool want_invariant = false;
  auto* c_comp = app.add_subcommand("complement", "normalization space W");
  add_algebra_x(c_comp, comp_args);
  c_comp->add_flag("--invariant", want_invariant, "require W to be sg^(0)-invariant");
  auto* c_coh = app.add_subcommand("cohom", "dimension of H^1_+(sg_-1, g/sg)");
  add_algebra_x(c_coh, coh_args);

  std::string curve_path, mode_str = "unparametrized", format = "csv";
  bool fix_param = false;
  auto* c_inv = app.add_subcommand("invariants", "Wilczynski invariants of a sampled projective curve");
  c_inv->add_option("--curve", curve_path, "curve JSON")->required();
  c_inv->add_option("--mode", mode_str, "unparametrized | parametrized");
  c_inv->add_flag("--fix-parameter", fix_param, "also integrate the projective parameter tau(t)");
  c_inv->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  std::string dual_curve;
  auto* c_dual = app.add_subcommand("duality", "compatible bilinear forms and 3-forms");
  c_dual->require_subcommand(1);
  auto* c_bil = c_dual->add_subcommand("bilinear", "bilinear form making the curve self-dual");
  c_bil->add_option("--curve", dual_curve, "curve JSON")->required();
  auto* c_g2f = c_dual->add_subcommand("g2form", "3-form compatible with a curve in P^6");
  c_g2f->add_option("--curve", dual_curve, "curve JSON")->required();

  std::string g2_case;
  auto* c_g2 = app.add_subcommand("g2", "G2 flag variety cases");
  c_g2->require_subcommand(1);
  auto* c_g2r = c_g2->add_subcommand("report", "symmetry algebra and normalization for a named case");
  c_g2r->add_option("--case", g2_case, "B-nondeg | P2-orbit2 | P2-orbit3 | P2-orbit4 | all")->required();

  int ode_order = 3;
  std::string ode_f, ode_csv;
  VerdictOptions vo;
  auto* c_ode = app.add_subcommand("ode", "ODE structure analysis");
  c_ode->require_subcommand(1);
  auto* c_ana = c_ode->add_subcommand("analyze", "generalized Wilczynski invariants and structure verdict");
  c_ana->footer(kExprHelp);
  c_ana->add_option("--order", ode_order, "order k+1 >= 3")->required();
  c_ana->add_option("--f", ode_f, "right-hand side f(x, y, y', ...)")->required();
  c_ana->add_option("--t0", vo.t0, "start of the interval");
  c_ana->add_option("--t1", vo.t1, "end of the interval");
  c_ana->add_option("--dt", vo.dt, "RK4 step and sampling step");
  c_ana->add_option("--solutions", vo.solutions, "number of base solutions (>= 3)");
  c_ana->add_option("--tol", vo.tol, "vanishing tolerance for invariants");
  c_ana->add_option("--agreement", vo.agreement, "relative tolerance for cross-validation between base solutions");
  c_ana->add_option("--csv", ode_csv, "write Theta traces at the first base solution as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*c_alg) {
      out.write(dump(algebra_report(*load_algebra(alg_name))));
    } else if (*c_sym) {
      auto A = load_algebra(sym_args.algebra);
      QVec x = parse_element(*A, sym_args.x);
      auto S = symmetry_algebra(A, x, sym_args.parametrized ? SymmetryMode::parametrized : SymmetryMode::unparametrized);
      out.write(dump(symmetry_report(S, x)));
    } else if (*c_comp) {
      auto A = load_algebra(comp_args.algebra);
      QVec x = parse_element(*A, comp_args.x);
      auto S = symmetry_algebra(A, x, comp_args.parametrized ? SymmetryMode::parametrized : SymmetryMode::unparametrized);
      out.write(dump(complement_report(S, x, want_invariant)));
    } else if (*c_coh) {
      auto A = load_algebra(coh_args.algebra);
      QVec x = parse_element(*A, coh_args.x);
      auto S = symmetry_algebra(A, x, coh_args.parametrized ? SymmetryMode::parametrized : SymmetryMode::unparametrized);
      auto h = h1_plus(S);
      Json j;
      j["algebra"] = A->name();
      j["x"] = A->describe(x);
      j["h1_plus_dim"] = h.dimension;
      Json d = Json::object();
      for (auto [deg, n] : h.by_degree) d[std::to_string(deg)] = n;
      j["by_degree"] = d;
      j["complex_ok"] = h.complex_ok;
      out.write(dump(j));
    } else if (*c_inv) {
      auto mode = parse_mode(mode_str);
      auto tr = projective_invariants(curve_from_json(read_json_file(curve_path)), mode);
      std::vector<double> tau;
      if (fix_param) tau = fix_parameter(tr.normal_form, *tr.model);
      if (format == "csv") {
        out.write(invariants_csv(tr, fix_param ? &tau : nullptr));
      } else {
        Json j;
        j["mode"] = mode_name(mode);
        j["labels"] = tr.labels;
        j["t0"] = tr.t0;
        j["dt"] = tr.dt;
        Json vals = Json::array();
        for (const auto& v : tr.values) {
          Json row = Json::array();
          for (Eigen::Index c = 0; c < v.size(); ++c) row.push_back(v(c));
          vals.push_back(row);
        }
        j["values"] = vals;
        if (fix_param) j["tau"] = tau;
        out.write(dump(j));
      }
    } else if (*c_bil) {
      auto r = find_compatible_bilinear(curve_from_json(read_json_file(dual_curve)));
      Json j;
      j["found"] = r.form.has_value();
      j["kernel_dimension"] = r.kernel_dimension;
      if (!r.reason.empty()) j["reason"] = r.reason;
      if (r.form) j["form"] = bilinear_json(*r.form);
      out.write(dump(j));
    } else if (*c_g2f) {
      auto r = find_compatible_three_form(curve_from_json(read_json_file(dual_curve)));
      Json j;
      j["found"] = r.form.has_value();
      j["kernel_dimension"] = r.kernel_dimension;
      if (!r.reason.empty()) j["reason"] = r.reason;
      if (r.form)
        j["form"] = three_form_json(*r.form);
      else if (r.candidate)
        j["candidate"] = three_form_json(*r.candidate);
      out.write(dump(j));
    } else if (*c_g2r) {
      if (g2_case == "all") {
        Json a = Json::array();
        for (const auto& n : g2_case_names()) a.push_back(g2_report_json(g2_case_report(n)));
        out.write(dump(a));
      } else {
        out.write(dump(g2_report_json(g2_case_report(g2_case))));
      }
    } else if (*c_ana) {
      auto p = OdeProblem::make(ode_order, ode_f);
      auto v = structure_verdict(p, vo);
      if (!ode_csv.empty()) Output{ode_csv}.write(invariants_csv(v.traces, nullptr));
      out.write(dump(verdict_json(p, v, vo)));
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const RankAmbiguity& e) {
    std::cerr << "rank ambiguity: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
