#pragma once

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "flagframe/constructors.hpp"
#include "flagframe/frames.hpp"
#include "flagframe/subspace.hpp"

namespace flagframe {

using Json = nlohmann::ordered_json;

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

namespace detail {

template <class F>
auto json_guard(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string(what) + ": " + e.what());
  }
}

inline Json qvec_json(const QVec& v) {
  Json a = Json::array();
  for (const auto& q : v) a.push_back(format_rational(q));
  return a;
}

inline QVec qvec_from(const Json& j) {
  QVec v;
  for (const auto& e : j) {
    if (e.is_string())
      v.push_back(parse_rational(e.get<std::string>()));
    else if (e.is_number_integer())
      v.push_back(Rational(e.get<long>()));
    else
      throw InputError("exact entries must be integers or \"p/q\" strings");
  }
  return v;
}

inline Json vec_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Eigen::VectorXd vec_from(const Json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
  return v;
}

}  // namespace detail

// Structure constants are listed once per unordered pair i < j.
inline Json algebra_to_json(const GradedAlgebra& A) {
  Json j;
  j["name"] = A.name();
  j["labels"] = A.labels();
  j["degrees"] = A.degrees();
  j["grading_element"] = detail::qvec_json(A.grading_element());
  j["cartan"] = A.cartan();
  Json sc = Json::array();
  for (std::size_t a = 0; a < A.dim(); ++a)
    for (std::size_t b = a + 1; b < A.dim(); ++b)
      for (const auto& t : A.bracket_basis(a, b)) sc.push_back(Json::array({a, b, t.index, format_rational(t.coeff)}));
  j["structure_constants"] = sc;
  if (A.has_representation()) {
    Json rep = Json::array();
    for (const auto& m : A.representation()) {
      Json rows = Json::array();
      for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(detail::qvec_json(m.row(r)));
      rep.push_back(rows);
    }
    j["representation"] = rep;
  }
  return j;
}

inline AlgebraPtr algebra_from_json(const Json& j) {
  return detail::json_guard("algebra JSON", [&] {
    std::vector<StructureEntry> entries;
    for (const auto& e : j.at("structure_constants")) {
      if (!e.is_array() || e.size() != 4) throw InputError("structure constant entries must be [i, j, k, \"p/q\"]");
      Rational c = e[3].is_string() ? parse_rational(e[3].get<std::string>()) : Rational(e[3].get<long>());
      entries.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<std::size_t>(), c});
    }
    std::vector<QMatrix> rep;
    if (j.contains("representation"))
      for (const auto& m : j.at("representation")) {
        std::vector<QVec> rows;
        for (const auto& r : m) rows.push_back(detail::qvec_from(r));
        if (rows.empty() || rows.size() != rows[0].size()) throw InputError("representation matrices must be square");
        QMatrix q(rows.size(), rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
          if (rows[r].size() != rows.size()) throw InputError("representation matrices must be square");
          for (std::size_t c = 0; c < rows.size(); ++c) q(r, c) = rows[r][c];
        }
        rep.push_back(q);
      }
    std::vector<std::size_t> cartan;
    if (j.contains("cartan")) cartan = j.at("cartan").get<std::vector<std::size_t>>();
    auto A = std::make_shared<const GradedAlgebra>(j.at("name").get<std::string>(),
                                                   j.at("labels").get<std::vector<std::string>>(),
                                                   j.at("degrees").get<std::vector<int>>(),
                                                   detail::qvec_from(j.at("grading_element")), entries, cartan, rep);
    if (auto v = A->jacobi_violation(); !v.empty()) throw InputError("algebra '" + A->name() + "': " + v);
    if (auto v = A->grading_violation(); !v.empty()) throw InputError("algebra '" + A->name() + "': " + v);
    return AlgebraPtr(A);
  });
}

inline Json subspace_to_json(const GradedSubspace& s) {
  Json j;
  j["algebra"] = s.algebra()->name();
  j["dim"] = s.dim();
  Json parts = Json::array();
  for (int d : s.degrees()) {
    Json p;
    p["degree"] = d;
    Json rows = Json::array();
    for (const auto& r : s.basis(d)) rows.push_back(detail::qvec_json(r));
    p["rows"] = rows;
    Json labels = Json::array();
    for (const auto& r : s.basis(d)) labels.push_back(s.algebra()->describe(r));
    p["elements"] = labels;
    parts.push_back(p);
  }
  j["parts"] = parts;
  return j;
}

inline GradedSubspace subspace_from_json(const Json& j, const AlgebraPtr& A) {
  return detail::json_guard("subspace JSON", [&] {
    if (j.contains("algebra") && j.at("algebra").get<std::string>() != A->name())
      throw AlgebraMismatch("subspace belongs to algebra '" + j.at("algebra").get<std::string>() + "', not '" +
                            A->name() + "'");
    std::vector<QVec> vs;
    for (const auto& p : j.at("parts"))
      for (const auto& r : p.at("rows")) vs.push_back(detail::qvec_from(r));
    return GradedSubspace::span(A, vs);
  });
}

// {"k", "t0", "dt", "values": [[...]], "derivatives": [[[...]]] (optional)}
inline Json curve_to_json(const ProjectiveCurve& c) {
  Json j;
  j["k"] = c.k;
  j["t0"] = c.t0;
  j["dt"] = c.dt;
  Json vals = Json::array();
  for (const auto& v : c.values) vals.push_back(detail::vec_json(v));
  j["values"] = vals;
  if (!c.derivatives.empty()) {
    Json ders = Json::array();
    for (const auto& dm : c.derivatives) {
      Json a = Json::array();
      for (const auto& v : dm) a.push_back(detail::vec_json(v));
      ders.push_back(a);
    }
    j["derivatives"] = ders;
  }
  return j;
}

inline ProjectiveCurve curve_from_json(const Json& j) {
  return detail::json_guard("curve JSON", [&] {
    ProjectiveCurve c;
    c.k = j.at("k").get<int>();
    c.t0 = j.at("t0").get<double>();
    c.dt = j.at("dt").get<double>();
    for (const auto& v : j.at("values")) c.values.push_back(detail::vec_from(v));
    if (j.contains("derivatives"))
      for (const auto& dm : j.at("derivatives")) {
        std::vector<Eigen::VectorXd> col;
        for (const auto& v : dm) col.push_back(detail::vec_from(v));
        c.derivatives.push_back(std::move(col));
      }
    c.validate();
    return c;
  });
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

inline std::vector<int> int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& t : split(s, ',')) {
    try {
      std::size_t used = 0;
      int v = std::stoi(t, &used);
      if (used != t.size()) throw InputError("");
      out.push_back(v);
    } catch (const std::exception&) {
      throw InputError("expected a comma-separated integer list, got '" + s + "'");
    }
  }
  return out;
}

}  // namespace detail

// "sl:1,1,1" | "so:<n>:<isotropic flag dims>" | "sp:<n>:<dims>" | "g2:B|P1|P2"
inline AlgebraPtr builtin_algebra(const std::string& spec) {
  auto parts = detail::split(spec, ':');
  if (parts.size() == 2 && parts[0] == "sl") return build_sl_flag(detail::int_list(parts[1]));
  if (parts.size() == 2 && parts[0] == "g2") return build_g2(parse_g2_parabolic(parts[1]));
  if (parts.size() == 3 && (parts[0] == "so" || parts[0] == "sp")) {
    auto n = detail::int_list(parts[1]);
    if (n.size() != 1) throw InputError("expected so:<n>:<dims> or sp:<n>:<dims>");
    return build_slb(n[0], parts[0] == "so" ? FormParity::symmetric : FormParity::skew, detail::int_list(parts[2]));
  }
  throw InputError("unknown builtin algebra '" + spec + "' (expected sl:<blocks>, so:<n>:<dims>, sp:<n>:<dims>, g2:<B|P1|P2>)");
}

// A path to a JSON file, or a builtin name.
inline AlgebraPtr load_algebra(const std::string& what) {
  if (what.size() > 5 && what.substr(what.size() - 5) == ".json") return algebra_from_json(read_json_file(what));
  return builtin_algebra(what);
}

// "principal" (sl with singleton blocks), "LABEL[=coef],..." or a full
// comma-separated coefficient vector.
inline QVec parse_element(const GradedAlgebra& A, const std::string& text) {
  if (text == "principal") return principal_x(A);
  auto items = detail::split(text, ',');
  if (items.size() == A.dim()) {
    bool numeric = true;
    QVec v;
    for (const auto& t : items) {
      try {
        v.push_back(parse_rational(t));
      } catch (const InputError&) {
        numeric = false;
        break;
      }
    }
    if (numeric) return v;
  }
  std::map<std::string, Rational> terms;
  for (const auto& t : items) {
    auto eq = t.find('=');
    std::string label = eq == std::string::npos ? t : t.substr(0, eq);
    Rational c = eq == std::string::npos ? Rational(1) : parse_rational(t.substr(eq + 1));
    terms[label] += c;
  }
  return element_from_labels(A, terms);
}

}  // namespace flagframe
