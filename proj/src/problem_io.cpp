#include "bvreduce/problem_io.hpp"

#include <limits>

#include "bvreduce/errors.hpp"

namespace bvreduce {

using nlohmann::json;

namespace {

json integer_to_json(const mpz_class& z) {
  if (z.fits_slong_p()) return json(z.get_si());
  return json(z.get_str());
}

mpz_class integer_from_json(const json& j) {
  if (j.is_number_integer()) return mpz_class(std::to_string(j.get<std::int64_t>()));
  if (j.is_string()) {
    mpz_class z;
    if (z.set_str(j.get<std::string>(), 10) != 0) throw InvalidInput("not an integer: " + j.get<std::string>());
    return z;
  }
  throw InvalidInput("expected an integer, got " + j.dump());
}

}  // namespace

json rational_to_json(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return json::array({integer_to_json(c.get_num()), integer_to_json(c.get_den())});
}

Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(integer_from_json(j));
  if (!j.is_array() || j.size() != 2) throw InvalidInput("rational must be [num, den], got " + j.dump());
  mpz_class num = integer_from_json(j[0]);
  mpz_class den = integer_from_json(j[1]);
  if (den == 0) throw InvalidInput("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

json scalar_to_json(const Scalar& s) {
  return json{{"re", rational_to_json(s.re())}, {"im", rational_to_json(s.im())}};
}

Scalar scalar_from_json(const json& j) {
  if (j.is_number_integer() || j.is_array()) return Scalar(rational_from_json(j));
  if (!j.is_object() || !j.contains("re")) throw InvalidInput("scalar must be {re, im}, got " + j.dump());
  return Scalar(rational_from_json(j["re"]), j.contains("im") ? rational_from_json(j["im"]) : Rational(0));
}

json poly_to_json(const SuperPoly& p) {
  json out = json::array();
  for (const auto& [k, c] : p.terms()) {
    if (!k.xi.empty()) throw InvalidInput("only xi-free polynomials are serialised");
    json t = scalar_to_json(c);
    t["exp"] = k.x;
    out.push_back(std::move(t));
  }
  return out;
}

SuperPoly poly_from_json(int n, const json& j) {
  if (!j.is_array()) throw InvalidInput("polynomial must be a list of terms");
  SuperPoly p(n);
  for (const auto& t : j) {
    if (!t.is_object() || !t.contains("exp") || !t["exp"].is_array()) throw InvalidInput("term needs an exp list");
    if (static_cast<int>(t["exp"].size()) != n) throw InvalidInput("exponent list length differs from n");
    ExponentWord e;
    for (const auto& x : t["exp"]) {
      if (!x.is_number_integer() || x.get<long>() < 0 || x.get<long>() > 1000)
        throw InvalidInput("exponents must be small non-negative integers");
      e.push_back(x.get<int>());
    }
    p.add_term(TermKey{e, {}}, scalar_from_json(t));
  }
  return p;
}

namespace {

DenseMatrix<Scalar> matrix_from_json(int n, const json& j) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) throw InvalidInput("matrix must have n rows");
  DenseMatrix<Scalar> m(n, n);
  for (int r = 0; r < n; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != n) throw InvalidInput("matrix must have n columns");
    for (int c = 0; c < n; ++c) m(r, c) = scalar_from_json(j[r][c]);
  }
  return m;
}

ProblemFile parse_problem_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("problem must be a JSON object");
  if (!j.contains("n") || !j["n"].is_number_integer()) throw InvalidInput("problem needs integer n");
  ProblemFile p;
  p.n = j["n"].get<int>();
  if (p.n < 1 || p.n > 16) throw InvalidInput("n must be between 1 and 16");
  p.action = j.contains("action") ? poly_from_json(p.n, j["action"]) : SuperPoly(p.n);
  p.observable = j.contains("observable") ? poly_from_json(p.n, j["observable"]) : SuperPoly(p.n);
  if (j.contains("hbar")) {
    const json& h = j["hbar"];
    if (!h.is_object() || !h.contains("a")) throw InvalidInput("hbar block needs an a-matrix");
    std::map<int, SuperPoly> vertices;
    if (h.contains("vertices")) {
      if (!h["vertices"].is_array()) throw InvalidInput("hbar vertices must be a list");
      for (const auto& v : h["vertices"]) {
        if (!v.is_object() || !v.contains("degree") || !v["degree"].is_number_integer())
          throw InvalidInput("vertex needs an integer degree");
        const int l = v["degree"].get<int>();
        SuperPoly poly = poly_from_json(p.n, v.value("terms", json::array()));
        auto [it, fresh] = vertices.try_emplace(l, poly);
        if (!fresh) it->second += poly;
      }
    }
    HbarSpec spec;
    spec.K = h.value("K", 0);
    try {
      spec.model = HbarModel::make(matrix_from_json(p.n, h["a"]), std::move(vertices));
    } catch (const SingularMatrix&) {
      throw InvalidInput("hbar a-matrix is singular");
    }
    p.hbar = std::move(spec);
  }
  if (j.contains("contour")) {
    if (!j["contour"].is_string()) throw InvalidInput("contour must be a file path");
    p.contour_path = j["contour"].get<std::string>();
  }
  return p;
}

}  // namespace

ProblemFile parse_problem(const std::string& text) {
  try {
    return parse_problem_json(json::parse(text));
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed problem file: ") + e.what());
  }
}

std::string problem_to_json(const ProblemFile& p) {
  json j{{"n", p.n}, {"action", poly_to_json(p.action)}, {"observable", poly_to_json(p.observable)}};
  if (p.hbar) {
    json a = json::array();
    for (int r = 0; r < p.n; ++r) {
      json row = json::array();
      for (int c = 0; c < p.n; ++c) row.push_back(scalar_to_json(p.hbar->model.a(r, c)));
      a.push_back(row);
    }
    json vs = json::array();
    for (const auto& [l, v] : p.hbar->model.vertices) vs.push_back({{"degree", l}, {"terms", poly_to_json(v)}});
    j["hbar"] = {{"K", p.hbar->K}, {"a", a}, {"vertices", vs}};
  }
  if (p.contour_path) j["contour"] = *p.contour_path;
  return j.dump(2) + "\n";
}

std::string result_to_json(const JacClass& c, const ResultDiagnostics& diag) {
  json basis = json::array();
  json coeffs = json::array();
  for (const auto& m : c.basis.monomials) {
    basis.push_back(m);
    coeffs.push_back(scalar_to_json(c.coefficient(m)));
  }
  json j{{"n", c.basis.n},
         {"d", c.basis.d},
         {"basis", basis},
         {"coefficients", coeffs},
         {"diagnostics", {{"generic", diag.generic}, {"weights_solved", diag.weights_solved}, {"seconds", diag.seconds}}}};
  return j.dump(2) + "\n";
}

JacClass parse_result(const std::string& text) {
  try {
    json j = json::parse(text);
    const int n = j.at("n").get<int>();
    const int d = j.at("d").get<int>();
    JacBasis basis = jac_basis(n, d);
    const json& b = j.at("basis");
    const json& c = j.at("coefficients");
    if (b.size() != basis.size() || c.size() != basis.size()) throw InvalidInput("result basis size mismatch");
    JacClass out{basis, {}};
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (b[i].get<ExponentWord>() != basis.monomials[i]) throw InvalidInput("result basis out of order");
      Scalar s = scalar_from_json(c[i]);
      if (!s.is_zero()) out.coeffs.emplace(basis.monomials[i], s);
    }
    return out;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed result file: ") + e.what());
  }
}

std::string series_to_json(const HbarSeries& s) {
  json coeffs = json::array();
  for (const auto& c : s.coeffs) coeffs.push_back(scalar_to_json(c));
  return json{{"K", s.K}, {"series", coeffs}}.dump(2) + "\n";
}

}  // namespace bvreduce
