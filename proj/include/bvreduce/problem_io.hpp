#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "bvreduce/hbar.hpp"
#include "bvreduce/reduce.hpp"

namespace bvreduce {

struct HbarSpec {
  int K = 0;
  HbarModel model;
};

struct ProblemFile {
  int n = 0;
  SuperPoly action;
  SuperPoly observable;
  std::optional<HbarSpec> hbar;
  std::optional<std::string> contour_path;
};

struct ResultDiagnostics {
  bool generic = true;
  std::vector<int> weights_solved;
  double seconds = 0.0;
};

/// Rationals are [num, den] in lowest terms; entries that do not fit in
/// int64 are written as decimal strings.
nlohmann::json rational_to_json(const Rational& q);
Rational rational_from_json(const nlohmann::json& j);
/// {"re": [n, d], "im": [n, d]}; "im" is optional on input.
nlohmann::json scalar_to_json(const Scalar& s);
Scalar scalar_from_json(const nlohmann::json& j);
/// List of {exp, re, im}.
nlohmann::json poly_to_json(const SuperPoly& p);
SuperPoly poly_from_json(int n, const nlohmann::json& j);

/// Throws InvalidInput on malformed or inconsistent input.
ProblemFile parse_problem(const std::string& text);
std::string problem_to_json(const ProblemFile& p);

std::string result_to_json(const JacClass& c, const ResultDiagnostics& diag);
JacClass parse_result(const std::string& text);

std::string series_to_json(const HbarSeries& s);

}  // namespace bvreduce
