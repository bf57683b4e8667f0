#include "cmgd/user_problem.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cmgd {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw UserProblemError("problem spec: " + where + ": " + what);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "must be finite");
  return v;
}

Vector vector_of(const json& j, std::size_t len, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
  if (j.size() != len) fail(where, "expected " + std::to_string(len) + " entries, got " + std::to_string(j.size()));
  Vector v(len);
  for (std::size_t k = 0; k < len; ++k) v[k] = number(j[k], where + "[" + std::to_string(k) + "]");
  return v;
}

// Entries may be null, which maps to `missing`.
Vector bound_vector(const json& j, std::size_t len, double missing, const std::string& where) {
  if (!j.is_array() || j.size() != len) fail(where, "expected an array of " + std::to_string(len) + " entries");
  Vector v(len);
  for (std::size_t k = 0; k < len; ++k) {
    v[k] = j[k].is_null() ? missing : number(j[k], where + "[" + std::to_string(k) + "]");
  }
  return v;
}

Matrix matrix_of(const json& j, std::size_t cols, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of rows");
  Matrix m(0, cols);
  for (std::size_t r = 0; r < j.size(); ++r) m.append_row(vector_of(j[r], cols, where + "[" + std::to_string(r) + "]"));
  return m;
}

Function objective(const json& j, std::size_t d, std::size_t index) {
  const std::string where = "objectives[" + std::to_string(index) + "]";
  if (!j.is_object()) fail(where, "expected an object");
  const std::string type = j.value("type", "");
  std::string name = j.value("name", "f" + std::to_string(index + 1));
  const Vector c = j.contains("c") ? vector_of(j["c"], d, where + ".c") : Vector(d, 0.0);
  const double r = j.contains("r") ? number(j["r"], where + ".r") : 0.0;

  if (type == "linear") {
    return {[c, r](std::span<const double> x) {
              double s = r;
              for (std::size_t k = 0; k < x.size(); ++k) s += c[k] * x[k];
              return s;
            },
            [c](std::span<const double>) { return c; }, std::move(name)};
  }
  if (type == "quadratic") {
    if (!j.contains("q")) fail(where, "quadratic objective needs \"q\"");
    const Matrix q = matrix_of(j["q"], d, where + ".q");
    if (q.rows() != d) fail(where + ".q", "expected " + std::to_string(d) + " rows");
    // Only the symmetric part matters.
    Matrix s(d, d);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) s(a, b) = 0.5 * (q(a, b) + q(b, a));
    }
    auto value = [s, c, r](std::span<const double> x) {
      double v = r;
      for (std::size_t a = 0; a < x.size(); ++a) {
        double row = 0.0;
        for (std::size_t b = 0; b < x.size(); ++b) row += s(a, b) * x[b];
        v += 0.5 * x[a] * row + c[a] * x[a];
      }
      return v;
    };
    auto gradient = [s, c](std::span<const double> x) {
      Vector g(c);
      for (std::size_t a = 0; a < x.size(); ++a) {
        for (std::size_t b = 0; b < x.size(); ++b) g[a] += s(a, b) * x[b];
      }
      return g;
    };
    return {value, gradient, std::move(name)};
  }
  fail(where + ".type", "expected \"linear\" or \"quadratic\"");
}

}  // namespace

UserProblem parse_user_problem(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw UserProblemError(std::string("problem spec: not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("document", "expected an object");
  if (!doc.contains("dimension") || !doc["dimension"].is_number_unsigned() || doc["dimension"].get<std::size_t>() == 0) {
    fail("dimension", "expected a positive integer");
  }
  const std::size_t d = doc["dimension"].get<std::size_t>();

  if (!doc.contains("objectives") || !doc["objectives"].is_array() || doc["objectives"].empty()) {
    fail("objectives", "expected a non-empty array");
  }
  std::vector<Function> objs;
  for (std::size_t t = 0; t < doc["objectives"].size(); ++t) objs.push_back(objective(doc["objectives"][t], d, t));

  LinearConstraints rows{Matrix(0, d), {}};
  if (doc.contains("constraints")) {
    const json& c = doc["constraints"];
    if (!c.is_object() || !c.contains("a") || !c.contains("b")) fail("constraints", "expected {\"a\": ..., \"b\": ...}");
    rows.a = matrix_of(c["a"], d, "constraints.a");
    rows.b = vector_of(c["b"], rows.a.rows(), "constraints.b");
  }

  std::optional<VariableBounds> bounds;
  if (doc.contains("bounds")) {
    const json& b = doc["bounds"];
    if (!b.is_object()) fail("bounds", "expected an object");
    VariableBounds vb{Vector(d, -INFINITY), Vector(d, INFINITY)};
    if (b.contains("lower")) vb.lower = bound_vector(b["lower"], d, -INFINITY, "bounds.lower");
    if (b.contains("upper")) vb.upper = bound_vector(b["upper"], d, INFINITY, "bounds.upper");
    for (std::size_t k = 0; k < d; ++k) {
      if (vb.lower[k] > vb.upper[k]) fail("bounds", "lower exceeds upper at index " + std::to_string(k));
    }
    bounds = std::move(vb);
  }

  Vector lo, hi;
  if (doc.contains("start_box")) {
    const json& s = doc["start_box"];
    if (!s.is_object() || !s.contains("lower") || !s.contains("upper")) fail("start_box", "expected lower and upper");
    lo = vector_of(s["lower"], d, "start_box.lower");
    hi = vector_of(s["upper"], d, "start_box.upper");
  } else if (bounds) {
    lo = bounds->lower;
    hi = bounds->upper;
  }
  if (lo.empty()) fail("start_box", "required when the bounds are not all finite");
  for (std::size_t k = 0; k < d; ++k) {
    if (!std::isfinite(lo[k]) || !std::isfinite(hi[k])) fail("start_box", "required when the bounds are not all finite");
    if (lo[k] > hi[k]) fail("start_box", "lower exceeds upper at index " + std::to_string(k));
  }

  return {ProblemSpec(d, std::move(objs), std::move(rows), std::move(bounds)), std::move(lo), std::move(hi)};
}

UserProblem load_user_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UserProblemError("problem spec: cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_user_problem(text.str());
}

}  // namespace cmgd
