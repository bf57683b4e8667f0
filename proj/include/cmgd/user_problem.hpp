#pragma once

// Problems described in a JSON document, for experiments that need no code.
//
//   {
//     "dimension": 2,
//     "objectives": [
//       {"name": "f1", "type": "quadratic", "q": [[2, 0], [0, 2]], "c": [0, 0], "r": 0},
//       {"name": "f2", "type": "linear", "c": [1, -1], "r": 0}
//     ],
//     "constraints": {"a": [[1, 1]], "b": [1]},
//     "bounds": {"lower": [-1, null], "upper": [1, null]},
//     "start_box": {"lower": [-1, -1], "upper": [1, 1]}
//   }
//
// A quadratic objective is x^T q x / 2 + c.x + r; a linear one is c.x + r.
// "constraints" are rows a x <= b. A null bound is unbounded. "start_box" is
// where multi-start points are drawn; it defaults to the bounds when those
// are all finite. Only "dimension" and "objectives" are required.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cmgd/problem.hpp"

namespace cmgd {

class UserProblemError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct UserProblem {
  ProblemSpec problem;
  Vector start_lower;
  Vector start_upper;
};

/// Throws UserProblemError with the offending key on any schema violation.
UserProblem parse_user_problem(std::string_view json_text);

UserProblem load_user_problem(const std::filesystem::path& path);

}  // namespace cmgd
