#pragma once

// Pareto dominance and non-dominated filtering of objective vectors.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cmgd/linalg.hpp"

namespace cmgd {

/// a <= b in every component and a < b in at least one.
bool dominates(std::span<const double> a, std::span<const double> b);

struct ParetoEntry {
  Vector decision;
  Vector objectives;
  std::string origin;  ///< free-form source label, e.g. the start index
};

/// Mutually non-dominated entries without duplicate objective vectors.
struct ParetoFront {
  std::vector<ParetoEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

/// Entries not dominated by any other input, in input order. Objective
/// vectors equal to within 1e-12 per component keep their first occurrence.
ParetoFront non_dominated_filter(std::vector<ParetoEntry> points);

/// non_dominated_filter over the concatenation of the fronts.
ParetoFront merge_fronts(const std::vector<ParetoFront>& fronts);

}  // namespace cmgd
