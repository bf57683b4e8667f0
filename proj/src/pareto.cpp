#include "cmgd/pareto.hpp"

#include <cmath>

#include "cmgd/problem.hpp"

namespace cmgd {

bool dominates(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractViolation("dominates: objective vectors differ in length");
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strict = true;
  }
  return strict;
}

namespace {

bool same_objectives(const Vector& a, const Vector& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 1e-12) return false;
  }
  return true;
}

}  // namespace

ParetoFront non_dominated_filter(std::vector<ParetoEntry> points) {
  const std::size_t n = points.size();
  std::vector<char> keep(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n && keep[i]; ++j) {
      if (j != i && dominates(points[j].objectives, points[i].objectives)) keep[i] = 0;
    }
  }
  ParetoFront front;
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep[i]) continue;
    bool duplicate = false;
    for (const auto& e : front.entries) {
      if (same_objectives(e.objectives, points[i].objectives)) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) front.entries.push_back(std::move(points[i]));
  }
  return front;
}

ParetoFront merge_fronts(const std::vector<ParetoFront>& fronts) {
  std::vector<ParetoEntry> all;
  std::size_t width = 0;
  bool seen = false;
  for (const auto& f : fronts) {
    for (const auto& e : f.entries) {
      if (seen && e.objectives.size() != width) {
        throw ContractViolation("merge_fronts: fronts have different objective counts");
      }
      width = e.objectives.size();
      seen = true;
      all.push_back(e);
    }
  }
  return non_dominated_filter(std::move(all));
}

}  // namespace cmgd
