#include <cmath>
#include <regex>
#include <sstream>

#include "cmgd/problems.hpp"
#include "cmgd/report.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace cmgd;

namespace {

std::vector<Trajectory> toy_runs(std::size_t count, std::uint64_t seed) {
  const ProblemSpec p = toy_problem();
  return multi_start(p, sample_starts(p, count, box_sampler({-1, -1, -1}, {1, 1, 1}), seed));
}

std::vector<std::pair<double, double>> markers(const std::string& svg) {
  static const std::regex re(R"re(<circle class="marker" cx="([-0-9.]+)" cy="([-0-9.]+)")re");
  std::vector<std::pair<double, double>> out;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    out.emplace_back(std::stod((*it)[1]), std::stod((*it)[2]));
  }
  return out;
}

std::vector<std::pair<double, double>> polyline(const std::string& svg) {
  static const std::regex re(R"re(<polyline class="overlay"[^>]* points="([^"]*)")re");
  std::smatch m;
  std::vector<std::pair<double, double>> out;
  if (!std::regex_search(svg, m, re)) return out;
  std::istringstream in(m[1].str());
  std::string pair;
  while (in >> pair) {
    const auto comma = pair.find(',');
    out.emplace_back(std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1)));
  }
  return out;
}

double distance_to_polyline(std::pair<double, double> p, const std::vector<std::pair<double, double>>& line) {
  double best = INFINITY;
  for (std::size_t k = 0; k + 1 < line.size(); ++k) {
    const auto [ax, ay] = line[k];
    const auto [bx, by] = line[k + 1];
    const double dx = bx - ax, dy = by - ay, len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((p.first - ax) * dx + (p.second - ay) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, std::hypot(p.first - ax - t * dx, p.second - ay - t * dy));
  }
  return best;
}

}  // namespace

TEST_CASE("front CSV round trip") {
  const auto runs = toy_runs(20, 4);
  const ParetoFront front = front_from_trajectories(runs);
  REQUIRE_FALSE(front.empty());
  std::stringstream buf;
  write_front_csv(buf, front);
  CHECK(buf.str().rfind("x0,x1,x2,f0,f1,origin\n", 0) == 0);
  const ParetoFront back = read_front_csv(buf);
  REQUIRE(back.size() == front.size());
  for (std::size_t k = 0; k < front.size(); ++k) {
    CHECK(back.entries[k].decision == front.entries[k].decision);
    CHECK(back.entries[k].objectives == front.entries[k].objectives);
    CHECK(back.entries[k].origin == front.entries[k].origin);
  }
  // Re-filtering the loaded front changes nothing.
  const ParetoFront again = non_dominated_filter(back.entries);
  REQUIRE(again.size() == back.size());
  for (std::size_t k = 0; k < back.size(); ++k) CHECK(again.entries[k].objectives == back.entries[k].objectives);
}

TEST_CASE("malformed CSV is rejected") {
  std::istringstream empty("");
  CHECK_THROWS_AS(read_front_csv(empty), std::runtime_error);
  std::istringstream short_line("x0,f0,origin\n1,2\n");
  CHECK_THROWS_AS(read_front_csv(short_line), std::runtime_error);
  std::istringstream text("x0,f0,origin\n1,abc,s\n");
  CHECK_THROWS_AS(read_front_csv(text), std::runtime_error);
}

TEST_CASE("trajectory JSON lines cover every iterate") {
  const auto runs = toy_runs(3, 2);
  std::stringstream buf;
  write_trajectories_jsonl(buf, runs);
  std::size_t expected = 0;
  for (const auto& r : runs) expected += r.iterates.size();
  std::string line;
  std::size_t lines = 0;
  while (std::getline(buf, line)) {
    const auto j = nlohmann::json::parse(line);
    for (const char* key : {"start", "iteration", "stage", "point", "objectives", "eta", "h", "feasibility"}) {
      CHECK(j.contains(key));
    }
    const auto& it = runs[j["start"].get<std::size_t>()].iterates[j["iteration"].get<std::size_t>()];
    CHECK(j["objectives"].get<Vector>() == it.objectives);
    ++lines;
  }
  CHECK(lines == expected);
}

TEST_CASE("summary tallies account for every trajectory") {
  const auto runs = toy_runs(10, 9);
  const auto j = nlohmann::json::parse(summary_json(runs, 1.5, 7, "toy"));
  std::size_t total = 0;
  for (const auto& [name, count] : j["terminations"].items()) total += count.get<std::size_t>();
  CHECK(total == runs.size());
  CHECK(j["trajectories"] == runs.size());
  CHECK(j["front_size"] == 7);
  CHECK(j["problem"] == "toy");
  CHECK(j["starts"].size() == runs.size());
  CHECK(j["stalled"] == j["terminations"]["stalled"]);
}

TEST_CASE("plot with a single point has one marker") {
  ParetoFront f;
  f.entries.push_back({Vector{0.0}, Vector{0.5, 0.25}, "start 0"});
  const std::string svg = emit_plot(f, 0, 1);
  CHECK(markers(svg).size() == 1);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(polyline(svg).empty());
  const auto [cx, cy] = markers(svg).front();
  CHECK(cx >= 0.0);
  CHECK(cx <= kPlotWidth);
  CHECK(cy >= 0.0);
  CHECK(cy <= kPlotHeight);
}

TEST_CASE("toy front markers sit on the analytic curve") {
  const ParetoFront front = front_from_trajectories(toy_runs(50, 7));
  PlotOptions o;
  o.title = "toy <front> & curve";
  for (int k = 0; k <= 400; ++k) {
    const auto [a, b] = toy_analytic_front(-1.0 / 3.0 + (2.0 / 3.0) * k / 400.0);
    o.overlay.emplace_back(a, b);
  }
  const std::string svg = emit_plot(front, 0, 1, o);
  const auto pts = markers(svg);
  const auto line = polyline(svg);
  CHECK(pts.size() == front.size());
  REQUIRE(line.size() == o.overlay.size());
  for (const auto& p : pts) CHECK(distance_to_polyline(p, line) <= 3.0);
  CHECK(svg.find("toy &lt;front&gt; &amp; curve") != std::string::npos);
  CHECK(emit_plot(front, 0, 1, o) == svg);
}

TEST_CASE("plot preconditions") {
  CHECK_THROWS_AS(emit_plot(ParetoFront{}, 0, 1), ContractViolation);
  ParetoFront f;
  f.entries.push_back({Vector{0.0}, Vector{0.5, 0.25}, "a"});
  CHECK_THROWS_AS(emit_plot(f, 0, 2), ContractViolation);
}
