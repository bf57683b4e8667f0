#include "cmgd/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cmgd {
namespace {

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string pixel(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round step for about `count` intervals over `span`: 1, 2 or 5 times a power of ten.
double tick_step(double span, int count) {
  const double raw = span / count;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
}

struct Axis {
  double lo, hi;
  double pixel_lo, pixel_hi;

  double map(double v) const { return pixel_lo + (v - lo) / (hi - lo) * (pixel_hi - pixel_lo); }
};

Axis make_axis(double lo, double hi, double pixel_lo, double pixel_hi) {
  if (!(hi > lo)) {
    const double pad = std::max(1e-12, 0.5 * std::abs(lo));
    lo -= pad;
    hi += pad;
  } else {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  return {lo, hi, pixel_lo, pixel_hi};
}

}  // namespace

ParetoFront front_from_trajectories(const std::vector<Trajectory>& runs) {
  std::vector<ParetoEntry> entries;
  entries.reserve(runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (runs[i].iterates.empty()) continue;
    const Iterate& last = runs[i].final();
    entries.push_back({last.point, last.objectives, "start " + std::to_string(i)});
  }
  return non_dominated_filter(std::move(entries));
}

void write_front_csv(std::ostream& out, const ParetoFront& front) {
  const std::size_t d = front.empty() ? 0 : front.entries.front().decision.size();
  const std::size_t n = front.empty() ? 0 : front.entries.front().objectives.size();
  for (std::size_t j = 0; j < d; ++j) out << 'x' << j << ',';
  for (std::size_t t = 0; t < n; ++t) out << 'f' << t << ',';
  out << "origin\n";
  for (const auto& e : front.entries) {
    for (double v : e.decision) out << number(v) << ',';
    for (double v : e.objectives) out << number(v) << ',';
    out << csv_field(e.origin) << '\n';
  }
}

ParetoFront read_front_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("front csv: missing header");
  const auto header = split_csv(line);
  std::size_t d = 0, n = 0;
  for (const auto& h : header) {
    if (!h.empty() && h[0] == 'x') ++d;
    else if (!h.empty() && h[0] == 'f') ++n;
  }
  if (header.empty() || header.back() != "origin" || d + n + 1 != header.size()) {
    throw std::runtime_error("front csv: unexpected header '" + line + "'");
  }
  ParetoFront front;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw std::runtime_error("front csv: line " + std::to_string(lineno) + " has " +
                               std::to_string(fields.size()) + " fields");
    }
    ParetoEntry e;
    for (std::size_t k = 0; k < d + n; ++k) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(fields[k], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != fields[k].size() || fields[k].empty()) {
        throw std::runtime_error("front csv: line " + std::to_string(lineno) + " field " + std::to_string(k + 1) +
                                 " is not a number");
      }
      (k < d ? e.decision : e.objectives).push_back(v);
    }
    e.origin = fields.back();
    front.entries.push_back(std::move(e));
  }
  return front;
}

void write_trajectories_jsonl(std::ostream& out, const std::vector<Trajectory>& runs) {
  for (std::size_t s = 0; s < runs.size(); ++s) {
    const auto& its = runs[s].iterates;
    for (std::size_t k = 0; k < its.size(); ++k) {
      nlohmann::json j;
      j["start"] = s;
      j["iteration"] = k;
      j["stage"] = std::string(to_string(its[k].stage));
      j["point"] = its[k].point;
      j["objectives"] = its[k].objectives;
      j["eta"] = its[k].eta;
      j["h"] = its[k].h;
      j["feasibility"] = its[k].feasibility;
      out << j.dump() << '\n';
    }
  }
}

std::string summary_json(const std::vector<Trajectory>& runs, double wall_seconds, std::size_t front_size,
                         const std::string& problem_label) {
  nlohmann::json j;
  j["problem"] = problem_label;
  j["trajectories"] = runs.size();
  j["front_size"] = front_size;
  j["wall_seconds"] = wall_seconds;
  std::map<std::string, std::size_t> tally;
  for (Termination t : {Termination::WeakStationaryThenStationary, Termination::MaxIterStage1,
                        Termination::MaxIterStage2, Termination::Stalled}) {
    tally[std::string(to_string(t))] = 0;
  }
  nlohmann::json starts = nlohmann::json::array();
  for (std::size_t s = 0; s < runs.size(); ++s) {
    const auto& r = runs[s];
    ++tally[std::string(to_string(r.termination))];
    nlohmann::json e;
    e["start"] = s;
    e["termination"] = std::string(to_string(r.termination));
    e["stage1_steps"] = r.stage1_steps;
    e["stage2_steps"] = r.stage2_steps;
    e["stage1_certified"] = r.stage1_certified;
    e["stage2_certified"] = r.stage2_certified;
    e["stage1_eta"] = r.stage1_eta;
    e["stage2_eta"] = r.stage2_eta;
    if (!r.diagnostics.empty()) e["diagnostics"] = r.diagnostics;
    starts.push_back(std::move(e));
  }
  j["terminations"] = tally;
  j["stalled"] = tally["stalled"];
  j["starts"] = std::move(starts);
  return j.dump(2) + "\n";
}

std::string emit_plot(const ParetoFront& front, std::size_t i, std::size_t j, const PlotOptions& opts) {
  if (front.empty()) throw ContractViolation("emit_plot: empty front");
  for (const auto& e : front.entries) {
    if (i >= e.objectives.size() || j >= e.objectives.size()) {
      throw ContractViolation("emit_plot: objective index out of range");
    }
  }
  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  auto extend = [&](double x, double y) {
    xlo = std::min(xlo, x);
    xhi = std::max(xhi, x);
    ylo = std::min(ylo, y);
    yhi = std::max(yhi, y);
  };
  for (const auto& e : front.entries) extend(e.objectives[i], e.objectives[j]);
  for (const auto& [x, y] : opts.overlay) extend(x, y);

  constexpr double left = 80.0, right = 24.0, top = 40.0, bottom = 56.0;
  const Axis ax = make_axis(xlo, xhi, left, kPlotWidth - right);
  const Axis ay = make_axis(ylo, yhi, kPlotHeight - bottom, top);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kPlotWidth << "\" height=\"" << kPlotHeight
      << "\" viewBox=\"0 0 " << kPlotWidth << ' ' << kPlotHeight << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << kPlotWidth << "\" height=\"" << kPlotHeight << "\" fill=\"white\"/>\n";
  if (!opts.title.empty()) {
    svg << "<text x=\"" << pixel(kPlotWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"15\">" << xml_escape(opts.title) << "</text>\n";
  }
  // Frame and ticks.
  svg << "<g stroke=\"#333\" fill=\"none\"><rect x=\"" << pixel(left) << "\" y=\"" << pixel(top) << "\" width=\""
      << pixel(kPlotWidth - left - right) << "\" height=\"" << pixel(kPlotHeight - top - bottom) << "\"/></g>\n";
  svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  const double sx = tick_step(ax.hi - ax.lo, 5);
  for (double v = std::ceil(ax.lo / sx) * sx; v <= ax.hi + 1e-9 * sx; v += sx) {
    const double px = ax.map(v);
    const double shown = std::abs(v) < 1e-9 * sx ? 0.0 : v;
    svg << "<line x1=\"" << pixel(px) << "\" y1=\"" << pixel(ay.pixel_lo) << "\" x2=\"" << pixel(px) << "\" y2=\""
        << pixel(ay.pixel_lo + 5) << "\" stroke=\"#333\"/><text x=\"" << pixel(px) << "\" y=\""
        << pixel(ay.pixel_lo + 18) << "\" text-anchor=\"middle\">" << short_number(shown) << "</text>\n";
  }
  const double sy = tick_step(ay.hi - ay.lo, 5);
  for (double v = std::ceil(ay.lo / sy) * sy; v <= ay.hi + 1e-9 * sy; v += sy) {
    const double py = ay.map(v);
    const double shown = std::abs(v) < 1e-9 * sy ? 0.0 : v;
    svg << "<line x1=\"" << pixel(ax.pixel_lo - 5) << "\" y1=\"" << pixel(py) << "\" x2=\"" << pixel(ax.pixel_lo)
        << "\" y2=\"" << pixel(py) << "\" stroke=\"#333\"/><text x=\"" << pixel(ax.pixel_lo - 8) << "\" y=\""
        << pixel(py + 4) << "\" text-anchor=\"end\">" << short_number(shown) << "</text>\n";
  }
  const std::string xl = opts.x_label.empty() ? "f" + std::to_string(i + 1) : opts.x_label;
  const std::string yl = opts.y_label.empty() ? "f" + std::to_string(j + 1) : opts.y_label;
  svg << "<text x=\"" << pixel((ax.pixel_lo + ax.pixel_hi) / 2) << "\" y=\"" << pixel(kPlotHeight - 14)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(xl) << "</text>\n";
  svg << "<text x=\"18\" y=\"" << pixel((ay.pixel_lo + ay.pixel_hi) / 2) << "\" text-anchor=\"middle\" "
      << "font-size=\"13\" transform=\"rotate(-90 18 " << pixel((ay.pixel_lo + ay.pixel_hi) / 2) << ")\">"
      << xml_escape(yl) << "</text>\n</g>\n";

  if (!opts.overlay.empty()) {
    svg << "<polyline class=\"overlay\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < opts.overlay.size(); ++k) {
      if (k) svg << ' ';
      svg << pixel(ax.map(opts.overlay[k].first)) << ',' << pixel(ay.map(opts.overlay[k].second));
    }
    svg << "\"/>\n";
  }
  svg << "<g fill=\"#1f77b4\" fill-opacity=\"0.8\">\n";
  for (const auto& e : front.entries) {
    svg << "<circle class=\"marker\" cx=\"" << pixel(ax.map(e.objectives[i])) << "\" cy=\""
        << pixel(ay.map(e.objectives[j])) << "\" r=\"3\"/>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace cmgd
