#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "cmgd/problems.hpp"

namespace cmgd {
namespace {

bool parse_double(std::string_view token, double& out) {
  const char* end = token.data() + token.size();
  const auto r = std::from_chars(token.data(), end, out);
  return r.ec == std::errc() && r.ptr == end && std::isfinite(out);
}

struct RegimeData {
  Vector density;
  Vector speed;
  Vector weight;
};

Function regime_objective(std::shared_ptr<const RegimeData> data, std::size_t regime) {
  const std::size_t ia = 2 * regime, ib = 2 * regime + 1;
  Function f;
  f.name = "sse" + std::to_string(regime + 1);
  f.value = [data, ia, ib](std::span<const double> p) {
    double s = 0.0;
    for (std::size_t i = 0; i < data->density.size(); ++i) {
      const double r = data->speed[i] - (p[ia] - p[ib] * data->density[i]);
      s += data->weight[i] * r * r;
    }
    return s;
  };
  f.gradient = [data, ia, ib](std::span<const double> p) {
    Vector g(p.size(), 0.0);
    for (std::size_t i = 0; i < data->density.size(); ++i) {
      const double wr = data->weight[i] * (data->speed[i] - (p[ia] - p[ib] * data->density[i]));
      g[ia] -= 2.0 * wr;
      g[ib] += 2.0 * wr * data->density[i];
    }
    return g;
  };
  return f;
}

}  // namespace

SpeedDensityDataset load_speed_density(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open speed-density file '" + path.string() + "'");
  SpeedDensityDataset data;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string tok; fields >> tok;) tokens.push_back(tok);
    auto warn = [&](const std::string& why) {
      data.warnings.push_back("line " + std::to_string(number) + ": " + why);
    };
    if (tokens.size() < 3) {
      warn("expected 3 columns, found " + std::to_string(tokens.size()));
      continue;
    }
    SpeedDensityRecord rec;
    if (!parse_double(tokens[0], rec.flow) || !parse_double(tokens[1], rec.density) ||
        !parse_double(tokens[2], rec.speed)) {
      warn("non-numeric field");
      continue;
    }
    if (!(rec.density > 0.0) || rec.speed < 0.0) {
      warn("density must be positive and speed nonnegative");
      continue;
    }
    data.records.push_back(rec);
    data.max_density = std::max(data.max_density, rec.density);
  }
  if (in.bad()) throw LoadError("read error in '" + path.string() + "'");
  if (data.records.empty()) {
    std::string msg = "no valid records in '" + path.string() + "'";
    if (!data.warnings.empty()) msg += " (" + data.warnings.front() + ")";
    throw LoadError(msg);
  }
  return data;
}

void save_speed_density(const std::filesystem::path& path, const SpeedDensityDataset& data) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write '" + path.string() + "'");
  out << "# flow density speed\n";
  char buf[96];
  for (const auto& r : data.records) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", r.flow, r.density, r.speed);
    out << buf;
  }
  if (!out) throw LoadError("write failed for '" + path.string() + "'");
}

int fd_regime(double density, const FdBreakpoints& bp) {
  if (density <= bp.first) return 0;
  if (density <= bp.second) return 1;
  return 2;
}

double fd_model_speed(const FdModelParams& p, double density, const FdBreakpoints& bp) {
  const int r = fd_regime(density, bp);
  return p[2 * r] - p[2 * r + 1] * density;
}

SpeedDensityDataset synthetic_speed_density(const FdModelParams& params, std::size_t count,
                                            double noise_sigma, std::uint64_t seed,
                                            double max_density, const FdBreakpoints& bp) {
  if (count < 3) throw ContractViolation("synthetic_speed_density: need at least 3 records");
  if (!(max_density > bp.second)) throw ContractViolation("synthetic_speed_density: max_density must exceed the second breakpoint");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, noise_sigma > 0.0 ? noise_sigma : 1.0);
  SpeedDensityDataset data;
  data.records.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double rho;
    if (i < 3) {
      // One guaranteed record per regime; the last sits at max_density.
      rho = i == 0 ? 0.5 * bp.first : i == 1 ? 0.5 * (bp.first + bp.second) : max_density;
    } else {
      const double u = unit(rng);
      if (u < 0.6) rho = bp.first * (0.02 + 0.98 * unit(rng));
      else if (u < 0.85) rho = bp.first + (bp.second - bp.first) * unit(rng);
      else rho = bp.second + (max_density - bp.second) * unit(rng);
      rho = std::min(std::max(rho, 1e-3), max_density);
    }
    double v = fd_model_speed(params, rho, bp);
    if (noise_sigma > 0.0) v += noise(rng);
    v = std::max(v, 0.0);
    data.records.push_back({rho * v, rho, v});
    data.max_density = std::max(data.max_density, rho);
  }
  return data;
}

Vector compute_bin_weights(const SpeedDensityDataset& data, double bin_width) {
  if (!(bin_width > 0.0)) throw ContractViolation("compute_bin_weights: bin_width must be positive");
  const std::size_t n = data.records.size();
  std::map<long long, std::size_t> counts;
  std::vector<long long> bin(n);
  for (std::size_t i = 0; i < n; ++i) {
    bin[i] = static_cast<long long>(std::floor(data.records[i].density / bin_width));
    ++counts[bin[i]];
  }
  Vector w(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = static_cast<double>(n) / (static_cast<double>(counts[bin[i]]) * static_cast<double>(counts.size()));
    total += w[i];
  }
  for (auto& v : w) v *= static_cast<double>(n) / total;
  return w;
}

LinearConstraints fd_constraint_rows(double max_density, const FdBreakpoints& bp) {
  const double r1 = bp.first, r2 = bp.second, rm = max_density;
  // Parameter order (a1, b1, a2, b2, a3, b3); every row reads A p <= 0.
  Matrix a{
      {-1.0, 0.0, 0.0, 0.0, 0.0, 0.0},                 // a1 >= 0
      {0.0, -1.0, 0.0, 0.0, 0.0, 0.0},                 // b1 >= 0
      {-1.0, r1, 0.0, 0.0, 0.0, 0.0},                  // v1(r1) >= 0
      {-1.0, r1, 1.0, -r1, 0.0, 0.0},                  // v1(r1) >= v2(r1)
      {0.0, 0.0, 0.0, -(r2 - r1), 0.0, 0.0},           // v2 decreasing on [r1, r2]
      {0.0, 0.0, -1.0, r2, 1.0, -r2},                  // v2(r2) >= v3(r2)
      {0.0, 0.0, 0.0, 0.0, 0.0, -(rm - r2)},           // v3 decreasing on [r2, max]
      {0.0, 0.0, 0.0, 0.0, -1.0, rm},                  // v3(max) >= 0
  };
  return LinearConstraints{std::move(a), Vector(8, 0.0)};
}

ProblemSpec fd_problem(const SpeedDensityDataset& data, const FdBreakpoints& bp,
                       const WeightingScheme& weighting) {
  if (!(bp.first < bp.second)) throw ContractViolation("fd_problem: breakpoints must increase");
  if (!(data.max_density > bp.second)) {
    throw ContractViolation("fd_problem: largest density must exceed the second breakpoint");
  }
  const Vector w = weighting.kind == WeightingScheme::Kind::Uniform
                       ? Vector(data.records.size(), 1.0)
                       : compute_bin_weights(data, weighting.bin_width);
  std::array<RegimeData, 3> regimes;
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    auto& r = regimes[fd_regime(data.records[i].density, bp)];
    r.density.push_back(data.records[i].density);
    r.speed.push_back(data.records[i].speed);
    r.weight.push_back(w[i]);
  }
  static const char* names[] = {"free-flow (density <= first breakpoint)",
                                "transition (between breakpoints)",
                                "congested (density > second breakpoint)"};
  std::vector<Function> objectives;
  for (std::size_t r = 0; r < 3; ++r) {
    if (regimes[r].density.empty()) {
      throw ContractViolation(std::string("fd_problem: regime ") + std::to_string(r + 1) + " " +
                              names[r] + " has no records");
    }
    objectives.push_back(regime_objective(std::make_shared<const RegimeData>(std::move(regimes[r])), r));
  }
  return ProblemSpec(6, std::move(objectives), fd_constraint_rows(data.max_density, bp));
}

Matrix fd_metric(const SpeedDensityDataset& data, const FdBreakpoints& bp, const WeightingScheme& weighting) {
  const Vector w = weighting.kind == WeightingScheme::Kind::Uniform
                       ? Vector(data.records.size(), 1.0)
                       : compute_bin_weights(data, weighting.bin_width);
  std::array<std::array<double, 3>, 3> h{};  // per regime: sum w, sum w rho, sum w rho^2
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    const double rho = data.records[i].density;
    auto& acc = h[fd_regime(rho, bp)];
    acc[0] += w[i];
    acc[1] += w[i] * rho;
    acc[2] += w[i] * rho * rho;
  }
  Matrix p(6, 6);
  for (std::size_t r = 0; r < 3; ++r) {
    const auto [s0, s1, s2] = h[r];
    if (!(s0 > 0.0)) throw ContractViolation("fd_metric: regime " + std::to_string(r + 1) + " has no records");
    // Cholesky of [[s0, -s1], [-s1, s2]] and the inverse transpose of its factor.
    const double l11 = std::sqrt(s0);
    const double l21 = -s1 / l11;
    const double l22 = std::sqrt(std::max(s2 - l21 * l21, 1e-12 * s2 + 1e-300));
    p(2 * r, 2 * r) = 1.0 / l11;
    p(2 * r, 2 * r + 1) = -l21 / (l11 * l22);
    p(2 * r + 1, 2 * r + 1) = 1.0 / l22;
  }
  return p;
}

FdModelParams fd_random_feasible_params(std::mt19937_64& rng, double max_density, const FdBreakpoints& bp) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Speeds at 0, r1 (both sides), r2 (both sides) and max, each at most the previous.
  const double s0 = 40.0 + 60.0 * unit(rng);
  const double s1 = s0 * unit(rng);
  const double s2 = s1 * unit(rng);
  const double s3 = s2 * unit(rng);
  const double s4 = s3 * unit(rng);
  const double s5 = s4 * unit(rng);
  const double b1 = (s0 - s1) / bp.first;
  const double b2 = (s2 - s3) / (bp.second - bp.first);
  const double b3 = (s4 - s5) / (max_density - bp.second);
  return {s0, b1, s2 + b2 * bp.first, b2, s4 + b3 * bp.second, b3};
}

}  // namespace cmgd
