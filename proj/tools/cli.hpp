#pragma once

// Front end of the cmgd command: flag parsing, problem construction, the
// multi-start run and artifact output. Split from main() so tests can drive
// it in-process.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "cmgd/driver.hpp"

namespace cmgd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;

struct RunConfig {
  std::string problem = "toy";  ///< toy | fd | portfolio | path to a JSON problem file
  std::size_t starts = 50;
  std::uint64_t seed = 7;
  SolveOptions solve;
  std::filesystem::path out = ".";
  bool plot = false;

  std::string fd_data = "synthetic";  ///< path to a speed-density file, or "synthetic"
  std::size_t fd_records = 500;
  double fd_noise = 2.0;
  double weight_bin_width = 5.0;  ///< 0 selects uniform weights

  std::size_t portfolio_n = 200;
  std::size_t portfolio_m = 10;
  std::uint64_t portfolio_seed = 1;
};

/// Runs `cmgd run ...`. Returns the process exit code; messages go to `log`
/// and errors to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& log, std::ostream& err);

/// Executes a parsed configuration. Configuration errors return kExitConfig
/// before anything is written.
int run(const RunConfig& config, std::ostream& log, std::ostream& err);

}  // namespace cmgd::cli
