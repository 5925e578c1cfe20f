#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "config.hpp"

namespace centerward::cli {

enum ExitCode { kOk = 0, kUsage = 1, kDiagnosticFailure = 2, kConvergence = 3 };

struct Overrides {
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

/// Loads the config and applies, in increasing precedence, CENTERWARD_THREADS
/// and the command-line flags. Sets the solver thread count.
RunConfig resolve_config(const std::filesystem::path& path, const Overrides& o);

/// Hash of the fields that determine the solve (density, backend, solver
/// parameters, seed); stored in map.json to detect stale artifacts.
std::string solve_hash(const RunConfig& cfg);

/// Runs the configured backend. Throws ConvergenceError when it runs out of iterations.
QuantileMap solve_map(const RunConfig& cfg, const Density& density, std::ostream* log);

/// Exclusive claim on an output directory through an O_EXCL lockfile.
class OutputLock {
 public:
  explicit OutputLock(const std::filesystem::path& dir);
  ~OutputLock();
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  std::filesystem::path file_;
};

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
/// Empty radii use the config's list.
int cmd_contours(const RunConfig& cfg, std::vector<double> radii, bool inline_solve, std::ostream& out,
                 std::ostream& err);
int cmd_verify(const RunConfig& cfg, bool inline_solve, bool corrupt_potential, std::ostream& out, std::ostream& err);
int cmd_oracle_compare(const RunConfig& cfg, bool inline_solve, std::ostream& out, std::ostream& err);

}  // namespace centerward::cli
