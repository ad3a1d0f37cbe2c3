#pragma once

#include <regime_riccati/io.hpp>

#include <string>
#include <vector>

namespace regime_riccati::cli {

enum Exit : int { kOk = 0, kValidation = 2, kIo = 3, kSolver = 4, kStabilityRefusal = 5 };

/// Maps library errors to process exit codes.
int exit_code_for(ErrorCode code);

struct ReproduceOptions {
  /// Monte Carlo paths per closed loop; 0 skips the cross-check.
  int paths = 400;
  double dt = 1e-3;
  double T = 10.0;
  std::uint64_t seed = 1;
};

struct Stage {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct DiffRow {
  std::string mode;
  std::string family;
  int regime = 0;
  Index row = 0;
  Index col = 0;
  double computed = 0.0;
  double reference = 0.0;

  double diff() const { return computed - reference; }
};

struct ReproduceResult {
  int id = 0;
  std::vector<Stage> stages;
  std::vector<DiffRow> diffs;
  double maxDiff = 0.0;
  double maxResidual = 0.0;
  double seconds = 0.0;

  bool stages_ok() const;
  int exit_code() const;
  Json to_json() const;
};

constexpr double kDiffTolerance = 1e-3;
constexpr double kResidualTolerance = 1e-8;

ReproduceResult reproduce(int id, const ReproduceOptions& opts = {});

/// Console diff table, 6 decimals.
std::string format_reproduce(const ReproduceResult& r);

int run(int argc, char** argv);

}  // namespace regime_riccati::cli
