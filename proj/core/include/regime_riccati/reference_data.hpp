#pragma once

#include "regime_riccati/model.hpp"

#include <string>
#include <vector>

namespace regime_riccati {

/// Generator shared by the three reference examples.
Matrix builtin_generator();

/// Published example models (id 1, 2 or 3).
GameModel builtin_example(int id);

struct ReferenceFamily {
  std::string name;
  RegimeFamily values;
};

/// One reference solve: mode is "open-rep", "closed-nash" or "zero-sum".
struct ReferenceSolve {
  std::string mode;
  std::vector<ReferenceFamily> families;
};

/// Six-decimal reference tables for an example.
std::vector<ReferenceSolve> reference_tables(int id);

}  // namespace regime_riccati
