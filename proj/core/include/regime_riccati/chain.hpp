#pragma once

#include "regime_riccati/types.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace regime_riccati {

/// Transition-rate matrix of a finite continuous-time Markov chain.
struct Generator {
  Matrix pi;

  int size() const { return static_cast<int>(pi.rows()); }
  double exit_rate(int i) const { return -pi(i, i); }
};

/// Human-readable list of generator defects; empty when valid.
std::vector<std::string> generator_issues(const Matrix& pi);

/// Throws NegativeOffDiagonal or RowSumNonzero.
Generator validate_generator(const Matrix& pi);

/// Right-continuous piecewise-constant regime path on [0, horizon].
/// times[0] = 0 holds the initial regime; later entries are jump times.
struct RegimePath {
  std::vector<double> times;
  std::vector<int> regimes;
  double horizon = 0.0;

  int regime_at(double t) const;
  std::size_t jumps() const { return times.empty() ? 0 : times.size() - 1; }
  /// `t,regime` rows (regimes 1-based).
  std::string to_csv() const;
};

/// Engine for the stream identified by (seed, stream, index); independent of call order.
std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

RegimePath sample_path(const Generator& gen, int i0, double T, std::mt19937_64& engine);
RegimePath sample_path(const Generator& gen, int i0, double T, std::uint64_t seed);

/// Throws Reducible when the null space of Πᵀ is not one-dimensional.
Vector stationary_distribution(const Generator& gen);

}  // namespace regime_riccati
