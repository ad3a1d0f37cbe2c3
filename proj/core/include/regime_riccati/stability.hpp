#pragma once

#include "regime_riccati/model.hpp"

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace regime_riccati {

enum class StabilityMethod { Dissipativity, LyapunovSpectral };

const char* to_string(StabilityMethod method);

struct StabilityVerdict {
  StabilityMethod method = StabilityMethod::Dissipativity;
  bool stable = false;
  /// Per-regime max eigenvalue (Dissipativity) or the single spectral abscissa (LyapunovSpectral).
  std::vector<double> witness;
};

/// Largest admissible L·n² for the assembled Lyapunov operator.
inline constexpr Index kMaxLyapunovDimension = 4096;

/// max eig(A(i) + A(i)ᵀ + C(i)ᵀC(i)) < -margin for every regime.
StabilityVerdict dissipativity_check(const RegimeFamily& A, const RegimeFamily& C);

/// Matrix of P ↦ (A(i)ᵀP(i) + P(i)A(i) + C(i)ᵀP(i)C(i) + Σ_j π_ij P(j)) on stacked column-major vec(P(i)).
Matrix lyapunov_operator(const RegimeFamily& A, const RegimeFamily& C, const Generator& gen);

/// Spectral abscissa of the coupled Lyapunov operator < -margin. Throws DimensionOverflow.
StabilityVerdict lyapunov_spectral_check(const RegimeFamily& A, const RegimeFamily& C, const Generator& gen);

struct StabilizerVerdict {
  StabilityVerdict spectral;
  StabilityVerdict dissipativity;

  bool stable() const { return spectral.stable; }
  double abscissa() const { return spectral.witness.front(); }
};

/// Closed loop (A + BΘ, C + DΘ) for a full m x n gain family.
std::pair<RegimeFamily, RegimeFamily> closed_loop(const Dynamics& dynamics, const RegimeFamily& Theta);

StabilizerVerdict is_stabilizer(const Dynamics& dynamics, const Generator& gen, const RegimeFamily& Theta);
/// Player-k gain (m_k x n); the other player's block is zero.
StabilizerVerdict is_stabilizer(const Dynamics& dynamics, const Generator& gen, int player,
                                const RegimeFamily& ThetaK);

/// Per player: [[Qᵏ, Sₖᵏᵀ], [Sₖᵏ, Rₖₖᵏ]] ⪰ 0 in every regime.
std::array<bool, 2> check_convexity_sufficient(const GameModel& model);

struct ConvexityConcavity {
  bool ok = false;
  double mQ = 0, MQ = 0, mR = 0, MR = 0;
  double Meps1 = 0, Meps2 = 0;
  double mu1 = 0, mu2 = 0;
};

/// Eigenvalue test for convexity in u1 and concavity in u2 of a zero-sum game.
/// Throws PreconditionViolated (S ≠ 0 or R12 ≠ 0) or OutOfScope (unless m_Q < 0 < M_Q).
ConvexityConcavity check_convexity_concavity(const GameModel& model, double eps1, double eps2);

/// Log grid over [1e-3, 1e3], 25 points per decade.
std::vector<double> epsilon_grid();

std::optional<std::pair<double, double>> search_epsilon(const GameModel& model);

}  // namespace regime_riccati
