#pragma once

#include "regime_riccati/model.hpp"

#include <array>
#include <optional>
#include <vector>

namespace regime_riccati {

/// Moore–Penrose inverse by SVD; singular values below tol·σ_max are dropped.
Matrix pinv(const Matrix& M, double tol = 1e-10);

/// Solves AL(i)ᵀP(i) + P(i)AR(i) + CL(i)ᵀP(i)CR(i) + Σ_j π_ij P(j) + rhs(i) = 0
/// by one dense vectorized solve of size L·n². Throws NotStabilizing when singular.
RegimeFamily solve_coupled_sylvester(const RegimeFamily& AL, const RegimeFamily& AR, const RegimeFamily& CL,
                                     const RegimeFamily& CR, const Matrix& pi, const RegimeFamily& rhs);

struct SolverOptions {
  double tol = 1e-10;
  int maxIterations = 500;
  /// Required when Θ = 0 is not a stabilizer. Full m x n gains.
  std::optional<RegimeFamily> initialGain;
  /// Zero-sum only: Π(i) of the gain family -𝒩†𝓛ᵀ + (I - 𝒩†𝒩)Π(i).
  std::optional<RegimeFamily> freeParameter;
};

struct NonSymCareSolution {
  RegimeFamily P1, P2;
  RegimeFamily Theta;
  RegimeFamily Sigma;
  std::vector<double> sigmaCondition;
  double residual = 0.0;
  int iterations = 0;
};

struct SymCareSolution {
  RegimeFamily P1, P2;
  RegimeFamily Theta1, Theta2;
  /// (Θ̂₁; Θ̂₂) stacked.
  RegimeFamily Theta;
  /// Min eigenvalue of 𝒩₁₁¹(P₁,i) and 𝒩₂₂²(P₂,i) per regime.
  std::vector<double> n11Min, n22Min;
  double residual = 0.0;
  int iterations = 0;
};

struct ZeroSumCareSolution {
  RegimeFamily P;
  RegimeFamily Theta;
  double residual = 0.0;
  int iterations = 0;
  bool n11Ok = false;
  bool n22Ok = false;
  bool rangeOk = false;

  bool signOk() const { return n11Ok && n22Ok; }
};

/// Frobenius residuals per regime; index [i][k] is player k (zero-sum uses k = 0).
struct ResidualReport {
  std::vector<std::array<double, 2>> equation;
  std::vector<std::array<double, 2>> constraint;
  double maxEquation = 0.0;
  double maxConstraint = 0.0;

  double max() const { return maxEquation > maxConstraint ? maxEquation : maxConstraint; }
};

/// Open-loop representation (nonsymmetric) CAREs.
NonSymCareSolution solve_open_rep_cares(const GameModel& model, const SolverOptions& opts = {});
/// Cross-coupled symmetric CAREs of the closed-loop Nash equilibrium.
SymCareSolution solve_closed_nash_cares(const GameModel& model, const SolverOptions& opts = {});
/// 𝓜(P,i) - 𝓛(P,i)𝒩(P,i)†𝓛(P,i)ᵀ = 0 with range condition.
ZeroSumCareSolution solve_zero_sum_care(const GameModel& model, const SolverOptions& opts = {});

ResidualReport open_rep_residuals(const GameModel& model, const RegimeFamily& P1, const RegimeFamily& P2,
                                  const RegimeFamily& Theta);
ResidualReport closed_nash_residuals(const GameModel& model, const RegimeFamily& P1, const RegimeFamily& P2,
                                     const RegimeFamily& Theta);
/// Equation uses the Θ-free form; constraint is 𝒩Θ + 𝓛ᵀ.
ResidualReport zero_sum_residuals(const GameModel& model, const RegimeFamily& P, const RegimeFamily& Theta);

ResidualReport care_residuals(const GameModel& model, const NonSymCareSolution& sol);
ResidualReport care_residuals(const GameModel& model, const SymCareSolution& sol);
ResidualReport care_residuals(const GameModel& model, const ZeroSumCareSolution& sol);

/// Building blocks shared with `synthesis`.
/// 𝓛ᵏ(P,i) = P B + Cᵀ P D + Sᵏᵀ (n x m) and 𝒩ᵏ(P,i) = Dᵀ P D + Rᵏ (m x m).
Matrix care_L(const GameModel& model, int player, const Matrix& P, int i);
Matrix care_N(const GameModel& model, int player, const Matrix& P, int i);
/// Stacked constraint rows of both players: Σ(i) (m x m) and right-hand side (m x n)
/// so that the gain is -Σ⁻¹ rhs.
std::pair<Matrix, Matrix> stacked_constraint(const GameModel& model, const Matrix& P1, const Matrix& P2, int i);

}  // namespace regime_riccati
