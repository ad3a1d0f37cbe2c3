#pragma once

#include "regime_riccati/chain.hpp"
#include "regime_riccati/types.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace regime_riccati {

/// Regime-switching state equation coefficients.
struct Dynamics {
  int n = 0;
  int m1 = 0;
  int m2 = 0;
  RegimeFamily A, B1, B2, C, D1, D2;

  int regimes() const { return A.size(); }
  int m() const { return m1 + m2; }
  /// (B1, B2) and (D1, D2) concatenated column-wise.
  Matrix B(int i) const;
  Matrix D(int i) const;
  /// Input matrix of player k in {0, 1}.
  const Matrix& Bk(int k, int i) const { return k == 0 ? B1[i] : B2[i]; }
  const Matrix& Dk(int k, int i) const { return k == 0 ? D1[i] : D2[i]; }
};

/// Quadratic cost of one player; R21 is implied as R12ᵀ.
struct CostBlock {
  RegimeFamily Q, S1, S2, R11, R12, R22;

  static CostBlock zeros(int regimes, int n, int m1, int m2);

  /// Stacked (S1; S2), m x n.
  Matrix S(int i) const;
  /// [[R11, R12], [R12ᵀ, R22]], m x m.
  Matrix R(int i) const;
  CostBlock operator-() const;
};

/// Damped regime-modulated forcing: b(t) = exp(-λt) bBar(α_t), and likewise for σ, q, ρ.
struct Inhomogeneity {
  double lambda = 1.0;
  RegimeFamily bBar, sigmaBar;
  /// qBar[k] is the linear state cost of player k.
  std::array<RegimeFamily, 2> qBar;
  /// rho1Bar[k] and rho2Bar[k] are the linear costs of u1 and u2 for player k.
  std::array<RegimeFamily, 2> rho1Bar, rho2Bar;

  static Inhomogeneity zeros(int regimes, int n, int m1, int m2, double lambda);

  /// (ρ₁ᵏ; ρ₂ᵏ) stacked, m x 1.
  Vector rho(int player, int i) const;
  bool is_zero() const;
};

enum class GameKind { NonZeroSum, ZeroSum };

struct GameModel {
  Dynamics dynamics;
  CostBlock cost1, cost2;
  Generator generator;
  std::optional<Inhomogeneity> inhomogeneity;
  GameKind kind = GameKind::NonZeroSum;

  int regimes() const { return dynamics.regimes(); }
  int n() const { return dynamics.n; }
  int m() const { return dynamics.m(); }
  const CostBlock& cost(int player) const { return player == 0 ? cost1 : cost2; }
};

struct Violation {
  std::string kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

/// Report-style structural check; never throws, never mutates.
ValidationReport validate(const GameModel& model);

/// Validates (throws InvalidModel on violations) and symmetrizes Q, R11, R22.
GameModel normalized(const GameModel& model);

/// Zero-sum game: cost2 is the exact negation of `cost`, and the forcing's
/// player-2 terms are the negation of player 1's.
GameModel embed_zero_sum(Dynamics dynamics, Generator generator, const CostBlock& cost,
                         std::optional<Inhomogeneity> inhomogeneity = std::nullopt);

}  // namespace regime_riccati
