#pragma once

#include "regime_riccati/care.hpp"
#include "regime_riccati/model.hpp"

#include <array>
#include <optional>
#include <vector>

namespace regime_riccati {

/// ν(t) = exp(-λt) ν̄(α_t).
struct Offset {
  double lambda = 0.0;
  RegimeFamily nuBar;
};

/// Feedback u = Θ(α)X + ν.
struct StrategyPair {
  RegimeFamily Theta;
  std::optional<Offset> nu;
};

/// η(t) = exp(-λt) η̄(α_t), ζ ≡ 0. One family per player (a single one for zero-sum).
struct EtaSolution {
  double lambda = 0.0;
  std::vector<RegimeFamily> etaBar;
  double residual = 0.0;

  /// z_j(t) = exp(-λt)(η̄(j) - η̄(α_{t-})).
  Vector zJump(int player, int j, int from, double t) const;
};

EtaSolution solve_eta(const GameModel& model, const NonSymCareSolution& sol);
EtaSolution solve_eta(const GameModel& model, const SymCareSolution& sol);
EtaSolution solve_eta(const GameModel& model, const ZeroSumCareSolution& sol);

/// Θ* recomputed from (P₁, P₂); ν* from η when the model is inhomogeneous.
StrategyPair open_rep_strategy(const GameModel& model, const NonSymCareSolution& sol);
StrategyPair closed_nash_strategy(const GameModel& model, const SymCareSolution& sol);
/// Θ* = -𝒩†𝓛ᵀ + (I - 𝒩†𝒩)Π(i); ν* = -𝒩†ρ̃.
StrategyPair zero_sum_strategy(const GameModel& model, const ZeroSumCareSolution& sol,
                               const std::optional<RegimeFamily>& Pi = std::nullopt);

double value_homogeneous(const RegimeFamily& P, const Vector& x, int i);

/// ∫₀^∞ exp(-2λt) E[g(α_t) | α₀ = ·] dt = (2λI - Π)⁻¹ g.
Vector resolvent_integral(const Generator& gen, double lambda, const Vector& g);

double value_inhomogeneous(const GameModel& model, const ZeroSumCareSolution& sol, const EtaSolution& eta,
                           const Vector& x, int i);
std::array<double, 2> value_inhomogeneous(const GameModel& model, const SymCareSolution& sol,
                                          const EtaSolution& eta, const Vector& x, int i);

/// Per-player decoupling fields: Y_k = P_k(α)X + η_k, Z_k = P_k(α)(CX + Du + σ).
struct Decoupling {
  std::array<RegimeFamily, 2> P;
  std::optional<std::array<RegimeFamily, 2>> etaBar;
  double lambda = 0.0;
};

Decoupling make_decoupling(const NonSymCareSolution& sol, const std::optional<EtaSolution>& eta = std::nullopt);
Decoupling make_decoupling(const SymCareSolution& sol, const std::optional<EtaSolution>& eta = std::nullopt);
/// Zero-sum: P₁ = P, P₂ = -P.
Decoupling make_decoupling(const ZeroSumCareSolution& sol, const std::optional<EtaSolution>& eta = std::nullopt);

/// Max over players of |B_kᵀY_k + D_kᵀZ_k + S_kᵏX + R_kᵏu + ρ_kᵏ|.
double stationarity_residual(const GameModel& model, const Decoupling& dec, double t, int i, const Vector& X,
                             const Vector& u);

/// Y_k at (t, i, X).
Vector adjoint_state(const Decoupling& dec, int player, double t, int i, const Vector& X);
/// Γ_j = [P_k(j) - P_k(from)]X.
Vector jump_term(const Decoupling& dec, int player, int from, int to, const Vector& X);

}  // namespace regime_riccati
