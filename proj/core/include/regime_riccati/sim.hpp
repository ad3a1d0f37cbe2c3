#pragma once

#include "regime_riccati/chain.hpp"
#include "regime_riccati/model.hpp"
#include "regime_riccati/synthesis.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace regime_riccati {

struct SimConfig {
  double dt = 1e-3;
  double T = 10.0;
  int paths = 10000;
  std::uint64_t seed = 1;
  bool antithetic = false;
  /// Simulate even when the loop is certified unstable.
  bool force = false;
  /// 0 picks the default from REGIME_RICCATI_THREADS or the hardware.
  int threads = 0;
  /// Keep the first path's trajectory in the report.
  bool recordTrajectory = false;
  /// Stationarity residual sampled every this many grid points and at regime changes.
  int residualStride = 10;
};

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
};

struct TrajectoryRow {
  double t = 0.0;
  int regime = 0;
  Vector X;
  Vector u;
};

struct SimReport {
  std::array<Estimate, 2> cost;
  Estimate l2Norm;
  Estimate tailMass;
  std::optional<double> stationarityResidual;
  std::uint64_t seed = 0;
  int paths = 0;
  double dt = 0.0;
  double T = 0.0;
  bool antithetic = false;
  std::vector<TrajectoryRow> trajectory;
};

/// Closed-loop coefficients per regime, with running costs folded into
/// f_k = XᵀQ̄X + 2e^{-λt}ℓ̄ᵀX + e^{-2λt}c̄.
struct ClosedLoopSystem {
  int n = 0;
  int m = 0;
  double lambda = 0.0;
  std::vector<Matrix> Acl, Ccl, Theta;
  std::vector<Vector> drift, diffusion, nu;
  std::array<std::vector<Matrix>, 2> Qbar;
  std::array<std::vector<Vector>, 2> lbar;
  std::array<std::vector<double>, 2> cbar;
};

ClosedLoopSystem compile_closed_loop(const GameModel& model, const StrategyPair& strategy);

/// Uniform grid k·dt merged with the path's jump times, ending at the horizon.
std::vector<double> make_grid(const RegimePath& path, double dt);

struct PathOutcome {
  std::array<double, 2> cost{};
  double l2 = 0.0;
  double tail = 0.0;
};

using PathObserver = std::function<void(double t, int regime, const Vector& X, const Vector& u)>;

/// Euler–Maruyama on the given grid with Brownian increments dW[j] over [times[j], times[j+1]].
PathOutcome integrate_path(const ClosedLoopSystem& sys, const Vector& x0, const RegimePath& path,
                           std::span<const double> times, std::span<const double> dW,
                           const PathObserver& observer = {});

/// Throws NotStabilizing on a certified-unstable loop unless cfg.force.
SimReport simulate_closed_loop(const GameModel& model, const StrategyPair& strategy, const Vector& x0, int i0,
                               const SimConfig& cfg, const Decoupling* decoupling = nullptr);

struct L2Estimate {
  Estimate l2Norm;
  Estimate tailMass;
};

L2Estimate estimate_l2_stability(const GameModel& model, const RegimeFamily& Theta, const Vector& x0, int i0,
                                 const SimConfig& cfg);

double check_stationarity_residual(const GameModel& model, const Decoupling& decoupling,
                                   const StrategyPair& strategy, const Vector& x0, int i0, const SimConfig& cfg);

/// Homogeneous closed-loop cost matrices: player k pays xᵀW_k(i)x from (x, i).
/// Throws NotStabilizing when the loop's Lyapunov system is singular.
std::array<RegimeFamily, 2> closed_loop_cost_matrices(const GameModel& model, const RegimeFamily& Theta);

/// 10 / |abscissa|.
double recommended_horizon(double abscissa);

int default_thread_count();

/// Fixed-order pairwise summation.
double pairwise_sum(std::span<const double> values);

/// CSV with columns t, regime, X_1..X_n, u_1..u_m (regimes 1-based).
std::string trajectory_csv(const std::vector<TrajectoryRow>& rows);

}  // namespace regime_riccati
