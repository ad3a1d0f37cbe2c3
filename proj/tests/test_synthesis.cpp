#include "frozen_values.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <regime_riccati/reference_data.hpp>
#include <regime_riccati/synthesis.hpp>

#include <doctest.h>

#include <cmath>
#include <random>

using namespace regime_riccati;
using namespace testing_support;

namespace {

/// Adds a random inhomogeneity; for zero-sum models the player-2 bars mirror player 1.
GameModel with_inhomogeneity(GameModel m, double lambda, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int L = m.regimes();
  const auto n = m.n();
  Inhomogeneity h = Inhomogeneity::zeros(L, n, m.dynamics.m1, m.dynamics.m2, lambda);
  h.bBar = random_family(rng, L, n, 1, 0.5);
  h.sigmaBar = random_family(rng, L, n, 1, 0.3);
  for (int k = 0; k < 2; ++k) {
    h.qBar[k] = random_family(rng, L, n, 1, 0.5);
    h.rho1Bar[k] = random_family(rng, L, m.dynamics.m1, 1, 0.5);
    h.rho2Bar[k] = random_family(rng, L, m.dynamics.m2, 1, 0.5);
  }
  if (m.kind == GameKind::ZeroSum) {
    h.qBar[1] = -h.qBar[0];
    h.rho1Bar[1] = -h.rho1Bar[0];
    h.rho2Bar[1] = -h.rho2Bar[0];
  }
  m.inhomogeneity = h;
  return normalized(m);
}

std::vector<Vector> columns(const RegimeFamily& f) {
  std::vector<Vector> out;
  for (const auto& v : f) out.push_back(v.col(0));
  return out;
}

}  // namespace

TEST_SUITE("synthesis") {
  TEST_CASE("strategies reproduce the solver gains") {
    const GameModel m1 = builtin_example(1);
    const auto open = solve_open_rep_cares(m1);
    const auto so = open_rep_strategy(m1, open);
    CHECK(so.Theta.max_abs_diff(open.Theta) <= 1e-9);
    CHECK_FALSE(so.nu.has_value());

    const auto closed = solve_closed_nash_cares(m1);
    const auto sc = closed_nash_strategy(m1, closed);
    CHECK(sc.Theta.max_abs_diff(closed.Theta) <= 1e-9);
    CHECK(sc.Theta.max_abs_diff(frozen::ex1_closed_Theta()) <= 1e-8);

    const GameModel m2 = builtin_example(2);
    const auto zs = solve_zero_sum_care(m2);
    const auto sz = zero_sum_strategy(m2, zs);
    CHECK(sz.Theta.max_abs_diff(zs.Theta) <= 1e-9);
    CHECK_FALSE(sz.nu.has_value());
  }

  TEST_CASE("invertible N makes the free parameter irrelevant") {
    const GameModel m = builtin_example(3);
    const auto sol = solve_zero_sum_care(m);
    const auto a = zero_sum_strategy(m, sol);
    const auto b = zero_sum_strategy(m, sol, RegimeFamily::constant(3, Matrix::Constant(4, 2, 5.0)));
    CHECK(a.Theta.max_abs_diff(b.Theta) <= 1e-10);
  }

  TEST_CASE("stationarity holds along the homogeneous decoupling") {
    const GameModel m = normalized(builtin_example(1));
    const auto sol = solve_open_rep_cares(m);
    const auto strat = open_rep_strategy(m, sol);
    const Decoupling dec = make_decoupling(sol);
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 5; ++trial) {
      const Vector X = random_matrix(rng, 2, 1, 1.0).col(0);
      for (int i = 0; i < 3; ++i) {
        const Vector u = strat.Theta[i] * X;
        CHECK(stationarity_residual(m, dec, 0.0, i, X, u) <= 1e-9);
        CHECK(stationarity_residual(m, dec, 0.0, i, X, u + Vector::Constant(4, 0.1)) > 1e-3);
      }
    }
  }

  TEST_CASE("zero-sum inhomogeneous synthesis") {
    const GameModel m = with_inhomogeneity(builtin_example(2), 0.7, 11);
    const auto sol = solve_zero_sum_care(m);
    const auto eta = solve_eta(m, sol);
    CHECK(eta.residual <= 1e-10);
    CHECK(eta.etaBar.size() == 1);
    const auto strat = zero_sum_strategy(m, sol);
    REQUIRE(strat.nu.has_value());
    CHECK(strat.nu->lambda == 0.7);

    const Decoupling dec = make_decoupling(sol, eta);
    const Vector X = (Vector(2) << 0.4, -1.2).finished();
    for (int i = 0; i < 3; ++i) {
      for (double t : {0.0, 0.8}) {
        const Vector u = strat.Theta[i] * X + std::exp(-0.7 * t) * strat.nu->nuBar[i].col(0);
        CHECK(stationarity_residual(m, dec, t, i, X, u) <= 1e-9);
      }
    }

    const auto ref = oracle::policy_cost(m, oracle::to_family(strat.Theta), 0, columns(strat.nu->nuBar));
    for (int i = 0; i < 3; ++i) {
      const double v = value_inhomogeneous(m, sol, eta, X, i);
      CHECK(v == doctest::Approx(ref.at(X, i)).epsilon(1e-9));
      CHECK((eta.etaBar[0][i].col(0) - ref.w[static_cast<std::size_t>(i)]).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }

  TEST_CASE("drift-only inhomogeneity") {
    GameModel m = builtin_example(2);
    Inhomogeneity h = Inhomogeneity::zeros(3, 2, 2, 2, 1.0);
    h.bBar = RegimeFamily::constant(3, (Matrix(2, 1) << 1.0, 0.0).finished());
    m.inhomogeneity = h;
    m = normalized(m);
    const auto sol = solve_zero_sum_care(m);
    const auto eta = solve_eta(m, sol);
    CHECK(eta.residual <= 1e-10);
    const auto strat = zero_sum_strategy(m, sol);
    const Decoupling dec = make_decoupling(sol, eta);
    const Vector X = (Vector(2) << 1.0, 1.0).finished();
    for (int i = 0; i < 3; ++i) {
      const Vector u = strat.Theta[i] * X + strat.nu->nuBar[i].col(0);
      CHECK(stationarity_residual(m, dec, 0.0, i, X, u) <= 1e-10);
    }
  }

  TEST_CASE("closed-loop Nash inhomogeneous values match policy evaluation") {
    const GameModel m = with_inhomogeneity(builtin_example(1), 1.3, 5);
    const auto sol = solve_closed_nash_cares(m);
    const auto eta = solve_eta(m, sol);
    CHECK(eta.residual <= 1e-10);
    CHECK(eta.etaBar.size() == 2);
    const auto strat = closed_nash_strategy(m, sol);
    REQUIRE(strat.nu.has_value());
    const Vector X = (Vector(2) << -0.3, 0.9).finished();
    for (int k = 0; k < 2; ++k) {
      const auto ref = oracle::policy_cost(m, oracle::to_family(strat.Theta), k, columns(strat.nu->nuBar));
      for (int i = 0; i < 3; ++i) {
        CHECK(value_inhomogeneous(m, sol, eta, X, i)[static_cast<std::size_t>(k)] ==
              doctest::Approx(ref.at(X, i)).epsilon(1e-9));
      }
    }
    const Decoupling dec = make_decoupling(sol, eta);
    for (int i = 0; i < 3; ++i) {
      const Vector u = strat.Theta[i] * X + strat.nu->nuBar[i].col(0);
      CHECK(stationarity_residual(m, dec, 0.0, i, X, u) <= 1e-9);
    }
  }

  TEST_CASE("open-loop representation inhomogeneous stationarity") {
    const GameModel m = with_inhomogeneity(builtin_example(1), 0.9, 6);
    const auto sol = solve_open_rep_cares(m);
    const auto eta = solve_eta(m, sol);
    const auto strat = open_rep_strategy(m, sol);
    REQUIRE(strat.nu.has_value());
    const Decoupling dec = make_decoupling(sol, eta);
    const Vector X = (Vector(2) << 0.5, 0.5).finished();
    for (int i = 0; i < 3; ++i) {
      const Vector u = strat.Theta[i] * X + std::exp(-0.9 * 0.4) * strat.nu->nuBar[i].col(0);
      CHECK(stationarity_residual(m, dec, 0.4, i, X, u) <= 1e-9);
    }
  }

  TEST_CASE("zero bars reduce to the homogeneous solution") {
    GameModel m = builtin_example(3);
    m.inhomogeneity = Inhomogeneity::zeros(3, 2, 2, 2, 1.0);
    const auto sol = solve_zero_sum_care(m);
    const auto eta = solve_eta(m, sol);
    CHECK(eta.etaBar[0].max_abs() == 0.0);
    const auto strat = zero_sum_strategy(m, sol);
    CHECK(strat.nu->nuBar.max_abs() == 0.0);
    const Vector X = (Vector(2) << 1.0, -2.0).finished();
    for (int i = 0; i < 3; ++i) {
      CHECK(value_inhomogeneous(m, sol, eta, X, i) == doctest::Approx(value_homogeneous(sol.P, X, i)).epsilon(1e-12));
    }
  }

  TEST_CASE("scalar eta closed form") {
    // One regime, no coupling to ν: η̄ solves (a + bθ - λ)η̄ + q̄ + θρ̄ = 0 with σ̄ = b̄ = 0.
    GameModel m = scalar_zero_sum(-1, 0, 1, 1, 0, 0, 1, 1, -2);
    Inhomogeneity h = Inhomogeneity::zeros(1, 1, 1, 1, 0.5);
    h.qBar[0] = one(scalar(0.3));
    h.qBar[1] = one(scalar(-0.3));
    m.inhomogeneity = h;
    const auto sol = solve_zero_sum_care(m);
    const auto eta = solve_eta(m, sol);
    const double p = sol.P[0](0, 0);
    const double acl = -1.0 - p + p / 2.0;
    CHECK(eta.etaBar[0][0](0, 0) == doctest::Approx(0.3 / (0.5 - acl)).epsilon(1e-12));
  }

  TEST_CASE("homogeneous value") {
    const auto sol = solve_closed_nash_cares(builtin_example(1));
    CHECK(value_homogeneous(sol.P1, Vector::Zero(2), 2) == 0.0);
    const Vector x = Vector::Ones(2);
    const RegimeFamily P = frozen::ex1_closed_P1();
    CHECK(value_homogeneous(sol.P1, x, 2) == doctest::Approx(P[2].sum()).epsilon(1e-8));
  }

  TEST_CASE("zero-sum values are antisymmetric") {
    const auto sol = solve_zero_sum_care(builtin_example(2));
    const Decoupling dec = make_decoupling(sol);
    const Vector x = (Vector(2) << 0.2, 0.7).finished();
    for (int i = 0; i < 3; ++i) {
      CHECK(value_homogeneous(dec.P[0], x, i) == -value_homogeneous(dec.P[1], x, i));
    }
  }

  TEST_CASE("jump and adjoint terms") {
    const GameModel m = with_inhomogeneity(builtin_example(2), 1.0, 9);
    const auto sol = solve_zero_sum_care(m);
    const auto eta = solve_eta(m, sol);
    const Decoupling dec = make_decoupling(sol, eta);
    const Vector X = (Vector(2) << 1.5, -0.5).finished();
    for (int from = 0; from < 3; ++from) {
      for (int to = 0; to < 3; ++to) {
        const Vector g = jump_term(dec, 0, from, to, X);
        CHECK((g - (sol.P[to] - sol.P[from]) * X).cwiseAbs().maxCoeff() <= 1e-15);
        CHECK((jump_term(dec, 1, from, to, X) + g).cwiseAbs().maxCoeff() <= 1e-15);
        const double t = 0.25;
        const Vector gap = adjoint_state(dec, 0, t, to, X) - adjoint_state(dec, 0, t, from, X);
        CHECK((gap - g - eta.zJump(0, to, from, t)).cwiseAbs().maxCoeff() <= 1e-14);
      }
      const Vector y = adjoint_state(dec, 0, 0.5, from, X);
      const Vector expect = sol.P[from] * X + std::exp(-0.5) * eta.etaBar[0][from].col(0);
      CHECK((y - expect).cwiseAbs().maxCoeff() <= 1e-14);
    }
  }

  TEST_CASE("resolvent integral") {
    const Generator gen{builtin_generator()};
    const Vector g = Vector::Ones(3);
    const Vector r = resolvent_integral(gen, 0.5, g);
    CHECK((r - Vector::Ones(3)).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK_THROWS_AS(resolvent_integral(gen, 0.0, g), Error);
  }

  TEST_CASE("eta needs an inhomogeneity") {
    const GameModel m = builtin_example(2);
    CHECK_THROWS_AS(solve_eta(m, solve_zero_sum_care(m)), Error);
  }
}
