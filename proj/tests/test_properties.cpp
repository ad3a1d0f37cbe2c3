#include "helpers.hpp"
#include "oracles.hpp"

#include <regime_riccati/care.hpp>
#include <regime_riccati/sim.hpp>
#include <regime_riccati/stability.hpp>
#include <regime_riccati/synthesis.hpp>

#include <doctest.h>

#include <optional>
#include <random>

using namespace regime_riccati;
using namespace testing_support;

namespace {

constexpr int kInstances = 100;

struct Shape {
  int L, n;
};

Shape random_shape(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(1, 3);
  return {d(rng), d(rng)};
}

template <class F>
std::optional<ErrorCode> error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

bool same(const SimReport& a, const SimReport& b) {
  for (int k = 0; k < 2; ++k) {
    if (a.cost[k].mean != b.cost[k].mean || a.cost[k].se != b.cost[k].se) return false;
  }
  return a.l2Norm.mean == b.l2Norm.mean && a.tailMass.mean == b.tailMass.mean && a.l2Norm.se == b.l2Norm.se;
}

}  // namespace

TEST_SUITE("properties") {
  TEST_CASE("dissipativity implies spectral stability") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> shift(0.0, 3.0);
    int dissipative = 0;
    int spectralOnly = 0;
    for (int k = 0; k < kInstances; ++k) {
      const Shape s = random_shape(rng);
      const Dynamics d = random_dynamics(rng, s.L, s.n, 1, 1, shift(rng));
      const Generator gen{random_generator(rng, s.L)};
      const bool diss = dissipativity_check(d.A, d.C).stable;
      const bool spec = lyapunov_spectral_check(d.A, d.C, gen).stable;
      if (diss) {
        ++dissipative;
        CHECK(spec);
      } else if (spec) {
        ++spectralOnly;
      }
    }
    CHECK(dissipative >= 10);
    MESSAGE("dissipative: " << dissipative << ", spectral only: " << spectralOnly);
  }

  TEST_CASE("spectral test agrees with the Kronecker oracle") {
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> shift(0.0, 2.0);
    for (int k = 0; k < kInstances; ++k) {
      const Shape s = random_shape(rng);
      const Dynamics d = random_dynamics(rng, s.L, s.n, 1, 1, shift(rng));
      const Generator gen{random_generator(rng, s.L)};
      const Matrix M = oracle::lyapunov_matrix(oracle::to_family(d.A), oracle::to_family(d.C), gen.pi);
      const double abscissa = M.eigenvalues().real().maxCoeff();
      if (std::abs(abscissa) < 1e-8) continue;
      CHECK(lyapunov_spectral_check(d.A, d.C, gen).stable == (abscissa < 0.0));
    }
  }

  TEST_CASE("pseudo-inverse Penrose identities") {
    std::mt19937_64 rng(103);
    std::uniform_int_distribution<int> dim(1, 4);
    for (int k = 0; k < kInstances; ++k) {
      const int r = dim(rng);
      const int c = dim(rng);
      const int rank = std::min({r, c, dim(rng)});
      const Matrix M = random_matrix(rng, r, rank, 1.0) * random_matrix(rng, rank, c, 1.0);
      const Matrix P = pinv(M);
      CHECK((M * P * M - M).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK((P * M * P - P).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK(((M * P).transpose() - M * P).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK(((P * M).transpose() - P * M).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }

  TEST_CASE("zero-sum solver is deterministic and agrees with the Riccati ODE") {
    std::mt19937_64 rng(104);
    int solved = 0;
    for (int k = 0; k < kInstances; ++k) {
      const Shape s = random_shape(rng);
      const GameModel m = normalized(random_zero_sum(rng, s.L, s.n));
      std::optional<ZeroSumCareSolution> a, b;
      const auto ea = error_of([&] { a = solve_zero_sum_care(m); });
      const auto eb = error_of([&] { b = solve_zero_sum_care(m); });
      REQUIRE(ea == eb);
      if (ea) continue;
      ++solved;
      CHECK(bitwise_equal(a->P, b->P));
      CHECK(bitwise_equal(a->Theta, b->Theta));
      CHECK(a->residual <= 1e-10);
      if (k % 10 == 0) {
        const auto ode = oracle::zero_sum_riccati_ode(m, 15.0, 1e-2);
        for (int i = 0; i < s.L; ++i) CHECK((ode[static_cast<std::size_t>(i)] - a->P[i]).cwiseAbs().maxCoeff() <= 1e-7);
      }
    }
    CHECK(solved >= 90);
  }

  TEST_CASE("non-zero-sum solvers are deterministic") {
    std::mt19937_64 rng(105);
    int solved = 0;
    for (int k = 0; k < kInstances; ++k) {
      const Shape s = random_shape(rng);
      const GameModel m = random_nonzero_sum(rng, s.L, s.n);
      std::optional<NonSymCareSolution> a, b;
      const auto ea = error_of([&] { a = solve_open_rep_cares(m); });
      const auto eb = error_of([&] { b = solve_open_rep_cares(m); });
      REQUIRE(ea == eb);
      if (!ea) {
        CHECK(bitwise_equal(a->P1, b->P1));
        CHECK(bitwise_equal(a->P2, b->P2));
        CHECK(bitwise_equal(a->Theta, b->Theta));
      }
      std::optional<SymCareSolution> c, d;
      const auto ec = error_of([&] { c = solve_closed_nash_cares(m); });
      const auto ed = error_of([&] { d = solve_closed_nash_cares(m); });
      REQUIRE(ec == ed);
      if (!ec) {
        ++solved;
        CHECK(bitwise_equal(c->P1, d->P1));
        CHECK(bitwise_equal(c->Theta, d->Theta));
        CHECK(c->residual <= 1e-10);
      }
    }
    CHECK(solved >= 90);
  }

  TEST_CASE("simulations are deterministic under a fixed seed") {
    std::mt19937_64 rng(106);
    SimConfig cfg;
    cfg.paths = 6;
    cfg.T = 0.5;
    cfg.dt = 1e-2;
    cfg.seed = 77;
    for (int k = 0; k < kInstances; ++k) {
      const Shape s = random_shape(rng);
      const GameModel m = random_zero_sum(rng, s.L, s.n);
      const StrategyPair strat{RegimeFamily::zeros(s.L, 2, s.n), std::nullopt};
      const Vector x0 = random_matrix(rng, s.n, 1, 1.0).col(0);
      cfg.force = true;
      cfg.threads = 1;
      const SimReport a = simulate_closed_loop(m, strat, x0, 0, cfg);
      cfg.threads = 2 + k % 3;
      const SimReport b = simulate_closed_loop(m, strat, x0, 0, cfg);
      CHECK(same(a, b));
    }
  }
}
