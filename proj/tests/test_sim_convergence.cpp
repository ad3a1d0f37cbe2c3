#include "sim_support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace regime_riccati;
using namespace testing_support;

namespace {

struct Halving {
  Estimate coarse;
  Estimate fine;
  double shift = 0.0;
};

/// Same regime path and Brownian path integrated at dt and dt/2.
Halving halve(const ExampleLoop& loop, double dt, double T, int paths) {
  const ClosedLoopSystem sys = compile_closed_loop(loop.model, loop.strategy);
  std::vector<double> coarse(static_cast<std::size_t>(paths)), fine(coarse.size());
  for (int p = 0; p < paths; ++p) {
    auto chain = make_engine(11, 0, static_cast<std::uint64_t>(p));
    const RegimePath path = sample_path(loop.model.generator, 0, T, chain);
    const auto fineGrid = make_grid(path, 0.5 * dt);
    const auto coarseGrid = make_grid(path, dt);
    auto noise = make_engine(11, 1, static_cast<std::uint64_t>(p));
    std::normal_distribution<double> normal;
    std::vector<double> W(fineGrid.size(), 0.0), dWf(fineGrid.size() - 1);
    for (std::size_t j = 0; j + 1 < fineGrid.size(); ++j) {
      dWf[j] = std::sqrt(fineGrid[j + 1] - fineGrid[j]) * normal(noise);
      W[j + 1] = W[j] + dWf[j];
    }
    std::vector<double> dWc(coarseGrid.size() - 1);
    std::size_t at = 0;
    double prev = 0.0;
    for (std::size_t j = 1; j < coarseGrid.size(); ++j) {
      while (std::abs(fineGrid[at] - coarseGrid[j]) > 1e-9) ++at;
      dWc[j - 1] = W[at] - prev;
      prev = W[at];
    }
    const auto k = static_cast<std::size_t>(p);
    coarse[k] = integrate_path(sys, unit_x0(), path, coarseGrid, dWc).cost[0];
    fine[k] = integrate_path(sys, unit_x0(), path, fineGrid, dWf).cost[0];
  }
  auto summarize = [](const std::vector<double>& v) {
    Estimate e;
    e.mean = pairwise_sum(v) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - e.mean) * (x - e.mean);
    e.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    return e;
  };
  Halving out{summarize(coarse), summarize(fine), 0.0};
  out.shift = std::abs(out.fine.mean - out.coarse.mean);
  return out;
}

}  // namespace

TEST_SUITE("sim-convergence") {
  TEST_CASE("halving dt moves the estimate by less than one standard error") {
    for (int id : {1, 2, 3}) {
      CAPTURE(id);
      const ExampleLoop loop = example_loop(id);
      const Halving h = halve(loop, 1e-3, 4.0, 10000);
      CHECK(h.shift < h.fine.se);
    }
  }
}
