// Acceptance criteria runner: one PASS/FAIL line per criterion, exit 1 if any fails.
#include "commands.hpp"
#include "helpers.hpp"
#include "oracles.hpp"
#include "sim_support.hpp"

#include <regime_riccati/stability.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>

using namespace regime_riccati;
using namespace testing_support;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool ok = true;
  std::ostringstream notes;

  Verdict() { notes.precision(8); }

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void report(int id, const std::string& title, Verdict& v) {
  std::printf("%s criterion %d: %s%s\n", v.ok ? "PASS" : "FAIL", id, title.c_str(), v.notes.str().c_str());
  std::fflush(stdout);
  if (!v.ok) ++failures;
}

void guarded(int id, const std::string& title, const std::function<void(Verdict&)>& body) {
  Verdict v;
  try {
    body(v);
  } catch (const std::exception& e) {
    v.require(false, e.what());
  }
  report(id, title, v);
}

double max_diff(const cli::ReproduceResult& r, const std::string& mode) {
  double d = 0.0;
  for (const auto& row : r.diffs) {
    if (row.mode == mode) d = std::max(d, std::abs(row.diff()));
  }
  return d;
}

const cli::Stage* stage(const cli::ReproduceResult& r, const std::string& name) {
  for (const auto& s : r.stages) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

bool stage_ok(const cli::ReproduceResult& r, const std::string& name) {
  const cli::Stage* s = stage(r, name);
  return s && s->ok;
}

RegimeFamily reference(int id, const std::string& mode, const std::string& name) {
  for (const auto& s : reference_tables(id)) {
    if (s.mode != mode) continue;
    for (const auto& f : s.families) {
      if (f.name == name) return f.values;
    }
  }
  throw Error(ErrorCode::InvalidConfig, "no reference family " + name);
}

bool certified(const Dynamics& d, const Generator& g, const RegimeFamily& Theta, std::ostringstream& os,
               const std::string& label) {
  const auto v = is_stabilizer(d, g, Theta);
  os << " " << label << "(diss " << v.dissipativity.stable << ", spec " << v.spectral.stable << ")";
  return v.spectral.stable && v.dissipativity.stable;
}

}  // namespace

int main() {
  cli::ReproduceOptions noMc;
  noMc.paths = 0;

  std::optional<cli::ReproduceResult> r1;
  double r1Seconds = 0.0;
  {
    const auto start = Clock::now();
    r1 = cli::reproduce(1);
    r1Seconds = seconds_since(start);
  }
  const cli::ReproduceResult r2 = cli::reproduce(2, noMc);
  const cli::ReproduceResult r3 = cli::reproduce(3, noMc);

  guarded(1, "example 1 open-loop representation tables", [&](Verdict& v) {
    const double d = max_diff(*r1, "open-rep");
    v.notes << " maxdiff=" << d << " residual ok=" << stage_ok(*r1, "solve open-rep") << " runtime=" << r1Seconds << "s";
    v.require(d <= 1e-3, "diff > 1e-3");
    v.require(stage_ok(*r1, "solve open-rep"), "residual > 1e-8");
    v.require(r1Seconds < 5.0, "runtime >= 5 s");
  });

  guarded(2, "example 1 closed-loop Nash tables and sign constraints", [&](Verdict& v) {
    const double d = max_diff(*r1, "closed-nash");
    const auto sol = solve_closed_nash_cares(builtin_example(1));
    double n11 = 1e300, n22 = 1e300;
    for (double x : sol.n11Min) n11 = std::min(n11, x);
    for (double x : sol.n22Min) n22 = std::min(n22, x);
    v.notes << " maxdiff=" << d << " residual=" << sol.residual << " min eig N11=" << n11 << " N22=" << n22;
    v.require(d <= 1e-3, "diff > 1e-3");
    v.require(sol.residual <= 1e-8, "residual > 1e-8");
    v.require(n11 >= -1e-10 && n22 >= -1e-10, "sign constraint");
  });

  guarded(3, "example 2 zero-sum tables and sign constraints", [&](Verdict& v) {
    const double d = max_diff(r2, "zero-sum");
    const GameModel m = builtin_example(2);
    const auto sol = solve_zero_sum_care(m);
    const double referenceResidual =
        zero_sum_residuals(m, reference(2, "zero-sum", "P"), reference(2, "zero-sum", "Theta")).maxEquation;
    v.notes << " maxdiff=" << d << " residual=" << sol.residual << " signOk=" << sol.signOk()
            << " reference-table CARE residual=" << referenceResidual;
    v.require(d <= 1e-3, "diff > 1e-3");
    v.require(sol.residual <= 1e-8, "residual > 1e-8");
    v.require(sol.signOk(), "sign constraint");
  });

  guarded(4, "example 3 tables and convexity-concavity checks", [&](Verdict& v) {
    const double d = max_diff(r3, "zero-sum");
    const GameModel m3 = builtin_example(3);
    const GameModel m2 = builtin_example(2);
    const auto sol = solve_zero_sum_care(m3);
    const bool ex3 = check_convexity_concavity(m3, 1.0, 1.0).ok;
    const bool ex2 = check_convexity_concavity(m2, 1.0, 1.0).ok;
    const bool ex2Grid = search_epsilon(m2).has_value();
    const double referenceResidual =
        zero_sum_residuals(m3, reference(3, "zero-sum", "P"), reference(3, "zero-sum", "Theta")).maxEquation;
    v.notes << " maxdiff=" << d << " residual=" << sol.residual << " ex3(eps=1)=" << ex3 << " ex2(eps=1)=" << ex2
            << " ex2 grid=" << ex2Grid << " reference-table CARE residual=" << referenceResidual;
    v.require(d <= 1e-3, "diff > 1e-3");
    v.require(sol.residual <= 1e-8, "residual > 1e-8");
    v.require(sol.signOk(), "sign constraint");
    v.require(ex3 && !ex2 && !ex2Grid, "convexity-concavity verdicts");
  });

  guarded(5, "stabilizer certificates of every computed gain", [&](Verdict& v) {
    bool all = true;
    const GameModel m1 = builtin_example(1);
    all &= certified(m1.dynamics, m1.generator, solve_open_rep_cares(m1).Theta, v.notes, "ex1 open-rep");
    all &= certified(m1.dynamics, m1.generator, solve_closed_nash_cares(m1).Theta, v.notes, "ex1 closed-nash");
    for (int id : {2, 3}) {
      const GameModel m = builtin_example(id);
      all &= certified(m.dynamics, m.generator, solve_zero_sum_care(m).Theta, v.notes, "ex" + std::to_string(id));
    }
    v.require(all, "certificate");
  });

  guarded(6, "zero-sum game embedded as non-zero-sum", [&](Verdict& v) {
    GameModel m = builtin_example(2);
    m.kind = GameKind::NonZeroSum;
    const auto sol = solve_open_rep_cares(m);
    const double d = sol.P1.max_abs_diff(-sol.P2);
    v.notes << " max|P1+P2|=" << d;
    v.require(d <= 1e-8, "P1 != -P2");
  });

  guarded(7, "scalar zero-sum oracle", [&](Verdict& v) {
    const GameModel m = scalar_zero_sum(-1, 0, 1, 1, 0, 0, 1, 1, -2);
    const double root = -2.0 + std::sqrt(6.0);
    const double p = solve_zero_sum_care(m).P[0](0, 0);
    const double ode = oracle::zero_sum_riccati_ode(normalized(m), 30.0, 1e-3)[0](0, 0);
    v.notes << " P=" << p << " root=" << root << " ode=" << ode;
    v.require(std::abs(p - root) <= 1e-9, "quadratic root");
    v.require(std::abs(p - ode) <= 1e-9, "Riccati ODE");
  });

  guarded(8, "Monte Carlo value check", [&](Verdict& v) {
    SimConfig cfg;
    cfg.paths = 10000;
    cfg.dt = 1e-3;
    cfg.T = 10.0;
    cfg.seed = 1;
    for (int id : {1, 2, 3}) {
      const ExampleLoop loop = example_loop(id);
      const auto start = Clock::now();
      const SimReport r = simulate_closed_loop(loop.model, loop.strategy, unit_x0(), 0, cfg);
      const double secs = seconds_since(start);
      const double target = loop.P[0](0, 0);
      const double budget = 3.0 * r.cost[0].se + 0.01 * std::abs(target);
      v.notes << " ex" << id << ": mc=" << r.cost[0].mean << " se=" << r.cost[0].se << " target=" << target
              << " " << secs << "s;";
      v.require(std::abs(r.cost[0].mean - target) <= budget, "example " + std::to_string(id) + " outside budget");
      v.require(secs < 60.0, "example " + std::to_string(id) + " runtime");
    }
  });

  guarded(9, "stationarity identity", [&](Verdict& v) {
    SimConfig cfg;
    cfg.paths = 20;
    cfg.T = 5.0;
    cfg.dt = 1e-3;
    cfg.seed = 1;
    double worst = 0.0;
    const GameModel m1 = normalized(builtin_example(1));
    const auto open = solve_open_rep_cares(m1);
    const StrategyPair so = open_rep_strategy(m1, open);
    worst = std::max(worst, check_stationarity_residual(m1, make_decoupling(open), so, unit_x0(), 0, cfg));
    for (int id : {1, 2, 3}) {
      const ExampleLoop loop = example_loop(id);
      worst = std::max(worst,
                       check_stationarity_residual(loop.model, loop.decoupling, loop.strategy, unit_x0(), 0, cfg));
    }
    std::vector<Matrix> bumped(so.Theta.begin(), so.Theta.end());
    bumped[0](0, 0) += 0.1;
    const double perturbed = check_stationarity_residual(m1, make_decoupling(open),
                                                         StrategyPair{RegimeFamily(bumped), std::nullopt}, unit_x0(),
                                                         0, cfg);
    v.notes << " max residual=" << worst << " perturbed=" << perturbed;
    v.require(worst <= 1e-8, "residual > 1e-8");
    v.require(perturbed > 1e-3, "perturbation not detected");
  });

  guarded(10, "randomized properties", [&](Verdict& v) {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> dim(1, 3);
    std::uniform_real_distribution<double> shift(0.0, 3.0);
    int implicationFailures = 0, penroseFailures = 0, nondeterministic = 0, unsolved = 0;
    for (int k = 0; k < 100; ++k) {
      const int L = dim(rng);
      const int n = dim(rng);
      const Dynamics d = random_dynamics(rng, L, n, 1, 1, shift(rng));
      const Generator gen{random_generator(rng, L)};
      if (dissipativity_check(d.A, d.C).stable && !lyapunov_spectral_check(d.A, d.C, gen).stable) ++implicationFailures;

      const Matrix M = random_matrix(rng, n + 1, 1, 1.0) * random_matrix(rng, 1, n, 1.0) +
                       (k % 2 ? random_matrix(rng, n + 1, n, 1.0) : Matrix::Zero(n + 1, n));
      const Matrix P = pinv(M);
      const double pen = std::max({(M * P * M - M).cwiseAbs().maxCoeff(), (P * M * P - P).cwiseAbs().maxCoeff(),
                                   ((M * P).transpose() - M * P).cwiseAbs().maxCoeff(),
                                   ((P * M).transpose() - P * M).cwiseAbs().maxCoeff()});
      if (pen > 1e-10) ++penroseFailures;

      const GameModel zs = random_zero_sum(rng, L, n);
      try {
        const auto a = solve_zero_sum_care(zs);
        const auto b = solve_zero_sum_care(zs);
        if (!bitwise_equal(a.P, b.P) || !bitwise_equal(a.Theta, b.Theta)) ++nondeterministic;
        SimConfig cfg;
        cfg.paths = 4;
        cfg.T = 0.5;
        cfg.dt = 1e-2;
        cfg.seed = static_cast<std::uint64_t>(k);
        cfg.threads = 1;
        const StrategyPair s{a.Theta, std::nullopt};
        const Vector x0 = Vector::Ones(n);
        const SimReport ra = simulate_closed_loop(zs, s, x0, 0, cfg);
        cfg.threads = 3;
        const SimReport rb = simulate_closed_loop(zs, s, x0, 0, cfg);
        if (ra.cost[0].mean != rb.cost[0].mean || ra.cost[0].se != rb.cost[0].se) ++nondeterministic;
      } catch (const Error&) {
        ++unsolved;
      }
    }
    v.notes << " implication failures=" << implicationFailures << " penrose failures=" << penroseFailures
            << " nondeterministic=" << nondeterministic << " unsolved=" << unsolved;
    v.require(implicationFailures == 0 && penroseFailures == 0 && nondeterministic == 0, "property");
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
