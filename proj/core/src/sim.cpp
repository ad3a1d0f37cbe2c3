#include "regime_riccati/sim.hpp"

#include "regime_riccati/care.hpp"
#include "regime_riccati/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace regime_riccati {

namespace {

constexpr double kGridMergeTol = 1e-12;

struct UnitResult {
  PathOutcome outcome;
  double residual = 0.0;
};

void require_config(const SimConfig& cfg) {
  if (!(cfg.dt > 0.0) || !(cfg.T > 0.0) || cfg.dt > cfg.T) {
    throw Error(ErrorCode::InvalidConfig, "need 0 < dt <= T");
  }
  if (cfg.paths < 1) throw Error(ErrorCode::InvalidConfig, "need at least one path");
  if (cfg.antithetic && cfg.paths % 2 != 0) {
    throw Error(ErrorCode::InvalidConfig, "antithetic sampling needs an even path count");
  }
  if (cfg.residualStride < 1) throw Error(ErrorCode::InvalidConfig, "residual stride must be positive");
}

Estimate estimate(const std::vector<double>& values) {
  const double count = static_cast<double>(values.size());
  Estimate e;
  e.mean = pairwise_sum(values) / count;
  if (values.size() < 2) return e;
  std::vector<double> sq(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) sq[k] = (values[k] - e.mean) * (values[k] - e.mean);
  e.se = std::sqrt(pairwise_sum(sq) / (count - 1.0) / count);
  return e;
}

template <class Fn>
void parallel_for(int units, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, units));
  if (threads == 1) {
    for (int u = 0; u < units; ++u) fn(u);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (units + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int lo = t * chunk;
    const int hi = std::min(units, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (int u = lo; u < hi; ++u) fn(u);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

ClosedLoopSystem compile_closed_loop(const GameModel& model, const StrategyPair& strategy) {
  const Dynamics& d = model.dynamics;
  const int L = model.regimes();
  if (strategy.Theta.size() != L || strategy.Theta.rows() != d.m() || strategy.Theta.cols() != d.n) {
    throw Error(ErrorCode::ShapeMismatch, "strategy gain does not match the model");
  }
  ClosedLoopSystem sys;
  sys.n = d.n;
  sys.m = d.m();
  const bool forced = model.inhomogeneity.has_value();
  if (strategy.nu && !forced) throw Error(ErrorCode::ShapeMismatch, "offset given for a homogeneous model");
  if (forced) {
    sys.lambda = model.inhomogeneity->lambda;
    if (strategy.nu && std::abs(strategy.nu->lambda - sys.lambda) > 0.0) {
      throw Error(ErrorCode::ShapeMismatch, "offset damping rate differs from the model's");
    }
  }
  for (int i = 0; i < L; ++i) {
    const Matrix& T = strategy.Theta[i];
    const Matrix B = d.B(i);
    const Matrix D = d.D(i);
    const Vector nu = strategy.nu ? Vector(strategy.nu->nuBar[i]) : Vector::Zero(d.m());
    sys.Theta.push_back(T);
    sys.Acl.push_back(d.A[i] + B * T);
    sys.Ccl.push_back(d.C[i] + D * T);
    sys.nu.push_back(nu);
    Vector beta = B * nu;
    Vector gamma = D * nu;
    if (forced) {
      beta += model.inhomogeneity->bBar[i];
      gamma += model.inhomogeneity->sigmaBar[i];
    }
    sys.drift.push_back(beta);
    sys.diffusion.push_back(gamma);
    for (int k = 0; k < 2; ++k) {
      const CostBlock& c = model.cost(k);
      const Matrix S = c.S(i);
      const Matrix R = c.R(i);
      Matrix Q = c.Q[i] + S.transpose() * T + T.transpose() * S + T.transpose() * R * T;
      sys.Qbar[k].push_back(0.5 * (Q + Q.transpose()));
      Vector l = (S + R * T).transpose() * nu;
      double cc = nu.dot(R * nu);
      if (forced) {
        const Vector rho = model.inhomogeneity->rho(k, i);
        l += Vector(model.inhomogeneity->qBar[k][i]) + T.transpose() * rho;
        cc += 2.0 * rho.dot(nu);
      }
      sys.lbar[k].push_back(l);
      sys.cbar[k].push_back(cc);
    }
  }
  return sys;
}

std::vector<double> make_grid(const RegimePath& path, double dt) {
  const double T = path.horizon;
  const auto steps = static_cast<long long>(std::ceil(T / dt - 1e-9));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps) + path.times.size() + 1);
  std::size_t jump = 1;
  for (long long k = 0; k <= steps; ++k) {
    const double t = std::min(T, static_cast<double>(k) * dt);
    while (jump < path.times.size() && path.times[jump] < t - kGridMergeTol) {
      if (path.times[jump] > grid.back() + kGridMergeTol) grid.push_back(path.times[jump]);
      ++jump;
    }
    if (grid.empty() || t > grid.back() + kGridMergeTol) grid.push_back(t);
  }
  return grid;
}

PathOutcome integrate_path(const ClosedLoopSystem& sys, const Vector& x0, const RegimePath& path,
                           std::span<const double> times, std::span<const double> dW, const PathObserver& observer) {
  PathOutcome out;
  const int n = sys.n;
  Vector X = x0;
  Vector Xn(n), drift(n), diff(n), u(sys.m), qx(n);
  std::size_t jp = 0;
  int r = path.regimes.front();
  const bool forced = sys.lambda > 0.0;

  auto running = [&](const Vector& x, int reg, double decay, int k) {
    qx.noalias() = sys.Qbar[k][reg] * x;
    double f = x.dot(qx);
    if (forced) f += 2.0 * decay * sys.lbar[k][reg].dot(x) + decay * decay * sys.cbar[k][reg];
    return f;
  };
  auto observe = [&](double t, int reg, const Vector& x, double decay) {
    u.noalias() = sys.Theta[reg] * x;
    if (forced) u += decay * sys.nu[reg];
    observer(t, reg, x, u);
  };

  std::array<double, 2> f0{};
  bool cached = false;
  const std::size_t steps = times.size() - 1;
  for (std::size_t j = 0; j < steps; ++j) {
    const double t0 = times[j];
    const double t1 = times[j + 1];
    const double h = t1 - t0;
    int prev = r;
    while (jp + 1 < path.times.size() && path.times[jp + 1] <= t0 + kGridMergeTol) {
      ++jp;
      r = path.regimes[jp];
    }
    if (r != prev) cached = false;
    const double d0 = forced ? std::exp(-sys.lambda * t0) : 0.0;
    const double d1 = forced ? std::exp(-sys.lambda * t1) : 0.0;
    if (!cached) {
      f0[0] = running(X, r, d0, 0);
      f0[1] = running(X, r, d0, 1);
    }
    if (observer) observe(t0, r, X, d0);
    drift.noalias() = sys.Acl[r] * X;
    diff.noalias() = sys.Ccl[r] * X;
    if (forced) {
      drift += d0 * sys.drift[r];
      diff += d0 * sys.diffusion[r];
    }
    Xn = X + h * drift + dW[j] * diff;
    const double f10 = running(Xn, r, d1, 0);
    const double f11 = running(Xn, r, d1, 1);
    out.cost[0] += 0.5 * h * (f0[0] + f10);
    out.cost[1] += 0.5 * h * (f0[1] + f11);
    out.l2 += 0.5 * h * (X.squaredNorm() + Xn.squaredNorm());
    X.swap(Xn);
    f0 = {f10, f11};
    cached = true;
  }
  if (observer) {
    while (jp + 1 < path.times.size() && path.times[jp + 1] <= times.back() + kGridMergeTol) {
      ++jp;
      r = path.regimes[jp];
    }
    observe(times.back(), r, X, forced ? std::exp(-sys.lambda * times.back()) : 0.0);
  }
  out.tail = X.squaredNorm();
  return out;
}

SimReport simulate_closed_loop(const GameModel& input, const StrategyPair& strategy, const Vector& x0, int i0,
                               const SimConfig& cfg, const Decoupling* decoupling) {
  require_config(cfg);
  const GameModel model = normalized(input);
  if (x0.size() != model.n()) throw Error(ErrorCode::ShapeMismatch, "initial state has the wrong dimension");
  if (i0 < 0 || i0 >= model.regimes()) throw Error(ErrorCode::InvalidConfig, "initial regime out of range");
  if (!cfg.force && !is_stabilizer(model.dynamics, model.generator, strategy.Theta).stable()) {
    throw Error(ErrorCode::NotStabilizing, "closed loop is certified unstable; use force to simulate anyway");
  }
  const ClosedLoopSystem sys = compile_closed_loop(model, strategy);
  const int units = cfg.antithetic ? cfg.paths / 2 : cfg.paths;
  std::vector<UnitResult> results(static_cast<std::size_t>(units));
  std::vector<TrajectoryRow> trajectory;

  parallel_for(units, cfg.threads > 0 ? cfg.threads : default_thread_count(), [&](int unit) {
    auto chainEngine = make_engine(cfg.seed, 0, static_cast<std::uint64_t>(unit));
    const RegimePath path = sample_path(model.generator, i0, cfg.T, chainEngine);
    const std::vector<double> times = make_grid(path, cfg.dt);
    auto noiseEngine = make_engine(cfg.seed, 1, static_cast<std::uint64_t>(unit));
    std::normal_distribution<double> normal;
    std::vector<double> dW(times.size() - 1);
    for (std::size_t j = 0; j < dW.size(); ++j) dW[j] = std::sqrt(times[j + 1] - times[j]) * normal(noiseEngine);

    UnitResult& res = results[static_cast<std::size_t>(unit)];
    long long counter = 0;
    int last = -1;
    PathObserver observer;
    if (decoupling || (unit == 0 && cfg.recordTrajectory)) {
      observer = [&](double t, int reg, const Vector& X, const Vector& u) {
        if (unit == 0 && cfg.recordTrajectory) trajectory.push_back({t, reg, X, u});
        if (decoupling && (counter % cfg.residualStride == 0 || reg != last)) {
          res.residual = std::max(res.residual, stationarity_residual(model, *decoupling, t, reg, X, u));
        }
        last = reg;
        ++counter;
      };
    }
    res.outcome = integrate_path(sys, x0, path, times, dW, observer);
    if (cfg.antithetic) {
      for (double& w : dW) w = -w;
      const PathObserver mirror = decoupling ? PathObserver([&](double t, int reg, const Vector& X, const Vector& u) {
        if (counter % cfg.residualStride == 0 || reg != last) {
          res.residual = std::max(res.residual, stationarity_residual(model, *decoupling, t, reg, X, u));
        }
        last = reg;
        ++counter;
      })
                                             : PathObserver();
      const PathOutcome twin = integrate_path(sys, x0, path, times, dW, mirror);
      for (int k = 0; k < 2; ++k) res.outcome.cost[k] = 0.5 * (res.outcome.cost[k] + twin.cost[k]);
      res.outcome.l2 = 0.5 * (res.outcome.l2 + twin.l2);
      res.outcome.tail = 0.5 * (res.outcome.tail + twin.tail);
    }
  });

  SimReport report;
  std::array<std::vector<double>, 2> cost;
  std::vector<double> l2, tail;
  double residual = 0.0;
  for (const auto& r : results) {
    cost[0].push_back(r.outcome.cost[0]);
    cost[1].push_back(r.outcome.cost[1]);
    l2.push_back(r.outcome.l2);
    tail.push_back(r.outcome.tail);
    residual = std::max(residual, r.residual);
  }
  report.cost = {estimate(cost[0]), estimate(cost[1])};
  report.l2Norm = estimate(l2);
  report.tailMass = estimate(tail);
  if (decoupling) report.stationarityResidual = residual;
  report.seed = cfg.seed;
  report.paths = cfg.paths;
  report.dt = cfg.dt;
  report.T = cfg.T;
  report.antithetic = cfg.antithetic;
  report.trajectory = std::move(trajectory);
  return report;
}

L2Estimate estimate_l2_stability(const GameModel& input, const RegimeFamily& Theta, const Vector& x0, int i0,
                                 const SimConfig& cfg) {
  GameModel model = input;
  model.inhomogeneity.reset();
  const SimReport r = simulate_closed_loop(model, StrategyPair{Theta, std::nullopt}, x0, i0, cfg);
  return {r.l2Norm, r.tailMass};
}

double check_stationarity_residual(const GameModel& model, const Decoupling& decoupling,
                                   const StrategyPair& strategy, const Vector& x0, int i0, const SimConfig& cfg) {
  return *simulate_closed_loop(model, strategy, x0, i0, cfg, &decoupling).stationarityResidual;
}

std::array<RegimeFamily, 2> closed_loop_cost_matrices(const GameModel& input, const RegimeFamily& Theta) {
  GameModel model = normalized(input);
  model.inhomogeneity.reset();
  const ClosedLoopSystem sys = compile_closed_loop(model, StrategyPair{Theta, std::nullopt});
  const RegimeFamily A(sys.Acl);
  const RegimeFamily C(sys.Ccl);
  std::array<RegimeFamily, 2> out;
  for (int k = 0; k < 2; ++k) {
    out[k] = solve_coupled_sylvester(A, A, C, C, model.generator.pi, RegimeFamily(sys.Qbar[k])).symmetrized();
  }
  return out;
}

double recommended_horizon(double abscissa) {
  if (!(abscissa < 0.0)) throw Error(ErrorCode::NotStabilizing, "no horizon for a non-decaying loop");
  return 10.0 / std::abs(abscissa);
}

int default_thread_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("REGIME_RICCATI_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) return std::min(cap, hw);
  }
  return hw;
}

double pairwise_sum(std::span<const double> values) {
  if (values.empty()) return 0.0;
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(6);
  os << "t,regime";
  if (!rows.empty()) {
    for (Index k = 0; k < rows.front().X.size(); ++k) os << ",X_" << k + 1;
    for (Index k = 0; k < rows.front().u.size(); ++k) os << ",u_" << k + 1;
  }
  os << "\n";
  for (const auto& row : rows) {
    os << row.t << "," << row.regime + 1;
    for (Index k = 0; k < row.X.size(); ++k) os << "," << row.X(k);
    for (Index k = 0; k < row.u.size(); ++k) os << "," << row.u(k);
    os << "\n";
  }
  return os.str();
}

}  // namespace regime_riccati
