#include "regime_riccati/care.hpp"

#include "regime_riccati/stability.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace regime_riccati {

namespace {

constexpr double kSigmaConditionLimit = 1e12;
constexpr double kOmegaFloor = 0x1p-30;

double frob(const Matrix& m) { return m.size() == 0 ? 0.0 : m.norm(); }

Matrix coupling_sum(const Matrix& pi, const RegimeFamily& P, int i) {
  Matrix out = Matrix::Zero(P.rows(), P.cols());
  for (int j = 0; j < P.size(); ++j) out += pi(i, j) * P[j];
  return out;
}

Matrix base_term(const GameModel& model, int player, const Matrix& pi, const RegimeFamily& P, int i) {
  const Dynamics& d = model.dynamics;
  const Matrix& p = P[i];
  return d.A[i].transpose() * p + p * d.A[i] + d.C[i].transpose() * p * d.C[i] + model.cost(player).Q[i] +
         coupling_sum(pi, P, i);
}

double condition_number(const Matrix& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  const double lo = s(s.size() - 1);
  return lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

Matrix player_rows(const Matrix& full, const Dynamics& d, int player) {
  return player == 0 ? Matrix(full.topRows(d.m1)) : Matrix(full.bottomRows(d.m2));
}

/// Weighted cost of a fixed gain: Qᵏ + SᵏᵀΘ + ΘᵀSᵏ + ΘᵀRᵏΘ.
Matrix closed_loop_cost(const CostBlock& c, const Matrix& Theta, int i) {
  const Matrix S = c.S(i);
  return c.Q[i] + S.transpose() * Theta + Theta.transpose() * S + Theta.transpose() * c.R(i) * Theta;
}

RegimeFamily lyapunov_for_gain(const GameModel& model, int player, const RegimeFamily& Theta) {
  const auto [Acl, Ccl] = closed_loop(model.dynamics, Theta);
  std::vector<Matrix> rhs;
  for (int i = 0; i < model.regimes(); ++i) rhs.push_back(closed_loop_cost(model.cost(player), Theta[i], i));
  return solve_coupled_sylvester(Acl, Acl, Ccl, Ccl, model.generator.pi, RegimeFamily(std::move(rhs)))
      .symmetrized();
}

RegimeFamily sylvester_for_gain(const GameModel& model, int player, const RegimeFamily& Theta) {
  const auto [Acl, Ccl] = closed_loop(model.dynamics, Theta);
  std::vector<Matrix> rhs;
  const CostBlock& c = model.cost(player);
  for (int i = 0; i < model.regimes(); ++i) rhs.push_back(c.Q[i] + c.S(i).transpose() * Theta[i]);
  return solve_coupled_sylvester(model.dynamics.A, Acl, model.dynamics.C, Ccl, model.generator.pi,
                                 RegimeFamily(std::move(rhs)));
}

RegimeFamily nash_gain(const GameModel& model, const RegimeFamily& P1, const RegimeFamily& P2,
                       std::vector<double>* conditions, RegimeFamily* sigmas) {
  std::vector<Matrix> gains, sig;
  for (int i = 0; i < model.regimes(); ++i) {
    auto [Sigma, rhs] = stacked_constraint(model, P1[i], P2[i], i);
    const double cond = condition_number(Sigma);
    if (!(cond <= kSigmaConditionLimit)) {
      std::ostringstream os;
      os << "Sigma(" << i + 1 << ") condition number " << cond;
      throw Error(ErrorCode::SigmaSingular, os.str());
    }
    if (conditions) conditions->push_back(cond);
    gains.push_back(-Sigma.partialPivLu().solve(rhs));
    sig.push_back(std::move(Sigma));
  }
  if (sigmas) *sigmas = RegimeFamily(std::move(sig));
  return RegimeFamily(std::move(gains));
}

RegimeFamily zero_sum_gain(const GameModel& model, const RegimeFamily& P, const std::optional<RegimeFamily>& free) {
  std::vector<Matrix> gains;
  for (int i = 0; i < model.regimes(); ++i) {
    const Matrix N = care_N(model, 0, P[i], i);
    const Matrix Np = pinv(N);
    Matrix g = -Np * care_L(model, 0, P[i], i).transpose();
    if (free) g += (Matrix::Identity(N.rows(), N.cols()) - Np * N) * (*free)[i];
    gains.push_back(std::move(g));
  }
  return RegimeFamily(std::move(gains));
}

RegimeFamily initial_gain(const GameModel& model, const SolverOptions& opts) {
  RegimeFamily theta = opts.initialGain ? *opts.initialGain
                                        : RegimeFamily::zeros(model.regimes(), model.m(), model.n());
  if (!is_stabilizer(model.dynamics, model.generator, theta).stable()) {
    throw Error(ErrorCode::NotStabilizing, opts.initialGain ? "initial gain is not a stabilizer"
                                                            : "open loop is not L2-stable; supply an initial gain");
  }
  return theta;
}

template <class State>
struct Iterate {
  State state;
  RegimeFamily theta;
  double residual;
  int iterations;
};

/// Damped alternation: P-step for a fixed gain, then gain update from P.
template <class State>
Iterate<State> fixed_point(const GameModel& model, const SolverOptions& opts, RegimeFamily theta,
                           const std::function<State(const RegimeFamily&)>& solveP,
                           const std::function<RegimeFamily(const State&)>& gain,
                           const std::function<double(const State&, const RegimeFamily&)>& residual) {
  State state = solveP(theta);
  double res = residual(state, theta);
  double omega = 1.0;
  for (int it = 0; it <= opts.maxIterations; ++it) {
    if (res <= opts.tol) return {std::move(state), std::move(theta), res, it};
    if (it == opts.maxIterations) break;
    const RegimeFamily target = gain(state);
    while (true) {
      std::vector<Matrix> mixed;
      for (int i = 0; i < model.regimes(); ++i) mixed.push_back((1.0 - omega) * theta[i] + omega * target[i]);
      RegimeFamily candidate(std::move(mixed));
      std::optional<State> next;
      if (is_stabilizer(model.dynamics, model.generator, candidate).stable()) {
        try {
          next = solveP(candidate);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::NotStabilizing) throw;
        }
      }
      if (!next) {
        omega *= 0.5;
        if (omega < kOmegaFloor) throw Error(ErrorCode::LostStability, "damping exhausted on a non-stabilizing gain");
        continue;
      }
      const double r = residual(*next, candidate);
      if (r > res && omega * 0.5 >= kOmegaFloor) {
        omega *= 0.5;
        continue;
      }
      state = std::move(*next);
      theta = std::move(candidate);
      res = r;
      break;
    }
  }
  std::ostringstream os;
  os << "no convergence after " << opts.maxIterations << " iterations (residual " << res << ")";
  throw Error(ErrorCode::MaxIterations, os.str());
}

using Pair = std::array<RegimeFamily, 2>;

void require_kind(const GameModel& model, GameKind kind, const char* solver) {
  if (model.kind != kind) {
    throw Error(ErrorCode::PreconditionViolated,
                std::string(solver) + (kind == GameKind::ZeroSum ? " needs a zero-sum model"
                                                                 : " needs a non-zero-sum model"));
  }
}

}  // namespace

Matrix pinv(const Matrix& M, double tol) {
  if (M.size() == 0) return Matrix::Zero(M.cols(), M.rows());
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = tol * s(0);
  Vector inv = Vector::Zero(s.size());
  for (Index k = 0; k < s.size(); ++k) {
    if (s(k) > cutoff && s(k) > 0.0) inv(k) = 1.0 / s(k);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

RegimeFamily solve_coupled_sylvester(const RegimeFamily& AL, const RegimeFamily& AR, const RegimeFamily& CL,
                                     const RegimeFamily& CR, const Matrix& pi, const RegimeFamily& rhs) {
  const int L = AL.size();
  const Index n = AL.rows();
  const Index nn = n * n;
  const Matrix I = Matrix::Identity(n, n);
  Matrix op = Matrix::Zero(L * nn, L * nn);
  Vector b(L * nn);
  for (int i = 0; i < L; ++i) {
    op.block(i * nn, i * nn, nn, nn) = Eigen::kroneckerProduct(I, AL[i].transpose()) +
                                       Eigen::kroneckerProduct(AR[i].transpose(), I) +
                                       Eigen::kroneckerProduct(CR[i].transpose(), CL[i].transpose());
    for (int j = 0; j < L; ++j) op.block(i * nn, j * nn, nn, nn).diagonal().array() += pi(i, j);
    b.segment(i * nn, nn) = -rhs[i].reshaped();
  }
  Eigen::PartialPivLU<Matrix> lu(op);
  if (!(lu.rcond() > 1e-14)) throw Error(ErrorCode::NotStabilizing, "coupled Sylvester operator is singular");
  const Vector x = lu.solve(b);
  std::vector<Matrix> out;
  for (int i = 0; i < L; ++i) out.push_back(x.segment(i * nn, nn).reshaped(n, n));
  return RegimeFamily(std::move(out));
}

Matrix care_L(const GameModel& model, int player, const Matrix& P, int i) {
  const Dynamics& d = model.dynamics;
  const Matrix D = d.D(i);
  return P * d.B(i) + d.C[i].transpose() * P * D + model.cost(player).S(i).transpose();
}

Matrix care_N(const GameModel& model, int player, const Matrix& P, int i) {
  const Matrix D = model.dynamics.D(i);
  return D.transpose() * P * D + model.cost(player).R(i);
}

std::pair<Matrix, Matrix> stacked_constraint(const GameModel& model, const Matrix& P1, const Matrix& P2, int i) {
  const Dynamics& d = model.dynamics;
  const int m = d.m();
  Matrix Sigma(m, m);
  Matrix rhs(m, d.n);
  const Matrix D = d.D(i);
  const Matrix* P[2] = {&P1, &P2};
  Index row = 0;
  for (int k = 0; k < 2; ++k) {
    const Index mk = k == 0 ? d.m1 : d.m2;
    if (mk == 0) continue;
    const CostBlock& c = model.cost(k);
    const Matrix& p = *P[k];
    const Matrix& Dk = d.Dk(k, i);
    Sigma.middleRows(row, mk) = player_rows(c.R(i), d, k) + Dk.transpose() * p * D;
    rhs.middleRows(row, mk) = d.Bk(k, i).transpose() * p + Dk.transpose() * p * d.C[i] + (k == 0 ? c.S1[i] : c.S2[i]);
    row += mk;
  }
  return {Sigma, rhs};
}

ResidualReport open_rep_residuals(const GameModel& model, const RegimeFamily& P1, const RegimeFamily& P2,
                                  const RegimeFamily& Theta) {
  ResidualReport r;
  const RegimeFamily* P[2] = {&P1, &P2};
  for (int i = 0; i < model.regimes(); ++i) {
    std::array<double, 2> eq{0, 0}, con{0, 0};
    for (int k = 0; k < 2; ++k) {
      const Matrix e = base_term(model, k, model.generator.pi, *P[k], i) + care_L(model, k, (*P[k])[i], i) * Theta[i];
      eq[k] = frob(e);
    }
    auto [Sigma, rhs] = stacked_constraint(model, P1[i], P2[i], i);
    const Matrix c = Sigma * Theta[i] + rhs;
    const Dynamics& d = model.dynamics;
    con[0] = frob(c.topRows(d.m1));
    con[1] = frob(c.bottomRows(d.m2));
    r.equation.push_back(eq);
    r.constraint.push_back(con);
    r.maxEquation = std::max({r.maxEquation, eq[0], eq[1]});
    r.maxConstraint = std::max({r.maxConstraint, con[0], con[1]});
  }
  return r;
}

ResidualReport closed_nash_residuals(const GameModel& model, const RegimeFamily& P1, const RegimeFamily& P2,
                                     const RegimeFamily& Theta) {
  ResidualReport r;
  const RegimeFamily* P[2] = {&P1, &P2};
  for (int i = 0; i < model.regimes(); ++i) {
    std::array<double, 2> eq{0, 0}, con{0, 0};
    const Matrix& t = Theta[i];
    for (int k = 0; k < 2; ++k) {
      const Matrix& p = (*P[k])[i];
      const Matrix Lk = care_L(model, k, p, i);
      const Matrix e = base_term(model, k, model.generator.pi, *P[k], i) + t.transpose() * care_N(model, k, p, i) * t +
                       Lk * t + t.transpose() * Lk.transpose();
      eq[k] = frob(e);
    }
    auto [Sigma, rhs] = stacked_constraint(model, P1[i], P2[i], i);
    const Matrix c = Sigma * t + rhs;
    const Dynamics& d = model.dynamics;
    con[0] = frob(c.topRows(d.m1));
    con[1] = frob(c.bottomRows(d.m2));
    r.equation.push_back(eq);
    r.constraint.push_back(con);
    r.maxEquation = std::max({r.maxEquation, eq[0], eq[1]});
    r.maxConstraint = std::max({r.maxConstraint, con[0], con[1]});
  }
  return r;
}

ResidualReport zero_sum_residuals(const GameModel& model, const RegimeFamily& P, const RegimeFamily& Theta) {
  ResidualReport r;
  for (int i = 0; i < model.regimes(); ++i) {
    const Matrix L = care_L(model, 0, P[i], i);
    const Matrix N = care_N(model, 0, P[i], i);
    const double eq = frob(base_term(model, 0, model.generator.pi, P, i) - L * pinv(N) * L.transpose());
    const double con = frob(N * Theta[i] + L.transpose());
    r.equation.push_back({eq, 0.0});
    r.constraint.push_back({con, 0.0});
    r.maxEquation = std::max(r.maxEquation, eq);
    r.maxConstraint = std::max(r.maxConstraint, con);
  }
  return r;
}

ResidualReport care_residuals(const GameModel& model, const NonSymCareSolution& sol) {
  return open_rep_residuals(model, sol.P1, sol.P2, sol.Theta);
}

ResidualReport care_residuals(const GameModel& model, const SymCareSolution& sol) {
  return closed_nash_residuals(model, sol.P1, sol.P2, sol.Theta);
}

ResidualReport care_residuals(const GameModel& model, const ZeroSumCareSolution& sol) {
  return zero_sum_residuals(model, sol.P, sol.Theta);
}

NonSymCareSolution solve_open_rep_cares(const GameModel& input, const SolverOptions& opts) {
  const GameModel model = normalized(input);
  require_kind(model, GameKind::NonZeroSum, "solve_open_rep_cares");
  auto it = fixed_point<Pair>(
      model, opts, initial_gain(model, opts),
      [&](const RegimeFamily& theta) {
        return Pair{sylvester_for_gain(model, 0, theta), sylvester_for_gain(model, 1, theta)};
      },
      [&](const Pair& p) { return nash_gain(model, p[0], p[1], nullptr, nullptr); },
      [&](const Pair& p, const RegimeFamily& theta) { return open_rep_residuals(model, p[0], p[1], theta).max(); });
  NonSymCareSolution sol;
  sol.P1 = std::move(it.state[0]);
  sol.P2 = std::move(it.state[1]);
  sol.Theta = std::move(it.theta);
  nash_gain(model, sol.P1, sol.P2, &sol.sigmaCondition, &sol.Sigma);
  sol.residual = it.residual;
  sol.iterations = it.iterations;
  return sol;
}

SymCareSolution solve_closed_nash_cares(const GameModel& input, const SolverOptions& opts) {
  const GameModel model = normalized(input);
  require_kind(model, GameKind::NonZeroSum, "solve_closed_nash_cares");
  auto it = fixed_point<Pair>(
      model, opts, initial_gain(model, opts),
      [&](const RegimeFamily& theta) {
        return Pair{lyapunov_for_gain(model, 0, theta), lyapunov_for_gain(model, 1, theta)};
      },
      [&](const Pair& p) { return nash_gain(model, p[0], p[1], nullptr, nullptr); },
      [&](const Pair& p, const RegimeFamily& theta) {
        return closed_nash_residuals(model, p[0], p[1], theta).max();
      });
  SymCareSolution sol;
  sol.P1 = std::move(it.state[0]);
  sol.P2 = std::move(it.state[1]);
  sol.Theta = std::move(it.theta);
  const Dynamics& d = model.dynamics;
  std::vector<Matrix> t1, t2;
  for (int i = 0; i < model.regimes(); ++i) {
    t1.push_back(sol.Theta[i].topRows(d.m1));
    t2.push_back(sol.Theta[i].bottomRows(d.m2));
    const Matrix n11 = d.D1[i].transpose() * sol.P1[i] * d.D1[i] + model.cost1.R11[i];
    const Matrix n22 = d.D2[i].transpose() * sol.P2[i] * d.D2[i] + model.cost2.R22[i];
    sol.n11Min.push_back(min_eigenvalue_symmetric(0.5 * (n11 + n11.transpose())));
    sol.n22Min.push_back(min_eigenvalue_symmetric(0.5 * (n22 + n22.transpose())));
    if (sol.n11Min.back() < -kStrictMargin || sol.n22Min.back() < -kStrictMargin) {
      std::ostringstream os;
      os << "regime " << i + 1 << ": min eig N11^1 = " << sol.n11Min.back() << ", N22^2 = " << sol.n22Min.back();
      throw Error(ErrorCode::SignConstraintFailed, os.str());
    }
  }
  sol.Theta1 = RegimeFamily(std::move(t1));
  sol.Theta2 = RegimeFamily(std::move(t2));
  sol.residual = it.residual;
  sol.iterations = it.iterations;
  return sol;
}

ZeroSumCareSolution solve_zero_sum_care(const GameModel& input, const SolverOptions& opts) {
  const GameModel model = normalized(input);
  require_kind(model, GameKind::ZeroSum, "solve_zero_sum_care");
  auto it = fixed_point<RegimeFamily>(
      model, opts, initial_gain(model, opts),
      [&](const RegimeFamily& theta) { return lyapunov_for_gain(model, 0, theta); },
      [&](const RegimeFamily& P) { return zero_sum_gain(model, P, opts.freeParameter); },
      [&](const RegimeFamily& P, const RegimeFamily& theta) { return zero_sum_residuals(model, P, theta).max(); });
  ZeroSumCareSolution sol;
  sol.P = std::move(it.state);
  sol.Theta = std::move(it.theta);
  sol.residual = it.residual;
  sol.iterations = it.iterations;
  sol.n11Ok = sol.n22Ok = sol.rangeOk = true;
  const Dynamics& d = model.dynamics;
  for (int i = 0; i < model.regimes(); ++i) {
    const Matrix N = care_N(model, 0, sol.P[i], i);
    const Matrix L = care_L(model, 0, sol.P[i], i);
    const Matrix n11 = N.topLeftCorner(d.m1, d.m1);
    const Matrix n22 = N.bottomRightCorner(d.m2, d.m2);
    if (min_eigenvalue_symmetric(0.5 * (n11 + n11.transpose())) < -kStrictMargin) sol.n11Ok = false;
    if (max_eigenvalue_symmetric(0.5 * (n22 + n22.transpose())) > kStrictMargin) sol.n22Ok = false;
    const Matrix gap = L * (Matrix::Identity(N.rows(), N.cols()) - N * pinv(N));
    if (frob(gap) > opts.tol * std::max(1.0, frob(L))) {
      std::ostringstream os;
      os << "regime " << i + 1 << ": |L(I - N N+)| = " << frob(gap);
      throw Error(ErrorCode::RangeConditionFailed, os.str());
    }
  }
  return sol;
}

}  // namespace regime_riccati
