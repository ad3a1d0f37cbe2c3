#include "regime_riccati/synthesis.hpp"

#include "regime_riccati/stability.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace regime_riccati {

namespace {

constexpr double kEtaResidualTol = 1e-10;
constexpr double kGainMatchTol = 1e-8;

/// Linear η-system: for player k and regime i,
///   (-λ + π_ii)η̄_k(i) + Σ_{j≠i} π_ij η̄_k(j) + Gk(i)ᵀη̄_k(i) + F_k(i)ν̄(i) + c_k(i) = 0,
///   ν̄(i) = K(i)[(B_lᵀη̄_l(i))_l + h(i)].
struct EtaSystem {
  int players = 1;
  std::vector<std::vector<Matrix>> drift;   // [k][i], n x n, already transposed
  std::vector<std::vector<Matrix>> feed;    // [k][i], n x m (empty when no ν coupling)
  std::vector<Matrix> K;                    // [i], m x m
  std::vector<Vector> h;                    // [i], m
  std::vector<std::vector<Vector>> offset;  // [k][i], n
};

Index block_of(int k, int i, int L, Index n) { return (static_cast<Index>(k) * L + i) * n; }

/// Rows of player l within an m-vector.
Index row_offset(const Dynamics& d, int l) { return l == 0 ? 0 : d.m1; }

std::vector<RegimeFamily> solve_system(const GameModel& model, const EtaSystem& s, double* residual) {
  const Dynamics& d = model.dynamics;
  const int L = model.regimes();
  const Index n = d.n;
  const double lambda = model.inhomogeneity->lambda;
  const Index dim = s.players * L * n;
  Matrix M = Matrix::Zero(dim, dim);
  Vector c = Vector::Zero(dim);
  for (int k = 0; k < s.players; ++k) {
    for (int i = 0; i < L; ++i) {
      const Index r = block_of(k, i, L, n);
      M.block(r, r, n, n) += s.drift[k][i];
      M.block(r, r, n, n).diagonal().array() -= lambda;
      for (int j = 0; j < L; ++j) M.block(r, block_of(k, j, L, n), n, n).diagonal().array() += model.generator.pi(i, j);
      c.segment(r, n) = s.offset[k][i];
      if (s.feed.empty()) continue;
      const Matrix FK = s.feed[k][i] * s.K[i];
      c.segment(r, n) += FK * s.h[i];
      for (int l = 0; l < s.players; ++l) {
        const Index ml = l == 0 ? d.m1 : d.m2;
        if (ml == 0) continue;
        M.block(r, block_of(l, i, L, n), n, n) += FK.middleCols(row_offset(d, l), ml) * d.Bk(l, i).transpose();
      }
    }
  }
  Eigen::PartialPivLU<Matrix> lu(M);
  if (!(lu.rcond() > 1e-14)) throw Error(ErrorCode::SingularEtaSystem, "eta system matrix is singular");
  const Vector z = lu.solve(-c);
  *residual = (M * z + c).cwiseAbs().maxCoeff();
  if (*residual > kEtaResidualTol * std::max(1.0, c.cwiseAbs().maxCoeff())) {
    std::ostringstream os;
    os << "eta system residual " << *residual;
    throw Error(ErrorCode::SingularEtaSystem, os.str());
  }
  std::vector<RegimeFamily> out;
  for (int k = 0; k < s.players; ++k) {
    std::vector<Matrix> fam;
    for (int i = 0; i < L; ++i) fam.push_back(z.segment(block_of(k, i, L, n), n));
    out.emplace_back(std::move(fam));
  }
  return out;
}

const Inhomogeneity& require_inhomogeneity(const GameModel& model) {
  if (!model.inhomogeneity) throw Error(ErrorCode::PreconditionViolated, "model has no inhomogeneity");
  return *model.inhomogeneity;
}

/// (B_lᵀη̄_l(i) + D_lᵀP_lσ̄(i) + ρ̄_lˡ(i))_l stacked.
Vector own_forcing(const GameModel& model, const std::array<const Matrix*, 2>& P,
                   const std::array<const Matrix*, 2>& eta, int i) {
  const Dynamics& d = model.dynamics;
  const Inhomogeneity& h = *model.inhomogeneity;
  Vector out(d.m());
  for (int l = 0; l < 2; ++l) {
    const Index ml = l == 0 ? d.m1 : d.m2;
    if (ml == 0) continue;
    Vector v = d.Dk(l, i).transpose() * (*P[l]) * h.sigmaBar[i] + (l == 0 ? h.rho1Bar[0][i] : h.rho2Bar[1][i]);
    if (eta[l]) v += d.Bk(l, i).transpose() * (*eta[l]);
    out.segment(row_offset(d, l), ml) = v;
  }
  return out;
}

EtaSystem nash_eta_system(const GameModel& model, const RegimeFamily& P1, const RegimeFamily& P2,
                          const RegimeFamily& Theta, bool closedLoop) {
  const Dynamics& d = model.dynamics;
  const Inhomogeneity& h = *model.inhomogeneity;
  const RegimeFamily* P[2] = {&P1, &P2};
  EtaSystem s;
  s.players = 2;
  s.drift.resize(2);
  s.feed.resize(2);
  s.offset.resize(2);
  for (int i = 0; i < model.regimes(); ++i) {
    auto [Sigma, rhs] = stacked_constraint(model, P1[i], P2[i], i);
    s.K.push_back(-Sigma.inverse());
    s.h.push_back(own_forcing(model, {&P1[i], &P2[i]}, {nullptr, nullptr}, i));
    const Matrix Acl = d.A[i] + d.B(i) * Theta[i];
    const Matrix Ccl = d.C[i] + d.D(i) * Theta[i];
    for (int k = 0; k < 2; ++k) {
      const Matrix& p = (*P[k])[i];
      const CostBlock& c = model.cost(k);
      if (!closedLoop) {
        s.drift[k].push_back(d.A[i].transpose());
        s.feed[k].push_back(care_L(model, k, p, i));
        s.offset[k].push_back(d.C[i].transpose() * p * h.sigmaBar[i] + p * h.bBar[i] + h.qBar[k][i]);
        continue;
      }
      // The opponent's offset enters player k's reduced problem through its state, noise and cost.
      const int o = 1 - k;
      const Index mo = o == 0 ? d.m1 : d.m2;
      const Matrix Rcols = c.R(i).middleCols(row_offset(d, o), mo);
      const Matrix& So = o == 0 ? c.S1[i] : c.S2[i];
      Matrix feed = Matrix::Zero(d.n, d.m());
      feed.middleCols(row_offset(d, o), mo) =
          Ccl.transpose() * p * d.Dk(o, i) + p * d.Bk(o, i) + So.transpose() + Theta[i].transpose() * Rcols;
      s.drift[k].push_back(Acl.transpose());
      s.feed[k].push_back(std::move(feed));
      s.offset[k].push_back(Ccl.transpose() * p * h.sigmaBar[i] + p * h.bBar[i] + h.qBar[k][i] +
                            Theta[i].transpose() * h.rho(k, i));
    }
  }
  return s;
}

/// Zero-sum Θ with the canonical choice -𝒩†𝓛ᵀ.
Matrix canonical_gain(const GameModel& model, const Matrix& P, int i) {
  return -pinv(care_N(model, 0, P, i)) * care_L(model, 0, P, i).transpose();
}

/// ρ̃ = Bᵀη̄ + DᵀPσ̄ + ρ̄ for the zero-sum game.
Vector rho_tilde(const GameModel& model, const Matrix& P, const Matrix& eta, int i) {
  const Dynamics& d = model.dynamics;
  const Inhomogeneity& h = *model.inhomogeneity;
  return d.B(i).transpose() * eta + d.D(i).transpose() * P * h.sigmaBar[i] + h.rho(0, i);
}

RegimeFamily nash_gain_from(const GameModel& model, const RegimeFamily& P1, const RegimeFamily& P2) {
  std::vector<Matrix> gains;
  for (int i = 0; i < model.regimes(); ++i) {
    auto [Sigma, rhs] = stacked_constraint(model, P1[i], P2[i], i);
    gains.push_back(-Sigma.partialPivLu().solve(rhs));
  }
  return RegimeFamily(std::move(gains));
}

Offset nash_offset(const GameModel& model, const RegimeFamily& P1, const RegimeFamily& P2, const EtaSolution& eta) {
  std::vector<Matrix> nu;
  for (int i = 0; i < model.regimes(); ++i) {
    auto [Sigma, rhs] = stacked_constraint(model, P1[i], P2[i], i);
    const Vector f = own_forcing(model, {&P1[i], &P2[i]}, {&eta.etaBar[0][i], &eta.etaBar[1][i]}, i);
    nu.push_back(-Sigma.partialPivLu().solve(f));
  }
  return Offset{eta.lambda, RegimeFamily(std::move(nu))};
}

void require_gain_match(const RegimeFamily& recomputed, const RegimeFamily& solver) {
  const double gap = recomputed.max_abs_diff(solver);
  if (gap > kGainMatchTol) {
    std::ostringstream os;
    os << "gain recomputed from P differs from the solver gain by " << gap;
    throw Error(ErrorCode::SigmaSingular, os.str());
  }
}

void require_stabilizer(const GameModel& model, const RegimeFamily& Theta) {
  if (!is_stabilizer(model.dynamics, model.generator, Theta).stable()) {
    throw Error(ErrorCode::NotStabilizing, "strategy gain is not a stabilizer");
  }
}

bool has_forcing(const GameModel& model) { return model.inhomogeneity.has_value(); }

/// Symmetric-part quadratic form helper.
double quad(const Vector& v, const Matrix& M) { return v.dot(M * v); }

}  // namespace

Vector EtaSolution::zJump(int player, int j, int from, double t) const {
  const RegimeFamily& e = etaBar.at(static_cast<std::size_t>(player));
  return std::exp(-lambda * t) * (e[j] - e[from]);
}

EtaSolution solve_eta(const GameModel& input, const NonSymCareSolution& sol) {
  const GameModel model = normalized(input);
  const Inhomogeneity& h = require_inhomogeneity(model);
  EtaSolution out;
  out.lambda = h.lambda;
  out.etaBar = solve_system(model, nash_eta_system(model, sol.P1, sol.P2, sol.Theta, false), &out.residual);
  return out;
}

EtaSolution solve_eta(const GameModel& input, const SymCareSolution& sol) {
  const GameModel model = normalized(input);
  const Inhomogeneity& h = require_inhomogeneity(model);
  EtaSolution out;
  out.lambda = h.lambda;
  const RegimeFamily Theta = nash_gain_from(model, sol.P1, sol.P2);
  out.etaBar = solve_system(model, nash_eta_system(model, sol.P1, sol.P2, Theta, true), &out.residual);
  return out;
}

EtaSolution solve_eta(const GameModel& input, const ZeroSumCareSolution& sol) {
  const GameModel model = normalized(input);
  const Inhomogeneity& h = require_inhomogeneity(model);
  const Dynamics& d = model.dynamics;
  EtaSystem s;
  s.players = 1;
  s.drift.resize(1);
  s.offset.resize(1);
  for (int i = 0; i < model.regimes(); ++i) {
    const Matrix& P = sol.P[i];
    const Matrix Theta = canonical_gain(model, P, i);
    const Matrix Ccl = d.C[i] + d.D(i) * Theta;
    s.drift[0].push_back((d.A[i] + d.B(i) * Theta).transpose());
    s.offset[0].push_back(Ccl.transpose() * P * h.sigmaBar[i] + Theta.transpose() * h.rho(0, i) + P * h.bBar[i] +
                          h.qBar[0][i]);
  }
  EtaSolution out;
  out.lambda = h.lambda;
  out.etaBar = solve_system(model, s, &out.residual);
  for (int i = 0; i < model.regimes(); ++i) {
    const Matrix N = care_N(model, 0, sol.P[i], i);
    const Vector rt = rho_tilde(model, sol.P[i], out.etaBar[0][i], i);
    const double gap = (N * pinv(N) * rt - rt).norm();
    if (gap > kEtaResidualTol * std::max(1.0, rt.norm())) {
      std::ostringstream os;
      os << "regime " << i + 1 << ": rho-tilde outside the range of N (gap " << gap << ")";
      throw Error(ErrorCode::RangeConditionFailed, os.str());
    }
  }
  return out;
}

StrategyPair open_rep_strategy(const GameModel& input, const NonSymCareSolution& sol) {
  const GameModel model = normalized(input);
  StrategyPair out;
  out.Theta = nash_gain_from(model, sol.P1, sol.P2);
  require_gain_match(out.Theta, sol.Theta);
  require_stabilizer(model, out.Theta);
  if (has_forcing(model)) out.nu = nash_offset(model, sol.P1, sol.P2, solve_eta(model, sol));
  return out;
}

StrategyPair closed_nash_strategy(const GameModel& input, const SymCareSolution& sol) {
  const GameModel model = normalized(input);
  StrategyPair out;
  out.Theta = nash_gain_from(model, sol.P1, sol.P2);
  require_gain_match(out.Theta, sol.Theta);
  require_stabilizer(model, out.Theta);
  if (has_forcing(model)) out.nu = nash_offset(model, sol.P1, sol.P2, solve_eta(model, sol));
  return out;
}

StrategyPair zero_sum_strategy(const GameModel& input, const ZeroSumCareSolution& sol,
                               const std::optional<RegimeFamily>& Pi) {
  const GameModel model = normalized(input);
  if (!sol.rangeOk) throw Error(ErrorCode::RangeConditionFailed, "solution does not satisfy the range condition");
  std::vector<Matrix> gains;
  for (int i = 0; i < model.regimes(); ++i) {
    const Matrix N = care_N(model, 0, sol.P[i], i);
    Matrix g = canonical_gain(model, sol.P[i], i);
    if (Pi) g += (Matrix::Identity(N.rows(), N.cols()) - pinv(N) * N) * (*Pi)[i];
    gains.push_back(std::move(g));
  }
  StrategyPair out;
  out.Theta = RegimeFamily(std::move(gains));
  require_stabilizer(model, out.Theta);
  if (has_forcing(model)) {
    const EtaSolution eta = solve_eta(model, sol);
    std::vector<Matrix> nu;
    for (int i = 0; i < model.regimes(); ++i) {
      const Matrix N = care_N(model, 0, sol.P[i], i);
      nu.push_back(-pinv(N) * rho_tilde(model, sol.P[i], eta.etaBar[0][i], i));
    }
    out.nu = Offset{eta.lambda, RegimeFamily(std::move(nu))};
  }
  return out;
}

double value_homogeneous(const RegimeFamily& P, const Vector& x, int i) { return x.dot(P[i] * x); }

Vector resolvent_integral(const Generator& gen, double lambda, const Vector& g) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::SingularResolvent, "lambda must be positive");
  const int L = gen.size();
  const Matrix M = 2.0 * lambda * Matrix::Identity(L, L) - gen.pi;
  Eigen::PartialPivLU<Matrix> lu(M);
  if (!(lu.rcond() > 1e-14)) throw Error(ErrorCode::SingularResolvent, "2λI - Π is singular");
  return lu.solve(g);
}

double value_inhomogeneous(const GameModel& input, const ZeroSumCareSolution& sol, const EtaSolution& eta,
                           const Vector& x, int i) {
  const GameModel model = normalized(input);
  const Inhomogeneity& h = require_inhomogeneity(model);
  Vector g(model.regimes());
  for (int j = 0; j < model.regimes(); ++j) {
    const Matrix& P = sol.P[j];
    const Matrix Np = pinv(care_N(model, 0, P, j));
    const Vector& e = eta.etaBar[0][j];
    const Vector rt = rho_tilde(model, P, e, j);
    g(j) = quad(h.sigmaBar[j], P) + 2.0 * e.dot(h.bBar[j].col(0)) - rt.dot(Np * rt);
  }
  const Vector integral = resolvent_integral(model.generator, h.lambda, g);
  return x.dot(sol.P[i] * x) + 2.0 * eta.etaBar[0][i].col(0).dot(x) + integral(i);
}

std::array<double, 2> value_inhomogeneous(const GameModel& input, const SymCareSolution& sol,
                                          const EtaSolution& eta, const Vector& x, int i) {
  const GameModel model = normalized(input);
  const Inhomogeneity& h = require_inhomogeneity(model);
  const Dynamics& d = model.dynamics;
  const RegimeFamily* P[2] = {&sol.P1, &sol.P2};
  const Offset nu = nash_offset(model, sol.P1, sol.P2, eta);
  std::array<double, 2> out{};
  for (int k = 0; k < 2; ++k) {
    const int o = 1 - k;
    const Index mk = k == 0 ? d.m1 : d.m2;
    const Index mo = o == 0 ? d.m1 : d.m2;
    Vector g(model.regimes());
    for (int j = 0; j < model.regimes(); ++j) {
      const Matrix& p = (*P[k])[j];
      const Vector& e = eta.etaBar[k][j];
      const Matrix N = care_N(model, k, p, j);
      const Matrix Nkk = N.block(row_offset(d, k), row_offset(d, k), mk, mk);
      const Matrix Nko = N.block(row_offset(d, k), row_offset(d, o), mk, mo);
      const Matrix Nok = N.block(row_offset(d, o), row_offset(d, k), mo, mk);
      const Matrix Noo = N.block(row_offset(d, o), row_offset(d, o), mo, mo);
      const Matrix NkkP = pinv(Nkk);
      // ρ̂_lᵏ = B_lᵀη̄_k + D_lᵀP_kσ̄ + ρ̄_lᵏ
      const Vector full = d.B(j).transpose() * e + d.D(j).transpose() * p * h.sigmaBar[j] + h.rho(k, j);
      const Vector rk = full.segment(row_offset(d, k), mk);
      const Vector ro = full.segment(row_offset(d, o), mo);
      const Vector nuO = nu.nuBar[j].col(0).segment(row_offset(d, o), mo);
      g(j) = 2.0 * e.dot(h.bBar[j].col(0)) + quad(h.sigmaBar[j], p) + 2.0 * (ro - Nok * NkkP * rk).dot(nuO) -
             rk.dot(NkkP * rk) + nuO.dot((Noo - Nok * NkkP * Nko) * nuO);
    }
    const Vector integral = resolvent_integral(model.generator, h.lambda, g);
    out[k] = x.dot((*P[k])[i] * x) + 2.0 * eta.etaBar[k][i].col(0).dot(x) + integral(i);
  }
  return out;
}

Decoupling make_decoupling(const NonSymCareSolution& sol, const std::optional<EtaSolution>& eta) {
  Decoupling out{{sol.P1, sol.P2}, std::nullopt, 0.0};
  if (eta) {
    out.etaBar = std::array<RegimeFamily, 2>{eta->etaBar.at(0), eta->etaBar.at(1)};
    out.lambda = eta->lambda;
  }
  return out;
}

Decoupling make_decoupling(const SymCareSolution& sol, const std::optional<EtaSolution>& eta) {
  Decoupling out{{sol.P1, sol.P2}, std::nullopt, 0.0};
  if (eta) {
    out.etaBar = std::array<RegimeFamily, 2>{eta->etaBar.at(0), eta->etaBar.at(1)};
    out.lambda = eta->lambda;
  }
  return out;
}

Decoupling make_decoupling(const ZeroSumCareSolution& sol, const std::optional<EtaSolution>& eta) {
  Decoupling out{{sol.P, -sol.P}, std::nullopt, 0.0};
  if (eta) {
    out.etaBar = std::array<RegimeFamily, 2>{eta->etaBar.at(0), -eta->etaBar.at(0)};
    out.lambda = eta->lambda;
  }
  return out;
}

Vector adjoint_state(const Decoupling& dec, int player, double t, int i, const Vector& X) {
  Vector y = dec.P[player][i] * X;
  if (dec.etaBar) y += std::exp(-dec.lambda * t) * (*dec.etaBar)[player][i];
  return y;
}

Vector jump_term(const Decoupling& dec, int player, int from, int to, const Vector& X) {
  return (dec.P[player][to] - dec.P[player][from]) * X;
}

double stationarity_residual(const GameModel& model, const Decoupling& dec, double t, int i, const Vector& X,
                             const Vector& u) {
  const Dynamics& d = model.dynamics;
  const double decay = model.inhomogeneity ? std::exp(-model.inhomogeneity->lambda * t) : 0.0;
  Vector noise = d.C[i] * X + d.D(i) * u;
  if (model.inhomogeneity) noise += decay * model.inhomogeneity->sigmaBar[i];
  double worst = 0.0;
  for (int k = 0; k < 2; ++k) {
    const Index mk = k == 0 ? d.m1 : d.m2;
    if (mk == 0) continue;
    const CostBlock& c = model.cost(k);
    const Vector Y = adjoint_state(dec, k, t, i, X);
    const Vector Z = dec.P[k][i] * noise;
    const Matrix Rk = c.R(i).middleRows(row_offset(d, k), mk);
    Vector r = d.Bk(k, i).transpose() * Y + d.Dk(k, i).transpose() * Z + (k == 0 ? c.S1[i] : c.S2[i]) * X + Rk * u;
    if (model.inhomogeneity) r += decay * model.inhomogeneity->rho(k, i).segment(row_offset(d, k), mk);
    worst = std::max(worst, r.norm());
  }
  return worst;
}

}  // namespace regime_riccati
