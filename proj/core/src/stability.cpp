#include "regime_riccati/stability.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace regime_riccati {

namespace {

struct ProposedBounds {
  double mQ, MQ, mR, MR, base;
};

void require_zero_sum_preconditions(const GameModel& model) {
  if (model.kind != GameKind::ZeroSum) {
    throw Error(ErrorCode::PreconditionViolated, "convexity-concavity check needs a zero-sum model");
  }
  const CostBlock& c = model.cost1;
  const double off = c.S1.max_abs() + c.S2.max_abs() + c.R12.max_abs();
  if (off > 0.0) throw Error(ErrorCode::PreconditionViolated, "requires S1 = S2 = 0 and R12 = 0");
}

ProposedBounds bounds(const GameModel& model) {
  const CostBlock& c = model.cost1;
  const Dynamics& d = model.dynamics;
  ProposedBounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                   -std::numeric_limits<double>::infinity()};
  for (int i = 0; i < model.regimes(); ++i) {
    b.mQ = std::min(b.mQ, min_eigenvalue_symmetric(c.Q[i]));
    b.MQ = std::max(b.MQ, max_eigenvalue_symmetric(c.Q[i]));
    b.mR = std::min(b.mR, min_eigenvalue_symmetric(c.R11[i]));
    b.MR = std::max(b.MR, max_eigenvalue_symmetric(c.R22[i]));
    const Matrix sym = d.A[i] + d.A[i].transpose() + d.C[i].transpose() * d.C[i];
    b.base = std::max(b.base, max_eigenvalue_symmetric(sym));
  }
  return b;
}

double mu(const Dynamics& d, int player, double eps) {
  double out = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < d.regimes(); ++i) {
    const Matrix g = d.Bk(player, i) + d.C[i].transpose() * d.Dk(player, i);
    const Matrix h = g.transpose() * g / eps + d.Dk(player, i).transpose() * d.Dk(player, i);
    out = std::max(out, max_eigenvalue_symmetric(h));
  }
  return out;
}

bool first_condition(const ProposedBounds& b, double Meps, double mu1) {
  return Meps < -kStrictMargin && b.mR - mu1 * b.mQ / Meps >= -kStrictMargin;
}

bool second_condition(const ProposedBounds& b, double Meps, double mu2) {
  return Meps < -kStrictMargin && b.MR - mu2 * b.MQ / Meps <= kStrictMargin;
}

}  // namespace

const char* to_string(StabilityMethod method) {
  return method == StabilityMethod::Dissipativity ? "Dissipativity" : "LyapunovSpectral";
}

StabilityVerdict dissipativity_check(const RegimeFamily& A, const RegimeFamily& C) {
  if (A.size() != C.size() || A.rows() != C.rows() || A.cols() != C.cols() || A.rows() != A.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "A and C must be same-size square families");
  }
  StabilityVerdict v{StabilityMethod::Dissipativity, true, {}};
  for (int i = 0; i < A.size(); ++i) {
    const double top = max_eigenvalue_symmetric(A[i] + A[i].transpose() + C[i].transpose() * C[i]);
    v.witness.push_back(top);
    if (!(top < -kStrictMargin)) v.stable = false;
  }
  return v;
}

Matrix lyapunov_operator(const RegimeFamily& A, const RegimeFamily& C, const Generator& gen) {
  const int L = A.size();
  const Index n = A.rows();
  const Index nn = n * n;
  if (gen.size() != L || C.size() != L || C.rows() != n || A.cols() != n) {
    throw Error(ErrorCode::ShapeMismatch, "A, C and generator disagree");
  }
  if (static_cast<Index>(L) * nn > kMaxLyapunovDimension) {
    std::ostringstream os;
    os << "L*n^2 = " << L * nn << " exceeds " << kMaxLyapunovDimension;
    throw Error(ErrorCode::DimensionOverflow, os.str());
  }
  const Matrix I = Matrix::Identity(n, n);
  Matrix op = Matrix::Zero(L * nn, L * nn);
  for (int i = 0; i < L; ++i) {
    const Matrix At = A[i].transpose();
    const Matrix Ct = C[i].transpose();
    op.block(i * nn, i * nn, nn, nn) = Eigen::kroneckerProduct(I, At) + Eigen::kroneckerProduct(At, I) +
                                       Eigen::kroneckerProduct(Ct, Ct);
    for (int j = 0; j < L; ++j) {
      op.block(i * nn, j * nn, nn, nn).diagonal().array() += gen.pi(i, j);
    }
  }
  return op;
}

StabilityVerdict lyapunov_spectral_check(const RegimeFamily& A, const RegimeFamily& C, const Generator& gen) {
  const Matrix op = lyapunov_operator(A, C, gen);
  Eigen::EigenSolver<Matrix> es(op, false);
  const double abscissa = es.eigenvalues().real().maxCoeff();
  return StabilityVerdict{StabilityMethod::LyapunovSpectral, abscissa < -kStrictMargin, {abscissa}};
}

std::pair<RegimeFamily, RegimeFamily> closed_loop(const Dynamics& dynamics, const RegimeFamily& Theta) {
  if (Theta.size() != dynamics.regimes() || Theta.rows() != dynamics.m() || Theta.cols() != dynamics.n) {
    std::ostringstream os;
    os << "gain family is " << Theta.size() << " x " << Theta.rows() << "x" << Theta.cols() << ", expected "
       << dynamics.regimes() << " x " << dynamics.m() << "x" << dynamics.n;
    throw Error(ErrorCode::ShapeMismatch, os.str());
  }
  std::vector<Matrix> Acl, Ccl;
  for (int i = 0; i < dynamics.regimes(); ++i) {
    Acl.push_back(dynamics.A[i] + dynamics.B(i) * Theta[i]);
    Ccl.push_back(dynamics.C[i] + dynamics.D(i) * Theta[i]);
  }
  return {RegimeFamily(std::move(Acl)), RegimeFamily(std::move(Ccl))};
}

StabilizerVerdict is_stabilizer(const Dynamics& dynamics, const Generator& gen, const RegimeFamily& Theta) {
  const auto [Acl, Ccl] = closed_loop(dynamics, Theta);
  return StabilizerVerdict{lyapunov_spectral_check(Acl, Ccl, gen), dissipativity_check(Acl, Ccl)};
}

StabilizerVerdict is_stabilizer(const Dynamics& dynamics, const Generator& gen, int player,
                                const RegimeFamily& ThetaK) {
  const int mk = player == 0 ? dynamics.m1 : dynamics.m2;
  if (ThetaK.size() != dynamics.regimes() || ThetaK.rows() != mk || ThetaK.cols() != dynamics.n) {
    throw Error(ErrorCode::ShapeMismatch, "player gain family has the wrong shape");
  }
  std::vector<Matrix> full;
  for (int i = 0; i < dynamics.regimes(); ++i) {
    Matrix t = Matrix::Zero(dynamics.m(), dynamics.n);
    t.middleRows(player == 0 ? 0 : dynamics.m1, mk) = ThetaK[i];
    full.push_back(std::move(t));
  }
  return is_stabilizer(dynamics, gen, RegimeFamily(std::move(full)));
}

std::array<bool, 2> check_convexity_sufficient(const GameModel& model) {
  std::array<bool, 2> ok{true, true};
  const int n = model.n();
  for (int k = 0; k < 2; ++k) {
    const CostBlock& c = model.cost(k);
    for (int i = 0; i < model.regimes(); ++i) {
      const Matrix& S = k == 0 ? c.S1[i] : c.S2[i];
      const Matrix& R = k == 0 ? c.R11[i] : c.R22[i];
      const Index mk = R.rows();
      Matrix block(n + mk, n + mk);
      block.topLeftCorner(n, n) = c.Q[i];
      block.topRightCorner(n, mk) = S.transpose();
      block.bottomLeftCorner(mk, n) = S;
      block.bottomRightCorner(mk, mk) = R;
      if (min_eigenvalue_symmetric(0.5 * (block + block.transpose())) < -kStrictMargin) ok[k] = false;
    }
  }
  return ok;
}

ConvexityConcavity check_convexity_concavity(const GameModel& model, double eps1, double eps2) {
  require_zero_sum_preconditions(model);
  if (!(eps1 > 0.0) || !(eps2 > 0.0)) throw Error(ErrorCode::InvalidConfig, "epsilons must be positive");
  const ProposedBounds b = bounds(model);
  if (!(b.mQ < 0.0 && b.MQ > 0.0)) {
    std::ostringstream os;
    os << "only m_Q < 0 < M_Q is covered (m_Q = " << b.mQ << ", M_Q = " << b.MQ << ")";
    throw Error(ErrorCode::OutOfScope, os.str());
  }
  ConvexityConcavity r;
  r.mQ = b.mQ;
  r.MQ = b.MQ;
  r.mR = b.mR;
  r.MR = b.MR;
  r.Meps1 = b.base + eps1;
  r.Meps2 = b.base + eps2;
  r.mu1 = mu(model.dynamics, 0, eps1);
  r.mu2 = mu(model.dynamics, 1, eps2);
  r.ok = first_condition(b, r.Meps1, r.mu1) && second_condition(b, r.Meps2, r.mu2);
  return r;
}

std::vector<double> epsilon_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 150; ++k) grid.push_back(std::pow(10.0, -3.0 + k / 25.0));
  return grid;
}

std::optional<std::pair<double, double>> search_epsilon(const GameModel& model) {
  // Validates preconditions and scope once.
  check_convexity_concavity(model, 1.0, 1.0);
  const ProposedBounds b = bounds(model);
  const auto grid = epsilon_grid();
  std::optional<double> e1, e2;
  for (double e : grid) {
    if (first_condition(b, b.base + e, mu(model.dynamics, 0, e))) {
      e1 = e;
      break;
    }
  }
  for (double e : grid) {
    if (second_condition(b, b.base + e, mu(model.dynamics, 1, e))) {
      e2 = e;
      break;
    }
  }
  if (e1 && e2) return std::make_pair(*e1, *e2);
  return std::nullopt;
}

}  // namespace regime_riccati
