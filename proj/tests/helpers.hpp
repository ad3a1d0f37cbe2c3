#pragma once

#include <regime_riccati/model.hpp>

#include <cstring>
#include <random>
#include <vector>

namespace testing_support {

using namespace regime_riccati;

inline Matrix mat(Index rows, Index cols, std::initializer_list<double> values) {
  Matrix out(rows, cols);
  auto it = values.begin();
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) out(r, c) = *it++;
  }
  return out;
}

inline Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

inline RegimeFamily one(const Matrix& m) { return RegimeFamily(std::vector<Matrix>{m}); }

/// 2x2 families listed row-major per regime.
inline RegimeFamily fam22(std::initializer_list<std::initializer_list<double>> regimes) {
  std::vector<Matrix> out;
  for (const auto& r : regimes) out.push_back(mat(2, 2, r));
  return RegimeFamily(std::move(out));
}

inline RegimeFamily fam42(std::initializer_list<std::initializer_list<double>> regimes) {
  std::vector<Matrix> out;
  for (const auto& r : regimes) out.push_back(mat(4, 2, r));
  return RegimeFamily(std::move(out));
}

/// Single-regime scalar game dX = (aX + b1 u1 + b2 u2)dt + (cX + d1 u1 + d2 u2)dW.
inline GameModel scalar_zero_sum(double a, double c, double b1, double b2, double d1, double d2, double q,
                                 double r11, double r22) {
  Dynamics d;
  d.n = 1;
  d.m1 = 1;
  d.m2 = 1;
  d.A = one(scalar(a));
  d.C = one(scalar(c));
  d.B1 = one(scalar(b1));
  d.B2 = one(scalar(b2));
  d.D1 = one(scalar(d1));
  d.D2 = one(scalar(d2));
  CostBlock cost = CostBlock::zeros(1, 1, 1, 1);
  cost.Q = one(scalar(q));
  cost.R11 = one(scalar(r11));
  cost.R22 = one(scalar(r22));
  return embed_zero_sum(d, Generator{Matrix::Zero(1, 1)}, cost);
}

/// Single-regime scalar one-player problem (m2 = 0) as a non-zero-sum game.
inline GameModel scalar_one_player(double a, double c, double b, double dd, double q, double r) {
  Dynamics d;
  d.n = 1;
  d.m1 = 1;
  d.m2 = 0;
  d.A = one(scalar(a));
  d.C = one(scalar(c));
  d.B1 = one(scalar(b));
  d.B2 = one(Matrix::Zero(1, 0));
  d.D1 = one(scalar(dd));
  d.D2 = one(Matrix::Zero(1, 0));
  CostBlock cost = CostBlock::zeros(1, 1, 1, 0);
  cost.Q = one(scalar(q));
  cost.R11 = one(scalar(r));
  GameModel m;
  m.dynamics = d;
  m.generator = Generator{Matrix::Zero(1, 1)};
  m.cost1 = cost;
  m.cost2 = cost;
  m.kind = GameKind::NonZeroSum;
  return m;
}

inline Matrix random_matrix(std::mt19937_64& rng, Index r, Index c, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix out(r, c);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) out(i, j) = u(rng);
  }
  return out;
}

inline Matrix random_generator(std::mt19937_64& rng, int L) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  Matrix pi = Matrix::Zero(L, L);
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) {
      if (i != j) pi(i, j) = u(rng);
    }
    pi(i, i) = -pi.row(i).sum();
  }
  return pi;
}

inline RegimeFamily random_family(std::mt19937_64& rng, int L, Index r, Index c, double scale) {
  std::vector<Matrix> out;
  for (int i = 0; i < L; ++i) out.push_back(random_matrix(rng, r, c, scale));
  return RegimeFamily(std::move(out));
}

inline RegimeFamily random_spd(std::mt19937_64& rng, int L, Index n, double floor, double scale) {
  std::vector<Matrix> out;
  for (int i = 0; i < L; ++i) {
    const Matrix G = random_matrix(rng, n, n, scale);
    out.push_back(G * G.transpose() + floor * Matrix::Identity(n, n));
  }
  return RegimeFamily(std::move(out));
}

/// Dynamics whose uncontrolled part may or may not be dissipative.
inline Dynamics random_dynamics(std::mt19937_64& rng, int L, int n, int m1, int m2, double shift) {
  Dynamics d;
  d.n = n;
  d.m1 = m1;
  d.m2 = m2;
  std::vector<Matrix> A;
  for (int i = 0; i < L; ++i) A.push_back(random_matrix(rng, n, n, 1.0) - shift * Matrix::Identity(n, n));
  d.A = RegimeFamily(std::move(A));
  d.C = random_family(rng, L, n, n, 0.5);
  d.B1 = random_family(rng, L, n, m1, 1.0);
  d.B2 = random_family(rng, L, n, m2, 1.0);
  d.D1 = random_family(rng, L, n, m1, 0.3);
  d.D2 = random_family(rng, L, n, m2, 0.3);
  return d;
}

/// Strongly stable, well-conditioned zero-sum instance (R11 > 0, R22 < 0).
inline GameModel random_zero_sum(std::mt19937_64& rng, int L, int n) {
  Dynamics d = random_dynamics(rng, L, n, 1, 1, 3.0);
  CostBlock c = CostBlock::zeros(L, n, 1, 1);
  c.Q = random_spd(rng, L, n, 0.5, 0.5);
  c.R11 = random_spd(rng, L, 1, 1.0, 0.5);
  c.R22 = -random_spd(rng, L, 1, 3.0, 0.5);
  return embed_zero_sum(d, Generator{random_generator(rng, L)}, c);
}

/// Strongly stable non-zero-sum instance with positive definite own-control weights.
inline GameModel random_nonzero_sum(std::mt19937_64& rng, int L, int n) {
  GameModel m;
  m.dynamics = random_dynamics(rng, L, n, 1, 1, 3.0);
  m.generator = Generator{random_generator(rng, L)};
  for (CostBlock* c : {&m.cost1, &m.cost2}) {
    *c = CostBlock::zeros(L, n, 1, 1);
    c->Q = random_spd(rng, L, n, 0.5, 0.5);
    c->R11 = random_spd(rng, L, 1, 1.0, 0.5);
    c->R22 = random_spd(rng, L, 1, 1.0, 0.5);
  }
  m.kind = GameKind::NonZeroSum;
  return m;
}

inline bool bitwise_equal(const RegimeFamily& a, const RegimeFamily& b) {
  if (a.size() != b.size()) return false;
  for (int i = 0; i < a.size(); ++i) {
    if (a[i].rows() != b[i].rows() || a[i].cols() != b[i].cols()) return false;
    for (Index k = 0; k < a[i].size(); ++k) {
      if (std::memcmp(a[i].data() + k, b[i].data() + k, sizeof(double)) != 0) return false;
    }
  }
  return true;
}

}  // namespace testing_support
