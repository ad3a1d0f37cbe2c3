#include "regime_riccati/reference_data.hpp"

#include <initializer_list>

namespace regime_riccati {

namespace {

Matrix mat(Index rows, Index cols, std::initializer_list<double> values) {
  Matrix out(rows, cols);
  auto it = values.begin();
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) out(r, c) = *it++;
  }
  return out;
}

Matrix m22(double a, double b, double c, double d) { return mat(2, 2, {a, b, c, d}); }

RegimeFamily fam(std::initializer_list<Matrix> mats) { return RegimeFamily(std::vector<Matrix>(mats)); }

RegimeFamily gain(std::initializer_list<std::initializer_list<double>> regimes) {
  std::vector<Matrix> mats;
  for (const auto& r : regimes) mats.push_back(mat(4, 2, r));
  return RegimeFamily(std::move(mats));
}

Dynamics base_dynamics() {
  Dynamics d;
  d.n = 2;
  d.m1 = 2;
  d.m2 = 2;
  d.A = fam({m22(-3, 1, 0, -5), m22(-4, 0, 0, -3), m22(-5, 1, -1, -4)});
  d.C = fam({m22(1, 1, 0, -1), m22(1, -1, 1, 0), m22(0, 1, -1, 1)});
  return d;
}

Dynamics dynamics_12() {
  Dynamics d = base_dynamics();
  d.B1 = fam({m22(-2, 1, 3, -5), m22(-1, 0, 3, -3), m22(-2, 1, 0, -4)});
  d.B2 = fam({m22(1, 1, 2, -5), m22(3, 0, 1, -3), m22(1, 1, -1, -4)});
  d.D1 = fam({m22(2, 1, 0, -1), m22(-1, 0, 2, -3), m22(-4, 0, -1, -3)});
  d.D2 = fam({m22(-3, 2, 1, -5), m22(-1, 1, 1, -3), m22(-3, -1, -1, 0)});
  return d;
}

Dynamics dynamics_3() {
  Dynamics d = base_dynamics();
  d.B1 = fam({m22(-1, 0, 1, 1), m22(-1, 1, 1, 0), m22(0, 1, 1, 2)});
  d.B2 = fam({m22(1, 1, 0, -1), m22(2, 0, 1, -1), m22(0, 1, 2, -1)});
  d.D1 = fam({m22(1, 0, 1, -1), m22(-1, 0, 1, 1), m22(-1, 0, -1, -1)});
  d.D2 = fam({m22(1, 0, 1, 1), m22(0, 1, 1, 0), m22(1, -1, 0, 1)});
  return d;
}

/// Cost from 6x6 blocks over (x1, x2, u1a, u1b, u2a, u2b).
CostBlock cost_from_blocks(const std::vector<Matrix>& blocks) {
  std::vector<Matrix> Q, S1, S2, R11, R12, R22;
  for (const auto& b : blocks) {
    Q.push_back(b.block(0, 0, 2, 2));
    S1.push_back(b.block(2, 0, 2, 2));
    S2.push_back(b.block(4, 0, 2, 2));
    R11.push_back(b.block(2, 2, 2, 2));
    R12.push_back(b.block(2, 4, 2, 2));
    R22.push_back(b.block(4, 4, 2, 2));
  }
  return CostBlock{RegimeFamily(Q),   RegimeFamily(S1),  RegimeFamily(S2),
                   RegimeFamily(R11), RegimeFamily(R12), RegimeFamily(R22)};
}

GameModel example1() {
  const std::vector<Matrix> big1 = {
      mat(6, 6, {1.67,  -0.05, -0.02, -0.04, -1.25, 0.13,  -0.05, 1.63,  0.01,  0.06,  -0.11, 0.03,
                 -0.02, 0.01,  1.61,  -0.13, 0.01,  -1.03, -0.04, 0.06,  -0.13, 1.69,  -1.04, 0.18,
                 -1.25, -0.11, 0.01,  -1.04, -0.13, 0.04,  0.13,  0.03,  -1.03, 0.18,  0.04,  -0.15}),
      mat(6, 6, {1.70,  0.08,  0.02,  0.00,  -1.15, 0.13,  0.08,  1.66,  0.07,  0.01,  -0.11, 0.06,
                 0.02,  0.07,  1.59,  -0.10, 0.07,  -1.03, 0.00,  0.01,  -0.10, 1.65,  -1.04, 0.08,
                 -1.15, -0.11, 0.07,  -1.04, -0.19, 0.02,  0.13,  0.06,  -1.03, 0.08,  0.02,  -0.13}),
      mat(6, 6, {1.59,  -0.04, -0.03, 0.06,  -1.15, 0.03,  -0.04, 1.77,  -0.01, 0.06,  0.11,  0.06,
                 -0.03, -0.01, 1.57,  0.05,  0.07,  -0.03, 0.06,  0.06,  0.05,  1.67,  -0.04, 0.08,
                 -1.15, 0.11,  0.07,  -0.04, -0.11, -0.02, 0.03,  0.06,  -0.03, 0.08,  -0.02, -0.15}),
  };
  const std::vector<Matrix> big2 = {
      mat(6, 6, {1.69,  -0.02, -0.02, 0.00,  0.09,  -0.04, -0.02, 1.52,  -0.07, -0.01, -0.05, -0.03,
                 -0.02, -0.07, -1.59, 0.10,  -0.07, 1.03,  0.00,  -0.01, 0.10,  -1.65, 1.04,  -0.08,
                 0.09,  -0.05, -0.07, 1.04,  1.68,  -0.03, -0.04, -0.03, 1.03,  -0.08, -0.03, 1.71}),
      mat(6, 6, {1.67,  0.05,  0.02,  0.04,  0.14,  -0.03, 0.05,  1.64,  -0.01, -0.06, -0.01, 0.05,
                 0.02,  -0.01, -1.61, 0.13,  -0.01, 1.03,  0.04,  -0.06, 0.13,  -1.69, 1.04,  -0.18,
                 0.14,  -0.01, -0.01, 1.04,  1.65,  -0.01, -0.03, 0.05,  1.03,  -0.18, -0.01, 1.65}),
      mat(6, 6, {1.59,  0.03,  0.03,  -0.06, -0.08, -0.07, 0.03,  1.61,  0.01,  -0.06, 0.05,  -0.01,
                 0.03,  0.01,  -1.57, -0.05, -0.07, 0.03,  -0.06, -0.06, -0.05, -1.67, 0.04,  -0.08,
                 -0.08, 0.05,  -0.07, 0.04,  1.75,  -0.05, -0.07, -0.01, 0.03,  -0.08, -0.05, 1.62}),
  };
  GameModel model;
  model.dynamics = dynamics_12();
  model.generator = Generator{builtin_generator()};
  model.cost1 = cost_from_blocks(big1);
  model.cost2 = cost_from_blocks(big2);
  model.kind = GameKind::NonZeroSum;
  return model;
}

CostBlock zero_sum_cost(const Matrix& R11first, const Matrix& R22last) {
  CostBlock c = CostBlock::zeros(3, 2, 2, 2);
  c.Q = fam({m22(1.11, 0.11, 0.11, 1.02), m22(1.01, 0.13, 0.13, -1.12), m22(-1.01, 0.21, 0.21, -1.02)});
  c.R11 = fam({R11first, m22(5.37, -0.48, -0.48, 5.63), m22(5.11, 0.23, 0.23, 6.19)});
  c.R22 = fam({m22(-6.82, -0.34, -0.34, -5.88), m22(-6.01, -0.14, -0.14, -5.88), R22last});
  return c;
}

GameModel example2() {
  return embed_zero_sum(dynamics_12(), Generator{builtin_generator()},
                        zero_sum_cost(m22(3.11, 1.03, 1.03, 2.19), m22(-3.82, -1.04, -1.04, -2.88)));
}

GameModel example3() {
  return embed_zero_sum(dynamics_3(), Generator{builtin_generator()},
                        zero_sum_cost(m22(4.11, 1.03, 1.03, 6.19), m22(-5.82, -1.04, -1.04, -5.88)));
}

}  // namespace

Matrix builtin_generator() { return mat(3, 3, {-0.5, 0.3, 0.2, 0.2, -0.4, 0.2, 0.3, 0.2, -0.5}); }

GameModel builtin_example(int id) {
  switch (id) {
    case 1:
      return example1();
    case 2:
      return example2();
    case 3:
      return example3();
    default:
      throw Error(ErrorCode::InvalidConfig, "example id must be 1, 2 or 3");
  }
}

std::vector<ReferenceSolve> reference_tables(int id) {
  switch (id) {
    case 1:
      return {
          ReferenceSolve{"open-rep",
                       {{"P1", fam({m22(0.299917, 0.062075, 0.053329, 0.173778),
                                    m22(0.284044, -0.023310, -0.018440, 0.246700),
                                    m22(0.169793, 0.003297, 0.006381, 0.169369)})},
                        {"P2", fam({m22(0.317295, 0.064732, 0.060875, 0.166318),
                                    m22(0.214041, -0.027260, -0.018476, 0.239175),
                                    m22(0.161026, 0.010229, 0.016542, 0.151165)})},
                        {"Theta", gain({{-0.005455, -0.357973, -0.034157, 0.209280, 0.073937, -0.035403, -0.022786,
                                         0.018593},
                                        {0.217417, -0.204680, 0.032269, -0.004510, -0.440579, -0.012847, 0.021868,
                                         0.188713},
                                        {0.135889, 0.051144, -0.230434, 0.320481, -0.109368, 0.086127, -0.051071,
                                         0.403312}})}}},
          ReferenceSolve{"closed-nash",
                       {{"P1", fam({m22(0.284341, 0.053644, 0.053644, 0.177155),
                                    m22(0.299351, -0.021964, -0.021964, 0.248061),
                                    m22(0.176490, 0.005881, 0.005881, 0.156280)})},
                        {"P2", fam({m22(0.315689, 0.065654, 0.065654, 0.119917),
                                    m22(0.199450, -0.004419, -0.004419, 0.214877),
                                    m22(0.146503, 0.026456, 0.026456, 0.127204)})},
                        {"Theta", gain({{-0.013230, -0.358866, -0.021533, 0.215132, 0.068180, -0.023482, -0.025340,
                                         0.042498},
                                        {0.246859, -0.212545, 0.037244, -0.018403, -0.429070, -0.045493, 0.034625,
                                         0.183211},
                                        {0.130566, 0.073648, -0.229734, 0.304168, -0.103527, 0.070543, -0.021569,
                                         0.333343}})}}},
      };
    case 2:
      return {ReferenceSolve{
          "zero-sum",
          {{"P", fam({m22(0.201466, 0.054055, 0.054055, 0.102922), m22(0.091779, -0.005053, -0.005053, -0.206651),
                      m22(-0.156160, 0.045988, 0.045988, -0.166436)})},
           {"Theta", gain({{-0.047278, -0.209312, -0.020200, 0.209932, -0.039428, -0.030322, 0.023878, 0.047724},
                           {0.116822, 0.101032, -0.123268, -0.121514, -0.014035, -0.030890, 0.143139, 0.110170},
                           {-0.139384, -0.045542, 0.189717, -0.231162, 0.018796, 0.083455, -0.070742, 0.228681}})}}}};
    case 3:
      return {ReferenceSolve{
          "zero-sum",
          {{"P", fam({m22(0.208881, 0.056594, 0.056594, 0.119522), m22(0.097670, 0.000771, 0.000771, -0.194399),
                      m22(-0.135584, 0.036854, 0.036854, -0.160611)})},
           {"Theta", gain({{-0.034391, -0.030087, 0.007260, -0.024662, 0.070939, 0.022068, 0.033041, -0.022884},
                           {0.077430, 0.017903, 0.027153, 0.001070, -0.003238, -0.032191, 0.015675, 0.017204},
                           {0.016852, -0.011859, 0.036492, 0.025103, 0.005594, -0.076541, 0.004448, 0.038961}})}}}};
    default:
      throw Error(ErrorCode::InvalidConfig, "example id must be 1, 2 or 3");
  }
}

}  // namespace regime_riccati
