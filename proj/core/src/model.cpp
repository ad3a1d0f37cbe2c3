#include "regime_riccati/model.hpp"

#include <cmath>
#include <sstream>

namespace regime_riccati {

namespace {

constexpr double kSymmetryTol = 1e-12;

class Checker {
 public:
  Checker(int regimes, std::vector<Violation>& out) : regimes_(regimes), out_(out) {}

  bool shape(const std::string& name, const RegimeFamily& f, Index rows, Index cols) {
    if (f.size() != regimes_) {
      std::ostringstream os;
      os << name << " has " << f.size() << " regimes, expected " << regimes_;
      out_.push_back({"shape", os.str()});
      return false;
    }
    if (f.rows() != rows || f.cols() != cols) {
      std::ostringstream os;
      os << name << " is " << f.rows() << "x" << f.cols() << ", expected " << rows << "x" << cols;
      out_.push_back({"shape", os.str()});
      return false;
    }
    return true;
  }

  void symmetric(const std::string& name, const RegimeFamily& f) {
    for (int i = 0; i < f.size(); ++i) {
      if (f[i].size() == 0) continue;
      const double asym = (f[i] - f[i].transpose()).cwiseAbs().maxCoeff();
      if (asym > kSymmetryTol) {
        std::ostringstream os;
        os << name << "(" << i + 1 << ") asymmetric by " << asym;
        out_.push_back({"asymmetry", os.str()});
      }
    }
  }

 private:
  int regimes_;
  std::vector<Violation>& out_;
};

void check_cost(Checker& c, const std::string& prefix, const CostBlock& cost, int n, int m1, int m2) {
  if (c.shape(prefix + ".Q", cost.Q, n, n)) c.symmetric(prefix + ".Q", cost.Q);
  c.shape(prefix + ".S1", cost.S1, m1, n);
  c.shape(prefix + ".S2", cost.S2, m2, n);
  if (c.shape(prefix + ".R11", cost.R11, m1, m1)) c.symmetric(prefix + ".R11", cost.R11);
  c.shape(prefix + ".R12", cost.R12, m1, m2);
  if (c.shape(prefix + ".R22", cost.R22, m2, m2)) c.symmetric(prefix + ".R22", cost.R22);
}

bool exact_negation(const RegimeFamily& a, const RegimeFamily& b) {
  if (a.size() != b.size() || a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] != -b[i]) return false;
  }
  return true;
}

bool exact_negation(const CostBlock& a, const CostBlock& b) {
  return exact_negation(a.Q, b.Q) && exact_negation(a.S1, b.S1) && exact_negation(a.S2, b.S2) &&
         exact_negation(a.R11, b.R11) && exact_negation(a.R12, b.R12) && exact_negation(a.R22, b.R22);
}

CostBlock symmetrized(const CostBlock& c) {
  CostBlock out = c;
  out.Q = c.Q.symmetrized();
  out.R11 = c.R11.symmetrized();
  out.R22 = c.R22.symmetrized();
  return out;
}

}  // namespace

Matrix Dynamics::B(int i) const {
  Matrix out(n, m());
  out << B1[i], B2[i];
  return out;
}

Matrix Dynamics::D(int i) const {
  Matrix out(n, m());
  out << D1[i], D2[i];
  return out;
}

CostBlock CostBlock::zeros(int regimes, int n, int m1, int m2) {
  return CostBlock{RegimeFamily::zeros(regimes, n, n),   RegimeFamily::zeros(regimes, m1, n),
                   RegimeFamily::zeros(regimes, m2, n),  RegimeFamily::zeros(regimes, m1, m1),
                   RegimeFamily::zeros(regimes, m1, m2), RegimeFamily::zeros(regimes, m2, m2)};
}

Matrix CostBlock::S(int i) const {
  Matrix out(S1.rows() + S2.rows(), Q.cols());
  out << S1[i], S2[i];
  return out;
}

Matrix CostBlock::R(int i) const {
  const Index m1 = R11.rows();
  const Index m2 = R22.rows();
  Matrix out(m1 + m2, m1 + m2);
  out.topLeftCorner(m1, m1) = R11[i];
  out.topRightCorner(m1, m2) = R12[i];
  out.bottomLeftCorner(m2, m1) = R12[i].transpose();
  out.bottomRightCorner(m2, m2) = R22[i];
  return out;
}

CostBlock CostBlock::operator-() const { return CostBlock{-Q, -S1, -S2, -R11, -R12, -R22}; }

Inhomogeneity Inhomogeneity::zeros(int regimes, int n, int m1, int m2, double lambda) {
  Inhomogeneity h;
  h.lambda = lambda;
  h.bBar = RegimeFamily::zeros(regimes, n, 1);
  h.sigmaBar = RegimeFamily::zeros(regimes, n, 1);
  for (int k = 0; k < 2; ++k) {
    h.qBar[k] = RegimeFamily::zeros(regimes, n, 1);
    h.rho1Bar[k] = RegimeFamily::zeros(regimes, m1, 1);
    h.rho2Bar[k] = RegimeFamily::zeros(regimes, m2, 1);
  }
  return h;
}

Vector Inhomogeneity::rho(int player, int i) const {
  const auto& r1 = rho1Bar[player][i];
  const auto& r2 = rho2Bar[player][i];
  Vector out(r1.rows() + r2.rows());
  out << r1, r2;
  return out;
}

bool Inhomogeneity::is_zero() const {
  double mag = bBar.max_abs() + sigmaBar.max_abs();
  for (int k = 0; k < 2; ++k) mag += qBar[k].max_abs() + rho1Bar[k].max_abs() + rho2Bar[k].max_abs();
  return mag == 0.0;
}

std::string ValidationReport::summary() const {
  if (ok()) return "model valid";
  std::ostringstream os;
  os << violations.size() << " violation(s):";
  for (const auto& v : violations) os << "\n  [" << v.kind << "] " << v.message;
  return os.str();
}

ValidationReport validate(const GameModel& model) {
  ValidationReport report;
  auto& out = report.violations;
  const Dynamics& d = model.dynamics;
  const int L = d.regimes();
  if (d.n < 1 || d.m1 < 0 || d.m2 < 0 || d.m1 + d.m2 < 1) {
    out.push_back({"shape", "dimensions must satisfy n >= 1, m1, m2 >= 0, m1 + m2 >= 1"});
    return report;
  }
  if (L < 1) {
    out.push_back({"shape", "at least one regime is required"});
    return report;
  }
  if (model.generator.pi.rows() != L || model.generator.pi.cols() != L) {
    std::ostringstream os;
    os << "generator is " << model.generator.pi.rows() << "x" << model.generator.pi.cols() << ", expected " << L
       << "x" << L;
    out.push_back({"generator", os.str()});
  } else {
    for (const auto& issue : generator_issues(model.generator.pi)) out.push_back({"generator", issue});
  }

  Checker c(L, out);
  c.shape("A", d.A, d.n, d.n);
  c.shape("C", d.C, d.n, d.n);
  c.shape("B1", d.B1, d.n, d.m1);
  c.shape("B2", d.B2, d.n, d.m2);
  c.shape("D1", d.D1, d.n, d.m1);
  c.shape("D2", d.D2, d.n, d.m2);
  check_cost(c, "cost1", model.cost1, d.n, d.m1, d.m2);
  check_cost(c, "cost2", model.cost2, d.n, d.m1, d.m2);

  if (model.kind == GameKind::ZeroSum && !exact_negation(model.cost1, model.cost2)) {
    out.push_back({"zero-sum", "cost2 is not the negation of cost1"});
  }

  if (model.inhomogeneity) {
    const Inhomogeneity& h = *model.inhomogeneity;
    if (!(h.lambda > 0.0) || !std::isfinite(h.lambda)) {
      std::ostringstream os;
      os << "lambda must be positive, got " << h.lambda;
      out.push_back({"lambda", os.str()});
    }
    c.shape("bBar", h.bBar, d.n, 1);
    c.shape("sigmaBar", h.sigmaBar, d.n, 1);
    for (int k = 0; k < 2; ++k) {
      const std::string suffix = "_" + std::to_string(k + 1);
      c.shape("q" + std::to_string(k + 1) + "Bar", h.qBar[k], d.n, 1);
      c.shape("rho1Bar" + suffix, h.rho1Bar[k], d.m1, 1);
      c.shape("rho2Bar" + suffix, h.rho2Bar[k], d.m2, 1);
    }
  }
  return report;
}

GameModel normalized(const GameModel& model) {
  const ValidationReport report = validate(model);
  if (!report.ok()) throw Error(ErrorCode::InvalidModel, report.summary());
  GameModel out = model;
  out.cost1 = symmetrized(model.cost1);
  out.cost2 = model.kind == GameKind::ZeroSum ? -out.cost1 : symmetrized(model.cost2);
  return out;
}

GameModel embed_zero_sum(Dynamics dynamics, Generator generator, const CostBlock& cost,
                         std::optional<Inhomogeneity> inhomogeneity) {
  const int L = dynamics.regimes();
  GameModel model;
  model.dynamics = std::move(dynamics);
  model.generator = std::move(generator);
  model.cost1 = cost;
  model.cost2 = -cost;
  model.kind = GameKind::ZeroSum;
  if (inhomogeneity) {
    Inhomogeneity h = *inhomogeneity;
    h.qBar[1] = -h.qBar[0];
    h.rho1Bar[1] = -h.rho1Bar[0];
    h.rho2Bar[1] = -h.rho2Bar[0];
    model.inhomogeneity = std::move(h);
  }
  std::vector<Violation> shapeIssues;
  Checker shapes(L, shapeIssues);
  check_cost(shapes, "cost", cost, model.dynamics.n, model.dynamics.m1, model.dynamics.m2);
  for (const auto& v : shapeIssues) {
    if (v.kind == "shape") throw Error(ErrorCode::ShapeMismatch, v.message);
  }
  return model;
}

}  // namespace regime_riccati
