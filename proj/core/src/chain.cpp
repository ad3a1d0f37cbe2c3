#include "regime_riccati/chain.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <cmath>
#include <sstream>

namespace regime_riccati {

namespace {

constexpr double kRowSumTol = 1e-12;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double uniform_open(std::mt19937_64& engine) {
  // (0, 1]
  return 1.0 - std::generate_canonical<double, 53>(engine);
}

}  // namespace

std::vector<std::string> generator_issues(const Matrix& pi) {
  std::vector<std::string> issues;
  if (pi.rows() != pi.cols() || pi.rows() == 0) {
    issues.push_back("generator must be a non-empty square matrix");
    return issues;
  }
  for (Index i = 0; i < pi.rows(); ++i) {
    for (Index j = 0; j < pi.cols(); ++j) {
      if (i != j && pi(i, j) < 0.0) {
        std::ostringstream os;
        os << "negative off-diagonal rate pi(" << i + 1 << "," << j + 1 << ") = " << pi(i, j);
        issues.push_back(os.str());
      }
    }
    const double row = pi.row(i).sum();
    if (std::abs(row) > kRowSumTol) {
      std::ostringstream os;
      os << "row " << i + 1 << " sums to " << row;
      issues.push_back(os.str());
    }
  }
  return issues;
}

Generator validate_generator(const Matrix& pi) {
  if (pi.rows() != pi.cols() || pi.rows() == 0) {
    throw Error(ErrorCode::ShapeMismatch, "generator must be a non-empty square matrix");
  }
  for (Index i = 0; i < pi.rows(); ++i) {
    for (Index j = 0; j < pi.cols(); ++j) {
      if (i != j && pi(i, j) < 0.0) {
        std::ostringstream os;
        os << "pi(" << i + 1 << "," << j + 1 << ") = " << pi(i, j);
        throw Error(ErrorCode::NegativeOffDiagonal, os.str());
      }
    }
  }
  for (Index i = 0; i < pi.rows(); ++i) {
    const double row = pi.row(i).sum();
    if (std::abs(row) > kRowSumTol) {
      std::ostringstream os;
      os << "row " << i + 1 << " sums to " << row;
      throw Error(ErrorCode::RowSumNonzero, os.str());
    }
  }
  return Generator{pi};
}

int RegimePath::regime_at(double t) const {
  int r = regimes.front();
  for (std::size_t k = 1; k < times.size() && times[k] <= t; ++k) r = regimes[k];
  return r;
}

std::string RegimePath::to_csv() const {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(6);
  os << "t,regime\n";
  for (std::size_t k = 0; k < times.size(); ++k) os << times[k] << "," << regimes[k] + 1 << "\n";
  return os.str();
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::uint64_t key = splitmix64(seed);
  key = splitmix64(key ^ (stream * 0xD1B54A32D192ED03ULL));
  key = splitmix64(key ^ (index * 0x8CB92BA72F3D8DD7ULL));
  return std::mt19937_64(key);
}

RegimePath sample_path(const Generator& gen, int i0, double T, std::mt19937_64& engine) {
  if (i0 < 0 || i0 >= gen.size()) throw Error(ErrorCode::InvalidConfig, "initial regime out of range");
  if (!(T > 0.0)) throw Error(ErrorCode::InvalidConfig, "horizon must be positive");
  RegimePath path;
  path.horizon = T;
  path.times.push_back(0.0);
  path.regimes.push_back(i0);
  double t = 0.0;
  int i = i0;
  while (true) {
    const double rate = gen.exit_rate(i);
    if (rate <= 0.0) break;
    t += -std::log(uniform_open(engine)) / rate;
    if (t > T) break;
    double u = uniform_open(engine) * rate;
    int next = -1;
    for (int j = 0; j < gen.size(); ++j) {
      if (j == i || gen.pi(i, j) <= 0.0) continue;
      next = j;
      u -= gen.pi(i, j);
      if (u <= 0.0) break;
    }
    i = next;
    path.times.push_back(t);
    path.regimes.push_back(i);
  }
  return path;
}

RegimePath sample_path(const Generator& gen, int i0, double T, std::uint64_t seed) {
  auto engine = make_engine(seed, 0, 0);
  return sample_path(gen, i0, T, engine);
}

Vector stationary_distribution(const Generator& gen) {
  const int L = gen.size();
  Eigen::FullPivLU<Matrix> lu(gen.pi.transpose());
  lu.setThreshold(1e-10);
  if (L - lu.rank() != 1) {
    std::ostringstream os;
    os << "generator null space has dimension " << L - lu.rank();
    throw Error(ErrorCode::Reducible, os.str());
  }
  Matrix aug(L + 1, L);
  aug.topRows(L) = gen.pi.transpose();
  aug.row(L).setOnes();
  Vector rhs = Vector::Zero(L + 1);
  rhs(L) = 1.0;
  Vector p = aug.colPivHouseholderQr().solve(rhs);
  for (int i = 0; i < L; ++i) {
    if (p(i) < 0.0) p(i) = 0.0;
  }
  return p / p.sum();
}

}  // namespace regime_riccati
