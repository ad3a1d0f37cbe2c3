#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace regime_riccati {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Strictness margin for every "< 0" and "⪰ 0" verdict.
inline constexpr double kStrictMargin = 1e-10;

enum class ErrorCode {
  ShapeMismatch,
  InvalidModel,
  NegativeOffDiagonal,
  RowSumNonzero,
  Reducible,
  DimensionOverflow,
  PreconditionViolated,
  OutOfScope,
  SigmaSingular,
  MaxIterations,
  LostStability,
  NotStabilizing,
  SignConstraintFailed,
  RangeConditionFailed,
  SingularEtaSystem,
  SingularResolvent,
  InvalidConfig,
  Io,
  Parse,
};

const char* to_string(ErrorCode code);

/// Library version string.
const char* version();

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// One matrix per Markov regime, all of the same shape.
class RegimeFamily {
 public:
  RegimeFamily() = default;
  explicit RegimeFamily(std::vector<Matrix> entries);

  static RegimeFamily zeros(int regimes, Index rows, Index cols);
  static RegimeFamily constant(int regimes, const Matrix& value);

  int size() const { return static_cast<int>(entries_.size()); }
  bool empty() const { return entries_.empty(); }
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

  const Matrix& operator[](int i) const { return entries_.at(static_cast<std::size_t>(i)); }
  /// Entry assignment must keep the family shape.
  void set(int i, Matrix value);

  const std::vector<Matrix>& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  RegimeFamily operator-() const;
  RegimeFamily transposed() const;
  RegimeFamily symmetrized() const;

  /// Max absolute entrywise difference; shapes must agree.
  double max_abs_diff(const RegimeFamily& other) const;
  double max_abs() const;

 private:
  std::vector<Matrix> entries_;
  Index rows_ = 0;
  Index cols_ = 0;
};

double max_eigenvalue_symmetric(const Matrix& m);
double min_eigenvalue_symmetric(const Matrix& m);

}  // namespace regime_riccati
