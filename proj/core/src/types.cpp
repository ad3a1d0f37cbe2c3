#include "regime_riccati/types.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <sstream>

namespace regime_riccati {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::NegativeOffDiagonal: return "NegativeOffDiagonal";
    case ErrorCode::RowSumNonzero: return "RowSumNonzero";
    case ErrorCode::Reducible: return "Reducible";
    case ErrorCode::DimensionOverflow: return "DimensionOverflow";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::OutOfScope: return "OutOfScope";
    case ErrorCode::SigmaSingular: return "SigmaSingular";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::LostStability: return "LostStability";
    case ErrorCode::NotStabilizing: return "NotStabilizing";
    case ErrorCode::SignConstraintFailed: return "SignConstraintFailed";
    case ErrorCode::RangeConditionFailed: return "RangeConditionFailed";
    case ErrorCode::SingularEtaSystem: return "SingularEtaSystem";
    case ErrorCode::SingularResolvent: return "SingularResolvent";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

RegimeFamily::RegimeFamily(std::vector<Matrix> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) return;
  rows_ = entries_.front().rows();
  cols_ = entries_.front().cols();
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].rows() != rows_ || entries_[i].cols() != cols_) {
      std::ostringstream os;
      os << "regime " << i + 1 << " has shape " << entries_[i].rows() << "x" << entries_[i].cols()
         << ", expected " << rows_ << "x" << cols_;
      throw Error(ErrorCode::ShapeMismatch, os.str());
    }
  }
}

RegimeFamily RegimeFamily::zeros(int regimes, Index rows, Index cols) {
  return RegimeFamily(std::vector<Matrix>(static_cast<std::size_t>(regimes), Matrix::Zero(rows, cols)));
}

RegimeFamily RegimeFamily::constant(int regimes, const Matrix& value) {
  return RegimeFamily(std::vector<Matrix>(static_cast<std::size_t>(regimes), value));
}

void RegimeFamily::set(int i, Matrix value) {
  if (value.rows() != rows_ || value.cols() != cols_) {
    throw Error(ErrorCode::ShapeMismatch, "entry does not match family shape");
  }
  entries_.at(static_cast<std::size_t>(i)) = std::move(value);
}

RegimeFamily RegimeFamily::operator-() const {
  std::vector<Matrix> out;
  out.reserve(entries_.size());
  for (const auto& m : entries_) out.push_back(-m);
  return RegimeFamily(std::move(out));
}

RegimeFamily RegimeFamily::transposed() const {
  std::vector<Matrix> out;
  out.reserve(entries_.size());
  for (const auto& m : entries_) out.push_back(m.transpose());
  return RegimeFamily(std::move(out));
}

RegimeFamily RegimeFamily::symmetrized() const {
  std::vector<Matrix> out;
  out.reserve(entries_.size());
  for (const auto& m : entries_) out.push_back(0.5 * (m + m.transpose()));
  return RegimeFamily(std::move(out));
}

double RegimeFamily::max_abs_diff(const RegimeFamily& other) const {
  if (other.size() != size() || other.rows() != rows_ || other.cols() != cols_) {
    throw Error(ErrorCode::ShapeMismatch, "families differ in shape");
  }
  double d = 0.0;
  for (int i = 0; i < size(); ++i) {
    if (rows_ * cols_ > 0) d = std::max(d, ((*this)[i] - other[i]).cwiseAbs().maxCoeff());
  }
  return d;
}

double RegimeFamily::max_abs() const {
  double d = 0.0;
  for (const auto& m : entries_) {
    if (m.size() > 0) d = std::max(d, m.cwiseAbs().maxCoeff());
  }
  return d;
}

double max_eigenvalue_symmetric(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double min_eigenvalue_symmetric(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

const char* version() { return REGIME_RICCATI_VERSION; }

}  // namespace regime_riccati
