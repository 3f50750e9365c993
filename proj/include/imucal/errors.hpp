#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace imucal {

/// Bad configuration (overlapping trajectory intervals, invalid rig, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; carries the offending line when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line = -1)
      : std::runtime_error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Motion does not excite enough axes to pin down a relative orientation.
/// Carries the ratio of the two smallest singular values of the stacked
/// delta-quaternion system (1 = fully degenerate, 0 = well conditioned).
class DegenerateMotionError : public std::runtime_error {
 public:
  explicit DegenerateMotionError(double score)
      : std::runtime_error("degenerate motion: singular-value ratio " + std::to_string(score)),
        score_(score) {}
  double score() const { return score_; }

 private:
  double score_;
};

/// The calibration parameters are not observable from the given data.
/// Carries an orthonormal basis of the (numerical) null space of the
/// marginal information matrix, one column per unobservable direction.
class UnobservableError : public std::runtime_error {
 public:
  explicit UnobservableError(Eigen::MatrixXd null_basis)
      : std::runtime_error("calibration parameters unobservable: " +
                           std::to_string(null_basis.cols()) + " null direction(s)"),
        null_basis_(std::move(null_basis)) {}
  const Eigen::MatrixXd& null_basis() const { return null_basis_; }

 private:
  Eigen::MatrixXd null_basis_;
};

/// Nuisance block could not be factorized even after jitter.
class SingularInformationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rank correlation of a constant series is undefined.
class UndefinedCorrelationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// NaN/Inf encountered where finite values are required.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace imucal
