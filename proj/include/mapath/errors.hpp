#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mapath {

/// Determinant of a matrix field is not strictly positive at some point.
struct NonPositiveDeterminant : std::runtime_error {
  std::size_t point;
  explicit NonPositiveDeterminant(std::size_t p)
      : std::runtime_error("non-positive determinant at point " + std::to_string(p)), point(p) {}
};

/// A metric argument is singular or not positive definite at some point.
struct SingularMetric : std::runtime_error {
  std::size_t point;
  explicit SingularMetric(std::size_t p)
      : std::runtime_error("singular metric at point " + std::to_string(p)), point(p) {}
};

/// Candidate form lost positivity during a solve (backtracking hit its floor).
struct PositivityLost : std::runtime_error {
  std::size_t point;
  explicit PositivityLost(std::size_t p)
      : std::runtime_error("positivity lost at point " + std::to_string(p)), point(p) {}
};

/// Newton residual failed to decrease across the allowed backtracks.
struct NewtonDiverged : std::runtime_error {
  double residual;
  explicit NewtonDiverged(double r)
      : std::runtime_error("newton diverged, residual " + std::to_string(r)), residual(r) {}
};

/// An iterative method hit its iteration cap.
struct IterationLimit : std::runtime_error {
  explicit IterationLimit(const std::string& what) : std::runtime_error("iteration limit: " + what) {}
};

/// Config file syntax or schema problem; line == 0 means file-level.
struct ParseError : std::runtime_error {
  int line;
  ParseError(const std::string& msg, int ln)
      : std::runtime_error("parse error (line " + std::to_string(ln) + "): " + msg), line(ln) {}
};

/// Declared metric is not positive definite.
struct InvalidMetric : std::runtime_error {
  double min_eig;
  explicit InvalidMetric(double me)
      : std::runtime_error("metric not positive definite, min eigenvalue " + std::to_string(me)),
        min_eig(me) {}
};

/// Not enough samples for a fit.
struct InsufficientData : std::runtime_error {
  explicit InsufficientData(const std::string& what) : std::runtime_error("insufficient data: " + what) {}
};

}  // namespace mapath
