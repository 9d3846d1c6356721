#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ictrl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Control signal t -> m-vector, evaluable anywhere on [0, b].
using ControlFn = std::function<Vector(double)>;

/// State-independent forcing t -> d-vector (a known inhomogeneity).
using ForcingFn = std::function<Vector(double)>;

/// Quadrature-level accuracy the bundled configurations are expected to
/// reach with the default grid (composite Gauss-Legendre, order 8).
inline constexpr double kQuadratureTolerance = 1e-8;

/// Failure of a numerical step that is not an input error (divergence,
/// loss of positive definiteness, residual blow-up).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed-point style iteration ran out of its iteration budget.  Carries
/// the gap history so callers can report how the iteration behaved.
class NonConvergenceError : public NumericalError {
 public:
  NonConvergenceError(const std::string& what, int iterations,
                      std::vector<double> gap_history)
      : NumericalError(what),
        iterations(iterations),
        gap_history(std::move(gap_history)) {}

  int iterations;
  std::vector<double> gap_history;
};

}  // namespace ictrl
