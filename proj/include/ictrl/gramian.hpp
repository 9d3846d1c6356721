#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "ictrl/quadrature.hpp"
#include "ictrl/system.hpp"
#include "ictrl/types.hpp"

namespace ictrl {

/// The four controllability operators and their sum.  Stored as plain
/// matrices in the model's coordinates; on weighted-metric models they are
/// self-adjoint with respect to the metric, so symmetry and spectra are
/// read off the symmetrized frame G^{1/2} M G^{-1/2}.
struct GramianSet {
  Matrix terminal_input;    // continuous control over the final subinterval
  Matrix terminal_impulse;  // last impulse channel
  Matrix interior_input;    // continuous control on earlier subintervals
  Matrix interior_impulse;  // impulse channels before the last
  Matrix total;             // sum of the four
  Vector metric_sqrt;

  Matrix symmetrized(const Matrix& part) const;
  /// Eigenvalues of the symmetrized part, ascending.
  Vector eigenvalues(const Matrix& part) const;
  double min_eigenvalue() const;  // of the total
};

GramianSet assemble_gramians(const ImpulsiveSystem& sys,
                             const QuadratureGrid& grid);

/// (alpha I + W)^{-1} rhs for a plain symmetric PSD matrix (Euclidean
/// metric).  alpha must be positive; the solve is LDLT with a residual
/// check.
Vector resolvent_solve(const Matrix& w, double alpha, const Vector& rhs);

/// Resolvent solves against a fixed Gramian set, metric-aware, with one
/// cached factorization per alpha.  Safe for concurrent use.
class ResolventOperator {
 public:
  explicit ResolventOperator(const GramianSet& gramians);

  int dimension() const { return static_cast<int>(metric_sqrt_.size()); }
  /// x with (alpha I + W) x = rhs, in raw coordinates.
  Vector solve(double alpha, const Vector& rhs) const;

 private:
  Matrix w_sym_;  // symmetrized total
  Vector metric_sqrt_;
  mutable std::mutex mutex_;
  mutable std::map<double, std::shared_ptr<Eigen::LDLT<Matrix>>> cache_;
};

/// Decay table of ||alpha (alpha I + W)^{-1} x|| / ||x|| over a decreasing
/// alpha schedule: the numerical form of the strong resolvent-decay
/// condition that characterizes approximate controllability.
struct DecayTable {
  std::vector<double> alphas;
  std::vector<std::vector<double>> ratios;  // [alpha index][probe index]
  double threshold = 1e-3;
  bool satisfied = false;  // all probes below threshold at the smallest alpha
};

DecayTable resolvent_decay_table(const GramianSet& gramians,
                                 const SemigroupModel& model,
                                 const std::vector<double>& alphas,
                                 const std::vector<Vector>& probes,
                                 double threshold = 1e-3);

}  // namespace ictrl
