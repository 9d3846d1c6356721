#pragma once

#include <vector>

#include "ictrl/types.hpp"

namespace ictrl {

/// Dense matrix exponential by scaling-and-squaring with a degree-13 Pade
/// approximant.  Accurate to ~1e-14 relative for ||A|| up to the scaling
/// threshold times 2^s; intended range here is ||A * dt|| <= 50.
Matrix matrix_exponential(const Matrix& a);

enum class SemigroupKind {
  dense,     // generator given as a dense d x d matrix
  spectral,  // diagonal generator, eigenvalues lambda_1..lambda_N
  wave,      // N second-order modes, state (a_1, b_1, ..., a_N, b_N), d = 2N
};

/// Evaluator for the semigroup S(t) and its adjoint in one of three
/// representations.  The wave representation lives in a weighted inner
/// product (weight m^2 on the position coefficient of mode m), under which
/// S(t) is an isometry; adjoints are always taken in the model's inner
/// product.
class SemigroupModel {
 public:
  static SemigroupModel dense(Matrix generator);
  static SemigroupModel spectral(Vector eigenvalues);
  static SemigroupModel wave(int modes);

  SemigroupKind kind() const { return kind_; }
  int dimension() const { return dim_; }

  const Matrix& generator() const;    // dense only
  const Vector& eigenvalues() const;  // spectral only
  int mode_count() const;             // wave only

  /// Componentwise scale g with <x, y> = sum g_i^2 x_i y_i.  All ones
  /// except for the wave representation (g = m on position slots).
  const Vector& metric_sqrt() const { return metric_sqrt_; }
  double inner(const Vector& x, const Vector& y) const;
  double norm(const Vector& x) const;

  /// S(dt) x.  Requires dt >= 0 and finite x of matching dimension.
  Vector evolve(double dt, const Vector& x) const;
  /// S*(dt) x, the adjoint action in the model's inner product.
  Vector evolve_adjoint(double dt, const Vector& x) const;

  Matrix evolve_matrix(double dt) const;
  Matrix evolve_adjoint_matrix(double dt) const;

  /// A x (generator action; used by the time-stepping oracle).
  Vector apply_generator(const Vector& x) const;

  /// Adjoint of a matrix viewed as an operator on the model's space:
  /// G^{-1} M^T G with G = diag(metric_sqrt^2).
  Matrix adjoint_of(const Matrix& m) const;

 private:
  SemigroupModel() = default;

  SemigroupKind kind_ = SemigroupKind::dense;
  int dim_ = 0;
  Matrix generator_;
  Vector eigenvalues_;
  int modes_ = 0;
  Vector metric_sqrt_;
};

}  // namespace ictrl
