#pragma once

// Shared construction and oracle utilities for the test suites.

#include <cmath>
#include <vector>

#include "ictrl/gramian.hpp"
#include "ictrl/quadrature.hpp"
#include "ictrl/system.hpp"
#include "ictrl/types.hpp"

namespace ictrl::testing {

inline ImpulsiveSystem scalar_integrator(double horizon = 1.0) {
  ImpulsiveSystem sys;
  Matrix gen(1, 1);
  gen << 0.0;
  sys.model = SemigroupModel::dense(gen);
  sys.horizon = horizon;
  sys.input_map = Matrix::Identity(1, 1);
  sys.initial_state = Vector::Zero(1);
  return sys;
}

inline ImpulsiveSystem two_impulse_rotation() {
  ImpulsiveSystem sys;
  Matrix a(2, 2);
  a << 0.0, 1.0, -1.0, 0.0;
  sys.model = SemigroupModel::dense(a);
  sys.horizon = 2.0;
  sys.impulse_times = {0.7, 1.4};
  Matrix b1(2, 2), b2(2, 2);
  b1 << 0.0, 0.0, 0.0, -0.5;
  b2 << 0.1, 0.0, 0.0, 0.2;
  sys.jump_maps = {b1, b2};
  Matrix d1(2, 1), d2(2, 1);
  d1 << 1.0, 0.0;
  d2 << 0.0, 1.0;
  sys.impulse_inputs = {d1, d2};
  sys.input_map = Matrix::Identity(2, 2);
  sys.initial_state = Vector::Zero(2);
  sys.initial_state << 1.0, 0.0;
  return sys;
}

/// Explicit discrete input-to-terminal-state matrix L: one column block of
/// sqrt(w_q) * (transfer at node q) * Omega per continuous node, then one
/// block per impulse channel.  The Gramian must equal L L* in the model
/// metric.
inline Matrix explicit_input_matrix(const ImpulsiveSystem& sys,
                                    const QuadratureGrid& grid) {
  const int d = sys.dimension();
  const int m = static_cast<int>(sys.input_map.cols());
  const int p = sys.impulse_count();
  const Matrix id = Matrix::Identity(d, d);

  int cols = 0;
  for (const SubintervalGrid& sub : grid.subintervals)
    cols += static_cast<int>(sub.nodes.size()) * m;
  for (const Matrix& din : sys.impulse_inputs)
    cols += static_cast<int>(din.cols());

  Matrix l = Matrix::Zero(d, cols);
  int at = 0;
  for (int k = 0; k <= p; ++k) {
    const SubintervalGrid& sub = grid.subintervals[k];
    const double t_end = sub.t_end;
    Matrix carry = id;
    if (k < p)
      carry = downstream_map(sys, k + 1) * (id + sys.jump_maps[k]);
    for (std::size_t q = 0; q < sub.nodes.size(); ++q) {
      l.block(0, at, d, m) = std::sqrt(sub.weights[q]) * carry *
                             sys.model.evolve_matrix(t_end - sub.nodes[q]) *
                             sys.input_map;
      at += m;
    }
  }
  for (int k = 1; k <= p; ++k) {
    const Matrix block = downstream_map(sys, k) * sys.impulse_inputs[k - 1];
    l.block(0, at, d, block.cols()) = block;
    at += static_cast<int>(block.cols());
  }
  return l;
}

/// Relative Frobenius distance between the assembled Gramian and L L*,
/// both taken in the symmetrized frame.
inline double factorization_gap(const ImpulsiveSystem& sys,
                                const QuadratureGrid& grid,
                                const GramianSet& gramians) {
  const Matrix l = explicit_input_matrix(sys, grid);
  const Matrix lhat = sys.model.metric_sqrt().asDiagonal() * l;
  const Matrix what = gramians.symmetrized(gramians.total);
  const Matrix diff = what - lhat * lhat.transpose();
  return diff.norm() / std::max(1e-300, what.norm());
}

}  // namespace ictrl::testing
