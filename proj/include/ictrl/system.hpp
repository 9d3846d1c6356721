#pragma once

#include <vector>

#include "ictrl/semigroup.hpp"
#include "ictrl/types.hpp"

namespace ictrl {

/// Nonlinear term kappa(t, x) of the state equation.
struct Nonlinearity {
  enum class Kind {
    none,         // kappa = 0
    quadratic,    // kappa = (0, c * x_0^2, 0, ...): second slot driven by
                  // the square of the first component
    bounded_sin,  // kappa = c * sin(x), componentwise
    tabulated,    // known function of t only, state-independent
  };

  Kind kind = Kind::none;
  double coefficient = 0.0;
  ForcingFn forcing;  // used by Kind::tabulated

  bool state_dependent() const {
    return kind == Kind::quadratic || kind == Kind::bounded_sin;
  }

  Vector eval(double t, const Vector& x) const;
};

/// Impulsive control system
///   x' = A x + Omega u + kappa(t, x)   on [0, b] away from impulse times,
///   x(t_k^+) = (I + B_k) x(t_k) + D_k v_k.
struct ImpulsiveSystem {
  SemigroupModel model;
  double horizon = 0.0;                // b
  std::vector<double> impulse_times;   // t_1 < ... < t_p, inside (0, b)
  std::vector<Matrix> jump_maps;       // B_k, d x d
  std::vector<Matrix> impulse_inputs;  // D_k, d x m_k
  Matrix input_map;                    // Omega, d x m
  Vector initial_state;                // x(0)
  Nonlinearity nonlinearity;

  int dimension() const { return model.dimension(); }
  int impulse_count() const { return static_cast<int>(impulse_times.size()); }

  /// Subinterval k covers (t_k, t_{k+1}] with t_0 = 0, t_{p+1} = b.
  double subinterval_begin(int k) const;
  double subinterval_end(int k) const;

  /// Throws std::invalid_argument on any dimension or schedule defect.
  void validate() const;
};

/// One state jump: (I + B) x + D v.
Vector jump_apply(const Matrix& b, const Matrix& d, const Vector& x,
                  const Vector& v);

/// Transfer matrix E_i carrying the state at t_i^+ to the horizon through
/// the remaining flow and jumps (with zero inputs):
///   E_p = S(b - t_p),   E_i = E_{i+1} (I + B_{i+1}) S(t_{i+1} - t_i).
/// E_0 maps the initial state to its terminal free-flow value.
Matrix downstream_map(const ImpulsiveSystem& sys, int i);

}  // namespace ictrl
