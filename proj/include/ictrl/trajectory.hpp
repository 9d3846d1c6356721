#pragma once

#include <vector>

#include "ictrl/types.hpp"

namespace ictrl {

/// Piecewise record of the state: one piece per inter-impulse subinterval.
/// The first state of piece k (k >= 1) is the right limit x(t_k^+); the
/// last state of piece k-1 is the left limit x(t_k).  Queries at an
/// impulse time return the left limit, matching x(t_k^-) = x(t_k).
class Trajectory {
 public:
  struct Piece {
    double t_begin = 0.0;
    double t_end = 0.0;
    std::vector<double> times;   // sorted, times.front() == t_begin
    std::vector<Vector> states;  // same length as times
    // Panel edges used when the piece came from the quadrature solver;
    // empty for uniform-step (oracle) trajectories.
    std::vector<double> panel_edges;
  };

  Trajectory() = default;
  explicit Trajectory(std::vector<Piece> pieces);

  const std::vector<Piece>& pieces() const { return pieces_; }
  int piece_count() const { return static_cast<int>(pieces_.size()); }

  const Vector& initial() const { return pieces_.front().states.front(); }
  const Vector& terminal() const { return pieces_.back().states.back(); }

  /// Left limit x(t_k) at the k-th impulse time, k = 1..p.
  const Vector& left_limit(int k) const;
  /// Right limit x(t_k^+) at the k-th impulse time, k = 1..p.
  const Vector& right_limit(int k) const;

  /// Interpolated state; exact at stored node times.  At an impulse time
  /// the left limit is returned.
  Vector value(double t) const;

  /// Max over stored nodes of the infinity-norm state difference.  Both
  /// trajectories must share the same node layout.
  double sup_distance(const Trajectory& other) const;

  /// Largest infinity-norm over stored states.
  double sup_norm() const;

  bool all_finite() const;

  /// Componentwise blend (1 - theta) * this + theta * other, used for
  /// damped fixed-point iterations.  Layouts must match.
  Trajectory blend(const Trajectory& other, double theta) const;

 private:
  std::vector<Piece> pieces_;
};

}  // namespace ictrl
