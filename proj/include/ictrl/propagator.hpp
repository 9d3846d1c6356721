#pragma once

#include <vector>

#include "ictrl/quadrature.hpp"
#include "ictrl/system.hpp"
#include "ictrl/trajectory.hpp"
#include "ictrl/types.hpp"

namespace ictrl {

struct PicardOptions {
  double tol = 1e-10;   // relative sup-norm change between iterates
  int max_iter = 200;
  double damping = 1.0;  // iterate blend factor, in (0, 1]
};

struct PicardResult {
  Trajectory trajectory;
  int iterations = 0;
  std::vector<double> gap_history;
};

/// Precomputed evolution operators for one (model, grid) pair.  The state
/// at a subinterval's end is always formed with the subinterval's full
/// Gauss quadrature, so terminal values match the Gramian assembly node
/// for node; interior samples use short auxiliary rules between stored
/// nodes.
class Propagator {
 public:
  Propagator(const SemigroupModel& model, const QuadratureGrid& grid);

  int piece_count() const { return static_cast<int>(plans_.size()); }
  const std::vector<double>& node_times(int k) const;
  const std::vector<double>& gap_times(int k) const;
  const std::vector<double>& stored_times(int k) const;
  /// Index of grid node q within the stored-time list of piece k.
  int node_store_index(int k, int q) const;

  /// Field samples at every node and gap time.
  struct Samples {
    std::vector<std::vector<Vector>> nodes;
    std::vector<std::vector<Vector>> gaps;
  };

  Samples zero_samples(int dim) const;
  Samples sample(const ForcingFn& f) const;
  Samples sample_control(const Matrix& input_map, const ControlFn& u) const;
  static void add_in_place(Samples& a, const Samples& b);

  /// States at the stored times of piece k, starting from x_start.
  std::vector<Vector> run_piece(int k, const Vector& x_start,
                                const Samples& f) const;

  Trajectory::Piece make_piece(int k, std::vector<Vector> states) const;

 private:
  struct Step {
    Matrix advance;                // S(to - from)
    std::vector<Matrix> gap_ops;   // w_j * S(to - sigma_j)
    std::vector<int> gap_index;    // positions into the piece's gap arrays
  };
  struct PiecePlan {
    double t_begin = 0.0;
    double t_end = 0.0;
    std::vector<double> panel_edges;
    std::vector<double> stored_times;
    std::vector<double> node_times;
    std::vector<double> gap_times;
    std::vector<int> node_store;   // grid node -> stored index
    std::vector<Step> steps;       // stored_times.size() - 1
    std::vector<Matrix> end_ops;   // w_q * S(t_end - s_q) per grid node
    Matrix full_advance;           // S(t_end - t_begin)
  };

  int dim_ = 0;
  std::vector<PiecePlan> plans_;
};

/// Mild solution of the linear system with a known state-independent
/// forcing (possibly zero).  `x0` overrides the system's initial state
/// when given.
Trajectory mild_solve_forced(const ImpulsiveSystem& sys, const ControlFn& u,
                             const std::vector<Vector>& v,
                             const QuadratureGrid& grid,
                             const ForcingFn& kappa,
                             const Vector* x0 = nullptr);

/// Linear mild solve; the nonlinearity kind must be `none` or `tabulated`.
Trajectory mild_solve_linear(const ImpulsiveSystem& sys, const ControlFn& u,
                             const std::vector<Vector>& v,
                             const QuadratureGrid& grid);

/// Fixed-point iteration on the mild form, freezing the nonlinearity along
/// the previous iterate.  State-independent kinds reduce to a single
/// linear solve.
PicardResult mild_solve_semilinear(const ImpulsiveSystem& sys,
                                   const ControlFn& u,
                                   const std::vector<Vector>& v,
                                   const QuadratureGrid& grid,
                                   const PicardOptions& opts = {});

/// Independent fixed-step classical RK4 integration between impulses.
Trajectory dense_oracle(const ImpulsiveSystem& sys, const ControlFn& u,
                        const std::vector<Vector>& v, double step);

}  // namespace ictrl
