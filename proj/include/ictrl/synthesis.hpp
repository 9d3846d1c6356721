#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ictrl/gramian.hpp"
#include "ictrl/propagator.hpp"
#include "ictrl/quadrature.hpp"
#include "ictrl/system.hpp"
#include "ictrl/types.hpp"

namespace ictrl {

/// Target defect: h minus the terminal value of the uncontrolled flow
/// (with the known forcing included).  Right-hand side of the regularized
/// control solve.
struct MomentVector {
  Vector defect;
};

MomentVector moment_vector(const ImpulsiveSystem& sys,
                           const QuadratureGrid& grid, const ForcingFn& kappa,
                           const Vector& h, const Vector* x0 = nullptr);

/// Regularized minimum-energy control pair: the continuous control and the
/// per-impulse controls, both adjoint images of one resolvent solve.
struct ControlLaw {
  double alpha = 0.0;
  Vector phi;  // (alpha I + W)^{-1} applied to the moment vector
  std::vector<Vector> impulse_controls;
  bool paper_literal = false;

  /// u(s); piecewise smooth between impulse times.
  Vector continuous(double s) const;
  ControlFn as_fn() const;

  // Evaluation state (per-subinterval adjoint tail vectors).
  SemigroupModel model;
  Matrix input_map_adjoint;         // Omega^T G
  std::vector<double> boundaries;   // 0, t_1, ..., t_p, b
  std::vector<Vector> tails;        // one per subinterval
};

/// Builds the control pair from phi = (alpha I + W)^{-1} p.  By default
/// the continuous and impulse laws are the exact adjoint of the
/// input-to-terminal-state map, which makes the closed-loop terminal
/// defect equal -alpha (alpha I + W)^{-1} p identically.  The literal
/// transcription of the published law (which omits the (I + B*) factors
/// in the interior products) is available for comparison.
ControlLaw synthesize_control(const ImpulsiveSystem& sys,
                              const GramianSet& gramians,
                              const ResolventOperator& resolvent, double alpha,
                              const MomentVector& moment,
                              bool paper_literal = false);

/// -alpha (alpha I + W)^{-1} p: the exact terminal defect of the linear
/// closed loop.
Vector predicted_deviation(const ResolventOperator& resolvent, double alpha,
                           const MomentVector& moment);

struct VerifyReport {
  double alpha = 0.0;
  double residual_abs = 0.0;  // ||(x(b) - h) - predicted|| in the model norm
  double residual_rel = 0.0;  // residual_abs / max(||p||, eps)
  double measured_defect = 0.0;
  double predicted_defect = 0.0;
};

/// Synthesizes the control for a known forcing, runs the closed loop, and
/// compares the measured terminal defect with the resolvent prediction.
VerifyReport verify_terminal_identity(const ImpulsiveSystem& sys,
                                      const GramianSet& gramians,
                                      const QuadratureGrid& grid,
                                      const ForcingFn& kappa, const Vector& h,
                                      double alpha,
                                      bool paper_literal = false);

struct OuterOptions {
  double outer_tol = 1e-9;
  int max_outer = 50;
  double damping = 1.0;
  PicardOptions picard;
  bool paper_literal = false;
};

struct SynthesisResult {
  ControlLaw law;
  Trajectory trajectory;
  int outer_iterations = 0;
  std::vector<double> gap_history;
  /// ||x(b) - h + alpha (alpha I + W)^{-1} p(x)|| with p evaluated on the
  /// returned trajectory.
  double terminal_identity_residual = 0.0;
  /// ||alpha (alpha I + W)^{-1} p(x)||, same p.
  double predicted_defect = 0.0;
};

/// Outer fixed-point loop for the semilinear system: freeze the
/// nonlinearity along the current iterate, synthesize, re-solve under the
/// new control, repeat.
SynthesisResult synthesize_semilinear(const ImpulsiveSystem& sys,
                                      const GramianSet& gramians,
                                      const QuadratureGrid& grid,
                                      const Vector& h, double alpha,
                                      const OuterOptions& opts = {});

enum class SweepMode { linear, semilinear };

struct SweepRow {
  double alpha = 0.0;
  double measured_error = 0.0;
  double predicted_error = 0.0;
  int outer_iters = 0;
  std::string status;  // ok | plateau | nonconverged | failed
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// Norm of the moment-vector component in the kernel of W (zero when W
  /// is positive definite); the sweep cannot descend below it.
  double kernel_plateau = 0.0;
};

SweepResult alpha_sweep(const ImpulsiveSystem& sys, const GramianSet& gramians,
                        const QuadratureGrid& grid, const Vector& h,
                        const std::vector<double>& alphas, SweepMode mode,
                        const OuterOptions& opts = {}, int jobs = 1);

std::vector<double> default_alpha_schedule();

}  // namespace ictrl
