#pragma once

#include <vector>

#include "ictrl/propagator.hpp"
#include "ictrl/synthesis.hpp"
#include "ictrl/system.hpp"
#include "ictrl/types.hpp"

namespace ictrl {

/// Initial history phi on [-tau, 0], stored as uniform samples with
/// piecewise-cubic interpolation between them.
class HistorySegment {
 public:
  static HistorySegment sampled(double tau, const ForcingFn& phi,
                                int samples_per_delay = 64);
  static HistorySegment constant(double tau, const Vector& value,
                                 int samples_per_delay = 64);

  double delay() const { return tau_; }
  /// phi(theta) for theta in [-tau, 0].
  Vector value(double theta) const;
  const Vector& at_zero() const { return samples_.back(); }

 private:
  double tau_ = 0.0;
  std::vector<double> times_;  // uniform on [-tau, 0]
  std::vector<Vector> samples_;
};

/// The differentiated correction term sigma(t, x_t).
struct NeutralTerm {
  enum class Kind {
    zero,
    bounded_demo,  // c * tanh(x(t - tau)), componentwise
    tabulated,     // known function of t only
  };
  Kind kind = Kind::zero;
  double coefficient = 0.0;
  ForcingFn forcing;  // Kind::tabulated
};

/// Which time the correction term is subtracted at in the mild form.
/// `frozen_terminal` keeps sigma evaluated at the horizon on every
/// subinterval (the published form, under which the synthesis identity
/// cancels exactly); `instantaneous` subtracts sigma(t, x_t), the
/// standard neutral convention that matches a delay-aware time stepper.
enum class NeutralConvention { frozen_terminal, instantaneous };

struct NeutralSystem {
  ImpulsiveSystem base;
  NeutralTerm sigma;
  double delay = 0.0;
  HistorySegment history;
  NeutralConvention convention = NeutralConvention::frozen_terminal;

  void validate() const;
};

/// Mild solution of the neutral system by fixed-point iteration; each pass
/// freezes sigma and the nonlinearity along the previous iterate.  With
/// sigma == zero this is exactly mild_solve_semilinear.
PicardResult neutral_mild_solve(const NeutralSystem& sys, const ControlFn& u,
                                const std::vector<Vector>& v,
                                const QuadratureGrid& grid,
                                const PicardOptions& opts = {});

/// Outer synthesis loop for the neutral system; the moment vector carries
/// the correction-term contributions.  With sigma == zero this is exactly
/// synthesize_semilinear.
SynthesisResult neutral_synthesize(const NeutralSystem& sys,
                                   const GramianSet& gramians,
                                   const QuadratureGrid& grid, const Vector& h,
                                   double alpha, const OuterOptions& opts = {});

/// Alpha sweep over the neutral synthesis pipeline.
SweepResult alpha_sweep(const NeutralSystem& sys, const GramianSet& gramians,
                        const QuadratureGrid& grid, const Vector& h,
                        const std::vector<double>& alphas,
                        const OuterOptions& opts = {});

}  // namespace ictrl
