#include "ictrl/neutral.hpp"

#include <algorithm>
#include <cmath>

namespace ictrl {

HistorySegment HistorySegment::sampled(double tau, const ForcingFn& phi,
                                       int samples_per_delay) {
  if (!(tau > 0.0))
    throw std::invalid_argument("HistorySegment: delay must be positive");
  if (!phi) throw std::invalid_argument("HistorySegment: missing history");
  const int n = std::max(4, samples_per_delay);
  HistorySegment seg;
  seg.tau_ = tau;
  seg.times_.resize(n + 1);
  seg.samples_.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    seg.times_[i] = -tau + tau * static_cast<double>(i) / n;
    seg.samples_[i] = phi(seg.times_[i]);
    if (!seg.samples_[i].allFinite())
      throw std::invalid_argument("HistorySegment: non-finite history value");
  }
  seg.times_.back() = 0.0;
  return seg;
}

HistorySegment HistorySegment::constant(double tau, const Vector& value,
                                        int samples_per_delay) {
  return sampled(
      tau, [&value](double) { return value; }, samples_per_delay);
}

Vector HistorySegment::value(double theta) const {
  if (theta < -tau_ - 1e-12 || theta > 1e-12)
    throw std::invalid_argument("HistorySegment: theta outside [-tau, 0]");
  theta = std::clamp(theta, -tau_, 0.0);
  const int n = static_cast<int>(times_.size()) - 1;
  const double h = tau_ / n;
  const int cell = std::clamp(
      static_cast<int>(std::floor((theta + tau_) / h)), 0, n - 1);
  // Four-point window around the cell (cubic within, quadratic-grade at
  // the ends).
  int lo = std::clamp(cell - 1, 0, n - 3);
  Vector acc = Vector::Zero(samples_[0].size());
  for (int i = lo; i <= lo + 3; ++i) {
    double w = 1.0;
    for (int j = lo; j <= lo + 3; ++j) {
      if (j == i) continue;
      w *= (theta - times_[j]) / (times_[i] - times_[j]);
    }
    acc += w * samples_[i];
  }
  return acc;
}

void NeutralSystem::validate() const {
  base.validate();
  if (!(delay > 0.0))
    throw std::invalid_argument("NeutralSystem: delay must be positive");
  if (std::abs(history.delay() - delay) > 1e-12)
    throw std::invalid_argument("NeutralSystem: history span differs from tau");
  const Vector& phi0 = history.at_zero();
  if (phi0.size() != base.initial_state.size() ||
      (phi0 - base.initial_state).norm() >
          1e-12 * (1.0 + base.initial_state.norm()))
    throw std::invalid_argument(
        "NeutralSystem: history at zero must equal the initial state");
  if (!std::isfinite(sigma.coefficient))
    throw std::invalid_argument("NeutralSystem: non-finite sigma coefficient");
}

namespace {

// State lookup across [-tau, b]: history for t <= 0, trajectory after.
Vector delayed_state(const NeutralSystem& sys, const Trajectory& traj,
                     double t) {
  if (t <= 0.0) return sys.history.value(t);
  return traj.value(t);
}

Vector sigma_value(const NeutralSystem& sys, const Trajectory& traj,
                   double t) {
  switch (sys.sigma.kind) {
    case NeutralTerm::Kind::zero:
      return Vector::Zero(sys.base.dimension());
    case NeutralTerm::Kind::tabulated:
      if (!sys.sigma.forcing)
        throw std::invalid_argument("NeutralTerm: tabulated without samples");
      return sys.sigma.forcing(t);
    case NeutralTerm::Kind::bounded_demo:
      return sys.sigma.coefficient *
             delayed_state(sys, traj, t - sys.delay).array().tanh().matrix();
  }
  throw std::logic_error("unreachable");
}

// sigma(0, phi) depends on the history only, so it is iteration-invariant.
Vector sigma_at_zero(const NeutralSystem& sys) {
  switch (sys.sigma.kind) {
    case NeutralTerm::Kind::zero:
      return Vector::Zero(sys.base.dimension());
    case NeutralTerm::Kind::tabulated:
      return sys.sigma.forcing(0.0);
    case NeutralTerm::Kind::bounded_demo:
      return sys.sigma.coefficient *
             sys.history.value(-sys.delay).array().tanh().matrix();
  }
  throw std::logic_error("unreachable");
}

Propagator::Samples nonlinearity_samples(const ImpulsiveSystem& base,
                                         const Propagator& prop,
                                         const Trajectory& prev) {
  Propagator::Samples s = prop.zero_samples(base.dimension());
  if (base.nonlinearity.kind == Nonlinearity::Kind::none) return s;
  for (int k = 0; k < prop.piece_count(); ++k) {
    const std::vector<double>& nodes = prop.node_times(k);
    for (std::size_t q = 0; q < nodes.size(); ++q)
      s.nodes[k][q] = base.nonlinearity.eval(
          nodes[q], prev.pieces()[k].states[prop.node_store_index(k, q)]);
    const std::vector<double>& gaps = prop.gap_times(k);
    for (std::size_t i = 0; i < gaps.size(); ++i)
      s.gaps[k][i] = base.nonlinearity.eval(gaps[i], prev.value(gaps[i]));
  }
  return s;
}

// One frozen pass: solves the linear system with sigma and kappa taken
// from `prev`, under the given control samples.  Returns the xi
// trajectory (and the uncontrolled terminal when requested via u/v zero).
Trajectory frozen_pass(const NeutralSystem& sys, const Propagator& prop,
                       const Propagator::Samples& control,
                       const std::vector<Vector>& v, const Trajectory& prev,
                       const Vector& sigma0, const Vector& sigma_b) {
  const ImpulsiveSystem& base = sys.base;
  Propagator::Samples f = control;
  Propagator::Samples fk = nonlinearity_samples(base, prop, prev);
  Propagator::add_in_place(f, fk);

  std::vector<Trajectory::Piece> pieces;
  pieces.reserve(prop.piece_count());

  if (sys.convention == NeutralConvention::frozen_terminal) {
    // The propagated object is xi + sigma_b; the correction is applied at
    // top level on every subinterval and never passes through a jump.
    Vector chi = base.initial_state + sigma0;
    for (int k = 0; k < prop.piece_count(); ++k) {
      std::vector<Vector> states = prop.run_piece(k, chi, f);
      if (k < base.impulse_count())
        chi = jump_apply(base.jump_maps[k], base.impulse_inputs[k],
                         states.back(), v[k]);
      for (Vector& x : states) x -= sigma_b;
      pieces.push_back(prop.make_piece(k, std::move(states)));
    }
  } else {
    // Standard form: sigma is subtracted at the current time; jumps act on
    // xi itself.
    Vector xi = base.initial_state;
    for (int k = 0; k < prop.piece_count(); ++k) {
      const double t_k = base.subinterval_begin(k);
      const Vector sigma_k = k == 0 ? sigma0 : sigma_value(sys, prev, t_k);
      std::vector<Vector> states = prop.run_piece(k, xi + sigma_k, f);
      const std::vector<double>& times = prop.stored_times(k);
      for (std::size_t i = 0; i < times.size(); ++i)
        states[i] -= sigma_value(sys, prev, times[i]);
      xi = states.back();
      if (k < base.impulse_count())
        xi = jump_apply(base.jump_maps[k], base.impulse_inputs[k], xi, v[k]);
      pieces.push_back(prop.make_piece(k, std::move(states)));
    }
  }
  Trajectory traj(std::move(pieces));
  if (!traj.all_finite())
    throw NumericalError("neutral solve: non-finite state (blow-up)");
  return traj;
}

std::vector<Vector> zero_impulse_controls(const ImpulsiveSystem& base) {
  std::vector<Vector> v;
  for (const Matrix& d : base.impulse_inputs)
    v.push_back(Vector::Zero(d.cols()));
  return v;
}

}  // namespace

PicardResult neutral_mild_solve(const NeutralSystem& sys, const ControlFn& u,
                                const std::vector<Vector>& v,
                                const QuadratureGrid& grid,
                                const PicardOptions& opts) {
  if (sys.sigma.kind == NeutralTerm::Kind::zero)
    return mild_solve_semilinear(sys.base, u, v, grid, opts);
  sys.validate();
  grid.validate_against(sys.base);
  if (!(opts.damping > 0.0 && opts.damping <= 1.0))
    throw std::invalid_argument("neutral_mild_solve: damping in (0, 1]");

  const ImpulsiveSystem& base = sys.base;
  const Propagator prop(base.model, grid);
  const Propagator::Samples control = prop.sample_control(base.input_map, u);
  const Vector sigma0 = sigma_at_zero(sys);

  Trajectory prev =
      mild_solve_forced(base, ControlFn{}, zero_impulse_controls(base), grid,
                        ForcingFn{});
  std::vector<double> gaps;
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    const Vector sigma_b = sigma_value(sys, prev, base.horizon);
    Trajectory next = frozen_pass(sys, prop, control, v, prev, sigma0,
                                  sigma_b);
    const double gap = prev.sup_distance(next);
    gaps.push_back(gap);
    Trajectory blended = prev.blend(next, opts.damping);
    if (gap <= opts.tol * (1.0 + next.sup_norm()))
      return PicardResult{std::move(blended), iter, std::move(gaps)};
    prev = std::move(blended);
  }
  throw NonConvergenceError(
      "neutral_mild_solve: no convergence within the iteration budget",
      opts.max_iter, gaps);
}

SynthesisResult neutral_synthesize(const NeutralSystem& sys,
                                   const GramianSet& gramians,
                                   const QuadratureGrid& grid, const Vector& h,
                                   double alpha, const OuterOptions& opts) {
  if (sys.sigma.kind == NeutralTerm::Kind::zero)
    return synthesize_semilinear(sys.base, gramians, grid, h, alpha, opts);
  sys.validate();
  if (!(alpha > 0.0))
    throw std::invalid_argument("neutral_synthesize: alpha must be positive");

  const ImpulsiveSystem& base = sys.base;
  const ResolventOperator resolvent(gramians);
  const Propagator prop(base.model, grid);
  const Vector sigma0 = sigma_at_zero(sys);
  const std::vector<Vector> zero_v = zero_impulse_controls(base);
  const Propagator::Samples no_control =
      prop.zero_samples(base.dimension());

  // Moment vector for the frozen fields: h minus the uncontrolled
  // terminal value.  Under the frozen-terminal convention this equals the
  // closed-form expression with the +sigma(b) shift.
  auto frozen_moment = [&](const Trajectory& prev,
                           const Vector& sigma_b) -> MomentVector {
    if (sys.convention == NeutralConvention::frozen_terminal) {
      const ForcingFn kappa = [&](double t) {
        return base.nonlinearity.eval(t, prev.value(t));
      };
      const Vector x0 = base.initial_state + sigma0;
      return moment_vector(base, grid, kappa, h + sigma_b, &x0);
    }
    const Trajectory unc =
        frozen_pass(sys, prop, no_control, zero_v, prev, sigma0, sigma_b);
    return MomentVector{h - unc.terminal()};
  };

  Trajectory prev =
      mild_solve_forced(base, ControlFn{}, zero_v, grid, ForcingFn{});
  std::vector<double> gaps;
  for (int iter = 1; iter <= opts.max_outer; ++iter) {
    const Vector sigma_b = sigma_value(sys, prev, base.horizon);
    const MomentVector moment = frozen_moment(prev, sigma_b);
    const ControlLaw law = synthesize_control(base, gramians, resolvent,
                                              alpha, moment,
                                              opts.paper_literal);
    PicardResult inner = neutral_mild_solve(sys, law.as_fn(),
                                            law.impulse_controls, grid,
                                            opts.picard);
    const double gap = prev.sup_distance(inner.trajectory);
    gaps.push_back(gap);
    Trajectory next = prev.blend(inner.trajectory, opts.damping);
    if (gap <= opts.outer_tol * (1.0 + inner.trajectory.sup_norm())) {
      SynthesisResult result;
      result.law = law;
      result.trajectory = std::move(next);
      result.outer_iterations = iter;
      result.gap_history = std::move(gaps);
      const Vector sigma_b_star =
          sigma_value(sys, result.trajectory, base.horizon);
      const MomentVector moment_star =
          frozen_moment(result.trajectory, sigma_b_star);
      const Vector predicted =
          predicted_deviation(resolvent, alpha, moment_star);
      result.terminal_identity_residual = base.model.norm(
          result.trajectory.terminal() - h - predicted);
      result.predicted_defect = base.model.norm(predicted);
      return result;
    }
    prev = std::move(next);
  }
  throw NonConvergenceError(
      "neutral_synthesize: outer loop did not converge", opts.max_outer,
      gaps);
}

SweepResult alpha_sweep(const NeutralSystem& sys, const GramianSet& gramians,
                        const QuadratureGrid& grid, const Vector& h,
                        const std::vector<double>& alphas,
                        const OuterOptions& opts) {
  if (sys.sigma.kind == NeutralTerm::Kind::zero) {
    const SweepMode mode = sys.base.nonlinearity.state_dependent()
                               ? SweepMode::semilinear
                               : SweepMode::linear;
    return alpha_sweep(sys.base, gramians, grid, h, alphas, mode, opts);
  }
  if (alphas.empty())
    throw std::invalid_argument("alpha_sweep: empty alpha schedule");
  SweepResult result;
  result.rows.resize(alphas.size());
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    SweepRow row;
    row.alpha = alphas[i];
    try {
      const SynthesisResult synth =
          neutral_synthesize(sys, gramians, grid, h, alphas[i], opts);
      row.measured_error =
          sys.base.model.norm(synth.trajectory.terminal() - h);
      row.predicted_error = synth.predicted_defect;
      row.outer_iters = synth.outer_iterations;
      row.status = "ok";
    } catch (const NonConvergenceError& e) {
      row.status = "nonconverged";
      row.outer_iters = e.iterations;
    } catch (const std::exception&) {
      row.status = "failed";
    }
    result.rows[i] = std::move(row);
  }
  return result;
}

}  // namespace ictrl
