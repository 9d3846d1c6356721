#include "ictrl/synthesis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace ictrl {

MomentVector moment_vector(const ImpulsiveSystem& sys,
                           const QuadratureGrid& grid, const ForcingFn& kappa,
                           const Vector& h, const Vector* x0) {
  sys.validate();
  grid.validate_against(sys);
  const int d = sys.dimension();
  if (h.size() != d)
    throw std::invalid_argument("moment_vector: target dimension mismatch");
  const SemigroupModel& model = sys.model;
  const int p = sys.impulse_count();
  const Matrix id = Matrix::Identity(d, d);

  Vector defect = h - downstream_map(sys, 0) * (x0 ? *x0 : sys.initial_state);
  if (kappa) {
    for (int i = 1; i <= p; ++i) {
      const SubintervalGrid& sub = grid.subintervals[i - 1];
      const double ti = sys.impulse_times[i - 1];
      Vector integral = Vector::Zero(d);
      for (std::size_t q = 0; q < sub.nodes.size(); ++q)
        integral += sub.weights[q] *
                    model.evolve(ti - sub.nodes[q], kappa(sub.nodes[q]));
      defect -= downstream_map(sys, i) * (id + sys.jump_maps[i - 1]) * integral;
    }
    const SubintervalGrid& last = grid.subintervals.back();
    for (std::size_t q = 0; q < last.nodes.size(); ++q)
      defect -= last.weights[q] *
                model.evolve(sys.horizon - last.nodes[q], kappa(last.nodes[q]));
  }
  if (!defect.allFinite())
    throw NumericalError("moment_vector: non-finite defect");
  return MomentVector{std::move(defect)};
}

Vector ControlLaw::continuous(double s) const {
  const double b = boundaries.back();
  if (s < -1e-12 || s > b + 1e-12)
    throw std::invalid_argument("ControlLaw: time out of range");
  s = std::clamp(s, 0.0, b);
  int k = static_cast<int>(std::upper_bound(boundaries.begin() + 1,
                                            boundaries.end() - 1, s) -
                           (boundaries.begin() + 1));
  return input_map_adjoint *
         model.evolve_adjoint(boundaries[k + 1] - s, tails[k]);
}

ControlFn ControlLaw::as_fn() const {
  return [law = *this](double s) { return law.continuous(s); };
}

ControlLaw synthesize_control(const ImpulsiveSystem& sys,
                              const GramianSet& gramians,
                              const ResolventOperator& resolvent, double alpha,
                              const MomentVector& moment, bool paper_literal) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("synthesize_control: alpha must be positive");
  const int d = sys.dimension();
  const int p = sys.impulse_count();
  const SemigroupModel& model = sys.model;
  const Matrix id = Matrix::Identity(d, d);
  (void)gramians;

  ControlLaw law;
  law.alpha = alpha;
  law.paper_literal = paper_literal;
  law.model = model;
  law.input_map_adjoint =
      sys.input_map.transpose() *
      model.metric_sqrt().array().square().matrix().asDiagonal();
  law.boundaries.push_back(0.0);
  for (double t : sys.impulse_times) law.boundaries.push_back(t);
  law.boundaries.push_back(sys.horizon);

  law.phi = resolvent.solve(alpha, moment.defect);

  // Adjoint transfer chains from the horizon back through each impulse.
  // tail[i] is the adjoint of the transfer from t_{i-1}^+; cons[i] is the
  // interior tail including the jump adjoint, lit[i] the published form
  // without it.
  const double t_p = p == 0 ? 0.0 : sys.impulse_times[p - 1];
  std::vector<Vector> tail(p + 2), lit(p + 2), cons(p + 2);
  tail[p + 1] = model.evolve_adjoint(sys.horizon - t_p, law.phi);
  lit[p + 1] = tail[p + 1];
  for (int i = p; i >= 1; --i) {
    const Matrix jump_adj = model.adjoint_of(id + sys.jump_maps[i - 1]);
    cons[i] = jump_adj * tail[i + 1];
    const double seg =
        sys.impulse_times[i - 1] - (i >= 2 ? sys.impulse_times[i - 2] : 0.0);
    tail[i] = model.evolve_adjoint(seg, cons[i]);
    lit[i] = model.evolve_adjoint(seg, lit[i + 1]);
  }

  law.tails.resize(p + 1);
  for (int k = 0; k < p; ++k)
    law.tails[k] = paper_literal ? lit[k + 2] : cons[k + 1];
  law.tails[p] = law.phi;

  const Matrix g = model.metric_sqrt().array().square().matrix().asDiagonal();
  law.impulse_controls.resize(p);
  for (int k = 1; k <= p; ++k) {
    const Vector& carry =
        (paper_literal && k < p) ? tail[k] : tail[k + 1];
    law.impulse_controls[k - 1] =
        sys.impulse_inputs[k - 1].transpose() * g * carry;
  }
  return law;
}

Vector predicted_deviation(const ResolventOperator& resolvent, double alpha,
                           const MomentVector& moment) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("predicted_deviation: alpha must be positive");
  return -alpha * resolvent.solve(alpha, moment.defect);
}

VerifyReport verify_terminal_identity(const ImpulsiveSystem& sys,
                                      const GramianSet& gramians,
                                      const QuadratureGrid& grid,
                                      const ForcingFn& kappa, const Vector& h,
                                      double alpha, bool paper_literal) {
  const ResolventOperator resolvent(gramians);
  const MomentVector moment = moment_vector(sys, grid, kappa, h);
  const ControlLaw law = synthesize_control(sys, gramians, resolvent, alpha,
                                            moment, paper_literal);
  const Trajectory traj =
      mild_solve_forced(sys, law.as_fn(), law.impulse_controls, grid, kappa);
  const Vector predicted = predicted_deviation(resolvent, alpha, moment);
  const Vector measured = traj.terminal() - h;

  VerifyReport report;
  report.alpha = alpha;
  report.residual_abs = sys.model.norm(measured - predicted);
  report.residual_rel =
      report.residual_abs / std::max(sys.model.norm(moment.defect), 1e-30);
  report.measured_defect = sys.model.norm(measured);
  report.predicted_defect = sys.model.norm(predicted);
  return report;
}

namespace {

ForcingFn frozen_nonlinearity(const ImpulsiveSystem& sys,
                              const Trajectory& traj) {
  return [&sys, &traj](double t) {
    return sys.nonlinearity.eval(t, traj.value(t));
  };
}

}  // namespace

SynthesisResult synthesize_semilinear(const ImpulsiveSystem& sys,
                                      const GramianSet& gramians,
                                      const QuadratureGrid& grid,
                                      const Vector& h, double alpha,
                                      const OuterOptions& opts) {
  if (!(alpha > 0.0))
    throw std::invalid_argument(
        "synthesize_semilinear: alpha must be positive");
  const ResolventOperator resolvent(gramians);

  if (!sys.nonlinearity.state_dependent()) {
    ForcingFn kappa;
    if (sys.nonlinearity.kind == Nonlinearity::Kind::tabulated)
      kappa = sys.nonlinearity.forcing;
    const MomentVector moment = moment_vector(sys, grid, kappa, h);
    SynthesisResult result;
    result.law = synthesize_control(sys, gramians, resolvent, alpha, moment,
                                    opts.paper_literal);
    result.trajectory = mild_solve_forced(sys, result.law.as_fn(),
                                          result.law.impulse_controls, grid,
                                          kappa);
    result.outer_iterations = 1;
    const Vector predicted = predicted_deviation(resolvent, alpha, moment);
    result.terminal_identity_residual =
        sys.model.norm(result.trajectory.terminal() - h - predicted);
    result.predicted_defect = sys.model.norm(predicted);
    return result;
  }

  const std::vector<Vector> zero_v = [&] {
    std::vector<Vector> v;
    for (const Matrix& d : sys.impulse_inputs)
      v.push_back(Vector::Zero(d.cols()));
    return v;
  }();

  Trajectory prev =
      mild_solve_forced(sys, ControlFn{}, zero_v, grid, ForcingFn{});
  std::vector<double> gaps;
  std::optional<ControlLaw> law;
  for (int iter = 1; iter <= opts.max_outer; ++iter) {
    const ForcingFn kappa = frozen_nonlinearity(sys, prev);
    const MomentVector moment = moment_vector(sys, grid, kappa, h);
    law = synthesize_control(sys, gramians, resolvent, alpha, moment,
                             opts.paper_literal);
    PicardResult inner = mild_solve_semilinear(
        sys, law->as_fn(), law->impulse_controls, grid, opts.picard);
    const double gap = prev.sup_distance(inner.trajectory);
    gaps.push_back(gap);
    Trajectory next = prev.blend(inner.trajectory, opts.damping);
    if (gap <= opts.outer_tol * (1.0 + inner.trajectory.sup_norm())) {
      SynthesisResult result;
      result.law = *law;
      result.trajectory = std::move(next);
      result.outer_iterations = iter;
      result.gap_history = std::move(gaps);
      const ForcingFn kappa_star =
          frozen_nonlinearity(sys, result.trajectory);
      const MomentVector moment_star =
          moment_vector(sys, grid, kappa_star, h);
      const Vector predicted =
          predicted_deviation(resolvent, alpha, moment_star);
      result.terminal_identity_residual = sys.model.norm(
          result.trajectory.terminal() - h - predicted);
      result.predicted_defect = sys.model.norm(predicted);
      return result;
    }
    prev = std::move(next);
  }
  throw NonConvergenceError(
      "synthesize_semilinear: outer loop did not converge", opts.max_outer,
      gaps);
}

std::vector<double> default_alpha_schedule() {
  return {1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 1e-5, 1e-6};
}

namespace {

double kernel_component_norm(const GramianSet& gramians, const Vector& p_vec) {
  const Matrix sym_raw = gramians.symmetrized(gramians.total);
  const Matrix sym = 0.5 * (sym_raw + sym_raw.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success)
    throw NumericalError("alpha_sweep: eigensolver failed");
  const Vector evals = solver.eigenvalues();
  const double cutoff = 1e-12 * std::max(1.0, evals[evals.size() - 1]);
  const Vector phat = gramians.metric_sqrt.asDiagonal() * p_vec;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    if (evals[i] <= cutoff) {
      const double c = solver.eigenvectors().col(i).dot(phat);
      acc += c * c;
    }
  }
  return std::sqrt(acc);
}

}  // namespace

SweepResult alpha_sweep(const ImpulsiveSystem& sys, const GramianSet& gramians,
                        const QuadratureGrid& grid, const Vector& h,
                        const std::vector<double>& alphas, SweepMode mode,
                        const OuterOptions& opts, int jobs) {
  if (alphas.empty())
    throw std::invalid_argument("alpha_sweep: empty alpha schedule");
  for (std::size_t i = 0; i + 1 < alphas.size(); ++i)
    if (!(alphas[i] > alphas[i + 1]) || !(alphas[i + 1] > 0.0))
      throw std::invalid_argument(
          "alpha_sweep: alphas must be positive and strictly decreasing");
  if (mode == SweepMode::linear && sys.nonlinearity.state_dependent())
    throw std::invalid_argument(
        "alpha_sweep: linear mode needs a state-independent nonlinearity");

  const ResolventOperator resolvent(gramians);
  ForcingFn fixed_kappa;
  if (sys.nonlinearity.kind == Nonlinearity::Kind::tabulated)
    fixed_kappa = sys.nonlinearity.forcing;

  SweepResult result;
  result.rows.resize(alphas.size());
  {
    const MomentVector probe = moment_vector(sys, grid, fixed_kappa, h);
    result.kernel_plateau = kernel_component_norm(gramians, probe.defect);
  }

  auto run_row = [&](std::size_t i) {
    SweepRow row;
    row.alpha = alphas[i];
    try {
      if (mode == SweepMode::linear ||
          !sys.nonlinearity.state_dependent()) {
        const MomentVector moment = moment_vector(sys, grid, fixed_kappa, h);
        const ControlLaw law = synthesize_control(
            sys, gramians, resolvent, alphas[i], moment, opts.paper_literal);
        const Trajectory traj = mild_solve_forced(
            sys, law.as_fn(), law.impulse_controls, grid, fixed_kappa);
        row.measured_error = sys.model.norm(traj.terminal() - h);
        row.predicted_error = sys.model.norm(
            predicted_deviation(resolvent, alphas[i], moment));
        row.outer_iters = 1;
      } else {
        const SynthesisResult synth =
            synthesize_semilinear(sys, gramians, grid, h, alphas[i], opts);
        row.measured_error = sys.model.norm(synth.trajectory.terminal() - h);
        row.predicted_error = synth.predicted_defect;
        row.outer_iters = synth.outer_iterations;
      }
      const bool pinned = result.kernel_plateau > 1e-12 &&
                          row.measured_error <=
                              1.1 * result.kernel_plateau + 1e-12;
      row.status = pinned ? "plateau" : "ok";
    } catch (const NonConvergenceError& e) {
      row.status = "nonconverged";
      row.outer_iters = e.iterations;
    } catch (const std::exception&) {
      row.status = "failed";
    }
    result.rows[i] = std::move(row);
  };

  if (jobs <= 1) {
    for (std::size_t i = 0; i < alphas.size(); ++i) run_row(i);
  } else {
    std::atomic<std::size_t> cursor{0};
    std::vector<std::thread> workers;
    const int count = std::min<int>(jobs, static_cast<int>(alphas.size()));
    for (int w = 0; w < count; ++w)
      workers.emplace_back([&] {
        for (std::size_t i = cursor.fetch_add(1); i < alphas.size();
             i = cursor.fetch_add(1))
          run_row(i);
      });
    for (std::thread& t : workers) t.join();
  }
  return result;
}

}  // namespace ictrl
