#include "ictrl/propagator.hpp"

#include <cmath>

namespace ictrl {

namespace {

constexpr int kGapRuleOrder = 6;

void check_impulse_controls(const ImpulsiveSystem& sys,
                            const std::vector<Vector>& v) {
  const int p = sys.impulse_count();
  if (static_cast<int>(v.size()) != p)
    throw std::invalid_argument(
        "impulse controls: expected one vector per impulse");
  for (int k = 0; k < p; ++k) {
    if (v[k].size() != sys.impulse_inputs[k].cols())
      throw std::invalid_argument("impulse controls: dimension mismatch");
    if (!v[k].allFinite())
      throw std::invalid_argument("impulse controls: non-finite values");
  }
}

}  // namespace

Propagator::Propagator(const SemigroupModel& model,
                       const QuadratureGrid& grid) {
  dim_ = model.dimension();
  const GaussRule gap_rule = gauss_legendre(kGapRuleOrder);
  plans_.reserve(grid.subintervals.size());

  for (const SubintervalGrid& sub : grid.subintervals) {
    PiecePlan plan;
    plan.t_begin = sub.t_begin;
    plan.t_end = sub.t_end;
    plan.panel_edges = sub.panel_edges;

    const int order = static_cast<int>(sub.nodes.size()) / sub.panel_count;
    plan.stored_times.push_back(sub.t_begin);
    plan.node_store.reserve(sub.nodes.size());
    for (int j = 0; j < sub.panel_count; ++j) {
      for (int q = 0; q < order; ++q) {
        plan.node_store.push_back(
            static_cast<int>(plan.stored_times.size()));
        plan.stored_times.push_back(sub.nodes[j * order + q]);
      }
      plan.stored_times.push_back(sub.panel_edges[j + 1]);
    }
    plan.node_times = sub.nodes;

    plan.steps.reserve(plan.stored_times.size() - 1);
    for (std::size_t i = 0; i + 1 < plan.stored_times.size(); ++i) {
      const double from = plan.stored_times[i];
      const double to = plan.stored_times[i + 1];
      Step step;
      step.advance = model.evolve_matrix(to - from);
      const double mid = 0.5 * (from + to);
      const double half = 0.5 * (to - from);
      for (int j = 0; j < kGapRuleOrder; ++j) {
        const double sigma = mid + half * gap_rule.nodes[j];
        const double w = half * gap_rule.weights[j];
        step.gap_index.push_back(static_cast<int>(plan.gap_times.size()));
        plan.gap_times.push_back(sigma);
        step.gap_ops.push_back(w * model.evolve_matrix(to - sigma));
      }
      plan.steps.push_back(std::move(step));
    }

    plan.end_ops.reserve(sub.nodes.size());
    for (std::size_t q = 0; q < sub.nodes.size(); ++q)
      plan.end_ops.push_back(sub.weights[q] *
                             model.evolve_matrix(sub.t_end - sub.nodes[q]));
    plan.full_advance = model.evolve_matrix(sub.length());
    plans_.push_back(std::move(plan));
  }
}

const std::vector<double>& Propagator::node_times(int k) const {
  return plans_.at(k).node_times;
}
const std::vector<double>& Propagator::gap_times(int k) const {
  return plans_.at(k).gap_times;
}
const std::vector<double>& Propagator::stored_times(int k) const {
  return plans_.at(k).stored_times;
}
int Propagator::node_store_index(int k, int q) const {
  return plans_.at(k).node_store.at(q);
}

Propagator::Samples Propagator::zero_samples(int dim) const {
  Samples s;
  s.nodes.resize(plans_.size());
  s.gaps.resize(plans_.size());
  for (std::size_t k = 0; k < plans_.size(); ++k) {
    s.nodes[k].assign(plans_[k].node_times.size(), Vector::Zero(dim));
    s.gaps[k].assign(plans_[k].gap_times.size(), Vector::Zero(dim));
  }
  return s;
}

Propagator::Samples Propagator::sample(const ForcingFn& f) const {
  if (!f) return zero_samples(dim_);
  Samples s;
  s.nodes.resize(plans_.size());
  s.gaps.resize(plans_.size());
  for (std::size_t k = 0; k < plans_.size(); ++k) {
    s.nodes[k].reserve(plans_[k].node_times.size());
    for (double t : plans_[k].node_times) s.nodes[k].push_back(f(t));
    s.gaps[k].reserve(plans_[k].gap_times.size());
    for (double t : plans_[k].gap_times) s.gaps[k].push_back(f(t));
  }
  return s;
}

Propagator::Samples Propagator::sample_control(const Matrix& input_map,
                                               const ControlFn& u) const {
  if (!u) return zero_samples(static_cast<int>(input_map.rows()));
  auto eval = [&](double t) -> Vector {
    Vector uv = u(t);
    if (uv.size() != input_map.cols())
      throw std::invalid_argument("control: dimension mismatch");
    if (!uv.allFinite())
      throw std::invalid_argument("control: non-finite values");
    return input_map * uv;
  };
  Samples s;
  s.nodes.resize(plans_.size());
  s.gaps.resize(plans_.size());
  for (std::size_t k = 0; k < plans_.size(); ++k) {
    s.nodes[k].reserve(plans_[k].node_times.size());
    for (double t : plans_[k].node_times) s.nodes[k].push_back(eval(t));
    s.gaps[k].reserve(plans_[k].gap_times.size());
    for (double t : plans_[k].gap_times) s.gaps[k].push_back(eval(t));
  }
  return s;
}

void Propagator::add_in_place(Samples& a, const Samples& b) {
  for (std::size_t k = 0; k < a.nodes.size(); ++k) {
    for (std::size_t i = 0; i < a.nodes[k].size(); ++i)
      a.nodes[k][i] += b.nodes[k][i];
    for (std::size_t i = 0; i < a.gaps[k].size(); ++i)
      a.gaps[k][i] += b.gaps[k][i];
  }
}

std::vector<Vector> Propagator::run_piece(int k, const Vector& x_start,
                                          const Samples& f) const {
  const PiecePlan& plan = plans_.at(k);
  std::vector<Vector> states;
  states.reserve(plan.stored_times.size());
  states.push_back(x_start);
  Vector x = x_start;
  for (const Step& step : plan.steps) {
    x = step.advance * x;
    for (std::size_t j = 0; j < step.gap_ops.size(); ++j)
      x += step.gap_ops[j] * f.gaps[k][step.gap_index[j]];
    states.push_back(x);
  }
  // The official end state uses the subinterval's own quadrature so that
  // right limits and the terminal value match the Gramian assembly.
  Vector end = plan.full_advance * x_start;
  for (std::size_t q = 0; q < plan.end_ops.size(); ++q)
    end += plan.end_ops[q] * f.nodes[k][q];
  states.back() = end;
  return states;
}

Trajectory::Piece Propagator::make_piece(int k,
                                         std::vector<Vector> states) const {
  const PiecePlan& plan = plans_.at(k);
  Trajectory::Piece piece;
  piece.t_begin = plan.t_begin;
  piece.t_end = plan.t_end;
  piece.times = plan.stored_times;
  piece.states = std::move(states);
  piece.panel_edges = plan.panel_edges;
  return piece;
}

namespace {

Trajectory assemble_trajectory(const ImpulsiveSystem& sys,
                               const Propagator& prop,
                               const Propagator::Samples& f,
                               const std::vector<Vector>& v,
                               const Vector& x0) {
  std::vector<Trajectory::Piece> pieces;
  pieces.reserve(prop.piece_count());
  Vector x = x0;
  for (int k = 0; k < prop.piece_count(); ++k) {
    std::vector<Vector> states = prop.run_piece(k, x, f);
    if (k < sys.impulse_count())
      x = jump_apply(sys.jump_maps[k], sys.impulse_inputs[k], states.back(),
                     v[k]);
    pieces.push_back(prop.make_piece(k, std::move(states)));
  }
  Trajectory traj(std::move(pieces));
  if (!traj.all_finite())
    throw NumericalError("mild solve: non-finite state (blow-up)");
  return traj;
}

}  // namespace

Trajectory mild_solve_forced(const ImpulsiveSystem& sys, const ControlFn& u,
                             const std::vector<Vector>& v,
                             const QuadratureGrid& grid, const ForcingFn& kappa,
                             const Vector* x0) {
  sys.validate();
  grid.validate_against(sys);
  check_impulse_controls(sys, v);
  Propagator prop(sys.model, grid);
  Propagator::Samples f = prop.sample_control(sys.input_map, u);
  if (kappa) {
    Propagator::Samples fk = prop.sample(kappa);
    Propagator::add_in_place(f, fk);
  }
  return assemble_trajectory(sys, prop, f, v,
                             x0 ? *x0 : sys.initial_state);
}

Trajectory mild_solve_linear(const ImpulsiveSystem& sys, const ControlFn& u,
                             const std::vector<Vector>& v,
                             const QuadratureGrid& grid) {
  if (sys.nonlinearity.state_dependent())
    throw std::invalid_argument(
        "mild_solve_linear: nonlinearity must be none or tabulated");
  ForcingFn kappa;
  if (sys.nonlinearity.kind == Nonlinearity::Kind::tabulated)
    kappa = sys.nonlinearity.forcing;
  return mild_solve_forced(sys, u, v, grid, kappa);
}

PicardResult mild_solve_semilinear(const ImpulsiveSystem& sys,
                                   const ControlFn& u,
                                   const std::vector<Vector>& v,
                                   const QuadratureGrid& grid,
                                   const PicardOptions& opts) {
  if (!(opts.tol > 0.0))
    throw std::invalid_argument("mild_solve_semilinear: tol must be positive");
  if (!(opts.damping > 0.0 && opts.damping <= 1.0))
    throw std::invalid_argument("mild_solve_semilinear: damping in (0, 1]");
  if (!sys.nonlinearity.state_dependent()) {
    PicardResult result{mild_solve_linear(sys, u, v, grid), 1, {}};
    return result;
  }
  sys.validate();
  grid.validate_against(sys);
  check_impulse_controls(sys, v);

  Propagator prop(sys.model, grid);
  const Propagator::Samples control = prop.sample_control(sys.input_map, u);

  Trajectory prev = assemble_trajectory(sys, prop, control, v,
                                        sys.initial_state);
  std::vector<double> gaps;
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    // Nonlinearity frozen along the previous iterate; grid nodes are
    // stored states, auxiliary times are interpolated.
    Propagator::Samples f = control;
    for (int k = 0; k < prop.piece_count(); ++k) {
      const Trajectory::Piece& piece = prev.pieces()[k];
      const std::vector<double>& nodes = prop.node_times(k);
      for (std::size_t q = 0; q < nodes.size(); ++q)
        f.nodes[k][q] += sys.nonlinearity.eval(
            nodes[q], piece.states[prop.node_store_index(k, q)]);
      const std::vector<double>& gap_ts = prop.gap_times(k);
      for (std::size_t i = 0; i < gap_ts.size(); ++i)
        f.gaps[k][i] +=
            sys.nonlinearity.eval(gap_ts[i], prev.value(gap_ts[i]));
    }
    Trajectory next = assemble_trajectory(sys, prop, f, v, sys.initial_state);
    const double gap = prev.sup_distance(next);
    gaps.push_back(gap);
    Trajectory blended = prev.blend(next, opts.damping);
    if (gap <= opts.tol * (1.0 + next.sup_norm()))
      return PicardResult{std::move(blended), iter, std::move(gaps)};
    prev = std::move(blended);
  }
  throw NonConvergenceError(
      "mild_solve_semilinear: no convergence within the iteration budget",
      opts.max_iter, gaps);
}

Trajectory dense_oracle(const ImpulsiveSystem& sys, const ControlFn& u,
                        const std::vector<Vector>& v, double step) {
  sys.validate();
  check_impulse_controls(sys, v);
  if (!(step > 0.0))
    throw std::invalid_argument("dense_oracle: step must be positive");

  auto rhs = [&](double t, const Vector& x) -> Vector {
    Vector f = sys.model.apply_generator(x);
    if (u) {
      Vector uv = u(t);
      if (uv.size() != sys.input_map.cols())
        throw std::invalid_argument("control: dimension mismatch");
      f += sys.input_map * uv;
    }
    if (sys.nonlinearity.kind != Nonlinearity::Kind::none)
      f += sys.nonlinearity.eval(t, x);
    return f;
  };

  std::vector<Trajectory::Piece> pieces;
  Vector x = sys.initial_state;
  const int p = sys.impulse_count();
  for (int k = 0; k <= p; ++k) {
    const double a = sys.subinterval_begin(k);
    const double b = sys.subinterval_end(k);
    const long n = std::max(1L, std::lround((b - a) / step));
    const double h = (b - a) / static_cast<double>(n);
    Trajectory::Piece piece;
    piece.t_begin = a;
    piece.t_end = b;
    piece.times.push_back(a);
    piece.states.push_back(x);
    for (long i = 0; i < n; ++i) {
      const double t = a + i * h;
      const Vector k1 = rhs(t, x);
      const Vector k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1);
      const Vector k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2);
      const Vector k4 = rhs(t + h, x + h * k3);
      x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!x.allFinite())
        throw NumericalError("dense_oracle: non-finite state (blow-up)");
      piece.times.push_back(a + (i + 1) * h);
      piece.states.push_back(x);
    }
    if (k < p)
      x = jump_apply(sys.jump_maps[k], sys.impulse_inputs[k], x, v[k]);
    pieces.push_back(std::move(piece));
  }
  return Trajectory(std::move(pieces));
}

}  // namespace ictrl
