#include "ictrl/gramian.hpp"

#include <cmath>

namespace ictrl {

namespace {

Matrix metric_diag(const Vector& g) {
  return g.array().square().matrix().asDiagonal();
}

}  // namespace

Matrix GramianSet::symmetrized(const Matrix& part) const {
  return metric_sqrt.asDiagonal() * part *
         metric_sqrt.cwiseInverse().asDiagonal();
}

Vector GramianSet::eigenvalues(const Matrix& part) const {
  const Matrix m = symmetrized(part);
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success)
    throw NumericalError("GramianSet::eigenvalues: eigensolver failed");
  return solver.eigenvalues();
}

double GramianSet::min_eigenvalue() const { return eigenvalues(total)[0]; }

GramianSet assemble_gramians(const ImpulsiveSystem& sys,
                             const QuadratureGrid& grid) {
  sys.validate();
  grid.validate_against(sys);
  const int d = sys.dimension();
  const int p = sys.impulse_count();
  const SemigroupModel& model = sys.model;
  const Matrix g = metric_diag(model.metric_sqrt());
  const Matrix id = Matrix::Identity(d, d);
  const Matrix omega_pair = sys.input_map * sys.input_map.transpose() * g;

  GramianSet set;
  set.metric_sqrt = model.metric_sqrt();
  set.terminal_input = Matrix::Zero(d, d);
  set.terminal_impulse = Matrix::Zero(d, d);
  set.interior_input = Matrix::Zero(d, d);
  set.interior_impulse = Matrix::Zero(d, d);

  // Continuous control over the final subinterval:
  //   integral of S(b-s) Omega Omega* S*(b-s).
  const SubintervalGrid& last = grid.subintervals.back();
  for (std::size_t q = 0; q < last.nodes.size(); ++q) {
    const double dt = sys.horizon - last.nodes[q];
    set.terminal_input += last.weights[q] * model.evolve_matrix(dt) *
                          omega_pair * model.evolve_adjoint_matrix(dt);
  }

  std::vector<Matrix> downstream(p + 1);
  for (int i = 0; i <= p; ++i) downstream[i] = downstream_map(sys, i);

  // Continuous control on earlier subintervals, each pushed to the horizon
  // through its own jump and downstream transfer.
  for (int i = 1; i <= p; ++i) {
    const SubintervalGrid& sub = grid.subintervals[i - 1];
    const double ti = sys.impulse_times[i - 1];
    Matrix kernel = Matrix::Zero(d, d);
    for (std::size_t q = 0; q < sub.nodes.size(); ++q) {
      const double dt = ti - sub.nodes[q];
      kernel += sub.weights[q] * model.evolve_matrix(dt) * omega_pair *
                model.evolve_adjoint_matrix(dt);
    }
    const Matrix carry = downstream[i] * (id + sys.jump_maps[i - 1]);
    set.interior_input += carry * kernel * model.adjoint_of(carry);
  }

  // Impulse channels: the injection D_k v_k at t_k^+ reaches the horizon
  // through E_k.
  for (int k = 1; k <= p; ++k) {
    const Matrix carry = downstream[k] * sys.impulse_inputs[k - 1];
    const Matrix block =
        carry * sys.impulse_inputs[k - 1].transpose() * g *
        model.adjoint_of(downstream[k]);
    if (k == p)
      set.terminal_impulse += block;
    else
      set.interior_impulse += block;
  }

  set.total = set.terminal_input + set.terminal_impulse + set.interior_input +
              set.interior_impulse;
  return set;
}

Vector resolvent_solve(const Matrix& w, double alpha, const Vector& rhs) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("resolvent_solve: alpha must be positive");
  if (w.rows() != w.cols() || w.rows() != rhs.size())
    throw std::invalid_argument("resolvent_solve: dimension mismatch");
  const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw std::invalid_argument("resolvent_solve: matrix is not symmetric");
  const Matrix sym = 0.5 * (w + w.transpose());
  const Matrix shifted =
      sym + alpha * Matrix::Identity(w.rows(), w.cols());
  Eigen::LDLT<Matrix> ldlt(shifted);
  if (ldlt.info() != Eigen::Success)
    throw NumericalError("resolvent_solve: factorization failed");
  Vector x = ldlt.solve(rhs);
  // One refinement step, then a hard residual check.
  x += ldlt.solve(rhs - shifted * x);
  if ((shifted * x - rhs).norm() > 1e-10 * std::max(1e-300, rhs.norm()))
    throw NumericalError("resolvent_solve: residual check failed");
  return x;
}

ResolventOperator::ResolventOperator(const GramianSet& gramians)
    : metric_sqrt_(gramians.metric_sqrt) {
  const Matrix m = gramians.symmetrized(gramians.total);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw NumericalError(
        "ResolventOperator: Gramian is not self-adjoint in the model metric");
  w_sym_ = 0.5 * (m + m.transpose());
}

Vector ResolventOperator::solve(double alpha, const Vector& rhs) const {
  if (!(alpha > 0.0))
    throw std::invalid_argument("ResolventOperator: alpha must be positive");
  if (rhs.size() != metric_sqrt_.size())
    throw std::invalid_argument("ResolventOperator: dimension mismatch");

  std::shared_ptr<Eigen::LDLT<Matrix>> fact;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(alpha);
    if (it == cache_.end()) {
      const Matrix shifted =
          w_sym_ + alpha * Matrix::Identity(w_sym_.rows(), w_sym_.cols());
      auto ldlt = std::make_shared<Eigen::LDLT<Matrix>>(shifted);
      if (ldlt->info() != Eigen::Success)
        throw NumericalError("ResolventOperator: factorization failed");
      it = cache_.emplace(alpha, std::move(ldlt)).first;
    }
    fact = it->second;
  }

  const Vector rhat = metric_sqrt_.asDiagonal() * rhs;
  Vector xhat = fact->solve(rhat);
  const Matrix shifted =
      w_sym_ + alpha * Matrix::Identity(w_sym_.rows(), w_sym_.cols());
  xhat += fact->solve(rhat - shifted * xhat);
  if ((shifted * xhat - rhat).norm() > 1e-10 * std::max(1e-300, rhat.norm()))
    throw NumericalError("ResolventOperator: residual check failed");
  return metric_sqrt_.cwiseInverse().asDiagonal() * xhat;
}

DecayTable resolvent_decay_table(const GramianSet& gramians,
                                 const SemigroupModel& model,
                                 const std::vector<double>& alphas,
                                 const std::vector<Vector>& probes,
                                 double threshold) {
  if (alphas.empty() || probes.empty())
    throw std::invalid_argument(
        "resolvent_decay_table: empty alpha schedule or probe list");
  for (std::size_t i = 0; i + 1 < alphas.size(); ++i)
    if (!(alphas[i] > alphas[i + 1]) || !(alphas[i + 1] > 0.0))
      throw std::invalid_argument(
          "resolvent_decay_table: alphas must be positive and strictly "
          "decreasing");

  const ResolventOperator resolvent(gramians);
  DecayTable table;
  table.alphas = alphas;
  table.threshold = threshold;
  table.ratios.resize(alphas.size());
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    table.ratios[a].reserve(probes.size());
    for (const Vector& x : probes) {
      const double nx = model.norm(x);
      if (!(nx > 0.0))
        throw std::invalid_argument("resolvent_decay_table: zero probe");
      const double r =
          alphas[a] * model.norm(resolvent.solve(alphas[a], x)) / nx;
      table.ratios[a].push_back(r);
    }
  }
  table.satisfied = true;
  for (double r : table.ratios.back())
    if (!(r <= threshold)) table.satisfied = false;
  return table;
}

}  // namespace ictrl
