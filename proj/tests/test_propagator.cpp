#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "ictrl/models.hpp"
#include "ictrl/propagator.hpp"

using namespace ictrl;

namespace {

ImpulsiveSystem scalar_system(double a, double horizon = 1.0) {
  ImpulsiveSystem sys;
  Matrix gen(1, 1);
  gen << a;
  sys.model = SemigroupModel::dense(gen);
  sys.horizon = horizon;
  sys.input_map = Matrix::Identity(1, 1);
  sys.initial_state = Vector::Zero(1);
  return sys;
}

double sup_against_oracle(const Trajectory& mild, const Trajectory& oracle) {
  double sup = 0.0;
  for (const Trajectory::Piece& piece : mild.pieces())
    for (std::size_t i = 0; i < piece.times.size(); ++i)
      sup = std::max(sup, (piece.states[i] - oracle.value(piece.times[i]))
                              .lpNorm<Eigen::Infinity>());
  return sup;
}

}  // namespace

TEST_CASE("pure semigroup flow when controls and forcing vanish") {
  RotationExample rot = make_rotation_example(false);
  rot.system.nonlinearity = Nonlinearity{};
  const QuadratureGrid grid = make_quadrature_grid(rot.system);
  const Trajectory traj = mild_solve_linear(rot.system, ControlFn{}, {}, grid);
  for (const Trajectory::Piece& piece : traj.pieces())
    for (std::size_t i = 0; i < piece.times.size(); ++i) {
      const Vector expect =
          rot.system.model.evolve(piece.times[i], rot.system.initial_state);
      CHECK((piece.states[i] - expect).norm() < 1e-12);
    }
}

TEST_CASE("scalar integrator: A = 0, unit control adds one") {
  ImpulsiveSystem sys = scalar_system(0.0);
  const QuadratureGrid grid = make_quadrature_grid(sys);
  Vector one(1);
  one << 1.0;
  const Trajectory traj = mild_solve_linear(
      sys, [one](double) { return one; }, {}, grid);
  CHECK(traj.terminal()[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("post-impulse decomposition matches the displayed structure") {
  // With constant u = (1, 0) and no nonlinearity, the right limit is
  // (I + B_1)[S(1) x0 + integral of S(1-s) Omega u ds] + D_1 v_1.
  RotationExample rot = make_rotation_example();
  rot.system.nonlinearity = Nonlinearity{};
  const QuadratureGrid grid = make_quadrature_grid(rot.system);
  const Trajectory traj =
      mild_solve_linear(rot.system, rot.prescribed_control,
                        rot.prescribed_impulse_controls, grid);

  const SemigroupModel& model = rot.system.model;
  Vector drift = model.evolve(1.0, rot.system.initial_state);
  const SubintervalGrid& sub = grid.subintervals[0];
  Vector u0(2);
  u0 << 1.0, 0.0;
  for (std::size_t q = 0; q < sub.nodes.size(); ++q)
    drift += sub.weights[q] *
             model.evolve(1.0 - sub.nodes[q], rot.system.input_map * u0);
  const Vector expected =
      jump_apply(rot.system.jump_maps[0], rot.system.impulse_inputs[0], drift,
                 rot.prescribed_impulse_controls[0]);
  CHECK((traj.right_limit(1) - expected).norm() < 1e-13);
}

TEST_CASE("trajectory jump invariant holds on produced trajectories") {
  RotationExample rot = make_rotation_example();
  const QuadratureGrid grid = make_quadrature_grid(rot.system);
  const PicardResult result =
      mild_solve_semilinear(rot.system, rot.prescribed_control,
                            rot.prescribed_impulse_controls, grid);
  const Vector expect = jump_apply(
      rot.system.jump_maps[0], rot.system.impulse_inputs[0],
      result.trajectory.left_limit(1), rot.prescribed_impulse_controls[0]);
  CHECK((result.trajectory.right_limit(1) - expect).norm() < 1e-10);
  CHECK(result.trajectory.all_finite());
}

TEST_CASE("zero nonlinearity: semilinear equals linear bitwise") {
  RotationExample rot = make_rotation_example();
  rot.system.nonlinearity = Nonlinearity{};
  const QuadratureGrid grid = make_quadrature_grid(rot.system);
  const Trajectory linear =
      mild_solve_linear(rot.system, rot.prescribed_control,
                        rot.prescribed_impulse_controls, grid);
  const PicardResult semi =
      mild_solve_semilinear(rot.system, rot.prescribed_control,
                            rot.prescribed_impulse_controls, grid);
  CHECK(semi.trajectory.sup_distance(linear) == 0.0);
  CHECK(semi.iterations == 1);
}

TEST_CASE("semilinear fixed point agrees with the time-stepping oracle") {
  // Scalar A = 0 with a small bounded-sin nonlinearity.
  ImpulsiveSystem sys = scalar_system(0.0);
  sys.nonlinearity.kind = Nonlinearity::Kind::bounded_sin;
  sys.nonlinearity.coefficient = 0.1;
  sys.initial_state[0] = 1.0;
  const QuadratureGrid grid = make_quadrature_grid(sys);
  const PicardResult mild = mild_solve_semilinear(sys, ControlFn{}, {}, grid);
  const Trajectory oracle = dense_oracle(sys, ControlFn{}, {}, 1e-3);
  CHECK(sup_against_oracle(mild.trajectory, oracle) < 1e-6);
}

TEST_CASE("rotation example: mild solution tracks the oracle under impulse") {
  for (bool control_on : {true, false}) {
    RotationExample rot = make_rotation_example(true, control_on);
    const QuadratureGrid grid = make_quadrature_grid(rot.system);
    const PicardResult mild =
        mild_solve_semilinear(rot.system, rot.prescribed_control,
                              rot.prescribed_impulse_controls, grid);
    const Trajectory oracle =
        dense_oracle(rot.system, rot.prescribed_control,
                     rot.prescribed_impulse_controls, 1e-3);
    CHECK(sup_against_oracle(mild.trajectory, oracle) < 1e-6);
    // The jump at t = 1 is visible.
    CHECK((mild.trajectory.right_limit(1) - mild.trajectory.left_limit(1))
              .norm() > 0.5);
  }
}

TEST_CASE("oracle converges at fourth order") {
  RotationExample rot = make_rotation_example();
  const std::vector<Vector>& v = rot.prescribed_impulse_controls;
  const Trajectory ref = dense_oracle(rot.system, rot.prescribed_control, v,
                                      1.25e-4);
  const Trajectory coarse =
      dense_oracle(rot.system, rot.prescribed_control, v, 4e-3);
  const Trajectory fine =
      dense_oracle(rot.system, rot.prescribed_control, v, 2e-3);
  const double err_coarse = (coarse.terminal() - ref.terminal()).norm();
  const double err_fine = (fine.terminal() - ref.terminal()).norm();
  const double ratio = err_coarse / err_fine;
  CHECK(ratio > 10.0);
  CHECK(ratio < 25.0);
}

TEST_CASE("oracle matches the exponential on pure linear flow") {
  ImpulsiveSystem sys = scalar_system(-0.7, 2.0);
  sys.initial_state[0] = 1.3;
  const Trajectory traj = dense_oracle(sys, ControlFn{}, {}, 1e-3);
  const Vector expect = sys.model.evolve(2.0, sys.initial_state);
  CHECK(std::abs(traj.terminal()[0] - expect[0]) < 1e-12);
}

TEST_CASE("quadrature convergence: doubling panels is inert") {
  RotationExample rot = make_rotation_example();
  rot.system.nonlinearity.kind = Nonlinearity::Kind::tabulated;
  rot.system.nonlinearity.forcing = [](double t) {
    Vector f(2);
    f << 0.0, 0.1 * std::sin(t);
    return f;
  };
  const QuadratureGrid base = make_quadrature_grid(rot.system, 8, 16);
  const QuadratureGrid fine = make_quadrature_grid(rot.system, 8, 32);
  const Trajectory t1 = mild_solve_linear(rot.system, rot.prescribed_control,
                                          rot.prescribed_impulse_controls,
                                          base);
  const Trajectory t2 = mild_solve_linear(rot.system, rot.prescribed_control,
                                          rot.prescribed_impulse_controls,
                                          fine);
  CHECK((t1.terminal() - t2.terminal()).norm() < 1e-10);
}

TEST_CASE("picard gaps contract geometrically for small Lipschitz data") {
  ImpulsiveSystem sys = scalar_system(0.0);
  sys.nonlinearity.kind = Nonlinearity::Kind::bounded_sin;
  sys.nonlinearity.coefficient = 0.3;
  sys.initial_state[0] = 1.0;
  const QuadratureGrid grid = make_quadrature_grid(sys);
  PicardOptions opts;
  opts.tol = 1e-14;
  const PicardResult result = mild_solve_semilinear(sys, ControlFn{}, {},
                                                    grid, opts);
  REQUIRE(result.gap_history.size() >= 4);
  int contractions = 0;
  for (std::size_t i = 1; i < result.gap_history.size(); ++i) {
    if (result.gap_history[i] < result.gap_history[i - 1]) ++contractions;
    if (result.gap_history[i] == 0.0) break;
  }
  CHECK(contractions >= 3);
}

TEST_CASE("picard surfaces divergence and iteration exhaustion") {
  ImpulsiveSystem sys = scalar_system(0.0);
  sys.nonlinearity.kind = Nonlinearity::Kind::bounded_sin;
  sys.nonlinearity.coefficient = 5.0;  // Lipschitz * horizon > 1
  sys.initial_state[0] = 1.0;
  const QuadratureGrid grid = make_quadrature_grid(sys);
  PicardOptions opts;
  opts.max_iter = 8;
  opts.tol = 1e-14;
  CHECK_THROWS_AS(
      (void)mild_solve_semilinear(sys, ControlFn{}, {}, grid, opts),
      NonConvergenceError);
}

TEST_CASE("non-finite control values are rejected") {
  ImpulsiveSystem sys = scalar_system(0.0);
  const QuadratureGrid grid = make_quadrature_grid(sys);
  auto bad = [](double) {
    Vector u(1);
    u << std::nan("");
    return u;
  };
  CHECK_THROWS_AS((void)mild_solve_linear(sys, bad, {}, grid),
                  std::invalid_argument);
}
