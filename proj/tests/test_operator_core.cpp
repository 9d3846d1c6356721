#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "ictrl/models.hpp"
#include "ictrl/propagator.hpp"
#include "ictrl/quadrature.hpp"
#include "ictrl/semigroup.hpp"
#include "ictrl/system.hpp"

using namespace ictrl;

namespace {

Matrix rotation_generator() {
  Matrix a(2, 2);
  a << 0.0, 1.0, -1.0, 0.0;
  return a;
}

Vector random_vector(std::mt19937& rng, int d) {
  std::normal_distribution<double> dist;
  Vector x(d);
  for (int i = 0; i < d; ++i) x[i] = dist(rng);
  return x;
}

// Taylor-series exponential as an independent oracle for small norms.
Matrix expm_series(const Matrix& a) {
  Matrix term = Matrix::Identity(a.rows(), a.cols());
  Matrix sum = term;
  for (int k = 1; k <= 40; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

std::vector<SemigroupModel> bundled_models() {
  std::vector<SemigroupModel> models;
  models.push_back(SemigroupModel::dense(rotation_generator()));
  Matrix sym(3, 3);
  sym << -1.0, 0.3, 0.0, 0.3, -2.0, 0.1, 0.0, 0.1, -0.5;
  models.push_back(SemigroupModel::dense(sym));
  Vector lambdas(4);
  lambdas << -1.0, -4.0, -9.0, -16.0;
  models.push_back(SemigroupModel::spectral(lambdas));
  models.push_back(SemigroupModel::wave(3));
  return models;
}

ImpulsiveSystem two_impulse_system() {
  ImpulsiveSystem sys;
  sys.model = SemigroupModel::dense(rotation_generator());
  sys.horizon = 2.0;
  sys.impulse_times = {0.7, 1.4};
  Matrix b1(2, 2), b2(2, 2);
  b1 << 0.0, 0.0, 0.0, -0.5;
  b2 << 0.1, 0.0, 0.0, 0.2;
  sys.jump_maps = {b1, b2};
  Matrix d1(2, 1), d2(2, 1);
  d1 << 1.0, 0.0;
  d2 << 0.0, 1.0;
  sys.impulse_inputs = {d1, d2};
  sys.input_map = Matrix::Identity(2, 2);
  sys.initial_state = Vector::Zero(2);
  sys.initial_state << 1.0, 0.0;
  return sys;
}

}  // namespace

TEST_CASE("matrix exponential matches closed forms") {
  const double pi = std::acos(-1.0);
  const Matrix quarter = matrix_exponential(rotation_generator() * (pi / 2));
  CHECK(std::abs(quarter(0, 0)) < 1e-14);
  CHECK(quarter(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(quarter(1, 0) == doctest::Approx(-1.0).epsilon(1e-14));

  Matrix nilpotent(2, 2);
  nilpotent << 0.0, 1.0, 0.0, 0.0;
  const Matrix exp_n = matrix_exponential(nilpotent);
  CHECK(exp_n(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(exp_n(0, 0) == doctest::Approx(1.0).epsilon(1e-15));

  std::mt19937 rng(7);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 5; ++trial) {
    Matrix a(4, 4);
    for (int i = 0; i < 16; ++i) a(i / 4, i % 4) = 0.4 * dist(rng);
    const Matrix diff = matrix_exponential(a) - expm_series(a);
    CHECK(diff.cwiseAbs().maxCoeff() < 1e-13);
  }

  // Large argument exercises the scaling path.
  Matrix big = rotation_generator() * 40.0;
  const Matrix exp_big = matrix_exponential(big);
  CHECK(exp_big(0, 0) == doctest::Approx(std::cos(40.0)).epsilon(1e-11));
  CHECK(exp_big(0, 1) == doctest::Approx(std::sin(40.0)).epsilon(1e-11));
}

TEST_CASE("evolve: quarter rotation, heat factor, identity at zero") {
  const double pi = std::acos(-1.0);
  SemigroupModel rot = SemigroupModel::dense(rotation_generator());
  Vector e1(2);
  e1 << 1.0, 0.0;
  const Vector quarter = rot.evolve(pi / 2, e1);
  CHECK(std::abs(quarter[0]) < 1e-14);
  CHECK(quarter[1] == doctest::Approx(-1.0).epsilon(1e-14));

  Vector lambda1(1);
  lambda1 << -1.0;
  SemigroupModel heat = SemigroupModel::spectral(lambda1);
  Vector one(1);
  one << 1.0;
  CHECK(heat.evolve(1.0, one)[0] ==
        doctest::Approx(0.36787944117144233).epsilon(1e-15));

  std::mt19937 rng(11);
  for (const SemigroupModel& model : bundled_models()) {
    const Vector x = random_vector(rng, model.dimension());
    const Vector same = model.evolve(0.0, x);
    CHECK(model.norm(same - x) <= 1e-12 * model.norm(x));
  }
}

TEST_CASE("semigroup property and adjoint consistency on all models") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> tdist(0.0, 2.0);
  for (const SemigroupModel& model : bundled_models()) {
    for (int trial = 0; trial < 20; ++trial) {
      const double t = tdist(rng);
      const double s = tdist(rng);
      const Vector x = random_vector(rng, model.dimension());
      const Vector y = random_vector(rng, model.dimension());

      const Vector via_sum = model.evolve(t + s, x);
      const Vector via_steps = model.evolve(t, model.evolve(s, x));
      CHECK(model.norm(via_sum - via_steps) <= 1e-9 * model.norm(x));

      const double lhs = model.inner(model.evolve(t, x), y);
      const double rhs = model.inner(x, model.evolve_adjoint(t, y));
      CHECK(std::abs(lhs - rhs) <= 1e-10 * model.norm(x) * model.norm(y));
    }
  }
}

TEST_CASE("wave blocks are isometries of the weighted inner product") {
  SemigroupModel wave = SemigroupModel::wave(4);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> tdist(0.0, 7.0);
  for (int trial = 0; trial < 25; ++trial) {
    const double t = tdist(rng);
    const Vector x = random_vector(rng, wave.dimension());
    CHECK(std::abs(wave.norm(wave.evolve(t, x)) - wave.norm(x)) <=
          1e-9 * wave.norm(x));
  }
  // One full period returns to the identity.
  SemigroupModel single = SemigroupModel::wave(1);
  const double two_pi = 2.0 * std::acos(-1.0);
  const Vector x = random_vector(rng, 2);
  CHECK(single.norm(single.evolve(two_pi, x) - x) <= 1e-9 * single.norm(x));
}

TEST_CASE("adjoint evolve: symmetric generators and rotation transpose") {
  Matrix sym(2, 2);
  sym << -1.0, 0.25, 0.25, -2.0;
  SemigroupModel model = SemigroupModel::dense(sym);
  std::mt19937 rng(5);
  const Vector x = random_vector(rng, 2);
  CHECK((model.evolve(0.8, x) - model.evolve_adjoint(0.8, x)).norm() < 1e-13);

  SemigroupModel rot = SemigroupModel::dense(rotation_generator());
  Vector e1(2);
  e1 << 1.0, 0.0;
  const double pi = std::acos(-1.0);
  const Vector adj = rot.evolve_adjoint(pi / 2, e1);
  CHECK(std::abs(adj[0]) < 1e-14);
  CHECK(adj[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("evolve rejects bad input") {
  SemigroupModel rot = SemigroupModel::dense(rotation_generator());
  Vector wrong(3);
  wrong << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS((void)rot.evolve(1.0, wrong), std::invalid_argument);
  Vector bad(2);
  bad << 1.0, std::nan("");
  CHECK_THROWS_AS((void)rot.evolve(1.0, bad), std::invalid_argument);
  Vector ok(2);
  ok << 1.0, 0.0;
  CHECK_THROWS_AS((void)rot.evolve(-0.5, ok), std::invalid_argument);
}

TEST_CASE("jump_apply reproduces the printed post-impulse state") {
  Matrix b(2, 2);
  b << 0.0, 0.0, 0.0, -0.5;
  Matrix d(2, 1);
  d << 1.0, 0.0;
  Vector x(2);
  x << std::cos(1.0), -std::sin(1.0);
  Vector v(1);
  v << 1.0;
  const Vector after = jump_apply(b, d, x, v);
  CHECK(after[0] == doctest::Approx(1.5403023058681398).epsilon(1e-14));
  CHECK(after[1] == doctest::Approx(-0.42073549240394825).epsilon(1e-14));
  // Within the printed precision.
  CHECK(std::abs(after[0] - 1.5403) < 5e-5);
  CHECK(std::abs(after[1] - (-0.42075)) < 5e-5);
}

TEST_CASE("jump_apply: identity and full-reset edge cases, affinity") {
  std::mt19937 rng(17);
  const Vector x = random_vector(rng, 3);
  const Matrix zero = Matrix::Zero(3, 3);
  const Vector none = jump_apply(zero, Matrix::Zero(3, 0), x, Vector());
  CHECK((none - x).norm() == 0.0);

  const Matrix minus_id = -Matrix::Identity(3, 3);
  const Vector reset =
      jump_apply(minus_id, Matrix::Zero(3, 1), x, Vector::Zero(1));
  CHECK(reset.norm() == 0.0);

  // Affinity in (x, v).
  Matrix b(3, 3);
  b << 0.1, 0.0, 0.2, 0.0, -0.3, 0.0, 0.0, 0.0, 0.4;
  Matrix d(3, 2);
  d << 1.0, 0.0, 0.0, 1.0, 0.5, -0.5;
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x1 = random_vector(rng, 3);
    const Vector x2 = random_vector(rng, 3);
    const Vector v1 = random_vector(rng, 2);
    const Vector v2 = random_vector(rng, 2);
    const double a = 0.7, c = -1.3;
    const Vector lhs = jump_apply(b, d, a * x1 + c * x2, a * v1 + c * v2);
    const Vector rhs =
        a * jump_apply(b, d, x1, v1) + c * jump_apply(b, d, x2, v2);
    CHECK((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
  }
}

TEST_CASE("downstream maps: no-impulse, rotation structure, composition") {
  // p = 0: E_0 = S(b).
  ImpulsiveSystem plain;
  plain.model = SemigroupModel::dense(rotation_generator());
  plain.horizon = 2.0;
  plain.input_map = Matrix::Identity(2, 2);
  plain.initial_state = Vector::Zero(2);
  const Matrix e0 = downstream_map(plain, 0);
  CHECK((e0 - plain.model.evolve_matrix(2.0)).cwiseAbs().maxCoeff() < 1e-14);

  // Rotation example: E_1 = S(1), E_0 = S(1)(I + B_1) S(1).
  RotationExample rot = make_rotation_example();
  const Matrix s1 = rot.system.model.evolve_matrix(1.0);
  CHECK((downstream_map(rot.system, 1) - s1).cwiseAbs().maxCoeff() < 1e-14);
  const Matrix expected =
      s1 * (Matrix::Identity(2, 2) + rot.system.jump_maps[0]) * s1;
  CHECK((downstream_map(rot.system, 0) - expected).cwiseAbs().maxCoeff() <
        1e-13);

  // Composition: E_i = E_{i+1} (I + B_{i+1}) S(t_{i+1} - t_i).
  ImpulsiveSystem sys = two_impulse_system();
  for (int i = 0; i < 2; ++i) {
    const double seg =
        sys.impulse_times[i] - (i > 0 ? sys.impulse_times[i - 1] : 0.0);
    const Matrix composed = downstream_map(sys, i + 1) *
                            (Matrix::Identity(2, 2) + sys.jump_maps[i]) *
                            sys.model.evolve_matrix(seg);
    CHECK((downstream_map(sys, i) - composed).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK_THROWS_AS((void)downstream_map(sys, 3), std::invalid_argument);
}

TEST_CASE("downstream map agrees with time-stepping of unit vectors") {
  ImpulsiveSystem sys = two_impulse_system();
  std::vector<Vector> zero_v = {Vector::Zero(1), Vector::Zero(1)};
  const Matrix e0 = downstream_map(sys, 0);
  for (int j = 0; j < 2; ++j) {
    ImpulsiveSystem probe = sys;
    probe.initial_state = Vector::Unit(2, j);
    const Trajectory traj = dense_oracle(probe, ControlFn{}, zero_v, 1e-3);
    CHECK((traj.terminal() - e0.col(j)).norm() < 1e-8);
  }
}

TEST_CASE("quadrature grid: weights, node placement, exactness") {
  ImpulsiveSystem sys = two_impulse_system();
  const QuadratureGrid grid = make_quadrature_grid(sys, 8, 16);
  grid.validate_against(sys);
  CHECK(grid.subintervals.size() == 3);
  for (const SubintervalGrid& sub : grid.subintervals) {
    double sum = 0.0;
    for (std::size_t q = 0; q < sub.weights.size(); ++q) {
      CHECK(sub.weights[q] > 0.0);
      sum += sub.weights[q];
      for (double t : sys.impulse_times)
        CHECK(std::abs(sub.nodes[q] - t) > 1e-9);
    }
    CHECK(sum == doctest::Approx(sub.length()).epsilon(1e-13));
  }

  // Order-8 Gauss rule integrates degree-15 polynomials exactly.
  const GaussRule rule = gauss_legendre(8);
  double integral = 0.0;
  for (int q = 0; q < 8; ++q)
    integral += rule.weights[q] * std::pow(rule.nodes[q], 14);
  CHECK(integral == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("impulsive system validation rejects bad schedules") {
  ImpulsiveSystem sys = two_impulse_system();
  sys.impulse_times = {1.4, 0.7};
  std::swap(sys.jump_maps[0], sys.jump_maps[1]);
  CHECK_THROWS_AS(sys.validate(), std::invalid_argument);

  ImpulsiveSystem boundary = two_impulse_system();
  boundary.impulse_times = {0.7, 2.0};
  CHECK_THROWS_AS(boundary.validate(), std::invalid_argument);

  ImpulsiveSystem mismatched = two_impulse_system();
  mismatched.impulse_inputs[0] = Matrix::Zero(3, 1);
  CHECK_THROWS_AS(mismatched.validate(), std::invalid_argument);
}
