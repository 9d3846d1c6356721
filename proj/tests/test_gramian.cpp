#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "ictrl/gramian.hpp"
#include "ictrl/models.hpp"

using namespace ictrl;

TEST_CASE("scalar integrator: terminal Gramian is the interval length") {
  ImpulsiveSystem sys = testing::scalar_integrator();
  const QuadratureGrid grid = make_quadrature_grid(sys);
  const GramianSet set = assemble_gramians(sys, grid);
  CHECK(set.terminal_input(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(set.terminal_impulse.norm() == 0.0);
  CHECK(set.interior_input.norm() == 0.0);
  CHECK(set.interior_impulse.norm() == 0.0);
  CHECK((set.total - set.terminal_input).norm() == 0.0);
}

TEST_CASE("heat Gramian matches the closed-form diagonal") {
  ImpulsiveSystem sys =
      make_heat(3, 1.0, HeatVariant::dirichlet, {}, HeatInput::identity);
  const QuadratureGrid grid = make_quadrature_grid(sys);
  const GramianSet set = assemble_gramians(sys, grid);
  for (int n = 1; n <= 3; ++n) {
    const double expect = (1.0 - std::exp(-2.0 * n * n)) / (2.0 * n * n);
    CHECK(set.terminal_input(n - 1, n - 1) ==
          doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK((set.terminal_input - Matrix(set.terminal_input.diagonal()
                                         .asDiagonal()))
            .norm() < 1e-14);
}

TEST_CASE("rotation preset: W is symmetric positive definite") {
  RotationExample rot = make_rotation_example();
  const QuadratureGrid grid = make_quadrature_grid(rot.system);
  const GramianSet set = assemble_gramians(rot.system, grid);
  const double wnorm = set.total.norm();
  for (const Matrix* part :
       {&set.terminal_input, &set.terminal_impulse, &set.interior_input,
        &set.interior_impulse}) {
    const Matrix sym = set.symmetrized(*part);
    CHECK((sym - sym.transpose()).cwiseAbs().maxCoeff() < 1e-10 * wnorm);
    CHECK(set.eigenvalues(*part)[0] >= -1e-10 * wnorm);
  }
  CHECK(set.min_eigenvalue() > 0.0);
  const Matrix sum = set.terminal_input + set.terminal_impulse +
                     set.interior_input + set.interior_impulse;
  CHECK((set.total - sum).cwiseAbs().maxCoeff() <= 1e-12 * wnorm);
}

TEST_CASE("assembled Gramian equals the explicit factor product") {
  // Bundled configurations, including a two-impulse chain and a wave model.
  std::vector<ImpulsiveSystem> systems;
  systems.push_back(testing::scalar_integrator());
  systems.push_back(testing::two_impulse_rotation());
  systems.push_back(make_rotation_example().system);
  systems.push_back(make_heat(4, 1.0, HeatVariant::dirichlet, {0.5}));
  systems.push_back(make_wave(3, 7.0, Vector::Ones(3), {0.5}));
  for (const ImpulsiveSystem& sys : systems) {
    const QuadratureGrid grid = make_quadrature_grid(sys);
    const GramianSet set = assemble_gramians(sys, grid);
    CHECK(testing::factorization_gap(sys, grid, set) < 1e-8);
  }
}

TEST_CASE("resolvent solve: scaling and diagonal cases") {
  Vector r(2);
  r << 3.0, -1.0;
  const Vector scaled = resolvent_solve(Matrix::Zero(2, 2), 0.5, r);
  CHECK((scaled - 2.0 * r).norm() < 1e-12);

  Vector rhs(2);
  rhs << 2.0, 0.0;
  const Vector solved = resolvent_solve(Matrix::Identity(2, 2), 1.0, rhs);
  CHECK(solved[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(solved[1] == doctest::Approx(0.0).epsilon(1e-14));

  CHECK_THROWS_AS((void)resolvent_solve(Matrix::Identity(2, 2), 0.0, rhs),
                  std::invalid_argument);
  Matrix skew(2, 2);
  skew << 0.0, 1.0, -1.0, 0.0;
  CHECK_THROWS_AS((void)resolvent_solve(skew, 1.0, rhs),
                  std::invalid_argument);
}

TEST_CASE("resolvent is a contraction on random PSD matrices") {
  std::mt19937 rng(41);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 10; ++trial) {
    Matrix f(5, 5);
    for (int i = 0; i < 25; ++i) f(i / 5, i % 5) = dist(rng);
    const Matrix w = f * f.transpose();
    Vector rhs(5);
    for (int i = 0; i < 5; ++i) rhs[i] = dist(rng);
    for (double alpha : {1e-2, 1e-1, 1.0}) {
      const Vector x = resolvent_solve(w, alpha, rhs);
      CHECK(alpha * x.norm() <= rhs.norm() * (1.0 + 1e-12));
      CHECK(((w + alpha * Matrix::Identity(5, 5)) * x - rhs).norm() <=
            1e-10 * rhs.norm());
    }
  }
}

TEST_CASE("decay table: exact scalar ratio and spectral bound") {
  // Scalar W = 1.
  ImpulsiveSystem sys = testing::scalar_integrator();
  const QuadratureGrid grid = make_quadrature_grid(sys);
  const GramianSet set = assemble_gramians(sys, grid);
  std::vector<Vector> probes = {Vector::Ones(1)};
  const DecayTable table =
      resolvent_decay_table(set, sys.model, {1e-1, 1e-2}, probes);
  CHECK(table.ratios[1][0] ==
        doctest::Approx(0.009900990099009901).epsilon(1e-12));

  // Positive definite W: ratio bounded by alpha / (alpha + mu_min).
  RotationExample rot = make_rotation_example();
  const QuadratureGrid rgrid = make_quadrature_grid(rot.system);
  const GramianSet rset = assemble_gramians(rot.system, rgrid);
  const double mu = rset.min_eigenvalue();
  REQUIRE(mu > 0.0);
  std::vector<Vector> rprobes;
  std::mt19937 rng(3);
  std::normal_distribution<double> dist;
  for (int i = 0; i < 4; ++i) {
    Vector x(2);
    x << dist(rng), dist(rng);
    rprobes.push_back(x);
  }
  const std::vector<double> alphas = {1e-1, 1e-2, 1e-3, 1e-4};
  const DecayTable rtable =
      resolvent_decay_table(rset, rot.system.model, alphas, rprobes);
  for (std::size_t a = 0; a < alphas.size(); ++a)
    for (double ratio : rtable.ratios[a])
      CHECK(ratio <= alphas[a] / (alphas[a] + mu) + 1e-10);

  // Ratios never increase as alpha decreases.
  for (std::size_t a = 1; a < alphas.size(); ++a)
    for (std::size_t i = 0; i < rprobes.size(); ++i)
      CHECK(rtable.ratios[a][i] <= rtable.ratios[a - 1][i] + 1e-12);
}

TEST_CASE("degenerate Gramian is flagged") {
  GramianSet zero;
  zero.terminal_input = Matrix::Zero(2, 2);
  zero.terminal_impulse = Matrix::Zero(2, 2);
  zero.interior_input = Matrix::Zero(2, 2);
  zero.interior_impulse = Matrix::Zero(2, 2);
  zero.total = Matrix::Zero(2, 2);
  zero.metric_sqrt = Vector::Ones(2);
  SemigroupModel model = SemigroupModel::spectral(-Vector::Ones(2));
  std::vector<Vector> probes = {Vector::Unit(2, 0), Vector::Unit(2, 1)};
  const DecayTable table =
      resolvent_decay_table(zero, model, {1e-1, 1e-3}, probes);
  for (const auto& row : table.ratios)
    for (double r : row) CHECK(r == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_FALSE(table.satisfied);
}

TEST_CASE("cached resolvent operator matches the plain solve") {
  RotationExample rot = make_rotation_example();
  const QuadratureGrid grid = make_quadrature_grid(rot.system);
  const GramianSet set = assemble_gramians(rot.system, grid);
  const ResolventOperator op(set);
  std::mt19937 rng(9);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 6; ++trial) {
    Vector rhs(2);
    rhs << dist(rng), dist(rng);
    const double alpha = trial % 2 ? 1e-2 : 1e-3;  // exercises the cache
    const Vector via_op = op.solve(alpha, rhs);
    const Vector direct = resolvent_solve(set.total, alpha, rhs);
    CHECK((via_op - direct).norm() < 1e-11 * (1.0 + rhs.norm()));
  }
}
