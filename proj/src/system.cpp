#include "ictrl/system.hpp"

#include <cmath>

namespace ictrl {

Vector Nonlinearity::eval(double t, const Vector& x) const {
  switch (kind) {
    case Kind::none:
      return Vector::Zero(x.size());
    case Kind::quadratic: {
      if (x.size() < 2)
        throw std::invalid_argument(
            "Nonlinearity::eval: quadratic kind needs dimension >= 2");
      Vector y = Vector::Zero(x.size());
      y[1] = coefficient * x[0] * x[0];
      return y;
    }
    case Kind::bounded_sin:
      return coefficient * x.array().sin().matrix();
    case Kind::tabulated: {
      if (!forcing)
        throw std::invalid_argument(
            "Nonlinearity::eval: tabulated kind without samples");
      return forcing(t);
    }
  }
  throw std::logic_error("unreachable");
}

double ImpulsiveSystem::subinterval_begin(int k) const {
  if (k < 0 || k > impulse_count())
    throw std::invalid_argument("subinterval_begin: index out of range");
  return k == 0 ? 0.0 : impulse_times[k - 1];
}

double ImpulsiveSystem::subinterval_end(int k) const {
  if (k < 0 || k > impulse_count())
    throw std::invalid_argument("subinterval_end: index out of range");
  return k == impulse_count() ? horizon : impulse_times[k];
}

void ImpulsiveSystem::validate() const {
  const int d = dimension();
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("ImpulsiveSystem: horizon must be positive");
  if (initial_state.size() != d)
    throw std::invalid_argument("ImpulsiveSystem: initial state dimension");
  if (!initial_state.allFinite())
    throw std::invalid_argument("ImpulsiveSystem: non-finite initial state");
  if (input_map.rows() != d)
    throw std::invalid_argument("ImpulsiveSystem: input map row count");
  if (!input_map.allFinite())
    throw std::invalid_argument("ImpulsiveSystem: non-finite input map");

  const int p = impulse_count();
  if (static_cast<int>(jump_maps.size()) != p ||
      static_cast<int>(impulse_inputs.size()) != p)
    throw std::invalid_argument(
        "ImpulsiveSystem: impulse times, jump maps and impulse inputs must "
        "have equal counts");
  double prev = 0.0;
  for (int k = 0; k < p; ++k) {
    const double t = impulse_times[k];
    if (!(t > prev) || !(t < horizon))
      throw std::invalid_argument(
          "ImpulsiveSystem: impulse times must be strictly increasing and "
          "interior to (0, b)");
    prev = t;
    if (jump_maps[k].rows() != d || jump_maps[k].cols() != d)
      throw std::invalid_argument("ImpulsiveSystem: jump map dimensions");
    if (impulse_inputs[k].rows() != d)
      throw std::invalid_argument("ImpulsiveSystem: impulse input row count");
    if (!jump_maps[k].allFinite() || !impulse_inputs[k].allFinite())
      throw std::invalid_argument("ImpulsiveSystem: non-finite impulse data");
  }
  if (!std::isfinite(nonlinearity.coefficient))
    throw std::invalid_argument(
        "ImpulsiveSystem: non-finite nonlinearity coefficient");
  if (nonlinearity.kind == Nonlinearity::Kind::quadratic && d < 2)
    throw std::invalid_argument(
        "ImpulsiveSystem: quadratic nonlinearity needs dimension >= 2");
}

Vector jump_apply(const Matrix& b, const Matrix& d, const Vector& x,
                  const Vector& v) {
  if (b.rows() != b.cols() || b.rows() != x.size())
    throw std::invalid_argument("jump_apply: jump map dimension mismatch");
  if (d.rows() != x.size() || d.cols() != v.size())
    throw std::invalid_argument("jump_apply: impulse input dimension mismatch");
  Vector y = x + b * x;
  if (v.size() > 0) y += d * v;
  return y;
}

Matrix downstream_map(const ImpulsiveSystem& sys, int i) {
  const int p = sys.impulse_count();
  if (i < 0 || i > p)
    throw std::invalid_argument("downstream_map: index out of range");
  const int d = sys.dimension();
  const Matrix id = Matrix::Identity(d, d);
  Matrix e = sys.model.evolve_matrix(sys.horizon -
                                     (p == 0 ? 0.0 : sys.impulse_times[p - 1]));
  for (int j = p; j > i; --j) {
    const double seg = sys.impulse_times[j - 1] -
                       (j >= 2 ? sys.impulse_times[j - 2] : 0.0);
    e = e * (id + sys.jump_maps[j - 1]) * sys.model.evolve_matrix(seg);
  }
  return e;
}

}  // namespace ictrl
