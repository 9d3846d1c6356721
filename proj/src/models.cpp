#include "ictrl/models.hpp"

#include <cmath>

namespace ictrl {

ImpulsiveSystem make_heat(int modes, double horizon, HeatVariant variant,
                          const std::vector<double>& impulse_times,
                          HeatInput input, const Vector& initial_state) {
  if (modes < 1)
    throw std::invalid_argument("make_heat: need at least one mode");
  const double pi = std::acos(-1.0);
  Vector lambdas(modes);
  for (int n = 0; n < modes; ++n) {
    if (variant == HeatVariant::dirichlet)
      lambdas[n] = -static_cast<double>((n + 1) * (n + 1));
    else
      lambdas[n] = -static_cast<double>(n * n) * pi * pi;
  }

  ImpulsiveSystem sys;
  sys.model = SemigroupModel::spectral(lambdas);
  sys.horizon = horizon;

  if (input == HeatInput::shifted_modes) {
    if (modes < 2)
      throw std::invalid_argument(
          "make_heat: the shifted input map needs at least two modes");
    // Channels u_2..u_N; the first channel drives mode 1 with weight 2 and
    // mode 2 with weight 1.
    Matrix omega = Matrix::Zero(modes, modes - 1);
    omega(0, 0) = 2.0;
    omega(1, 0) = 1.0;
    for (int n = 2; n < modes; ++n) omega(n, n - 1) = 1.0;
    sys.input_map = omega;
  } else {
    sys.input_map = Matrix::Identity(modes, modes);
  }

  if (initial_state.size() == 0) {
    Vector x0(modes);
    for (int n = 0; n < modes; ++n) x0[n] = 1.0 / (n + 1.0);
    sys.initial_state = x0;
  } else {
    sys.initial_state = initial_state;
  }

  sys.impulse_times = impulse_times;
  const Matrix minus_id = -Matrix::Identity(modes, modes);
  for (std::size_t k = 0; k < impulse_times.size(); ++k) {
    sys.jump_maps.push_back(minus_id);
    sys.impulse_inputs.push_back(minus_id);
  }
  sys.validate();
  return sys;
}

ImpulsiveSystem make_wave(int modes, double horizon, const Vector& gammas,
                          const std::vector<double>& impulse_times,
                          std::vector<std::string>* warnings) {
  if (gammas.size() != modes)
    throw std::invalid_argument("make_wave: need one gamma per mode");
  for (int m = 0; m < modes; ++m)
    if (gammas[m] == 0.0)
      throw std::invalid_argument(
          "make_wave: every input coefficient gamma_m must be nonzero");

  ImpulsiveSystem sys;
  sys.model = SemigroupModel::wave(modes);
  sys.horizon = horizon;
  Matrix omega = Matrix::Zero(2 * modes, 1);
  for (int m = 0; m < modes; ++m) omega(2 * m + 1, 0) = gammas[m];
  sys.input_map = omega;

  Vector x0 = Vector::Zero(2 * modes);
  for (int m = 0; m < modes; ++m) {
    x0[2 * m] = 1.0 / (m + 1.0);      // position coefficient
    x0[2 * m + 1] = 0.5 / (m + 1.0);  // velocity coefficient
  }
  sys.initial_state = x0;

  sys.impulse_times = impulse_times;
  for (std::size_t k = 0; k < impulse_times.size(); ++k) {
    sys.jump_maps.push_back(Matrix::Zero(2 * modes, 2 * modes));
    sys.impulse_inputs.push_back(Matrix::Identity(2 * modes, 2 * modes));
  }
  sys.validate();

  const double t_p = impulse_times.empty() ? 0.0 : impulse_times.back();
  const double pi = std::acos(-1.0);
  if (horizon - t_p < 2.0 * pi && warnings)
    warnings->push_back(
        "wave model: the final control window is shorter than one full "
        "period (b - t_p < 2*pi); the moment problem may be ill-posed");
  return sys;
}

RotationExample make_rotation_example(bool with_impulse, bool control_on) {
  ImpulsiveSystem sys;
  Matrix a(2, 2);
  a << 0.0, 1.0, -1.0, 0.0;
  sys.model = SemigroupModel::dense(a);
  sys.horizon = 2.0;
  Matrix omega(2, 2);
  omega << 1.0, 0.0, 0.0, 0.0;
  sys.input_map = omega;
  sys.initial_state = Vector::Zero(2);
  sys.initial_state << 1.0, 0.0;
  sys.nonlinearity.kind = Nonlinearity::Kind::quadratic;
  sys.nonlinearity.coefficient = 0.1;

  RotationExample example;
  if (with_impulse) {
    sys.impulse_times = {1.0};
    Matrix b1(2, 2);
    b1 << 0.0, 0.0, 0.0, -0.5;
    sys.jump_maps = {b1};
    Matrix d1(2, 1);
    d1 << 1.0, 0.0;
    sys.impulse_inputs = {d1};
    Vector v1(1);
    v1 << 1.0;
    example.prescribed_impulse_controls = {v1};
  }
  sys.validate();
  example.system = std::move(sys);
  if (control_on) {
    example.prescribed_control = [](double) {
      Vector u(2);
      u << 1.0, 0.0;
      return u;
    };
  }
  return example;
}

}  // namespace ictrl
