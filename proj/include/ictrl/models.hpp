#pragma once

#include <string>
#include <vector>

#include "ictrl/system.hpp"
#include "ictrl/types.hpp"

namespace ictrl {

enum class HeatVariant { dirichlet, neumann };

/// Input map for the heat presets: `shifted_modes` is the N x (N-1)
/// truncation of the map whose first input channel drives mode 1 with
/// weight 2 and mode 2 with weight 1 (the remaining channels are the
/// identity on modes 3..N); `identity` drives every mode directly.
enum class HeatInput { shifted_modes, identity };

/// Diffusion chain on N spectral modes: eigenvalues -n^2 (Dirichlet,
/// n = 1..N) or -n^2 pi^2 (Neumann, n = 0..N-1, including the constant
/// mode).  Impulses, when given, use B_k = D_k = -I (full reset plus a
/// directly injected impulse control).
ImpulsiveSystem make_heat(int modes, double horizon, HeatVariant variant,
                          const std::vector<double>& impulse_times = {},
                          HeatInput input = HeatInput::shifted_modes,
                          const Vector& initial_state = Vector());

/// Vibrating-string model with N modes (state dimension 2N) in the
/// weighted coefficient space; the single input channel drives the
/// velocity coefficients with weights gamma_m (all must be nonzero).
/// Impulses use B_k = 0, D_k = I.  If the final control window b - t_p is
/// shorter than one full period (2 pi), a warning is appended.
ImpulsiveSystem make_wave(int modes, double horizon, const Vector& gammas,
                          const std::vector<double>& impulse_times = {},
                          std::vector<std::string>* warnings = nullptr);

/// Two-dimensional rotation system with one impulse at t = 1 on [0, 2]:
/// A = [[0, 1], [-1, 0]], x0 = (1, 0), B_1 = [[0, 0], [0, -0.5]],
/// D_1 = (1, 0)^T, quadratic nonlinearity (0, 0.1 x_1^2), and the
/// prescribed inputs u = (1, 0), v_1 = 1.
struct RotationExample {
  ImpulsiveSystem system;
  ControlFn prescribed_control;  // empty when control_on is false
  std::vector<Vector> prescribed_impulse_controls;
};

RotationExample make_rotation_example(bool with_impulse = true,
                                      bool control_on = true);

}  // namespace ictrl
