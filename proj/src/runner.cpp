#include "ictrl/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "ictrl/csv.hpp"
#include "ictrl/models.hpp"

namespace ictrl {

namespace {

// Windowed-Lagrange interpolant over strictly increasing samples, exact at
// the sample times, clamped outside the sampled range.
ForcingFn tabulated_function(std::vector<double> times,
                             std::vector<Vector> values) {
  return [times = std::move(times),
          values = std::move(values)](double t) -> Vector {
    t = std::clamp(t, times.front(), times.back());
    const double teps = 1e-13 * std::max(1.0, std::abs(t));
    auto it = std::lower_bound(times.begin(), times.end(), t - teps);
    if (it != times.end() && std::abs(*it - t) <= teps)
      return values[static_cast<std::size_t>(it - times.begin())];
    int idx = static_cast<int>(std::upper_bound(times.begin(), times.end(), t) -
                               times.begin());
    int lo = std::max(0, idx - 2);
    int hi = std::min(static_cast<int>(times.size()) - 1, lo + 3);
    lo = std::max(0, hi - 3);
    Vector acc = Vector::Zero(values.front().size());
    for (int i = lo; i <= hi; ++i) {
      double w = 1.0;
      for (int j = lo; j <= hi; ++j) {
        if (j == i) continue;
        w *= (t - times[j]) / (times[i] - times[j]);
      }
      acc += w * values[i];
    }
    return acc;
  };
}

Vector default_target(const std::string& preset, int dim) {
  Vector h = Vector::Zero(dim);
  if (preset == "heat-dirichlet" || preset == "heat-neumann") h[0] = 1.0;
  return h;
}

}  // namespace

BuildResult build_from_config(const RunConfig& config) {
  BuildResult out;
  const ModelConfig& mc = config.model;

  std::vector<double> impulse_times = config.impulses.times;
  if (mc.preset == "rotation-example") {
    RotationExample rot = make_rotation_example(mc.with_impulse);
    out.system = rot.system;
    out.simulate_control = rot.prescribed_control;
    out.simulate_impulse_controls = rot.prescribed_impulse_controls;
    if (mc.horizon.has_value()) {
      out.system.horizon = *mc.horizon;
      out.system.validate();
    }
  } else if (mc.preset == "heat-dirichlet" || mc.preset == "heat-neumann") {
    const HeatVariant variant = mc.preset == "heat-dirichlet"
                                    ? HeatVariant::dirichlet
                                    : HeatVariant::neumann;
    const HeatInput input = mc.input == "identity" ? HeatInput::identity
                                                   : HeatInput::shifted_modes;
    const double horizon = mc.horizon.value_or(1.0);
    out.system = make_heat(mc.modes, horizon, variant, impulse_times, input,
                           mc.initial_state);
  } else if (mc.preset == "wave") {
    Vector gammas;
    if (mc.gammas.empty()) {
      gammas = Vector::Ones(mc.modes);
    } else {
      gammas = Eigen::Map<const Vector>(
          mc.gammas.data(), static_cast<Eigen::Index>(mc.gammas.size()));
    }
    const double horizon = mc.horizon.value_or(7.0);
    out.system = make_wave(mc.modes, horizon, gammas, impulse_times,
                           &out.warnings);
    if (mc.initial_state.size() > 0) {
      out.system.initial_state = mc.initial_state;
      out.system.validate();
    }
  } else {  // custom
    ImpulsiveSystem sys;
    sys.model = SemigroupModel::dense(mc.generator);
    sys.horizon = *mc.horizon;
    sys.input_map = mc.input_map;
    sys.initial_state = mc.initial_state;
    sys.impulse_times = impulse_times;
    if (!impulse_times.empty()) {
      if (config.impulses.jump_maps.empty() ||
          config.impulses.input_maps.empty())
        throw ConfigError(
            "impulses: custom models need explicit jump_maps and input_maps");
    }
    out.system = sys;
  }

  // Explicit impulse sections override preset schedules.
  if (config.impulses.present && mc.preset != "custom") {
    if (!impulse_times.empty() && mc.preset == "rotation-example")
      throw ConfigError(
          "impulses: the rotation preset carries its own impulse schedule");
  }
  if (!config.impulses.jump_maps.empty())
    out.system.jump_maps = config.impulses.jump_maps;
  if (!config.impulses.input_maps.empty())
    out.system.impulse_inputs = config.impulses.input_maps;

  // Nonlinearity.
  const NonlinearityConfig& nc = config.nonlinearity;
  if (nc.kind == "none") {
    out.system.nonlinearity = Nonlinearity{};
  } else if (nc.kind == "quadratic") {
    out.system.nonlinearity.kind = Nonlinearity::Kind::quadratic;
    out.system.nonlinearity.coefficient = nc.coefficient;
  } else if (nc.kind == "bounded-sin") {
    out.system.nonlinearity.kind = Nonlinearity::Kind::bounded_sin;
    out.system.nonlinearity.coefficient = nc.coefficient;
  } else if (nc.kind == "tabulated") {
    if (nc.times.front() > 0.0 || nc.times.back() < out.system.horizon)
      throw ConfigError("nonlinearity: tabulated samples must cover [0, b]");
    for (const Vector& v : nc.values)
      if (v.size() != out.system.dimension())
        throw ConfigError("nonlinearity: sample dimension mismatch");
    out.system.nonlinearity.kind = Nonlinearity::Kind::tabulated;
    out.system.nonlinearity.forcing = tabulated_function(nc.times, nc.values);
  } else if (mc.preset == "rotation-example" && nc.kind == "none") {
    // keep the preset's quadratic term
  }
  out.system.validate();

  // Neutral wrapper.
  if (config.neutral.kind != "zero") {
    NeutralSystem neutral;
    neutral.base = out.system;
    neutral.delay = config.neutral.delay;
    neutral.convention = config.neutral.convention == "standard"
                             ? NeutralConvention::instantaneous
                             : NeutralConvention::frozen_terminal;
    const Vector hist_value = config.neutral.history_value.size() > 0
                                  ? config.neutral.history_value
                                  : out.system.initial_state;
    if (hist_value.size() != out.system.dimension())
      throw ConfigError("neutral: history_value dimension mismatch");
    neutral.base.initial_state = hist_value;
    neutral.history = HistorySegment::constant(config.neutral.delay,
                                               hist_value,
                                               config.neutral.history_samples);
    if (config.neutral.kind == "bounded-demo") {
      neutral.sigma.kind = NeutralTerm::Kind::bounded_demo;
      neutral.sigma.coefficient = config.neutral.coefficient;
    } else {
      if (config.neutral.sigma_times.front() > 0.0 ||
          config.neutral.sigma_times.back() < out.system.horizon)
        throw ConfigError("neutral: tabulated sigma must cover [0, b]");
      neutral.sigma.kind = NeutralTerm::Kind::tabulated;
      neutral.sigma.forcing = tabulated_function(config.neutral.sigma_times,
                                                 config.neutral.sigma_values);
    }
    neutral.validate();
    out.neutral = std::move(neutral);
  }

  out.grid = make_quadrature_grid(out.system, config.quadrature.order,
                                  config.quadrature.panels);

  // Target.
  if (config.synthesis.target.size() > 0) {
    if (config.synthesis.target.size() != out.system.dimension())
      throw ConfigError("synthesis.target: dimension mismatch");
    out.target = config.synthesis.target;
  } else {
    out.target = default_target(mc.preset, out.system.dimension());
  }

  // Simulation inputs.
  const SimulateConfig& sc = config.simulate;
  if (sc.control == "zero") {
    out.simulate_control = ControlFn{};
  } else if (sc.control == "constant") {
    if (sc.control_value.size() != out.system.input_map.cols())
      throw ConfigError("simulate.control_value: dimension mismatch");
    out.simulate_control = [v = sc.control_value](double) { return v; };
  }  // "preset" keeps the preset control (empty for non-rotation presets);
     // "synthesized" is resolved by the subcommand.
  if (!sc.impulse_controls.empty()) {
    if (static_cast<int>(sc.impulse_controls.size()) !=
        out.system.impulse_count())
      throw ConfigError("simulate.impulse_controls: count mismatch");
    out.simulate_impulse_controls = sc.impulse_controls;
  }
  if (static_cast<int>(out.simulate_impulse_controls.size()) !=
      out.system.impulse_count()) {
    out.simulate_impulse_controls.clear();
    for (const Matrix& d : out.system.impulse_inputs)
      out.simulate_impulse_controls.push_back(Vector::Zero(d.cols()));
  }
  for (int k = 0; k < out.system.impulse_count(); ++k)
    if (out.simulate_impulse_controls[k].size() !=
        out.system.impulse_inputs[k].cols())
      throw ConfigError("simulate.impulse_controls: dimension mismatch");
  return out;
}

namespace {

namespace fs = std::filesystem;

OuterOptions outer_options(const RunConfig& config) {
  OuterOptions opts;
  opts.outer_tol = config.synthesis.outer_tol;
  opts.max_outer = config.synthesis.max_outer;
  opts.damping = config.synthesis.damping;
  opts.picard.tol = config.synthesis.picard_tol;
  opts.picard.max_iter = config.synthesis.max_picard;
  opts.picard.damping = config.synthesis.damping;
  opts.paper_literal = config.synthesis.paper_literal_control;
  return opts;
}

std::vector<double> schedule_of(const RunConfig& config) {
  return config.synthesis.alpha_schedule.empty()
             ? default_alpha_schedule()
             : config.synthesis.alpha_schedule;
}

std::string out_path(const fs::path& dir, const std::string& name) {
  return (dir / name).string();
}

Trajectory simulate_trajectory(const BuildResult& build,
                               const RunConfig& config) {
  const PicardOptions popts{config.synthesis.picard_tol,
                            config.synthesis.max_picard,
                            config.synthesis.damping};
  if (config.simulate.control == "synthesized") {
    const GramianSet gramians = assemble_gramians(build.system, build.grid);
    const OuterOptions opts = outer_options(config);
    if (build.neutral) {
      return neutral_synthesize(*build.neutral, gramians, build.grid,
                                build.target, config.synthesis.alpha, opts)
          .trajectory;
    }
    return synthesize_semilinear(build.system, gramians, build.grid,
                                 build.target, config.synthesis.alpha, opts)
        .trajectory;
  }
  if (build.neutral) {
    return neutral_mild_solve(*build.neutral, build.simulate_control,
                              build.simulate_impulse_controls, build.grid,
                              popts)
        .trajectory;
  }
  if (build.system.nonlinearity.state_dependent()) {
    return mild_solve_semilinear(build.system, build.simulate_control,
                                 build.simulate_impulse_controls, build.grid,
                                 popts)
        .trajectory;
  }
  return mild_solve_linear(build.system, build.simulate_control,
                           build.simulate_impulse_controls, build.grid);
}

std::vector<double> control_sample_times(const Trajectory& traj) {
  std::vector<double> times;
  for (const Trajectory::Piece& piece : traj.pieces())
    for (double t : piece.times) times.push_back(t);
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

void run_figures(const RunConfig& config, const fs::path& dir) {
  const PicardOptions popts;
  struct Variant {
    const char* name;
    bool with_impulse;
    bool control_on;
  };
  const Variant variants[] = {
      {"fig_impulsive_u.csv", true, true},
      {"fig_nonimpulsive_u.csv", false, true},
      {"fig_impulsive_u0.csv", true, false},
      {"fig_nonimpulsive_u0.csv", false, false},
  };
  for (const Variant& variant : variants) {
    RotationExample rot =
        make_rotation_example(variant.with_impulse, variant.control_on);
    const QuadratureGrid grid = make_quadrature_grid(
        rot.system, config.quadrature.order, config.quadrature.panels);
    PicardResult solved =
        mild_solve_semilinear(rot.system, rot.prescribed_control,
                              rot.prescribed_impulse_controls, grid, popts);
    write_trajectory_csv(out_path(dir, variant.name), solved.trajectory);
    std::cout << "figures: wrote " << variant.name << "\n";
  }
}

}  // namespace

void run_command(const std::string& command, const RunConfig& config,
                 int jobs) {
  const fs::path dir(config.output.directory);
  fs::create_directories(dir);

  if (command == "figures") {
    run_figures(config, dir);
    return;
  }

  const BuildResult build = build_from_config(config);
  for (const std::string& warning : build.warnings)
    std::cerr << "warning: " << warning << "\n";

  if (command == "simulate") {
    const Trajectory traj = simulate_trajectory(build, config);
    write_trajectory_csv(out_path(dir, "trajectory.csv"), traj);
    std::cout << "simulate: wrote trajectory.csv ("
              << traj.piece_count() << " pieces)\n";
    return;
  }

  const GramianSet gramians = assemble_gramians(build.system, build.grid);

  if (command == "gramian") {
    write_matrix_csv(out_path(dir, "gramian_terminal_input.csv"),
                     gramians.terminal_input);
    write_matrix_csv(out_path(dir, "gramian_terminal_impulse.csv"),
                     gramians.terminal_impulse);
    write_matrix_csv(out_path(dir, "gramian_interior_input.csv"),
                     gramians.interior_input);
    write_matrix_csv(out_path(dir, "gramian_interior_impulse.csv"),
                     gramians.interior_impulse);
    write_matrix_csv(out_path(dir, "gramian_total.csv"), gramians.total);
    write_vector_csv(out_path(dir, "gramian_eigenvalues.csv"), "eigenvalue",
                     gramians.eigenvalues(gramians.total));
    std::vector<Vector> probes;
    for (int i = 0; i < build.system.dimension(); ++i)
      probes.push_back(Vector::Unit(build.system.dimension(), i));
    const DecayTable table = resolvent_decay_table(
        gramians, build.system.model, schedule_of(config), probes);
    write_decay_csv(out_path(dir, "resolvent_decay.csv"), table);
    std::cout << "gramian: min eigenvalue "
              << format_double(gramians.min_eigenvalue()) << ", decay "
              << (table.satisfied ? "satisfied" : "violated") << "\n";
    return;
  }

  if (command == "synthesize") {
    const OuterOptions opts = outer_options(config);
    SynthesisResult result;
    if (build.neutral) {
      result = neutral_synthesize(*build.neutral, gramians, build.grid,
                                  build.target, config.synthesis.alpha, opts);
    } else {
      result = synthesize_semilinear(build.system, gramians, build.grid,
                                     build.target, config.synthesis.alpha,
                                     opts);
    }
    write_control_csv(out_path(dir, "control_u.csv"), result.law,
                      control_sample_times(result.trajectory));
    write_impulse_controls_csv(out_path(dir, "control_v.csv"), result.law);
    write_vector_csv(out_path(dir, "phi.csv"), "phi", result.law.phi);
    write_trajectory_csv(out_path(dir, "closed_loop.csv"), result.trajectory);
    std::cout << "synthesize: terminal defect "
              << format_double(build.system.model.norm(
                     result.trajectory.terminal() - build.target))
              << " after " << result.outer_iterations << " outer iterations\n";
    return;
  }

  if (command == "verify") {
    if (build.neutral)
      throw ConfigError("verify: defined for the non-neutral pipeline");
    if (build.system.nonlinearity.state_dependent())
      throw ConfigError(
          "verify: nonlinearity must be none or tabulated (known forcing)");
    ForcingFn kappa;
    if (build.system.nonlinearity.kind == Nonlinearity::Kind::tabulated)
      kappa = build.system.nonlinearity.forcing;
    std::vector<VerifyReport> reports;
    const std::vector<double> alphas = config.synthesis.alpha_schedule.empty()
                                           ? std::vector<double>{
                                                 config.synthesis.alpha}
                                           : config.synthesis.alpha_schedule;
    for (double alpha : alphas) {
      reports.push_back(verify_terminal_identity(
          build.system, gramians, build.grid, kappa, build.target, alpha,
          config.synthesis.paper_literal_control));
      std::cout << "verify: alpha " << format_double(alpha) << " residual "
                << format_double(reports.back().residual_rel)
                << " (relative)\n";
    }
    write_verify_csv(out_path(dir, "verify.csv"), reports);
    return;
  }

  if (command == "sweep") {
    const OuterOptions opts = outer_options(config);
    SweepResult sweep;
    if (build.neutral) {
      sweep = alpha_sweep(*build.neutral, gramians, build.grid, build.target,
                          schedule_of(config), opts);
    } else {
      const SweepMode mode = config.synthesis.mode == "semilinear"
                                 ? SweepMode::semilinear
                                 : SweepMode::linear;
      sweep = alpha_sweep(build.system, gramians, build.grid, build.target,
                          schedule_of(config), mode, opts, jobs);
    }
    write_sweep_csv(out_path(dir, "sweep.csv"), sweep);
    std::cout << "sweep: " << sweep.rows.size() << " rows";
    if (sweep.kernel_plateau > 1e-12)
      std::cout << ", kernel plateau " << format_double(sweep.kernel_plateau);
    std::cout << "\n";
    return;
  }

  throw ConfigError("unknown subcommand '" + command + "'");
}

}  // namespace ictrl
