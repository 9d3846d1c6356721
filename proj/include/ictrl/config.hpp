#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ictrl/types.hpp"

namespace ictrl {

/// Configuration file defect (unknown key, bad type, missing field).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelConfig {
  std::string preset;  // rotation-example | heat-dirichlet | heat-neumann |
                       // wave | custom
  int modes = 8;
  std::optional<double> horizon;
  std::vector<double> gammas;     // wave; defaults to all ones
  std::string input = "shifted";  // heat: shifted | identity
  bool with_impulse = true;       // rotation preset
  Matrix generator;               // custom
  Matrix input_map;               // custom
  Vector initial_state;           // optional override
};

struct ImpulseConfig {
  bool present = false;
  std::vector<double> times;
  std::vector<Matrix> jump_maps;    // optional (preset defaults)
  std::vector<Matrix> input_maps;   // optional (preset defaults)
};

struct NonlinearityConfig {
  std::string kind = "none";  // none | quadratic | bounded-sin | tabulated
  double coefficient = 0.0;
  std::vector<double> times;
  std::vector<Vector> values;
};

struct NeutralConfig {
  std::string kind = "zero";  // zero | bounded-demo | tabulated
  double coefficient = 0.0;
  double delay = 0.0;
  int history_samples = 64;
  std::string convention = "paper";  // paper | standard
  Vector history_value;              // constant history; default x(0)
  std::vector<double> sigma_times;   // tabulated sigma
  std::vector<Vector> sigma_values;
};

struct SynthesisConfig {
  Vector target;  // defaults per preset
  double alpha = 1e-3;
  std::vector<double> alpha_schedule;  // defaults to the standard schedule
  std::string mode = "linear";         // linear | semilinear
  double outer_tol = 1e-9;
  int max_outer = 50;
  double picard_tol = 1e-10;
  int max_picard = 200;
  double damping = 1.0;
  bool paper_literal_control = false;
};

struct QuadratureConfig {
  int order = 8;
  int panels = 16;
};

struct SimulateConfig {
  std::string control = "preset";  // preset | zero | constant | synthesized
  Vector control_value;
  std::vector<Vector> impulse_controls;  // defaults per preset
};

struct OutputConfig {
  std::string directory = "out";
};

struct RunConfig {
  ModelConfig model;
  ImpulseConfig impulses;
  NonlinearityConfig nonlinearity;
  NeutralConfig neutral;
  SynthesisConfig synthesis;
  QuadratureConfig quadrature;
  SimulateConfig simulate;
  OutputConfig output;

  static RunConfig from_file(const std::string& path);
  static RunConfig from_json_text(const std::string& text);
};

}  // namespace ictrl
