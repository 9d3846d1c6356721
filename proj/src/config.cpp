#include "ictrl/config.hpp"

#include <fstream>
#include <set>

#include "json.hpp"

namespace ictrl {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!j.is_object())
    throw ConfigError(where + ": expected an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key()))
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return j.get<int>();
}

bool as_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) throw ConfigError(where + ": expected a boolean");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": expected a string");
  return j.get<std::string>();
}

std::vector<double> as_double_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(as_number(v, where));
  return out;
}

Vector as_vector(const json& j, const std::string& where) {
  const std::vector<double> xs = as_double_list(j, where);
  return Eigen::Map<const Vector>(xs.data(),
                                  static_cast<Eigen::Index>(xs.size()));
}

Matrix as_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw ConfigError(where + ": expected a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) rows.push_back(as_double_list(r, where));
  const std::size_t cols = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != cols)
      throw ConfigError(where + ": ragged matrix rows");
  Matrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = rows[i][c];
  return m;
}

std::vector<Matrix> as_matrix_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  std::vector<Matrix> out;
  for (const auto& m : j) out.push_back(as_matrix(m, where));
  return out;
}

std::vector<Vector> as_vector_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  std::vector<Vector> out;
  for (const auto& v : j) out.push_back(as_vector(v, where));
  return out;
}

void parse_model(const json& j, ModelConfig& out) {
  check_keys(j, "model",
             {"preset", "modes", "horizon", "gammas", "input", "with_impulse",
              "generator", "input_map", "initial_state"});
  if (!j.contains("preset"))
    throw ConfigError("model: 'preset' is required");
  out.preset = as_string(j.at("preset"), "model.preset");
  static const std::set<std::string> presets = {
      "rotation-example", "heat-dirichlet", "heat-neumann", "wave", "custom"};
  if (!presets.count(out.preset))
    throw ConfigError("model.preset: unknown preset '" + out.preset + "'");
  if (j.contains("modes")) out.modes = as_int(j.at("modes"), "model.modes");
  if (j.contains("horizon"))
    out.horizon = as_number(j.at("horizon"), "model.horizon");
  if (j.contains("gammas"))
    out.gammas = as_double_list(j.at("gammas"), "model.gammas");
  if (j.contains("input")) {
    out.input = as_string(j.at("input"), "model.input");
    if (out.input != "shifted" && out.input != "identity")
      throw ConfigError("model.input: expected 'shifted' or 'identity'");
  }
  if (j.contains("with_impulse"))
    out.with_impulse = as_bool(j.at("with_impulse"), "model.with_impulse");
  if (j.contains("generator"))
    out.generator = as_matrix(j.at("generator"), "model.generator");
  if (j.contains("input_map"))
    out.input_map = as_matrix(j.at("input_map"), "model.input_map");
  if (j.contains("initial_state"))
    out.initial_state = as_vector(j.at("initial_state"), "model.initial_state");
  if (out.preset == "custom") {
    if (out.generator.size() == 0 || out.input_map.size() == 0 ||
        out.initial_state.size() == 0 || !out.horizon.has_value())
      throw ConfigError(
          "model: custom preset requires generator, input_map, initial_state "
          "and horizon");
  }
}

void parse_impulses(const json& j, ImpulseConfig& out) {
  check_keys(j, "impulses", {"times", "jump_maps", "input_maps"});
  out.present = true;
  if (j.contains("times"))
    out.times = as_double_list(j.at("times"), "impulses.times");
  if (j.contains("jump_maps"))
    out.jump_maps = as_matrix_list(j.at("jump_maps"), "impulses.jump_maps");
  if (j.contains("input_maps"))
    out.input_maps = as_matrix_list(j.at("input_maps"), "impulses.input_maps");
  if (!out.jump_maps.empty() && out.jump_maps.size() != out.times.size())
    throw ConfigError("impulses: jump_maps count must match times");
  if (!out.input_maps.empty() && out.input_maps.size() != out.times.size())
    throw ConfigError("impulses: input_maps count must match times");
}

void parse_nonlinearity(const json& j, NonlinearityConfig& out) {
  check_keys(j, "nonlinearity", {"kind", "coefficient", "times", "values"});
  if (j.contains("kind")) {
    out.kind = as_string(j.at("kind"), "nonlinearity.kind");
    static const std::set<std::string> kinds = {"none", "quadratic",
                                                "bounded-sin", "tabulated"};
    if (!kinds.count(out.kind))
      throw ConfigError("nonlinearity.kind: unknown kind '" + out.kind + "'");
  }
  if (j.contains("coefficient"))
    out.coefficient = as_number(j.at("coefficient"), "nonlinearity.coefficient");
  if (j.contains("times"))
    out.times = as_double_list(j.at("times"), "nonlinearity.times");
  if (j.contains("values"))
    out.values = as_vector_list(j.at("values"), "nonlinearity.values");
  if (out.kind == "tabulated") {
    if (out.times.size() < 2 || out.times.size() != out.values.size())
      throw ConfigError(
          "nonlinearity: tabulated kind needs matching times and values "
          "(at least two samples)");
    for (std::size_t i = 0; i + 1 < out.times.size(); ++i)
      if (!(out.times[i] < out.times[i + 1]))
        throw ConfigError("nonlinearity.times: must be strictly increasing");
  }
}

void parse_neutral(const json& j, NeutralConfig& out) {
  check_keys(j, "neutral",
             {"kind", "coefficient", "delay", "history_samples", "convention",
              "history_value", "sigma_times", "sigma_values"});
  if (j.contains("kind")) {
    out.kind = as_string(j.at("kind"), "neutral.kind");
    static const std::set<std::string> kinds = {"zero", "bounded-demo",
                                                "tabulated"};
    if (!kinds.count(out.kind))
      throw ConfigError("neutral.kind: unknown kind '" + out.kind + "'");
  }
  if (j.contains("coefficient"))
    out.coefficient = as_number(j.at("coefficient"), "neutral.coefficient");
  if (j.contains("delay")) out.delay = as_number(j.at("delay"), "neutral.delay");
  if (j.contains("history_samples"))
    out.history_samples = as_int(j.at("history_samples"),
                                 "neutral.history_samples");
  if (j.contains("convention")) {
    out.convention = as_string(j.at("convention"), "neutral.convention");
    if (out.convention != "paper" && out.convention != "standard")
      throw ConfigError("neutral.convention: expected 'paper' or 'standard'");
  }
  if (j.contains("history_value"))
    out.history_value = as_vector(j.at("history_value"),
                                  "neutral.history_value");
  if (j.contains("sigma_times"))
    out.sigma_times = as_double_list(j.at("sigma_times"),
                                     "neutral.sigma_times");
  if (j.contains("sigma_values"))
    out.sigma_values = as_vector_list(j.at("sigma_values"),
                                      "neutral.sigma_values");
  if (out.kind != "zero" && !(out.delay > 0.0))
    throw ConfigError("neutral: a positive delay is required");
  if (out.kind == "tabulated" &&
      (out.sigma_times.size() < 2 ||
       out.sigma_times.size() != out.sigma_values.size()))
    throw ConfigError(
        "neutral: tabulated kind needs matching sigma_times and sigma_values");
}

void parse_synthesis(const json& j, SynthesisConfig& out) {
  check_keys(j, "synthesis",
             {"target", "alpha", "alpha_schedule", "mode", "outer_tol",
              "max_outer", "picard_tol", "max_picard", "damping",
              "paper_literal_control"});
  if (j.contains("target"))
    out.target = as_vector(j.at("target"), "synthesis.target");
  if (j.contains("alpha"))
    out.alpha = as_number(j.at("alpha"), "synthesis.alpha");
  if (j.contains("alpha_schedule"))
    out.alpha_schedule = as_double_list(j.at("alpha_schedule"),
                                        "synthesis.alpha_schedule");
  if (j.contains("mode")) {
    out.mode = as_string(j.at("mode"), "synthesis.mode");
    if (out.mode != "linear" && out.mode != "semilinear")
      throw ConfigError("synthesis.mode: expected 'linear' or 'semilinear'");
  }
  if (j.contains("outer_tol"))
    out.outer_tol = as_number(j.at("outer_tol"), "synthesis.outer_tol");
  if (j.contains("max_outer"))
    out.max_outer = as_int(j.at("max_outer"), "synthesis.max_outer");
  if (j.contains("picard_tol"))
    out.picard_tol = as_number(j.at("picard_tol"), "synthesis.picard_tol");
  if (j.contains("max_picard"))
    out.max_picard = as_int(j.at("max_picard"), "synthesis.max_picard");
  if (j.contains("damping")) {
    out.damping = as_number(j.at("damping"), "synthesis.damping");
    if (!(out.damping >= 0.1 && out.damping <= 1.0))
      throw ConfigError("synthesis.damping: expected a value in [0.1, 1]");
  }
  if (j.contains("paper_literal_control"))
    out.paper_literal_control = as_bool(j.at("paper_literal_control"),
                                        "synthesis.paper_literal_control");
  if (!(out.alpha > 0.0))
    throw ConfigError("synthesis.alpha: must be positive");
}

void parse_quadrature(const json& j, QuadratureConfig& out) {
  check_keys(j, "quadrature", {"order", "panels"});
  if (j.contains("order")) out.order = as_int(j.at("order"), "quadrature.order");
  if (j.contains("panels"))
    out.panels = as_int(j.at("panels"), "quadrature.panels");
  if (out.order < 2 || out.order > 32)
    throw ConfigError("quadrature.order: expected a value in [2, 32]");
  if (out.panels < 1 || out.panels > 4096)
    throw ConfigError("quadrature.panels: expected a value in [1, 4096]");
}

void parse_simulate(const json& j, SimulateConfig& out) {
  check_keys(j, "simulate", {"control", "control_value", "impulse_controls"});
  if (j.contains("control")) {
    out.control = as_string(j.at("control"), "simulate.control");
    static const std::set<std::string> kinds = {"preset", "zero", "constant",
                                                "synthesized"};
    if (!kinds.count(out.control))
      throw ConfigError("simulate.control: unknown kind '" + out.control + "'");
  }
  if (j.contains("control_value"))
    out.control_value = as_vector(j.at("control_value"),
                                  "simulate.control_value");
  if (j.contains("impulse_controls"))
    out.impulse_controls = as_vector_list(j.at("impulse_controls"),
                                          "simulate.impulse_controls");
  if (out.control == "constant" && out.control_value.size() == 0)
    throw ConfigError("simulate: constant control needs control_value");
}

void parse_output(const json& j, OutputConfig& out) {
  check_keys(j, "output", {"directory"});
  if (j.contains("directory"))
    out.directory = as_string(j.at("directory"), "output.directory");
}

RunConfig parse_root(const json& j) {
  check_keys(j, "config",
             {"model", "impulses", "nonlinearity", "neutral", "synthesis",
              "quadrature", "simulate", "output"});
  if (!j.contains("model")) throw ConfigError("config: 'model' is required");
  RunConfig cfg;
  parse_model(j.at("model"), cfg.model);
  if (j.contains("impulses")) parse_impulses(j.at("impulses"), cfg.impulses);
  if (j.contains("nonlinearity"))
    parse_nonlinearity(j.at("nonlinearity"), cfg.nonlinearity);
  if (j.contains("neutral")) parse_neutral(j.at("neutral"), cfg.neutral);
  if (j.contains("synthesis")) parse_synthesis(j.at("synthesis"), cfg.synthesis);
  if (j.contains("quadrature"))
    parse_quadrature(j.at("quadrature"), cfg.quadrature);
  if (j.contains("simulate")) parse_simulate(j.at("simulate"), cfg.simulate);
  if (j.contains("output")) parse_output(j.at("output"), cfg.output);
  return cfg;
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  return parse_root(j);
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_text(text);
}

}  // namespace ictrl
