#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ictrl/config.hpp"
#include "ictrl/csv.hpp"
#include "ictrl/runner.hpp"

namespace {

// Exit codes: 0 ok, 2 config/schema violation, 3 numerical failure,
// 4 non-convergence (with an iterate history file).
constexpr int kExitSchema = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNonConvergence = 4;

void write_gap_history(const std::string& dir,
                       const ictrl::NonConvergenceError& e) {
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / "nonconvergence_history.csv",
                    std::ios::binary);
  out << "iteration,gap\n";
  for (std::size_t i = 0; i < e.gap_history.size(); ++i)
    out << (i + 1) << ',' << ictrl::format_double(e.gap_history[i]) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ictrl - impulsive evolution systems: simulation, controllability "
      "Gramians and regularized control synthesis"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  std::string model_preset;
  std::string neutral_convention;
  double alpha = 0.0;
  bool alpha_set = false;
  bool paper_literal = false;
  int jobs = 1;

  app.add_option("--config", config_path, "configuration file (JSON)");
  app.add_option("--output", output_dir, "output directory override");
  app.add_option("--alpha", alpha, "regularization parameter override")
      ->each([&](const std::string&) { alpha_set = true; });
  app.add_option("--model", model_preset, "model preset override");
  app.add_option("--jobs", jobs, "parallel sweep rows")
      ->check(CLI::Range(1, 256));
  app.add_flag("--paper-literal-control", paper_literal,
               "use the literal published control law (for comparison)");
  app.add_option("--neutral-convention", neutral_convention,
                 "correction-term convention: paper | standard")
      ->check(CLI::IsMember({"paper", "standard"}));

  for (const char* name :
       {"simulate", "gramian", "synthesize", "verify", "sweep", "figures"}) {
    app.add_subcommand(name);
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  std::string history_dir = "out";
  try {
    ictrl::RunConfig config;
    if (!config_path.empty()) {
      config = ictrl::RunConfig::from_file(config_path);
    } else if (command == "figures") {
      config.model.preset = "rotation-example";
    } else {
      std::cerr << "error: --config is required for '" << command << "'\n";
      return kExitSchema;
    }
    if (!output_dir.empty()) config.output.directory = output_dir;
    if (!model_preset.empty()) config.model.preset = model_preset;
    if (alpha_set) {
      config.synthesis.alpha = alpha;
      config.synthesis.alpha_schedule.clear();
      config.synthesis.alpha_schedule.push_back(alpha);
    }
    if (paper_literal) config.synthesis.paper_literal_control = true;
    if (!neutral_convention.empty())
      config.neutral.convention = neutral_convention;
    history_dir = config.output.directory;

    ictrl::run_command(command, config, jobs);
    return 0;
  } catch (const ictrl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const ictrl::NonConvergenceError& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    write_gap_history(history_dir, e);
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}
