// stefan-track: plan, simulate and check tracking scenarios for the one-phase Stefan problem.
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stefan_track/config.hpp"
#include "stefan_track/scenario.hpp"

namespace st = stefan_track;

int main(int argc, char** argv) {
  CLI::App app{"Series-planned energy-shaping control for the one-phase Stefan problem"};
  app.set_version_flag("--version", std::string("stefan-track ") + st::kVersion);

  std::string mode_arg;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
  bool field = false;
  bool echo = false;

  app.add_option("mode", mode_arg, "plan | simulate-closedloop | simulate-feedforward | check-safety | verify")
      ->required();
  app.add_option("--config", config_path, "scenario file; omitted means built-in defaults");
  app.add_option("--set", overrides, "override a setting, e.g. --set controller.c=0.004")->take_all();
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--field", field, "also write field.csv (temperature field, at most 200 x 200)");
  app.add_flag("--echo", echo, "print the effective configuration before running");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? st::kExitOk : st::kExitUsage;
  }

  st::ScenarioConfig cfg;
  try {
    const auto mode = st::parse_mode(mode_arg);
    if (!mode) throw st::ConfigError("unknown mode '" + mode_arg + "'");
    if (!config_path.empty()) cfg = st::parse_config(config_path);
    for (const auto& o : overrides) st::apply_override(cfg, o);
    cfg.mode = *mode;
    if (field) cfg.field_dump = true;
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "stefan-track: " << e.what() << '\n';
    return st::kExitUsage;
  }

  if (echo) std::cout << st::canonical_echo(cfg);
  try {
    return st::run_mode(cfg, out_dir, std::cout);
  } catch (const st::ConfigError& e) {
    std::cerr << "stefan-track: " << e.what() << '\n';
    return st::kExitUsage;
  } catch (const st::ParameterError& e) {
    std::cerr << "stefan-track: " << e.what() << '\n';
    return st::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "stefan-track: " << e.what() << '\n';
    return st::kExitNumerical;
  }
}
