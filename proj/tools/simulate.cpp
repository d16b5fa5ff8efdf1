#include <iostream>

#include <CLI11.hpp>

#include "covfluid/config.hpp"
#include "covfluid/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Voronoi particle fluid simulator"};
  std::string config_path, scene, mode, out;
  int steps = -1;
  bool dump = false;
  app.add_option("--config", config_path, "Config file (key = value)")->required();
  app.add_option("--scene", scene, "Override the scene id");
  app.add_option("--mode", mode, "base, boundary or baseline")->check(CLI::IsMember({"base", "boundary", "baseline"}));
  app.add_option("--steps", steps, "Override the step count")->check(CLI::NonNegativeNumber);
  app.add_option("--out", out, "Override the output directory");
  app.add_flag("--dump-voronoi", dump, "Write cell polygons with each frame");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : covfluid::kExitConfig;
  }

  covfluid::ConfigOverrides overrides;
  if (!scene.empty()) overrides.emplace_back("scene", scene);
  if (!mode.empty()) overrides.emplace_back("mode", mode);
  if (steps >= 0) overrides.emplace_back("steps", std::to_string(steps));
  if (!out.empty()) overrides.emplace_back("output_dir", out);
  if (dump) overrides.emplace_back("dump_voronoi", "true");

  covfluid::SceneConfig cfg;
  try {
    cfg = covfluid::parse_config(config_path, overrides);
  } catch (const covfluid::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return e.kind() == covfluid::ConfigError::Kind::Io ? covfluid::kExitIo : covfluid::kExitConfig;
  }
  return covfluid::run(cfg, std::cerr);
}
