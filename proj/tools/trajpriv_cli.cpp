// Command-line front end: ingest -> publish -> attack -> evaluate, plus sweeps.
//
// Exit codes: 0 ok, 1 other error, 2 missing input, 3 privacy violation,
// 4 gamma too small for the published regions, 5 truth/prediction id mismatch.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trajpriv/errors.hpp"
#include "trajpriv/experiment.hpp"
#include "trajpriv/io.hpp"

namespace fs = std::filesystem;
using namespace trajpriv;

int main(int argc, char** argv) {
  CLI::App app{"Trajectory privacy: region publishing and HMM-RL sequential attacks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> inputs;
  std::vector<std::string> methods;

  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Experiment config (JSON)")->required();
    cmd->add_option("--out", out_dir, "Output directory (defaults to the config's output_dir)");
    cmd->add_option("--seed", seed, "Override every base seed in the config");
  };

  auto* ingest = app.add_subcommand("ingest", "Parse and discretize a dataset, or generate a synthetic one");
  common(ingest);
  ingest->add_option("inputs", inputs, "PLT files/directories (geolife) or CSV files (porto)");

  auto* publish = app.add_subcommand("publish", "Generate privacy-bounded published regions");
  common(publish);

  auto* attack = app.add_subcommand("attack", "Infer true locations from published regions");
  common(attack);
  attack->add_option("--method", methods, "hmm-rl or baseline")->required()->expected(1);

  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against the true trajectories");
  common(evaluate);
  evaluate->add_option("--method", methods, "Methods to evaluate (defaults to the config's list)");

  auto* sweep = app.add_subcommand("sweep", "Run publish/attack/evaluate over the config's sweep axes");
  common(sweep);
  sweep->add_option("inputs", inputs, "Dataset inputs for real datasets");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = ExperimentConfig::load(config_path);
    if (seed) {
      cfg.publish.seed = *seed;
      cfg.attack.seed = *seed;
      cfg.synth.seed = *seed;
    }
    const fs::path out = out_dir.empty() ? cfg.output_dir : fs::path(out_dir);
    const std::vector<fs::path> input_paths(inputs.begin(), inputs.end());
    std::vector<Method> selected;
    for (const auto& m : methods) selected.push_back(method_from_string(m));
    if (selected.empty()) selected = cfg.methods;

    if (ingest->parsed()) {
      cmd_ingest(cfg, out, input_paths);
    } else if (publish->parsed()) {
      cmd_publish(cfg, out);
    } else if (attack->parsed()) {
      cmd_attack(cfg, out, selected.front());
    } else if (evaluate->parsed()) {
      cmd_evaluate(cfg, out, selected);
    } else if (sweep->parsed()) {
      if (cfg.sweep.empty()) throw ConfigError("the config has no sweep axes");
      cmd_sweep(cfg, out, input_paths);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return 0;
}
