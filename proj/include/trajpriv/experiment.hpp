#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trajpriv/attack.hpp"
#include "trajpriv/ingest.hpp"
#include "trajpriv/metrics.hpp"
#include "trajpriv/publisher.hpp"

namespace trajpriv {

enum class Dataset { kGeolife, kPorto, kSynth };
enum class Method { kHmmRl, kBaseline };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct SweepAxes {
  std::vector<double> lambda;
  std::vector<int> deviation;
  std::vector<int> gamma;
  std::vector<int> k;
  std::vector<double> delta;

  bool empty() const {
    return lambda.empty() && deviation.empty() && gamma.empty() && k.empty() && delta.empty();
  }
};

/// Everything a run needs; parsed from a JSON file with `schema_version` 1.
struct ExperimentConfig {
  static constexpr int kSchemaVersion = 1;

  Dataset dataset = Dataset::kSynth;
  // Bounding box and cell size for real datasets.
  double lon_min = 0, lon_max = 0, lat_min = 0, lat_max = 0, cell_size_m = 100;
  PreprocessConfig preprocess;
  SynthConfig synth;
  PublishConfig publish;
  AttackConfig attack;
  /// Unset means: the smallest slack that admits every published region.
  std::optional<int> gamma;
  std::vector<Method> methods = {Method::kBaseline, Method::kHmmRl};
  SweepAxes sweep;
  std::filesystem::path output_dir = "out";

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::filesystem::path& path);
};

/// The knobs that vary across sweep points.
struct SweepPoint {
  double lambda = 0.1;
  int deviation = 0;
  std::optional<int> gamma;
  int k = 3;
  double delta = 0.7;

  std::string label() const;
};

SweepPoint base_point(const ExperimentConfig& cfg);

/// Publisher and attacker seeds are hashed from the configured seeds and the
/// point's values, so every point draws independent but reproducible streams.
PublishConfig publish_config_for(const ExperimentConfig& cfg, const SweepPoint& pt);
AttackConfig attack_config_for(const ExperimentConfig& cfg, const SweepPoint& pt,
                               const std::vector<PublishedTrajectory>& pubs);

/// Publishes every trajectory and checks the privacy bound; throws PrivacyViolation.
std::vector<PublishedTrajectory> publish_corpus(const std::vector<TrajectoryTrue>& trajs,
                                                const PublishConfig& cfg, const GridSpace& gs);

struct MethodRun {
  std::vector<TrajectoryTrue> predictions;
  std::vector<PassDiagnostics> diagnostics;  // empty for the baseline
  std::optional<AttackModel> model;
  double seconds = 0;
};

MethodRun run_method(Method method, const std::vector<PublishedTrajectory>& pubs,
                     const GridSpace& gs, const AttackConfig& cfg);

/// Result of the ingest stage, before anything is written.
struct Corpus {
  std::vector<TrajectoryTrue> trajectories;
  GridSpace grid;
  nlohmann::json report;
};

Corpus build_corpus(const ExperimentConfig& cfg, const std::vector<std::filesystem::path>& inputs);

// CLI stages. Each reads its inputs from and writes its outputs to `out`.
// Errors propagate as exceptions; see exit_code_for.

void cmd_ingest(const ExperimentConfig& cfg, const std::filesystem::path& out,
                const std::vector<std::filesystem::path>& inputs);
void cmd_publish(const ExperimentConfig& cfg, const std::filesystem::path& out);
void cmd_attack(const ExperimentConfig& cfg, const std::filesystem::path& out, Method method);
void cmd_evaluate(const ExperimentConfig& cfg, const std::filesystem::path& out,
                  const std::vector<Method>& methods);
void cmd_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out,
               const std::vector<std::filesystem::path>& inputs);

/// 2 missing input, 3 privacy violation, 4 gamma too small, 5 id mismatch, 1 anything else.
int exit_code_for(const std::exception& e);

}  // namespace trajpriv
