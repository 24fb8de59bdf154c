#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "trajpriv/attack.hpp"
#include "trajpriv/grid.hpp"
#include "trajpriv/metrics.hpp"
#include "trajpriv/state_space.hpp"

namespace trajpriv {

/// A required input file or directory does not exist or cannot be read.
class MissingInputError : public Error {
 public:
  using Error::Error;
};

// JSONL interchange. True trajectories:
//   {"id": str, "points": [[t, row, col], ...]}
// Published trajectories:
//   {"id": str, "regions": [[t, row0, col0, h, w], ...]}

void write_trajectories_jsonl(std::ostream& os, const std::vector<TrajectoryTrue>& trajs);
std::vector<TrajectoryTrue> read_trajectories_jsonl(std::istream& is);

void write_published_jsonl(std::ostream& os, const std::vector<PublishedTrajectory>& pubs);
std::vector<PublishedTrajectory> read_published_jsonl(std::istream& is);

nlohmann::json grid_to_json(const GridSpace& gs);
GridSpace grid_from_json(const nlohmann::json& j);

/// State list, symbol list and dense row-major matrices.
nlohmann::json model_to_json(const AttackModel& model);
AttackModel model_from_json(const nlohmann::json& j);

/// Header `id,T,AED_m,maxED_m`, one row per trajectory, then a `__all__` row
/// holding the total step count, A2ED and AMED.
void write_eval_csv(std::ostream& os, const EvalReport& report);
nlohmann::json eval_to_json(const EvalReport& report);

/// `pass,direction,total_log_likelihood,mean_reward,fraction_rewarded`
void write_diagnostics_csv(std::ostream& os, const std::vector<PassDiagnostics>& diags);

/// Fixed-precision decimal used in every CSV this library writes.
std::string format_number(double x);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& contents);

std::vector<TrajectoryTrue> load_trajectories(const std::filesystem::path& path);
std::vector<PublishedTrajectory> load_published(const std::filesystem::path& path);
GridSpace load_grid(const std::filesystem::path& path);

}  // namespace trajpriv
