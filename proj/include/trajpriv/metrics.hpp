#pragma once

#include <string>
#include <vector>

#include "trajpriv/grid.hpp"

namespace trajpriv {

/// Euclidean distance in meters between cell centers on a grid of side `g`.
inline double ed(Cell a, Cell b, double g) { return cell_distance_m(a, b, g); }

/// Per-step distances of an aligned pair. Throws MismatchError on differing
/// lengths or timestamps.
std::vector<double> step_errors(const TrajectoryTrue& truth, const TrajectoryTrue& pred, double g);

double aed(const TrajectoryTrue& truth, const TrajectoryTrue& pred, double g);

struct TrajectoryScore {
  std::string id;
  std::size_t length = 0;
  double aed_m = 0;
  double max_ed_m = 0;
  std::vector<double> step_ed_m;
};

struct EvalReport {
  std::vector<TrajectoryScore> trajectories;  // in truth order
  double a2ed_m = 0;
  double amed_m = 0;
};

/// Pairs predictions with truths by id. Throws MismatchError when an id is
/// missing on either side or a pair is misaligned.
EvalReport evaluate(const std::vector<TrajectoryTrue>& truths,
                    const std::vector<TrajectoryTrue>& preds, double g);

double a2ed(const std::vector<TrajectoryTrue>& truths, const std::vector<TrajectoryTrue>& preds,
            double g);
double amed(const std::vector<TrajectoryTrue>& truths, const std::vector<TrajectoryTrue>& preds,
            double g);

}  // namespace trajpriv
