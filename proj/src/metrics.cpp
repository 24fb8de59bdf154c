#include "trajpriv/metrics.hpp"

#include <algorithm>
#include <unordered_map>

#include "trajpriv/errors.hpp"

namespace trajpriv {

std::vector<double> step_errors(const TrajectoryTrue& truth, const TrajectoryTrue& pred, double g) {
  if (truth.points.size() != pred.points.size()) {
    throw MismatchError("trajectory '" + truth.id + "': truth has " +
                        std::to_string(truth.points.size()) + " steps, prediction has " +
                        std::to_string(pred.points.size()));
  }
  std::vector<double> out;
  out.reserve(truth.points.size());
  for (std::size_t i = 0; i < truth.points.size(); ++i) {
    if (truth.points[i].t != pred.points[i].t) {
      throw MismatchError("trajectory '" + truth.id + "': timestamps differ at step " +
                          std::to_string(i));
    }
    out.push_back(ed(truth.points[i].cell, pred.points[i].cell, g));
  }
  return out;
}

double aed(const TrajectoryTrue& truth, const TrajectoryTrue& pred, double g) {
  const auto errs = step_errors(truth, pred, g);
  if (errs.empty()) throw MismatchError("trajectory '" + truth.id + "' is empty");
  double s = 0;
  for (double e : errs) s += e;
  return s / static_cast<double>(errs.size());
}

EvalReport evaluate(const std::vector<TrajectoryTrue>& truths,
                    const std::vector<TrajectoryTrue>& preds, double g) {
  if (truths.empty()) throw MismatchError("no trajectories to evaluate");
  if (truths.size() != preds.size()) {
    throw MismatchError(std::to_string(truths.size()) + " truths but " +
                        std::to_string(preds.size()) + " predictions");
  }
  std::unordered_map<std::string, const TrajectoryTrue*> by_id;
  for (const auto& p : preds) {
    if (!by_id.emplace(p.id, &p).second) throw MismatchError("duplicate prediction id '" + p.id + "'");
  }

  EvalReport report;
  for (const auto& truth : truths) {
    auto it = by_id.find(truth.id);
    if (it == by_id.end()) throw MismatchError("no prediction for trajectory '" + truth.id + "'");
    TrajectoryScore score;
    score.id = truth.id;
    score.step_ed_m = step_errors(truth, *it->second, g);
    score.length = score.step_ed_m.size();
    if (score.length == 0) throw MismatchError("trajectory '" + truth.id + "' is empty");
    double s = 0;
    for (double e : score.step_ed_m) s += e;
    score.aed_m = s / static_cast<double>(score.length);
    score.max_ed_m = *std::max_element(score.step_ed_m.begin(), score.step_ed_m.end());
    report.a2ed_m += score.aed_m;
    report.amed_m += score.max_ed_m;
    report.trajectories.push_back(std::move(score));
  }
  report.a2ed_m /= static_cast<double>(truths.size());
  report.amed_m /= static_cast<double>(truths.size());
  return report;
}

double a2ed(const std::vector<TrajectoryTrue>& truths, const std::vector<TrajectoryTrue>& preds,
            double g) {
  return evaluate(truths, preds, g).a2ed_m;
}

double amed(const std::vector<TrajectoryTrue>& truths, const std::vector<TrajectoryTrue>& preds,
            double g) {
  return evaluate(truths, preds, g).amed_m;
}

}  // namespace trajpriv
