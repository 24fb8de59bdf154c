#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "trajpriv/grid.hpp"
#include "trajpriv/hmm.hpp"
#include "trajpriv/state_space.hpp"
#include "trajpriv/t2p.hpp"

namespace trajpriv {

struct AttackConfig {
  double lambda = 0.1;
  int gamma = 5;        // slack over ell for candidate region areas
  double delta = 0.7;   // reward threshold; values above 1 disable rewards entirely
  int k = 3;            // sliding-window size
  int passes = 50;
  double alpha = 0.1;   // multiplicative reward/penalty step
  bool eprl = true;     // reinforce emissions even after an unreliable step
  bool baum_welch = true;
  std::uint64_t seed = 0;

  void check() const;
};

/// Applies the reward rules for one decoded step to `params` in place.
///
/// `prev_state`/`r_prev` are empty on the first step of a sequence, which is
/// treated like an unreliable previous step. Entries are scaled by (1 +- alpha)
/// and their row renormalized, so zeros (and hence the emission mask) survive.
void reinforce_step(HmmParams& params, std::optional<int> prev_state, int cur_state,
                    int obs_symbol, std::optional<double> r_prev, double r_cur,
                    const AttackConfig& cfg, TimeDirection dir);

/// Recent transition matrices per direction, newest last.
class MatrixHistory {
 public:
  explicit MatrixHistory(std::size_t capacity) : capacity_(capacity) {}

  void push(TimeDirection dir, const HmmParams::Matrix& m);
  std::size_t count(TimeDirection dir) const { return queue(dir).size(); }

  /// Mean of the newest `k` matrices of `dir`, or nothing when fewer are stored.
  std::optional<HmmParams::Matrix> mean_of_last(TimeDirection dir, std::size_t k) const;

 private:
  const std::deque<HmmParams::Matrix>& queue(TimeDirection dir) const {
    return dir == TimeDirection::kForward ? fwd_ : bwd_;
  }
  std::size_t capacity_;
  std::deque<HmmParams::Matrix> fwd_;
  std::deque<HmmParams::Matrix> bwd_;
};

struct PassDiagnostics {
  int pass = 0;
  TimeDirection direction = TimeDirection::kForward;
  double log_likelihood = 0;   // NaN when Baum-Welch is disabled
  double mean_reward = 0;
  double fraction_rewarded = 0;
};

struct AttackResult {
  std::vector<TrajectoryTrue> predictions;
  std::vector<PassDiagnostics> diagnostics;
  AttackModel model;
};

using PassObserver = std::function<void(const PassDiagnostics&, const HmmParams&)>;

/// Bi-directional HMM attack with IoU-reward reinforcement.
///
/// Odd passes train on time-forward sequences and the forward transition
/// matrix, even passes on time-reversed sequences and the backward one. Each
/// pass runs one pooled Baum-Welch iteration, decodes every trajectory with
/// the updated model, scores each step by the IoU between the attacker's
/// centered guess and the observed region, and folds the rewards into the
/// parameters in corpus order. The opposite direction's transition matrix is
/// then reset to the mean of its last k stored matrices.
///
/// The final prediction for a trajectory is the forward or backward Viterbi
/// path, whichever scores the higher mean IoU (forward on ties).
AttackResult run_attack(const std::vector<PublishedTrajectory>& pubs, const GridSpace& gs,
                        const AttackConfig& cfg, const PassObserver& observer = {});

/// Decodes one trajectory with both directions and keeps the better-scoring path.
TrajectoryTrue predict_trajectory(const AttackModel& model, const PublishedTrajectory& pub,
                                  long ell, const GridSpace& gs);

}  // namespace trajpriv
