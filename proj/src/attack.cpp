#include "trajpriv/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trajpriv/errors.hpp"
#include "trajpriv/publisher.hpp"

namespace trajpriv {

Region t2p_predict(Cell tl, long ell, const GridSpace& gs) {
  Axis next = Axis::kLatitude;
  return expand_region_by(tl, ell, gs, [&next] {
    const Axis current = next;
    next = current == Axis::kLatitude ? Axis::kLongitude : Axis::kLatitude;
    return current;
  });
}

void AttackConfig::check() const {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in (0, 1]");
  if (gamma < 0) throw ConfigError("gamma must be non-negative");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ConfigError("delta must be non-negative");
  if (k < 1) throw ConfigError("sliding-window size k must be at least 1");
  if (passes < 1) throw ConfigError("number of passes must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
}

void reinforce_step(HmmParams& params, std::optional<int> prev_state, int cur_state,
                    int obs_symbol, std::optional<double> r_prev, double r_cur,
                    const AttackConfig& cfg, TimeDirection dir) {
  const bool reliable = r_prev.has_value() && prev_state.has_value() && *r_prev >= cfg.delta;
  const double factor = r_cur >= cfg.delta ? 1.0 + cfg.alpha : 1.0 - cfg.alpha;

  if (reliable) {
    auto& a = params.transition(dir);
    a(*prev_state, cur_state) *= factor;
    a.row(*prev_state) /= a.row(*prev_state).sum();
  }
  if (reliable || cfg.eprl) {
    auto row = params.b.row(cur_state);
    row(obs_symbol) *= factor;
    if (params.has_mask()) row = params.allowed.row(cur_state).select(row, 0.0);
    row /= row.sum();
  }
}

void MatrixHistory::push(TimeDirection dir, const HmmParams::Matrix& m) {
  auto& q = dir == TimeDirection::kForward ? fwd_ : bwd_;
  q.push_back(m);
  while (q.size() > capacity_) q.pop_front();
}

std::optional<HmmParams::Matrix> MatrixHistory::mean_of_last(TimeDirection dir,
                                                             std::size_t k) const {
  const auto& q = queue(dir);
  if (k == 0 || q.size() < k) return std::nullopt;
  HmmParams::Matrix sum = q[q.size() - k];
  for (std::size_t i = q.size() - k + 1; i < q.size(); ++i) sum += q[i];
  return HmmParams::Matrix(sum / static_cast<double>(k));
}

namespace {

TimeDirection opposite(TimeDirection d) {
  return d == TimeDirection::kForward ? TimeDirection::kBackward : TimeDirection::kForward;
}

std::vector<int> reversed(std::vector<int> v) {
  std::reverse(v.begin(), v.end());
  return v;
}

/// IoU of the attacker's guess for each decoded state against the observed regions.
std::vector<double> step_rewards(const std::vector<int>& path, const std::vector<int>& obs,
                                 const std::vector<Region>& guess_of_state,
                                 const ObservationAlphabet& alphabet) {
  std::vector<double> r(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    r[i] = iou_reward(guess_of_state[static_cast<std::size_t>(path[i])],
                      alphabet.symbols[static_cast<std::size_t>(obs[i])]);
  }
  return r;
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

TrajectoryTrue choose_prediction(const AttackModel& model, const PublishedTrajectory& pub,
                                 const std::vector<int>& obs,
                                 const std::vector<Region>& guess_of_state) {
  const auto fwd = viterbi(model.params, obs, TimeDirection::kForward);
  const auto bwd = reversed(viterbi(model.params, reversed(obs), TimeDirection::kBackward));
  const double score_fwd = mean(step_rewards(fwd, obs, guess_of_state, model.alphabet));
  const double score_bwd = mean(step_rewards(bwd, obs, guess_of_state, model.alphabet));
  const auto& best = score_bwd > score_fwd ? bwd : fwd;

  TrajectoryTrue out;
  out.id = pub.id;
  out.points.reserve(best.size());
  for (std::size_t i = 0; i < best.size(); ++i) {
    out.points.push_back(
        {pub.regions[i].t, model.hidden.states[static_cast<std::size_t>(best[i])]});
  }
  return out;
}

std::vector<Region> guesses(const HiddenSpace& hidden, long ell, const GridSpace& gs) {
  std::vector<Region> out;
  out.reserve(hidden.size());
  for (Cell c : hidden.states) out.push_back(t2p_predict(c, ell, gs));
  return out;
}

}  // namespace

TrajectoryTrue predict_trajectory(const AttackModel& model, const PublishedTrajectory& pub,
                                  long ell, const GridSpace& gs) {
  return choose_prediction(model, pub, encode(pub, model.alphabet),
                           guesses(model.hidden, ell, gs));
}

AttackResult run_attack(const std::vector<PublishedTrajectory>& pubs, const GridSpace& gs,
                        const AttackConfig& cfg, const PassObserver& observer) {
  cfg.check();
  for (const auto& pub : pubs) {
    if (pub.regions.empty()) throw ConfigError("published trajectory '" + pub.id + "' is empty");
  }
  const long ell = min_region_size(cfg.lambda);

  AttackResult result;
  AttackModel& model = result.model;
  model.hidden = build_hidden_space(pubs);
  model.alphabet = build_observation_alphabet(pubs, model.hidden, ell, cfg.gamma, gs);
  model.params = init_params(model.hidden, model.alphabet, cfg.seed);
  HmmParams& params = model.params;

  std::vector<std::vector<int>> fwd_seqs;
  std::vector<std::vector<int>> bwd_seqs;
  for (const auto& pub : pubs) {
    fwd_seqs.push_back(encode(pub, model.alphabet));
    bwd_seqs.push_back(reversed(fwd_seqs.back()));
  }
  const std::vector<Region> guess_of_state = guesses(model.hidden, ell, gs);
  MatrixHistory history(static_cast<std::size_t>(cfg.k));

  for (int pass = 1; pass <= cfg.passes; ++pass) {
    const TimeDirection dir = pass % 2 == 1 ? TimeDirection::kForward : TimeDirection::kBackward;
    const auto& seqs = dir == TimeDirection::kForward ? fwd_seqs : bwd_seqs;

    PassDiagnostics diag;
    diag.pass = pass;
    diag.direction = dir;
    diag.log_likelihood = std::numeric_limits<double>::quiet_NaN();
    if (cfg.baum_welch) {
      auto em = baum_welch_pass(params, seqs, dir);
      params = std::move(em.params);
      diag.log_likelihood = em.log_likelihood;
    }

    // Every trajectory is decoded with the same post-EM model; rewards are
    // then folded in corpus order.
    std::vector<std::vector<int>> paths;
    paths.reserve(seqs.size());
    for (const auto& seq : seqs) paths.push_back(viterbi(params, seq, dir));

    double reward_sum = 0;
    std::size_t rewarded = 0;
    std::size_t steps = 0;
    for (std::size_t s = 0; s < seqs.size(); ++s) {
      const auto rewards = step_rewards(paths[s], seqs[s], guess_of_state, model.alphabet);
      for (std::size_t i = 0; i < rewards.size(); ++i) {
        std::optional<int> prev_state;
        std::optional<double> r_prev;
        if (i > 0) {
          prev_state = paths[s][i - 1];
          r_prev = rewards[i - 1];
        }
        reinforce_step(params, prev_state, paths[s][i], seqs[s][i], r_prev, rewards[i], cfg, dir);
        reward_sum += rewards[i];
        rewarded += rewards[i] >= cfg.delta ? 1 : 0;
        ++steps;
      }
    }
    diag.mean_reward = steps ? reward_sum / static_cast<double>(steps) : 0.0;
    diag.fraction_rewarded = steps ? static_cast<double>(rewarded) / static_cast<double>(steps) : 0.0;

    history.push(dir, params.transition(dir));
    if (auto avg = history.mean_of_last(opposite(dir), static_cast<std::size_t>(cfg.k))) {
      params.transition(opposite(dir)) = std::move(*avg);
    }
    result.diagnostics.push_back(diag);
    if (observer) observer(diag, params);
  }

  result.predictions.reserve(pubs.size());
  for (std::size_t s = 0; s < pubs.size(); ++s) {
    result.predictions.push_back(choose_prediction(model, pubs[s], fwd_seqs[s], guess_of_state));
  }
  return result;
}

}  // namespace trajpriv
