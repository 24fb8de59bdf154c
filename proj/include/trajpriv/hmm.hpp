#pragma once

// Discrete HMM with a shared emission matrix and separate initial
// distributions and transition matrices for forward time and reversed time.
// Reversed sequences start where forward ones end, so one initial
// distribution cannot serve both.
//
// Every routine restricts its work to the states that can emit the current
// symbol (non-zero entries of the emission column). With structurally masked
// emissions this is a handful of cells per step, which is what keeps passes
// over thousands of steps cheap. Dense results are identical to the plain
// recursions because the skipped terms are exact zeros.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "trajpriv/errors.hpp"

namespace trajpriv {

enum class TimeDirection { kForward, kBackward };

template <typename Scalar>
struct BasicHmmParams {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Vector pi_fwd;
  Vector pi_bwd;
  Matrix a_fwd;
  Matrix a_bwd;
  Matrix b;
  /// allowed(h, o) is false when state h can never emit symbol o. Empty means no mask.
  Mask allowed;

  Eigen::Index n_states() const { return pi_fwd.size(); }
  Eigen::Index n_symbols() const { return b.cols(); }
  bool has_mask() const { return allowed.size() != 0; }

  Vector& initial(TimeDirection dir) { return dir == TimeDirection::kForward ? pi_fwd : pi_bwd; }
  const Vector& initial(TimeDirection dir) const {
    return dir == TimeDirection::kForward ? pi_fwd : pi_bwd;
  }
  Matrix& transition(TimeDirection dir) { return dir == TimeDirection::kForward ? a_fwd : a_bwd; }
  const Matrix& transition(TimeDirection dir) const {
    return dir == TimeDirection::kForward ? a_fwd : a_bwd;
  }
};

using HmmParams = BasicHmmParams<double>;

/// Normalizes every row to sum to one. Rows summing to zero are left untouched.
template <typename Derived>
void normalize_rows(Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const auto s = m.row(r).sum();
    if (s > 0) m.row(r) /= s;
  }
}

/// Zeroes masked emission entries and renormalizes rows.
template <typename Scalar>
void apply_emission_mask(BasicHmmParams<Scalar>& p) {
  if (p.has_mask()) p.b = p.allowed.select(p.b, Scalar(0));
  normalize_rows(p.b);
}

template <typename Derived>
bool rows_stochastic(const Eigen::MatrixBase<Derived>& m, double tol) {
  if ((m.array() < 0).any() || !m.allFinite()) return false;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (std::abs(static_cast<double>(m.row(r).sum()) - 1.0) > tol) return false;
  }
  return true;
}

template <typename Scalar>
bool is_stochastic(const BasicHmmParams<Scalar>& p, double tol = 1e-9) {
  return rows_stochastic(p.pi_fwd.transpose(), tol) && rows_stochastic(p.pi_bwd.transpose(), tol) &&
         rows_stochastic(p.a_fwd, tol) &&
         rows_stochastic(p.a_bwd, tol) && rows_stochastic(p.b, tol);
}

/// True when every structurally masked emission entry is exactly zero.
template <typename Scalar>
bool respects_mask(const BasicHmmParams<Scalar>& p) {
  if (!p.has_mask()) return true;
  return ((!p.allowed) && (p.b.array() != Scalar(0))).count() == 0;
}

namespace detail {

/// Indices of states with non-zero emission probability for `symbol`, ascending.
template <typename Scalar>
std::vector<Eigen::Index> emitting_states(const BasicHmmParams<Scalar>& p, int symbol) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index h = 0; h < p.n_states(); ++h) {
    if (p.b(h, symbol) > Scalar(0)) out.push_back(h);
  }
  return out;
}

inline void check_symbols(std::span<const int> obs, Eigen::Index n_symbols) {
  if (obs.empty()) throw Error("observation sequence is empty");
  for (int o : obs) {
    if (o < 0 || o >= n_symbols) throw Error("observation symbol out of range");
  }
}

}  // namespace detail

/// Scaled forward and backward variables on the per-step emitting supports.
///
/// alpha[t] and beta[t] are indexed like support[t]. scale[t] is the
/// normalizer of the forward variable at t, so the log-likelihood is the sum
/// of log(scale[t]).
template <typename Scalar>
struct ScaledPass {
  using Vector = typename BasicHmmParams<Scalar>::Vector;

  std::vector<std::vector<Eigen::Index>> support;
  std::vector<Vector> alpha;
  std::vector<Vector> beta;
  std::vector<Scalar> scale;

  Scalar log_likelihood() const {
    Scalar ll = 0;
    for (Scalar c : scale) ll += std::log(c);
    return ll;
  }
};

/// Throws DecodingError naming the first step at which the sequence has zero probability.
template <typename Scalar>
ScaledPass<Scalar> scaled_pass(const BasicHmmParams<Scalar>& p, std::span<const int> obs,
                               TimeDirection dir) {
  using Vector = typename BasicHmmParams<Scalar>::Vector;
  detail::check_symbols(obs, p.n_symbols());
  const auto& a = p.transition(dir);
  const std::size_t T = obs.size();

  ScaledPass<Scalar> out;
  out.support.resize(T);
  out.alpha.resize(T);
  out.beta.resize(T);
  out.scale.resize(T);

  auto fail = [](std::size_t t) {
    throw DecodingError("observation sequence has zero probability at step " + std::to_string(t),
                        t);
  };

  for (std::size_t t = 0; t < T; ++t) {
    const auto& cur = out.support[t] = detail::emitting_states(p, obs[t]);
    if (cur.empty()) fail(t);
    Vector emit = p.b(cur, obs[t]);
    Vector alpha;
    if (t == 0) {
      alpha = p.initial(dir)(cur).cwiseProduct(emit);
    } else {
      const auto& prev = out.support[t - 1];
      alpha = (a(prev, cur).transpose() * out.alpha[t - 1]).cwiseProduct(emit);
    }
    const Scalar c = alpha.sum();
    if (!(c > Scalar(0))) fail(t);
    out.scale[t] = c;
    out.alpha[t] = alpha / c;
  }

  out.beta[T - 1] = Vector::Ones(static_cast<Eigen::Index>(out.support[T - 1].size()));
  for (std::size_t t = T - 1; t-- > 0;) {
    const auto& cur = out.support[t];
    const auto& next = out.support[t + 1];
    const Vector weighted = p.b(next, obs[t + 1]).cwiseProduct(out.beta[t + 1]);
    out.beta[t] = (a(cur, next) * weighted) / out.scale[t + 1];
  }
  return out;
}

template <typename Scalar>
struct Posterior {
  using Matrix = typename BasicHmmParams<Scalar>::Matrix;

  Matrix gammas;              // T x H, each row sums to one
  std::vector<Matrix> xis;    // T-1 entries of H x H
  Scalar log_likelihood = 0;
};

/// Dense posterior state and transition marginals. Allocates T*H*H values,
/// so it is meant for inspection; training accumulates counts directly.
template <typename Scalar>
Posterior<Scalar> forward_backward(const BasicHmmParams<Scalar>& p, std::span<const int> obs,
                                   TimeDirection dir) {
  using Matrix = typename BasicHmmParams<Scalar>::Matrix;
  const auto pass = scaled_pass(p, obs, dir);
  const auto& a = p.transition(dir);
  const Eigen::Index H = p.n_states();
  const std::size_t T = obs.size();

  Posterior<Scalar> out;
  out.log_likelihood = pass.log_likelihood();
  out.gammas = Matrix::Zero(static_cast<Eigen::Index>(T), H);
  for (std::size_t t = 0; t < T; ++t) {
    out.gammas(static_cast<Eigen::Index>(t), pass.support[t]) =
        pass.alpha[t].cwiseProduct(pass.beta[t]).transpose();
  }
  for (std::size_t t = 0; t + 1 < T; ++t) {
    const auto& cur = pass.support[t];
    const auto& next = pass.support[t + 1];
    Matrix xi = Matrix::Zero(H, H);
    const auto right = p.b(next, obs[t + 1]).cwiseProduct(pass.beta[t + 1]) / pass.scale[t + 1];
    xi(cur, next) = a(cur, next).cwiseProduct(pass.alpha[t] * right.transpose());
    out.xis.push_back(std::move(xi));
  }
  return out;
}

/// Expected sufficient statistics pooled over sequences.
template <typename Scalar>
struct ExpectedCounts {
  using Vector = typename BasicHmmParams<Scalar>::Vector;
  using Matrix = typename BasicHmmParams<Scalar>::Matrix;

  Vector initial;
  Matrix transitions;
  Matrix emissions;
  Scalar log_likelihood = 0;

  ExpectedCounts(Eigen::Index n_states, Eigen::Index n_symbols)
      : initial(Vector::Zero(n_states)),
        transitions(Matrix::Zero(n_states, n_states)),
        emissions(Matrix::Zero(n_states, n_symbols)) {}

  void accumulate(const BasicHmmParams<Scalar>& p, std::span<const int> obs, TimeDirection dir) {
    const auto pass = scaled_pass(p, obs, dir);
    const auto& a = p.transition(dir);
    log_likelihood += pass.log_likelihood();
    for (std::size_t t = 0; t < obs.size(); ++t) {
      const auto& cur = pass.support[t];
      const Vector gamma = pass.alpha[t].cwiseProduct(pass.beta[t]);
      if (t == 0) initial(cur) += gamma;
      emissions(cur, obs[t]) += gamma;
      if (t + 1 < obs.size()) {
        const auto& next = pass.support[t + 1];
        const Vector right =
            p.b(next, obs[t + 1]).cwiseProduct(pass.beta[t + 1]) / pass.scale[t + 1];
        transitions(cur, next) += a(cur, next).cwiseProduct(pass.alpha[t] * right.transpose());
      }
    }
  }
};

template <typename Scalar>
struct EmResult {
  BasicHmmParams<Scalar> params;
  Scalar log_likelihood = 0;  // of the input parameters, pooled over sequences
};

/// One pooled Baum-Welch iteration. Updates the emissions and the initial
/// distribution and transition matrix of `dir`; the other direction's are
/// copied through.
/// Rows with no expected mass keep their previous values.
template <typename Scalar>
EmResult<Scalar> baum_welch_pass(const BasicHmmParams<Scalar>& p,
                                 const std::vector<std::vector<int>>& sequences,
                                 TimeDirection dir) {
  if (sequences.empty()) throw Error("Baum-Welch needs at least one sequence");
  ExpectedCounts<Scalar> counts(p.n_states(), p.n_symbols());
  for (const auto& seq : sequences) counts.accumulate(p, seq, dir);

  EmResult<Scalar> out{p, counts.log_likelihood};
  auto& next = out.params;
  if (counts.initial.sum() > Scalar(0)) next.initial(dir) = counts.initial / counts.initial.sum();

  auto reestimate = [](auto& target, const auto& expected) {
    for (Eigen::Index r = 0; r < target.rows(); ++r) {
      const Scalar s = expected.row(r).sum();
      if (s > Scalar(0)) target.row(r) = expected.row(r) / s;
    }
  };
  reestimate(next.transition(dir), counts.transitions);
  reestimate(next.b, counts.emissions);
  apply_emission_mask(next);
  return out;
}

/// Log scores closer than this count as ties in Viterbi. Mathematically equal
/// paths can otherwise differ by an ulp depending on summation order.
inline constexpr double kViterbiTieTolerance = 1e-12;

/// Most likely state path in the log domain. Ties go to the lower state index
/// at every maximization, including the final one.
template <typename Scalar>
std::vector<int> viterbi(const BasicHmmParams<Scalar>& p, std::span<const int> obs,
                         TimeDirection dir) {
  using Vector = typename BasicHmmParams<Scalar>::Vector;
  detail::check_symbols(obs, p.n_symbols());
  const auto& a = p.transition(dir);
  const std::size_t T = obs.size();
  constexpr Scalar kNegInf = -std::numeric_limits<Scalar>::infinity();
  const auto tie = static_cast<Scalar>(kViterbiTieTolerance);

  auto fail = [](std::size_t t, const char* why) {
    throw DecodingError(std::string(why) + " at step " + std::to_string(t), t);
  };

  std::vector<std::vector<Eigen::Index>> support(T);
  std::vector<std::vector<int>> backptr(T);
  Vector delta;
  for (std::size_t t = 0; t < T; ++t) {
    support[t] = detail::emitting_states(p, obs[t]);
    const auto& cur = support[t];
    if (cur.empty()) fail(t, "no state can emit the observed symbol");
    Vector next(static_cast<Eigen::Index>(cur.size()));
    backptr[t].assign(cur.size(), -1);
    for (std::size_t j = 0; j < cur.size(); ++j) {
      const Scalar log_emit = std::log(p.b(cur[j], obs[t]));
      if (t == 0) {
        next(j) = std::log(p.initial(dir)(cur[j])) + log_emit;
        continue;
      }
      const auto& prev = support[t - 1];
      Scalar best = kNegInf;
      int arg = -1;
      for (std::size_t i = 0; i < prev.size(); ++i) {
        const Scalar score = delta(i) + std::log(a(prev[i], cur[j]));
        if (score > best + tie) {
          best = score;
          arg = static_cast<int>(i);
        }
      }
      next(j) = best + log_emit;
      backptr[t][j] = arg;
    }
    if (!(next.maxCoeff() > kNegInf)) fail(t, "observation sequence has zero probability");
    delta = std::move(next);
  }

  Eigen::Index last = 0;
  for (Eigen::Index j = 1; j < delta.size(); ++j) {
    if (delta(j) > delta(last) + tie) last = j;
  }
  std::vector<int> path(T);
  auto pos = static_cast<int>(last);
  for (std::size_t t = T; t-- > 0;) {
    path[t] = static_cast<int>(support[t][static_cast<std::size_t>(pos)]);
    if (t > 0) pos = backptr[t][static_cast<std::size_t>(pos)];
  }
  return path;
}

}  // namespace trajpriv
