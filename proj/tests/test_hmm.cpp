#include <doctest.h>

#include <cmath>
#include <random>

#include "hmm_oracle.hpp"
#include "trajpriv/errors.hpp"
#include "trajpriv/hmm.hpp"

using namespace trajpriv;
using M = HmmParams::Matrix;
using V = HmmParams::Vector;

namespace {

HmmParams hand_hmm() {
  HmmParams p;
  p.pi_fwd = V(2);
  p.pi_fwd << 0.6, 0.4;
  p.pi_bwd = V(2);
  p.pi_bwd << 0.3, 0.7;
  p.a_fwd = M(2, 2);
  p.a_fwd << 0.7, 0.3, 0.4, 0.6;
  p.a_bwd = M(2, 2);
  p.a_bwd << 0.2, 0.8, 0.5, 0.5;
  p.b = M(2, 3);
  p.b << 0.5, 0.4, 0.1, 0.1, 0.3, 0.6;
  return p;
}

}  // namespace

TEST_CASE("forward_backward with T=1 is Bayes' rule") {
  const HmmParams p = hand_hmm();
  const std::vector<int> obs{2};
  const auto post = forward_backward(p, std::span<const int>(obs), TimeDirection::kForward);
  const double z = 0.6 * 0.1 + 0.4 * 0.6;
  CHECK(post.log_likelihood == doctest::Approx(std::log(z)).epsilon(1e-14));
  CHECK(post.gammas(0, 0) == doctest::Approx(0.06 / z).epsilon(1e-14));
  CHECK(post.gammas(0, 1) == doctest::Approx(0.24 / z).epsilon(1e-14));
  CHECK(post.xis.empty());
}

TEST_CASE("forward_backward matches path enumeration on a hand HMM") {
  const HmmParams p = hand_hmm();
  const std::vector<int> obs{0, 2, 1};
  for (auto dir : {TimeDirection::kForward, TimeDirection::kBackward}) {
    const auto post = forward_backward(p, std::span<const int>(obs), dir);
    const auto bf = oracle::posterior(p, obs, dir);
    CHECK(std::abs(post.log_likelihood - std::log(bf.likelihood)) < 1e-12);
    CHECK((post.gammas - bf.gammas).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE(post.xis.size() == 2);
    for (std::size_t t = 0; t < 2; ++t) CHECK((post.xis[t] - bf.xis[t]).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("forward_backward agrees with enumeration on random instances") {
  std::mt19937_64 gen(2024);
  for (int i = 0; i < 40; ++i) {
    const int H = 2 + i % 3, O = 2 + i % 2;
    const HmmParams p = oracle::random_params(gen, H, O);
    const auto obs = oracle::random_obs(gen, O, 1 + i % 6);
    const auto post = forward_backward(p, std::span<const int>(obs), TimeDirection::kForward);
    const auto bf = oracle::posterior(p, obs, TimeDirection::kForward);
    CHECK(std::abs(post.log_likelihood - std::log(bf.likelihood)) < 1e-10);
    CHECK((post.gammas - bf.gammas).cwiseAbs().maxCoeff() < 1e-10);
    // Each gamma row sums to one and xi marginalizes to gamma.
    for (Eigen::Index t = 0; t < post.gammas.rows(); ++t) CHECK(post.gammas.row(t).sum() == doctest::Approx(1.0));
    for (std::size_t t = 0; t < post.xis.size(); ++t) {
      const V marginal = post.xis[t].rowwise().sum();
      CHECK((marginal - post.gammas.row(static_cast<Eigen::Index>(t)).transpose()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("uniform parameters give uniform posteriors") {
  HmmParams p;
  p.pi_fwd = p.pi_bwd = V::Constant(3, 1.0 / 3);
  p.a_fwd = M::Constant(3, 3, 1.0 / 3);
  p.a_bwd = p.a_fwd;
  p.b = M::Constant(3, 2, 0.5);
  p.allowed = HmmParams::Mask::Constant(3, 2, true);
  const std::vector<int> obs{0, 1, 1, 0};
  const auto post = forward_backward(p, std::span<const int>(obs), TimeDirection::kForward);
  CHECK((post.gammas.array() - 1.0 / 3).abs().maxCoeff() < 1e-15);
  CHECK(post.log_likelihood == doctest::Approx(4 * std::log(0.5)));
}

TEST_CASE("forward_backward reports the first impossible step") {
  HmmParams p;
  p.pi_fwd = V(2);
  p.pi_fwd << 1.0, 0.0;
  p.pi_bwd = p.pi_fwd;
  p.a_fwd = M::Identity(2, 2);
  p.a_bwd = M::Identity(2, 2);
  p.b = M::Identity(2, 2);
  const std::vector<int> obs{0, 0, 1};
  try {
    forward_backward(p, std::span<const int>(obs), TimeDirection::kForward);
    FAIL("expected DecodingError");
  } catch (const DecodingError& e) {
    CHECK(e.step() == 2);
  }
  try {
    viterbi(p, std::span<const int>(obs), TimeDirection::kForward);
    FAIL("expected DecodingError");
  } catch (const DecodingError& e) {
    CHECK(e.step() == 2);
  }
  const std::vector<int> bad{0, 5};
  CHECK_THROWS_AS(forward_backward(p, std::span<const int>(bad), TimeDirection::kForward), Error);
}

TEST_CASE("long double instantiation") {
  const HmmParams p = hand_hmm();
  BasicHmmParams<long double> q;
  q.pi_fwd = p.pi_fwd.cast<long double>();
  q.pi_bwd = p.pi_bwd.cast<long double>();
  q.a_fwd = p.a_fwd.cast<long double>();
  q.a_bwd = p.a_bwd.cast<long double>();
  q.b = p.b.cast<long double>();
  const std::vector<int> obs{0, 2, 1};
  const auto lq = forward_backward(q, std::span<const int>(obs), TimeDirection::kForward).log_likelihood;
  const auto lp = forward_backward(p, std::span<const int>(obs), TimeDirection::kForward).log_likelihood;
  CHECK(static_cast<double>(lq) == doctest::Approx(lp).epsilon(1e-14));
  CHECK(viterbi(q, std::span<const int>(obs), TimeDirection::kForward) ==
        viterbi(p, std::span<const int>(obs), TimeDirection::kForward));
}

TEST_CASE("baum_welch_pass on a one-state model stays at one") {
  HmmParams p;
  p.pi_fwd = p.pi_bwd = V::Ones(1);
  p.a_fwd = M::Ones(1, 1);
  p.a_bwd = M::Ones(1, 1);
  p.b = M::Ones(1, 1);
  const auto r = baum_welch_pass(p, {{0, 0, 0, 0}}, TimeDirection::kForward);
  CHECK(r.params.pi_fwd(0) == 1.0);
  CHECK(r.params.a_fwd(0, 0) == 1.0);
  CHECK(r.params.b(0, 0) == 1.0);
  CHECK(r.log_likelihood == 0.0);
}

TEST_CASE("baum_welch_pass log-likelihood is non-decreasing") {
  HmmParams p = hand_hmm();
  const std::vector<std::vector<int>> seqs{{0, 0, 1, 2, 2}, {2, 1, 0}, {1, 1, 1, 0, 2, 2, 0}};
  for (auto dir : {TimeDirection::kForward, TimeDirection::kBackward}) {
    HmmParams q = p;
    double prev = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < 10; ++it) {
      auto r = baum_welch_pass(q, seqs, dir);
      CHECK(r.log_likelihood >= prev - 1e-12);
      CHECK(is_stochastic(r.params));
      prev = r.log_likelihood;
      q = std::move(r.params);
    }
  }
}

TEST_CASE("baum_welch_pass leaves the other direction untouched") {
  const HmmParams p = hand_hmm();
  const std::vector<std::vector<int>> seqs{{0, 2, 1, 1}};
  const auto bwd = baum_welch_pass(p, seqs, TimeDirection::kBackward);
  CHECK(bwd.params.a_fwd == p.a_fwd);
  CHECK(bwd.params.pi_fwd == p.pi_fwd);
  CHECK_FALSE(bwd.params.a_bwd == p.a_bwd);
  const auto fwd = baum_welch_pass(p, seqs, TimeDirection::kForward);
  CHECK(fwd.params.a_bwd == p.a_bwd);
  CHECK(fwd.params.pi_bwd == p.pi_bwd);
}

TEST_CASE("baum_welch_pass reestimates from expected counts") {
  const HmmParams p = hand_hmm();
  const std::vector<std::vector<int>> seqs{{0, 2, 1}, {1, 1}};
  // Textbook update from enumeration-based posteriors.
  V init = V::Zero(2);
  M trans = M::Zero(2, 2), emit = M::Zero(2, 3);
  for (const auto& s : seqs) {
    const auto bf = oracle::posterior(p, s, TimeDirection::kForward);
    init += bf.gammas.row(0).transpose();
    for (std::size_t t = 0; t < s.size(); ++t) emit.col(s[t]) += bf.gammas.row(static_cast<Eigen::Index>(t)).transpose();
    for (const auto& xi : bf.xis) trans += xi;
  }
  init /= init.sum();
  normalize_rows(trans);
  normalize_rows(emit);
  const auto r = baum_welch_pass(p, seqs, TimeDirection::kForward);
  CHECK((r.params.pi_fwd - init).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(r.params.pi_bwd == p.pi_bwd);
  CHECK((r.params.a_fwd - trans).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((r.params.b - emit).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("baum_welch_pass keeps unvisited rows and the mask") {
  HmmParams p;
  p.pi_fwd = V(3);
  p.pi_fwd << 0.5, 0.5, 0.0;
  p.pi_bwd = p.pi_fwd;
  p.a_fwd = M::Constant(3, 3, 1.0 / 3);
  p.a_bwd = p.a_fwd;
  p.allowed = HmmParams::Mask(3, 2);
  p.allowed << true, false, true, true, false, true;
  p.b = M::Constant(3, 2, 0.5);
  apply_emission_mask(p);
  // Symbol 0 only: state 2 never emits it, so it gets no expected mass.
  const auto r = baum_welch_pass(p, {{0, 0, 0}}, TimeDirection::kForward);
  CHECK(r.params.a_fwd.row(2) == p.a_fwd.row(2));
  CHECK(r.params.b.row(2) == p.b.row(2));
  CHECK(respects_mask(r.params));
  CHECK(is_stochastic(r.params));
}

TEST_CASE("viterbi with T=1 is the posterior argmax") {
  const HmmParams p = hand_hmm();
  for (int o = 0; o < 3; ++o) {
    const std::vector<int> obs{o};
    const int expected = p.pi_fwd(0) * p.b(0, o) >= p.pi_fwd(1) * p.b(1, o) ? 0 : 1;
    CHECK(viterbi(p, std::span<const int>(obs), TimeDirection::kForward) == std::vector<int>{expected});
  }
}

TEST_CASE("viterbi follows a deterministic chain") {
  HmmParams p;
  p.pi_fwd = p.pi_bwd = V::Constant(3, 1.0 / 3);
  p.a_fwd = M::Zero(3, 3);
  p.a_fwd(0, 1) = p.a_fwd(1, 2) = p.a_fwd(2, 0) = 1.0;
  p.a_bwd = p.a_fwd.transpose();
  p.b = M::Constant(3, 1, 1.0);
  const std::vector<int> obs(5, 0);
  // All three rotations tie; the lowest final state wins.
  CHECK(viterbi(p, std::span<const int>(obs), TimeDirection::kForward) == std::vector<int>{2, 0, 1, 2, 0});
  p.pi_fwd << 0.0, 1.0, 0.0;
  p.pi_bwd = p.pi_fwd;
  CHECK(viterbi(p, std::span<const int>(obs), TimeDirection::kForward) == std::vector<int>{1, 2, 0, 1, 2});
  CHECK(viterbi(p, std::span<const int>(obs), TimeDirection::kBackward) == std::vector<int>{1, 0, 2, 1, 0});
}

TEST_CASE("viterbi equals exhaustive search") {
  std::mt19937_64 gen(99);
  int quantized_runs = 0;
  for (int i = 0; i < 200; ++i) {
    const bool quantized = i % 2 == 1;
    const int H = 2 + i % 3, O = 2 + (i / 3) % 2;
    const HmmParams p = quantized ? oracle::quantized_params(gen, H, O) : oracle::random_params(gen, H, O);
    const auto obs = oracle::random_obs(gen, O, 1 + i % 6);
    const auto dir = i % 4 < 2 ? TimeDirection::kForward : TimeDirection::kBackward;
    const auto expected = oracle::viterbi(p, obs, dir);
    if (expected.empty()) {
      CHECK_THROWS_AS(viterbi(p, std::span<const int>(obs), dir), DecodingError);
      continue;
    }
    quantized_runs += quantized;
    CHECK(viterbi(p, std::span<const int>(obs), dir) == expected);
  }
  CHECK(quantized_runs > 50);
}

TEST_CASE("viterbi rejects a symbol no state emits") {
  HmmParams p = hand_hmm();
  p.b.col(2).setZero();
  const std::vector<int> obs{0, 2};
  CHECK_THROWS_AS(viterbi(p, std::span<const int>(obs), TimeDirection::kForward), DecodingError);
}
