#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "pmarl/errors.hpp"
#include "pmarl/tensor/adam.hpp"
#include "pmarl/tensor/gaussian_policy.hpp"
#include "pmarl/tensor/mlp.hpp"
#include "test_support.hpp"

using namespace pmarl;
using namespace pmarl::tensor;

TEST(Mlp, ZeroParamsGiveZeroOutput) {
  auto p = MlpParams::zeros({3, 5, 2});
  const auto out = mlp_forward(p, std::vector<double>{1.0, -2.0, 0.5});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0], 0.0);
  EXPECT_EQ(out[1], 0.0);
}

TEST(Mlp, SingleAffineLayer) {
  auto p = MlpParams::zeros({1, 1});
  p.weights[0](0, 0) = 2.0;
  p.biases[0][0] = 1.0;
  EXPECT_EQ(mlp_forward(p, std::vector<double>{3.0})[0], 7.0);
}

TEST(Mlp, IdentityLayerPassesInputThrough) {
  auto p = MlpParams::zeros({3, 3});
  for (std::size_t i = 0; i < 3; ++i) p.weights[0](i, i) = 1.0;
  const std::vector<double> x{0.3, -1.7, 4.0};
  EXPECT_EQ(mlp_forward(p, x), x);
}

TEST(Mlp, InputSizeMismatchIsContractViolation) {
  auto p = MlpParams::zeros({3, 2});
  EXPECT_THROW(mlp_forward(p, std::vector<double>{1.0, 2.0}), ContractViolation);
  EXPECT_THROW(mlp_backward(p, std::vector<double>{1.0, 2.0, 3.0}, std::vector<double>{1.0}), ContractViolation);
}

TEST(Mlp, ShapesFollowLayerSizes) {
  std::mt19937_64 rng(3);
  const std::vector<std::size_t> sizes{4, 7, 3};
  auto p = MlpParams::init_uniform(sizes, rng);
  ASSERT_EQ(p.weights.size(), 2u);
  EXPECT_EQ(p.weights[0].rows, 7u);
  EXPECT_EQ(p.weights[0].cols, 4u);
  EXPECT_EQ(p.weights[1].rows, 3u);
  EXPECT_EQ(p.biases[1].size(), 3u);
  EXPECT_EQ(p.parameter_count(), parameter_count(sizes));
  EXPECT_EQ(parameter_count(sizes), 4u * 7 + 7 + 7 * 3 + 3);
  const double bound = 1.0 / std::sqrt(4.0);
  for (double w : p.weights[0].data) EXPECT_LE(std::abs(w), bound);
}

TEST(Mlp, ZeroUpstreamGivesZeroGradients) {
  std::mt19937_64 rng(1);
  auto p = MlpParams::init_uniform({3, 4, 2}, rng);
  const auto g = mlp_backward(p, std::vector<double>{0.1, 0.2, 0.3}, std::vector<double>{0.0, 0.0});
  for (const auto& w : g.weights) {
    for (double v : w.data) EXPECT_EQ(v, 0.0);
  }
  for (const auto& b : g.biases) {
    for (double v : b) EXPECT_EQ(v, 0.0);
  }
}

TEST(Mlp, SingleLayerHandGradient) {
  auto p = MlpParams::zeros({1, 1});
  p.weights[0](0, 0) = 2.0;
  const auto g = mlp_backward(p, std::vector<double>{3.0}, std::vector<double>{1.0});
  EXPECT_EQ(g.weights[0](0, 0), 3.0);
  EXPECT_EQ(g.biases[0][0], 1.0);
  EXPECT_EQ(g.input[0], 2.0);
}

TEST(Mlp, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 5; ++trial) {
    const auto net = testing_support::random_network(rng);
    const auto err = testing_support::max_gradient_rel_error(net, rng, 1e-5);
    EXPECT_LT(err, 1e-4) << "trial " << trial;
  }
}

TEST(Mlp, BatchForwardMatchesPerSample) {
  std::mt19937_64 rng(5);
  auto p = MlpParams::init_uniform({3, 8, 8, 2}, rng);
  Matrix x(4, 3);
  std::normal_distribution<double> n;
  for (double& v : x.data) v = n(rng);
  const Matrix y = mlp_forward_batch(p, x);
  for (std::size_t r = 0; r < 4; ++r) {
    const auto single = mlp_forward(p, x.row(r));
    for (std::size_t c = 0; c < 2; ++c) EXPECT_NEAR(y(r, c), single[c], 1e-14);
  }
}

TEST(Mlp, ForwardIsDeterministic) {
  std::mt19937_64 rng(9);
  auto p = MlpParams::init_uniform({5, 16, 3}, rng);
  const std::vector<double> x{0.1, -0.4, 2.0, 0.0, 1.5};
  EXPECT_EQ(mlp_forward(p, x), mlp_forward(p, x));
}

TEST(Adam, FirstStepMovesByLearningRate) {
  std::vector<double> param{0.0};
  const std::vector<double> grad{1.0};
  std::vector<ParamView> pv{{"w", param}};
  std::vector<GradView> gv{{"w", grad}};
  auto st = AdamState::for_params(pv, 0.1);
  adam_step(st, pv, gv);
  EXPECT_NEAR(param[0], -0.1, 1e-9);
  EXPECT_EQ(st.step, 1u);
}

TEST(Adam, ZeroGradientsLeaveParamsUnchanged) {
  std::vector<double> param{0.5, -1.25, 3.0};
  const auto before = param;
  const std::vector<double> grad(3, 0.0);
  std::vector<ParamView> pv{{"w", param}};
  std::vector<GradView> gv{{"w", grad}};
  auto st = AdamState::for_params(pv, 1e-3);
  adam_step(st, pv, gv);
  adam_step(st, pv, gv);
  EXPECT_EQ(param, before);
  EXPECT_EQ(st.step, 2u);
}

TEST(Adam, IdenticalInputsGiveIdenticalResults) {
  auto run = [] {
    std::vector<double> param{0.3, 0.7};
    const std::vector<double> grad{0.2, -0.9};
    std::vector<ParamView> pv{{"w", param}};
    std::vector<GradView> gv{{"w", grad}};
    auto st = AdamState::for_params(pv, 1e-2);
    adam_step(st, pv, gv);
    adam_step(st, pv, gv);
    return std::make_pair(param, st);
  };
  const auto a = run();
  const auto b = run();
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
}

TEST(Adam, NonFiniteGradientNamesTheViewAndTouchesNothing) {
  std::vector<double> w0{1.0}, w1{2.0};
  const std::vector<double> g0{0.5}, g1{std::nan("")};
  std::vector<ParamView> pv{{"layer0.weight", w0}, {"layer1.weight", w1}};
  std::vector<GradView> gv{{"layer0.weight", g0}, {"layer1.weight", g1}};
  auto st = AdamState::for_params(pv, 0.1);
  try {
    adam_step(st, pv, gv);
    FAIL() << "expected NonFiniteError";
  } catch (const NonFiniteError& e) {
    EXPECT_NE(std::string(e.what()).find("layer1.weight"), std::string::npos);
  }
  EXPECT_EQ(w0[0], 1.0);
  EXPECT_EQ(st.step, 0u);
}

TEST(Adam, ShapeMismatchIsContractViolation) {
  std::vector<double> w{1.0, 2.0};
  const std::vector<double> g{0.5};
  std::vector<ParamView> pv{{"w", w}};
  std::vector<GradView> gv{{"w", g}};
  auto st = AdamState::for_params(pv, 0.1);
  EXPECT_THROW(adam_step(st, pv, gv), ContractViolation);
}

namespace {

GaussianPolicyHead zero_head(double log_std) {
  GaussianPolicyHead h;
  h.mean_net = MlpParams::zeros({3, 4, 2});
  h.log_std = {log_std, log_std};
  return h;
}

}  // namespace

TEST(Gaussian, LogprobAtMeanWithUnitStd) {
  const auto h = zero_head(0.0);
  const double lp = gaussian_logprob(h, std::vector<double>{1.0, 2.0, 3.0}, {0.0, 0.0});
  EXPECT_NEAR(lp, -std::log(2.0 * std::numbers::pi), 1e-12);
  EXPECT_NEAR(lp, -1.8379, 1e-4);
}

TEST(Gaussian, LogprobDecreasesAwayFromMean) {
  const auto h = zero_head(-0.5);
  const std::vector<double> obs{0.0, 0.0, 0.0};
  double prev = gaussian_logprob(h, obs, {0.0, 0.0});
  for (double d : {0.1, 0.5, 1.0, 2.0}) {
    const double lp = gaussian_logprob(h, obs, {d, -d});
    EXPECT_LT(lp, prev);
    prev = lp;
  }
}

TEST(Gaussian, IdenticalHeadsGiveUnitRatio) {
  std::mt19937_64 rng(4);
  const std::vector<std::size_t> hidden{8};
  auto a = GaussianPolicyHead::init(3, hidden, -0.5, rng);
  auto b = a;
  const std::vector<double> obs{0.2, -0.3, 0.9};
  const Action act{0.7, -2.1};
  EXPECT_EQ(std::exp(gaussian_logprob(a, obs, act) - gaussian_logprob(b, obs, act)), 1.0);
}

TEST(Gaussian, SampleLogprobMatchesDensity) {
  std::mt19937_64 rng(11);
  const std::vector<std::size_t> hidden{8};
  auto h = GaussianPolicyHead::init(3, hidden, -0.5, rng);
  const std::vector<double> obs{0.5, 0.1, -0.2};
  for (int i = 0; i < 10; ++i) {
    const auto s = sample_action(h, obs, rng);
    EXPECT_NEAR(s.logprob, gaussian_logprob(h, obs, s.action), 1e-12);
  }
}

TEST(Gaussian, MinimumStdSampleStaysNearMean) {
  std::mt19937_64 init(12);
  const std::vector<std::size_t> hidden{8};
  auto h = GaussianPolicyHead::init(3, hidden, kLogStdMin, init);
  const std::vector<double> obs{0.5, 0.1, -0.2};
  const auto mean = mean_action(h, obs);
  std::mt19937_64 rng(42);
  const auto s = sample_action(h, obs, rng);
  EXPECT_LT(std::abs(s.action[0] - mean[0]), 0.1);
  EXPECT_LT(std::abs(s.action[1] - mean[1]), 0.1);
  // Golden draw for this seed: offsets are exp(-5) times a standard normal.
  std::mt19937_64 replay(42);
  std::normal_distribution<double> n;
  const double z0 = n(replay);
  const double z1 = n(replay);
  EXPECT_EQ(s.action[0], mean[0] + std::exp(kLogStdMin) * z0);
  EXPECT_EQ(s.action[1], mean[1] + std::exp(kLogStdMin) * z1);
}

TEST(Gaussian, SameSeedSameSample) {
  std::mt19937_64 init(12);
  const std::vector<std::size_t> hidden{8};
  auto h = GaussianPolicyHead::init(3, hidden, -0.5, init);
  const std::vector<double> obs{0.5, 0.1, -0.2};
  std::mt19937_64 r1(99), r2(99);
  const auto a = sample_action(h, obs, r1);
  const auto b = sample_action(h, obs, r2);
  EXPECT_EQ(a.action, b.action);
  EXPECT_EQ(a.logprob, b.logprob);
}

TEST(Gaussian, MonteCarloMeanWithinThreeStandardErrors) {
  std::mt19937_64 init(13);
  const std::vector<std::size_t> hidden{8};
  auto h = GaussianPolicyHead::init(3, hidden, -0.5, init);
  const std::vector<double> obs{0.5, 0.1, -0.2};
  const auto mean = mean_action(h, obs);
  std::mt19937_64 rng(7);
  const int n = 100000;
  std::array<double, 2> sum{};
  for (int i = 0; i < n; ++i) {
    const auto s = sample_action(h, obs, rng);
    sum[0] += s.action[0];
    sum[1] += s.action[1];
  }
  const double se = std::exp(-0.5) / std::sqrt(static_cast<double>(n));
  for (int d = 0; d < 2; ++d) EXPECT_LT(std::abs(sum[d] / n - mean[d]), 3.0 * se);
}

TEST(Gaussian, LogStdClampedToRange) {
  auto h = zero_head(0.0);
  h.log_std = {-9.0, 4.0};
  h.clamp_log_std();
  EXPECT_EQ(h.log_std[0], kLogStdMin);
  EXPECT_EQ(h.log_std[1], kLogStdMax);
}
