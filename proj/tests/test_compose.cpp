#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "barronlab/compose.hpp"
#include "barronlab/errors.hpp"

using namespace barronlab;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Eigen::Matrix2d rotation(double t) {
  Eigen::Matrix2d r;
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

std::vector<LayerSpec> sine_chain(double s) {
  std::vector<LayerSpec> layers;
  layers.push_back(sine_layer("f1", rotation(0.6), Eigen::Vector2d(0.3, -0.2), 0.7, 1.0 + s));
  layers.push_back(
      sine_layer("f2", rotation(-1.1), Eigen::Vector2d(-0.4, 0.5), 0.7, layers[0].out_radius + s));
  return layers;
}

TwoLayerNet random_net(int in, int k, Rng& rng) {
  std::normal_distribution<double> normal;
  TwoLayerNet f;
  f.input_dim = in;
  f.a = MatrixXd(in, k);
  f.b = VectorXd(k);
  f.c = VectorXd(k);
  for (int t = 0; t < k; ++t) {
    for (int d = 0; d < in; ++d) f.a(d, t) = normal(rng);
    f.b[t] = normal(rng);
    f.c[t] = normal(rng);
  }
  f.c0 = normal(rng);
  return f;
}

// Both the small l = 2 build and its plan, shared by several tests.
struct ChainFixture {
  std::vector<LayerSpec> layers = sine_chain(1.0);
  ComposePlan plan = make_plan(layers, 1.0, 1.0, 1.0, uniform_ball_sampler(2, 1.0), 2000);
  ComposeResult result = build_layered(plan, layers, 11);
};

const ChainFixture& chain() {
  static const ChainFixture f;
  return f;
}

}  // namespace

TEST(ComposePlan, NodeCountsFollowCeilingFormula) {
  EXPECT_EQ(node_count(1.0, 2, 0.5), 32);
  EXPECT_EQ(node_count(0.7, 1, 0.3), 22);  // 21.78 rounds up
  EXPECT_EQ(node_count(1.0, 1, 2.0), 1);
  EXPECT_THROW(node_count(0.0, 1, 1.0), InvalidInput);

  const std::vector<LayerSpec> layers = sine_chain(1.0);
  ComposePlan plan = make_plan(layers, 1.0, 0.5, 1.0, uniform_ball_sampler(2, 1.0));
  for (int i = 0; i < plan.depth(); ++i) {
    EXPECT_EQ(plan.node_counts[i], node_count(plan.barron[i], plan.out_dims[i], 0.5));
  }
  EXPECT_DOUBLE_EQ(plan.diameter, 2.0 * layers.back().out_radius);
  plan.node_counts[0] += 1;
  EXPECT_THROW(plan.validate(), InvalidInput);
}

TEST(ComposePlan, RejectsBadLayers) {
  std::vector<LayerSpec> layers = sine_chain(1.0);
  layers[1].lipschitz = 1.5;
  EXPECT_THROW(make_plan(layers, 1.0, 0.5, 1.0, uniform_ball_sampler(2, 1.0)), InvalidInput);
  layers = sine_chain(1.0);
  layers[1].in_dim = 3;
  EXPECT_THROW(make_plan(layers, 1.0, 0.5, 1.0, uniform_ball_sampler(2, 1.0)), InvalidInput);
  EXPECT_THROW(make_plan(sine_chain(1.0), 0.0, 0.5, 1.0, uniform_ball_sampler(2, 1.0)),
               InvalidInput);
}

TEST(SineLayer, ConstantsAndContainment) {
  const LayerSpec L = sine_layer("f", 0.5 * rotation(0.3), Eigen::Vector2d(0.1, 0.2), 0.8, 2.0);
  EXPECT_NEAR(L.lipschitz, 0.4, 1e-12);
  EXPECT_NEAR(L.barron, 0.8 * 0.5 * 2.0, 1e-12);
  Rng rng(5);
  const MatrixXd X = uniform_ball_sampler(2, 2.0)(500, rng);
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    EXPECT_LE(X.col(j).norm(), 2.0);
    EXPECT_LE(L.map(X.col(j)).norm(), L.out_radius + 1e-12);
  }
}

TEST(ErrorBound, LimitsAndScaling) {
  const std::vector<LayerSpec> one{sine_chain(1.0)[0]};
  const ComposePlan p1 = make_plan(one, 1.0, 0.5, 1.0, uniform_ball_sampler(2, 1.0));
  const double range = 2.0 * p1.barron[0] * std::sqrt(2.0) + p1.diameter;
  EXPECT_NEAR(error_bound(p1), 0.5 * std::sqrt(range * range / 3.0 + 1.0), 1e-12);

  ComposePlan p2 = make_plan(sine_chain(1.0), 1.0, 0.5, 1.0, uniform_ball_sampler(2, 1.0));
  p2.margin = 1e9;
  EXPECT_NEAR(error_bound(p2), 2.0 * 0.5, 1e-9);

  const std::vector<LayerSpec> layers = sine_chain(1.0);
  const ComposePlan a = make_plan(layers, 1.0, 0.5, 1.0, uniform_ball_sampler(2, 1.0));
  const ComposePlan b = make_plan(layers, 1.0, 1.0, 1.0, uniform_ball_sampler(2, 1.0));
  EXPECT_NEAR(error_bound(b), 2.0 * error_bound(a), 1e-12);
}

TEST(Collapse, MatchesChainedEvaluation) {
  Rng rng(3);
  std::vector<std::vector<TwoLayerNet>> blocks(3);
  const std::vector<int> dims{2, 3, 2, 1};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < dims[i + 1]; ++j) blocks[i].push_back(random_net(dims[i], 4 + i + j, rng));
  }
  LayeredNet net = collapse(blocks, 2, Activation::logistic);
  net.shift = VectorXd::Constant(1, 0.25);
  EXPECT_EQ(net.depth(), 3);
  EXPECT_EQ(net.output_dim(), 1);
  std::normal_distribution<double> normal;
  MatrixXd X(2, 1000);
  for (Eigen::Index j = 0; j < X.cols(); ++j) X.col(j) << normal(rng), normal(rng);
  const MatrixXd collapsed = net.evaluate(X);
  const MatrixXd chained = net.evaluate_chain(X);
  EXPECT_LE((collapsed - chained).cwiseAbs().maxCoeff(), 1e-12);
  // Chained by hand, independent of evaluate_chain.
  for (Eigen::Index j = 0; j < 5; ++j) {
    VectorXd y = X.col(j);
    for (const auto& block : blocks) {
      VectorXd next(block.size());
      for (std::size_t k = 0; k < block.size(); ++k) next[k] = eval_net(block[k], y);
      y = next;
    }
    EXPECT_NEAR(collapsed(0, j), y[0] + 0.25, 1e-12);
  }
}

TEST(Collapse, DimensionMismatchThrows) {
  Rng rng(4);
  std::vector<std::vector<TwoLayerNet>> blocks(2);
  blocks[0].push_back(random_net(2, 3, rng));
  blocks[1].push_back(random_net(2, 3, rng));  // expects 1 input
  EXPECT_THROW(collapse(blocks, 2, Activation::logistic), InvalidInput);
  EXPECT_THROW(collapse({}, 2, Activation::logistic), InvalidInput);
}

TEST(RecenteringShift, ZeroMeanAndConstantOffset) {
  Rng rng(6);
  LayeredNet net = collapse({{random_net(2, 3, rng), random_net(2, 3, rng)}}, 2, Activation::logistic);
  std::normal_distribution<double> normal;
  MatrixXd X(2, 200);
  for (Eigen::Index j = 0; j < X.cols(); ++j) X.col(j) << normal(rng), normal(rng);
  const std::vector<bool> all(200, true);
  const MatrixXd G = net.evaluate(X);

  // Residuals r_j = ±e with mean zero.
  MatrixXd targets = G;
  for (Eigen::Index j = 0; j < X.cols(); ++j) targets.col(j) += (j % 2 ? 1.0 : -1.0) * VectorXd::Ones(2);
  LayeredNet copy = net;
  EXPECT_LE(recentering_shift(copy, X, targets, all).norm(), 1e-12);

  // Constant offset v plus mean-zero noise: shift v, RMS drops to the centred value.
  const Eigen::Vector2d v(0.7, -1.3);
  MatrixXd shifted = targets;
  shifted.colwise() += v;
  const double before = std::sqrt((shifted - G).colwise().squaredNorm().mean());
  copy = net;
  const VectorXd k = recentering_shift(copy, X, shifted, all);
  EXPECT_NEAR((k - v).norm(), 0.0, 1e-12);
  const MatrixXd after_g = copy.evaluate(X);
  const double after = std::sqrt((shifted - after_g).colwise().squaredNorm().mean());
  EXPECT_LT(after, before);
  EXPECT_NEAR(after, std::sqrt(2.0), 1e-12);

  EXPECT_THROW(recentering_shift(copy, X, shifted, std::vector<bool>(200, false)), InvalidInput);
}

TEST(BuildLayered, SingleLayerIsVectorFit) {
  const std::vector<LayerSpec> one{sine_chain(1.0)[0]};
  const ComposePlan plan = make_plan(one, 1.0, 1.0, 1.0, uniform_ball_sampler(2, 1.0), 500);
  const ComposeResult r = build_layered(plan, one, 21);
  const MatrixXd X = draw_base_samples(plan, 21);
  MatrixXd Y(2, X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) Y.col(j) = one[0].map(X.col(j));
  const VectorFit direct = vector_fit(X, Y, VectorXd::Constant(X.cols(), 1.0 / X.cols()),
                                      plan.barron[0], plan.node_counts[0], plan.activation,
                                      layer_seed(21, 0), plan.fit);
  ASSERT_EQ(r.net.blocks.size(), 1u);
  EXPECT_EQ(r.net.blocks[0], direct.nets);
  EXPECT_EQ(r.ledger.excluded_fraction[0], 0.0);
  EXPECT_EQ(r.ledger.exclusion_bound[0], 0.0);
}

TEST(BuildLayered, TwoLayerChainMeetsItsGuarantees) {
  const ChainFixture& f = chain();
  const ErrorLedger& L = f.result.ledger;
  const double eps = f.plan.accuracy;
  ASSERT_EQ(L.fit_rms.size(), 2u);
  EXPECT_LE(L.on_s_rms, 2.0 * eps);
  for (std::size_t i = 0; i < L.excluded_fraction.size(); ++i) {
    EXPECT_LE(L.excluded_fraction[i], L.exclusion_bound[i] + L.exclusion_slack[i] + 1e-12);
  }
  EXPECT_DOUBLE_EQ(L.exclusion_bound[1], eps * eps / (f.plan.margin * f.plan.margin));
  EXPECT_LE(L.unconditional_rms, L.main_bound);
  EXPECT_NEAR(L.main_bound, error_bound(f.plan), 1e-15);
  // Term split of the unconditional error.
  const double excluded = L.excluded_fraction.back();
  EXPECT_LE(L.unconditional_rms,
            std::sqrt(L.on_s_rms * L.on_s_rms + L.range_theory * L.range_theory * excluded) + 1e-12);
  EXPECT_LE(L.range_measured, L.range_theory);
  // Collapsed equals chained on the training samples.
  EXPECT_LE((f.result.net.evaluate(f.result.samples) - f.result.net.evaluate_chain(f.result.samples))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
}

TEST(BuildLayered, SurvivorSetsAreNested) {
  const ChainFixture& f = chain();
  // A margin so small that filtering bites, applied to the trained net.
  ComposePlan tight = f.plan;
  tight.margin = 1e-6;
  std::vector<LayerSpec> shrunk = f.layers;
  shrunk[0].out_radius = 0.6;
  std::vector<int> counts;
  const std::vector<bool> mask = surviving_set(f.result.net, shrunk, tight, f.result.samples, &counts);
  ASSERT_EQ(counts.size(), 2u);
  EXPECT_LE(counts[1], counts[0]);
  EXPECT_LT(counts[1], counts[0]);
  EXPECT_EQ(std::count(mask.begin(), mask.end(), true), counts.back());
}

TEST(BuildLayered, MarkovStepHoldsOnSamples) {
  const ChainFixture& f = chain();
  const MatrixXd& X = f.result.samples;
  const MatrixXd g1 = f.result.net.evaluate_chain(X, 1);
  MatrixXd f1(2, X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) f1.col(j) = f.layers[0].map(X.col(j));
  const VectorXd sq = (f1 - g1).colwise().squaredNorm().transpose();
  const double mse = sq.mean();
  for (double s : {std::sqrt(mse), 2.0 * std::sqrt(mse), 4.0 * std::sqrt(mse)}) {
    const double frac = (sq.array() >= s * s).cast<double>().mean();
    const double p = std::min(mse / (s * s), 1.0);
    EXPECT_LE(frac, p + 3.0 * std::sqrt(p * (1.0 - p) / X.cols()) + 1e-12);
  }
}

TEST(MeasuredError, HoldoutCloseToTrainingAndOracleIsZero) {
  const ChainFixture& f = chain();
  const MatrixXd fresh = draw_base_samples(f.plan, 12345);
  const MeasuredError m = measured_error(f.result.net, f.layers, f.plan, fresh);
  EXPECT_LE(m.unconditional_rms, m.bound);
  EXPECT_LE(m.on_s_rms, m.unconditional_rms + 1e-15);
  EXPECT_LT(std::abs(m.on_s_rms - f.result.ledger.on_s_rms), 0.2 * f.result.ledger.on_s_rms);

  // Oracle injection: target and network are both the zero map.
  const TwoLayerNet zero{2, MatrixXd::Zero(2, 1), VectorXd::Zero(1), VectorXd::Zero(1), 0.0};
  const LayeredNet zero_layer = collapse({{zero, zero}}, 2, Activation::logistic);
  std::vector<LayerSpec> zero_map{f.layers[0]};
  zero_map[0].map = [](const VectorXd&) { return VectorXd::Zero(2); };
  const ComposePlan p1 = make_plan(zero_map, 1.0, 1.0, 1.0, uniform_ball_sampler(2, 1.0), 100);
  const MeasuredError z = measured_error(zero_layer, zero_map, p1, draw_base_samples(p1, 1));
  EXPECT_EQ(z.on_s_rms, 0.0);
  EXPECT_EQ(z.unconditional_rms, 0.0);
}

TEST(WassersteinCertificate, ChainOfInequalities) {
  const ChainFixture& f = chain();
  const MatrixXd fresh = draw_base_samples(f.plan, 777);
  const WassersteinCertificate w = wasserstein_certificate(f.result.net, f.layers, f.plan, fresh, 300);
  EXPECT_EQ(w.subsample, 300);
  EXPECT_LE(w.exact_w2, w.subsample_coupling + 1e-12);
  EXPECT_LE(w.coupling_bound, w.main_bound);
  EXPECT_THROW(wasserstein_certificate(f.result.net, f.layers, f.plan, fresh, 1500), InvalidInput);
}

TEST(WassersteinCertificate, IdenticalMapsGiveZero) {
  std::vector<LayerSpec> zero_map{sine_chain(1.0)[0]};
  zero_map[0].map = [](const VectorXd&) { return VectorXd::Zero(2); };
  const ComposePlan p = make_plan(zero_map, 1.0, 1.0, 1.0, uniform_ball_sampler(2, 1.0), 50);
  TwoLayerNet zero{2, MatrixXd::Zero(2, 1), VectorXd::Zero(1), VectorXd::Zero(1), 0.0};
  const LayeredNet net = collapse({{zero, zero}}, 2, Activation::logistic);
  const WassersteinCertificate w = wasserstein_certificate(net, zero_map, p, draw_base_samples(p, 2));
  EXPECT_EQ(w.coupling_bound, 0.0);
  EXPECT_NEAR(w.exact_w2, 0.0, 1e-12);
}

TEST(BuildLayered, DeterministicForFixedSeed) {
  const std::vector<LayerSpec> one{sine_chain(1.0)[0]};
  const ComposePlan plan = make_plan(one, 1.0, 1.0, 1.0, uniform_ball_sampler(2, 1.0), 300);
  const ComposeResult a = build_layered(plan, one, 5);
  const ComposeResult b = build_layered(plan, one, 5);
  EXPECT_EQ(a.net, b.net);
  EXPECT_EQ(a.ledger.on_s_rms, b.ledger.on_s_rms);
}

TEST(BuildLayered, BaseSamplesMustLieInK0) {
  std::vector<LayerSpec> one{sine_chain(1.0)[0]};
  const ComposePlan plan = make_plan(one, 1.0, 1.0, 0.5, uniform_ball_sampler(2, 1.0), 100);
  EXPECT_THROW(build_layered(plan, one, 1), InvalidInput);
}
