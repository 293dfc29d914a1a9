#include <gtest/gtest.h>

#include <algorithm>

#include "dtids/error.hpp"
#include "dtids/layers.hpp"
#include "dtids/network.hpp"
#include "dtids/training.hpp"
#include "test_support.hpp"

using namespace dtids;

namespace {

// Two well separated classes on 2 channels of length 8: class 1 has a
// positive offset.
Domain toy_domain(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Tensor x({n, 2, 8});
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = static_cast<int>(i % 2);
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t t = 0; t < 8; ++t) x.at(i, c, t) = rng.normal(labels[i] ? 1.5 : -1.5, 0.5);
  }
  return Domain(DomainRole::source, std::move(x), std::move(labels), 2);
}

Network small_fcn(std::uint64_t seed) { return build_baseline(ModelKind::fcn, 2, 8, 2, seed); }

std::vector<Tensor> trainable_values(Network& net) {
  std::vector<Tensor> out;
  for (const auto& s : net.params())
    if (s.trainable) out.push_back(*s.value);
  return out;
}

}  // namespace

TEST(Training, WithoutPatienceRunsEveryEpoch) {
  Network net = small_fcn(1);
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.patience = std::nullopt;
  const auto h = train(net, toy_domain(40, 1), toy_domain(20, 2), cfg);
  ASSERT_EQ(h.epochs.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(h.epochs[i].epoch, static_cast<int>(i + 1));
  EXPECT_EQ(h.best_epoch, 4);
  EXPECT_FALSE(h.stopped_early);
}

TEST(Training, ZeroLearningRateLeavesParametersUnchanged) {
  for (auto kind : {OptimizerKind::adam, OptimizerKind::adadelta}) {
    Network net = small_fcn(2);
    const auto before = trainable_values(net);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.patience = std::nullopt;
    cfg.optimizer = kind;
    cfg.set_learning_rate(0.0);
    cfg.batch_size = 64;  // one batch, so the per-epoch training loss is comparable
    const auto h = train(net, toy_domain(30, 3), toy_domain(10, 4), cfg);
    EXPECT_EQ(trainable_values(net), before);
    for (const auto& r : h.epochs) EXPECT_NEAR(r.train_loss, h.epochs.front().train_loss, 1e-12);
  }
}

TEST(Training, ZeroEpochsIsANoOp) {
  Network net = small_fcn(3);
  const auto before = net.snapshot();
  TrainConfig cfg;
  cfg.epochs = 0;
  const auto h = train(net, toy_domain(10, 1), toy_domain(10, 2), cfg);
  EXPECT_TRUE(h.epochs.empty());
  EXPECT_EQ(net.snapshot(), before);
}

TEST(Training, LearnsSeparableData) {
  Network net = small_fcn(4);
  TrainConfig cfg;
  cfg.epochs = 15;
  cfg.patience = std::nullopt;
  cfg.batch_size = 16;
  const auto h = train(net, toy_domain(64, 5), toy_domain(32, 6), cfg);
  EXPECT_GE(h.epochs.back().train_accuracy, 0.99);
  EXPECT_GE(h.epochs.back().val_accuracy, 0.95);
}

TEST(Training, EarlyStoppingRestoresBestParameters) {
  Network net = small_fcn(5);
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.patience = 3;
  cfg.batch_size = 8;
  cfg.adam.learning_rate = 0.05;  // noisy enough to stop early
  const Domain val = toy_domain(20, 8);
  const auto h = train(net, toy_domain(40, 7), val, cfg);
  ASSERT_FALSE(h.epochs.empty());
  double best = h.epochs.front().val_loss;
  for (const auto& r : h.epochs) best = std::min(best, r.val_loss);
  EXPECT_EQ(loss_and_accuracy(net, val).first, best);
  EXPECT_EQ(h.epochs[static_cast<std::size_t>(h.best_epoch - 1)].val_loss, best);
  if (h.stopped_early) EXPECT_EQ(static_cast<int>(h.epochs.size()), h.best_epoch + 3);
}

TEST(Training, SameSeedIsBitwiseDeterministic) {
  auto run = [] {
    Network net = small_fcn(6);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.patience = std::nullopt;
    cfg.batch_size = 8;
    cfg.seed = 11;
    auto h = train(net, toy_domain(30, 9), toy_domain(10, 10), cfg);
    return std::make_pair(h, net.snapshot());
  };
  const auto a = run(), b = run();
  ASSERT_EQ(a.first.epochs.size(), b.first.epochs.size());
  for (std::size_t i = 0; i < a.first.epochs.size(); ++i) {
    EXPECT_EQ(a.first.epochs[i].train_loss, b.first.epochs[i].train_loss);
    EXPECT_EQ(a.first.epochs[i].val_loss, b.first.epochs[i].val_loss);
    EXPECT_EQ(a.first.epochs[i].train_accuracy, b.first.epochs[i].train_accuracy);
  }
  EXPECT_EQ(a.second, b.second);
}

TEST(Training, DivergenceIsReported) {
  Network net = small_fcn(7);
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.patience = std::nullopt;
  cfg.optimizer = OptimizerKind::adadelta;
  cfg.adadelta.learning_rate = 1e305;
  EXPECT_THROW(train(net, toy_domain(20, 1), toy_domain(10, 2), cfg), DivergedError);
}

TEST(Training, ConfigValidation) {
  TrainConfig cfg;
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.epochs = 5;
  cfg.patience = 10;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.epochs = -1;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Training, GeometryMismatchIsShapeError) {
  Network net = build_baseline(ModelKind::fcn, 3, 8, 2, 1);
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.patience = std::nullopt;
  EXPECT_THROW(train(net, toy_domain(10, 1), toy_domain(10, 2), cfg), ShapeError);
}

TEST(Training, EvaluateReport) {
  Network net = small_fcn(8);
  const auto r = evaluate(net, toy_domain(20, 3));
  EXPECT_EQ(r.params, net.param_count());
  EXPECT_EQ(r.confusion.total(), 20u);
  EXPECT_GE(r.testing_seconds, 0.0);
  EXPECT_THROW(evaluate(net, Domain()), EvalError);
}

TEST(Training, CountParamsOfTinyMlp) {
  Rng rng(1);
  Sequential root;
  root.add("flatten", std::make_unique<FlattenLayer>());
  root.add("dense1", std::make_unique<DenseLayer>(2, 3, rng));
  root.add("relu", std::make_unique<ReluLayer>());
  root.add("dense2", std::make_unique<DenseLayer>(3, 2, rng));
  Network net(ArchSpec{ModelKind::mlp, 2, 1, 2, 128, 0}, std::move(root));
  EXPECT_EQ(count_params(net), 17u);
}

TEST(Training, TimeBlockMeasuresWallTime) {
  auto [value, seconds] = time_block([] { return 42; });
  EXPECT_EQ(value, 42);
  EXPECT_GE(seconds, 0.0);
}
