#include <gtest/gtest.h>

#include "dtids/error.hpp"
#include "dtids/layers.hpp"
#include "dtids/optimizer.hpp"
#include "test_support.hpp"

using namespace dtids;

namespace {

const std::vector<double> kGrads{0.5, -1.2, 0.3, 2.0, -0.7, 0.05, 1.1, -0.4};

}  // namespace

// Trajectories from a separate scalar implementation of the published update
// rules, starting at x = 1 with default hyperparameters.
TEST(Optimizer, AdamScalarTrajectory) {
  const std::vector<double> want{0.99900000002,       0.9994293414784341,  0.99960899352898591, 0.99920700883111158,
                                 0.99903341634501497, 0.99887339524547669, 0.99854155079372042, 0.99832397040310095};
  double x = 1.0;
  AdamState state;
  for (std::size_t t = 0; t < kGrads.size(); ++t) {
    adam_step(std::span(&x, 1), std::span(&kGrads[t], 1), state, {});
    EXPECT_NEAR(x, want[t], 1e-15) << "step " << t + 1;
  }
}

TEST(Optimizer, AdaDeltaScalarTrajectory) {
  const std::vector<double> want{0.9955280429197062,  1.0013876528050307,  0.99940773471869992, 0.99210831931166144,
                                 0.99535713718994345, 0.99511411776780301, 0.99027418108679288, 0.99218200686951885};
  double x = 1.0;
  AdaDeltaState state;
  for (std::size_t t = 0; t < kGrads.size(); ++t) {
    adadelta_step(std::span(&x, 1), std::span(&kGrads[t], 1), state, {});
    EXPECT_NEAR(x, want[t], 1e-15) << "step " << t + 1;
  }
}

TEST(Optimizer, ZeroGradientLeavesParametersUnchanged) {
  std::vector<double> p{1.0, -2.0, 3.5}, g(3, 0.0);
  const auto before = p;
  AdamState adam;
  AdaDeltaState adadelta;
  for (int i = 0; i < 5; ++i) {
    adam_step(p, g, adam, {});
    adadelta_step(p, g, adadelta, {});
  }
  EXPECT_EQ(p, before);
}

TEST(Optimizer, AdamFirstStepMovesAgainstGradientSign) {
  std::vector<double> p{0.0, 0.0}, g{3.0, -0.01};
  AdamState state;
  adam_step(p, g, state, {});
  EXPECT_LT(p[0], 0.0);
  EXPECT_GT(p[1], 0.0);
  EXPECT_NEAR(p[0], -1e-3, 1e-9);
}

TEST(Optimizer, StateSizeMismatchIsShapeError) {
  std::vector<double> p{1.0, 2.0}, g{1.0, 1.0};
  AdamState state;
  state.first_moment.assign(3, 0.0);
  state.second_moment.assign(3, 0.0);
  EXPECT_THROW(adam_step(p, g, state, {}), ShapeError);
}

TEST(Optimizer, StepSkipsFrozenSlotsAndKeepsShapes) {
  Rng rng(1);
  DenseLayer a(3, 2, rng), b(3, 2, rng);
  b.set_frozen(true);
  std::vector<ParamSlot> slots;
  a.collect("a", slots);
  b.collect("b", slots);
  for (auto& s : slots) s.grad->fill(1.0);
  const Tensor a_before = a.weights(), b_before = b.weights();
  for (auto kind : {OptimizerKind::adam, OptimizerKind::adadelta}) {
    Optimizer opt(kind);
    opt.step(slots);
  }
  EXPECT_NE(a.weights(), a_before);
  EXPECT_EQ(a.weights().shape(), a_before.shape());
  EXPECT_EQ(b.weights(), b_before);
}

TEST(Optimizer, ParseNames) {
  EXPECT_EQ(parse_optimizer("adam"), OptimizerKind::adam);
  EXPECT_EQ(parse_optimizer("adadelta"), OptimizerKind::adadelta);
  EXPECT_THROW(parse_optimizer("sgd"), ConfigError);
}
