#include <gtest/gtest.h>

#include "dtids/error.hpp"
#include "dtids/kernels.hpp"
#include "dtids/network.hpp"
#include "gradient_check.hpp"

using namespace dtids;
using dtids::testing::GradientCheck;
using dtids::testing::random_tensor;

namespace {

void expect_probabilities(const Tensor& p, std::size_t classes) {
  ASSERT_EQ(p.dim(1), classes);
  for (std::size_t i = 0; i < p.dim(0); ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      EXPECT_GE(p.at(i, c), 0.0);
      s += p.at(i, c);
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

std::size_t conv_count(std::size_t in, std::size_t out, std::size_t k) { return out * in * k + out; }
std::size_t bn_count(std::size_t c) { return 4 * c; }
std::size_t dense_count(std::size_t in, std::size_t out) { return out * in + out; }

// Analytic count of the four residual blocks on `in` channels.
std::size_t residual_stack_count(std::size_t in) {
  std::size_t total = 0;
  for (const auto& b : kResidualBlocks) {
    total += conv_count(in, b.filters, b.kernel) + bn_count(b.filters);
    if (in != b.filters) total += conv_count(in, b.filters, 1);
    in = b.filters;
  }
  return total;
}

}  // namespace

TEST(Network, PresnetOutputsProbabilities) {
  Network net = build_presnet(7, 10, 2, 1);
  Rng rng(1);
  expect_probabilities(net.forward(random_tensor({3, 7, 10}, rng)), 2);
}

TEST(Network, PresnetParamCountMatchesAnalyticFormula) {
  for (std::size_t channels : {1u, 2u, 7u}) {
    for (std::size_t classes : {2u, 10u}) {
      Network net = build_presnet(channels, 10, classes, 3);
      EXPECT_EQ(net.param_count(), residual_stack_count(channels) + dense_count(128, classes));
      EXPECT_EQ(net.param_count(), build_presnet(channels, 10, classes, 99).param_count());
    }
  }
  // Single channel, window 10, two classes.
  EXPECT_EQ(build_presnet(1, 10, 2, 0).param_count(), 405698u);
}

TEST(Network, SingleChannelDnn) {
  Network net = build_single_channel_dnn(10, 2, 5);
  EXPECT_EQ(net.hidden_blocks().size(), 4u);
  EXPECT_EQ(net.param_count(), bn_count(1) + residual_stack_count(1) + dense_count(128, 2));
  Rng rng(2);
  expect_probabilities(net.forward(random_tensor({4, 1, 10}, rng)), 2);
}

TEST(Network, MultiChannelDnn) {
  for (std::size_t s : {1u, 3u, 7u}) {
    Network net = build_multi_channel_dnn(s, 10, 2, 5);
    EXPECT_EQ(net.branch_count(), s);
    EXPECT_EQ(net.param_count(), bn_count(s) + s * residual_stack_count(1) + dense_count(128 * s, 128) +
                                     dense_count(128, 2));
    Rng rng(3);
    expect_probabilities(net.forward(random_tensor({2, s, 10}, rng)), 2);
    EXPECT_NE(std::find(net.layer_specs().begin(), net.layer_specs().end(),
                        "concat features=" + std::to_string(128 * s)),
              net.layer_specs().end());
  }
  EXPECT_THROW(build_multi_channel_dnn(0, 10, 2, 1), ConfigError);
}

TEST(Network, BranchStackMatchesSingleHiddenStack) {
  Network single = build_single_channel_dnn(10, 2, 1);
  Network multi = build_multi_channel_dnn(1, 10, 2, 2);
  auto a = single.hidden_blocks();
  auto b = multi.branch_blocks(0);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    std::vector<ParamSlot> sa, sb;
    a[j]->collect("", sa);
    b[j]->collect("", sb);
    ASSERT_EQ(sa.size(), sb.size());
    for (std::size_t i = 0; i < sa.size(); ++i) {
      EXPECT_EQ(sa[i].name, sb[i].name);
      EXPECT_EQ(sa[i].value->shape(), sb[i].value->shape());
    }
  }
}

TEST(Network, Baselines) {
  Rng rng(4);
  for (auto kind : {ModelKind::mlp, ModelKind::fcn}) {
    Network net = build_baseline(kind, 3, 10, 2, 1);
    expect_probabilities(net.forward(random_tensor({2, 3, 10}, rng)), 2);
    const auto specs = net.layer_specs();
    const auto has = [&](std::string_view prefix) {
      return std::any_of(specs.begin(), specs.end(), [&](const std::string& s) { return s.rfind(prefix, 0) == 0; });
    };
    if (kind == ModelKind::mlp) {
      EXPECT_FALSE(has("conv1d"));
      EXPECT_EQ(net.param_count(), dense_count(30, 500) + 2 * dense_count(500, 500) + dense_count(500, 2));
    } else {
      EXPECT_EQ(std::count_if(specs.begin(), specs.end(), [](const std::string& s) { return s.rfind("dense", 0) == 0; }), 1);
      EXPECT_EQ(net.param_count(), conv_count(3, 128, 8) + bn_count(128) + conv_count(128, 256, 5) + bn_count(256) +
                                       conv_count(256, 128, 3) + bn_count(128) + dense_count(128, 2));
    }
  }
  EXPECT_THROW(build_baseline(ModelKind::presnet, 1, 10, 2, 1), ConfigError);
  EXPECT_THROW(parse_model_kind("lenet"), ConfigError);
}

TEST(Network, WindowBelowKernelIsConfigError) {
  EXPECT_THROW(build_presnet(1, 7, 2, 1), ConfigError);
  EXPECT_THROW(build_single_channel_dnn(4, 2, 1), ConfigError);
  EXPECT_THROW(build_presnet(1, 10, 1, 1), ConfigError);
}

TEST(Network, GeometryMismatchIsShapeError) {
  Network net = build_presnet(2, 10, 2, 1);
  EXPECT_THROW(net.forward(Tensor({1, 3, 10})), ShapeError);
  EXPECT_THROW(net.forward(Tensor({1, 2, 11})), ShapeError);
}

TEST(Network, SameSeedSameParameters) {
  Network a = build_presnet(2, 10, 2, 42), b = build_presnet(2, 10, 2, 42), c = build_presnet(2, 10, 2, 43);
  EXPECT_EQ(a.snapshot(), b.snapshot());
  EXPECT_NE(a.snapshot(), c.snapshot());
}

TEST(Network, ZeroFinalDenseGivesUniformProbabilities) {
  Network net = build_presnet(2, 10, 3, 1);
  auto slots = net.params();
  slots[slots.size() - 2].value->fill(0.0);
  slots[slots.size() - 1].value->fill(0.0);
  Rng rng(5);
  const Tensor p = net.forward(random_tensor({2, 2, 10}, rng));
  for (double v : p.data()) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
}

TEST(Network, ArchSpecTextRoundTrip) {
  ArchSpec spec{ModelKind::multi_channel, 7, 12, 2, 64, 99};
  EXPECT_EQ(ArchSpec::from_text(spec.to_text()), spec);
  EXPECT_THROW(ArchSpec::from_text("kind = presnet\n"), FormatError);
}

TEST(Network, CopyIsIndependent) {
  Network a = build_presnet(1, 10, 2, 1);
  Network b = a;
  (*a.params()[0].value)[0] += 1.0;
  EXPECT_NE((*a.params()[0].value)[0], (*b.params()[0].value)[0]);
}

TEST(Network, EndToEndGradientToyPresnet) {
  // Full P-ResNet at toy geometry: window 10, 2 channels, 2 classes.
  GradientCheck total;
  for (int seed = 0; seed < 20; ++seed) {
    Network net = build_presnet(2, 10, 2, static_cast<std::uint64_t>(seed));
    Rng rng(static_cast<std::uint64_t>(7000 + seed));
    const Tensor x = random_tensor({4, 2, 10}, rng);
    const std::vector<int> labels{0, 1, 1, 0};
    const auto c = dtids::testing::network_gradient_check(net, x, labels, rng, 4);
    EXPECT_LT(c.worst, 1e-5) << "seed " << seed;
    total.merge(c);
  }
  EXPECT_TRUE(total.kinks_rare()) << total.kinks << " of " << total.checked;
}

TEST(Network, EndToEndGradientMultiChannel) {
  GradientCheck total;
  for (int seed = 0; seed < 3; ++seed) {
    Network net = build_multi_channel_dnn(2, 8, 2, static_cast<std::uint64_t>(seed), 16);
    Rng rng(static_cast<std::uint64_t>(8000 + seed));
    const Tensor x = random_tensor({3, 2, 8}, rng);
    const auto c = dtids::testing::network_gradient_check(net, x, {1, 0, 1}, rng, 3);
    EXPECT_LT(c.worst, 1e-5) << "seed " << seed;
    total.merge(c);
  }
  EXPECT_TRUE(total.kinks_rare()) << total.kinks << " of " << total.checked;
}
