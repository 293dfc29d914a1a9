#include "dtids/transfer.hpp"

#include <algorithm>
#include <string>

#include "dtids/error.hpp"
#include "dtids/split.hpp"

namespace dtids {

void SegmentationConfig::validate() const {
  if (window < kMaxKernel) {
    throw ConfigError("window length " + std::to_string(window) + " is below the largest kernel (" +
                      std::to_string(kMaxKernel) + ")");
  }
  if (stride < 1) throw ConfigError("stride must be >= 1");
}

std::vector<std::size_t> segment_offsets(std::size_t total, const SegmentationConfig& cfg) {
  if (cfg.stride < 1 || cfg.window < 1) throw ConfigError("window and stride must be positive");
  std::vector<std::size_t> offsets;
  if (total < cfg.window) return offsets;
  for (std::size_t start = 0; start + cfg.window <= total; start += cfg.stride) {
    offsets.push_back(start);
  }
  return offsets;
}

std::vector<Tensor> segment(std::span<const double> series, const SegmentationConfig& cfg) {
  if (series.size() < cfg.window) {
    throw EmptyDomainError("series of length " + std::to_string(series.size()) +
                           " is shorter than the window " + std::to_string(cfg.window));
  }
  std::vector<Tensor> out;
  for (auto start : segment_offsets(series.size(), cfg)) {
    out.emplace_back(Shape{cfg.window},
                     std::vector<double>(series.begin() + static_cast<std::ptrdiff_t>(start),
                                         series.begin() + static_cast<std::ptrdiff_t>(start + cfg.window)));
  }
  return out;
}

int window_label(std::span<const int> labels) {
  std::size_t normal = 0;
  for (int y : labels) normal += y == kNormalLabel ? 1 : 0;
  return 2 * normal > labels.size() ? kNormalLabel : kAttackLabel;
}

Domain build_source_domain(std::span<const LabeledSeries> datasets, const SegmentationConfig& cfg) {
  cfg.validate();
  if (datasets.empty()) throw EmptyDomainError("source domain needs at least one dataset");
  std::vector<double> values;
  std::vector<int> labels;
  std::vector<std::size_t> provenance;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    const auto& ds = datasets[d];
    if (ds.labels.size() != ds.values.size()) {
      throw ShapeError("dataset " + std::to_string(d) + ": one label per sample required");
    }
    for (auto start : segment_offsets(ds.values.size(), cfg)) {
      values.insert(values.end(), ds.values.begin() + static_cast<std::ptrdiff_t>(start),
                    ds.values.begin() + static_cast<std::ptrdiff_t>(start + cfg.window));
      labels.push_back(window_label(std::span(ds.labels).subspan(start, cfg.window)));
      provenance.push_back(d);
    }
  }
  if (labels.empty()) throw EmptyDomainError("no source segments: every dataset is shorter than the window");
  const std::size_t count = labels.size();
  return Domain(DomainRole::source, Tensor({count, 1, cfg.window}, std::move(values)),
                std::move(labels), 2, std::move(provenance));
}

Domain build_target_domain(const MultiChannelSeries& series, const SegmentationConfig& cfg) {
  cfg.validate();
  const std::size_t channels = series.channels.size();
  if (channels == 0) throw EmptyDomainError("target series has no channels");
  const std::size_t total = series.labels.size();
  for (const auto& ch : series.channels) {
    if (ch.size() != total) throw ShapeError("target channels must share the label length");
  }
  const auto offsets = segment_offsets(total, cfg);
  if (offsets.empty()) throw EmptyDomainError("target series is shorter than the window");
  Tensor x({offsets.size(), channels, cfg.window});
  std::vector<int> labels;
  for (std::size_t s = 0; s < offsets.size(); ++s) {
    for (std::size_t c = 0; c < channels; ++c) {
      std::copy_n(series.channels[c].begin() + static_cast<std::ptrdiff_t>(offsets[s]), cfg.window,
                  x.raw() + (s * channels + c) * cfg.window);
    }
    labels.push_back(window_label(std::span(series.labels).subspan(offsets[s], cfg.window)));
  }
  return Domain(DomainRole::target, std::move(x), std::move(labels), 2);
}

std::string_view to_string(FreezePolicy policy) {
  switch (policy) {
    case FreezePolicy::frozen: return "frozen";
    case FreezePolicy::fine_tune_all: return "all";
    case FreezePolicy::head_only: return "head";
  }
  return "unknown";
}

FreezePolicy parse_freeze_policy(std::string_view name) {
  if (name == "all" || name == "fine-tune-all") return FreezePolicy::fine_tune_all;
  if (name == "head" || name == "fine-tune-head-only") return FreezePolicy::head_only;
  if (name == "frozen") return FreezePolicy::frozen;
  throw ConfigError("unknown freeze policy '" + std::string(name) + "' (expected all, head or frozen)");
}

TransferPlan TransferPlan::one_to_one(std::size_t hidden_layers, std::size_t branches,
                                      FreezePolicy policy) {
  TransferPlan plan;
  plan.policy = policy;
  for (std::size_t k = 0; k < branches; ++k) {
    for (std::size_t j = 0; j < hidden_layers; ++j) plan.mappings.push_back({j, k, j});
  }
  return plan;
}

void TransferPlan::validate(std::size_t hidden_layers, std::size_t branches) const {
  std::vector<int> covered(hidden_layers * branches, 0);
  for (const auto& m : mappings) {
    if (m.source_block >= hidden_layers || m.branch_block >= hidden_layers || m.branch >= branches) {
      throw TransferError("transfer plan refers to a layer that does not exist");
    }
    ++covered[m.branch * hidden_layers + m.branch_block];
  }
  for (std::size_t i = 0; i < covered.size(); ++i) {
    if (covered[i] != 1) {
      throw TransferError("transfer plan must cover branch " + std::to_string(i / hidden_layers + 1) +
                          " layer " + std::to_string(i % hidden_layers + 1) + " exactly once");
    }
  }
}

History train_source(Network& single, const Domain& source, const TrainConfig& cfg) {
  if (source.empty()) throw EmptyDomainError("source domain is empty");
  if (source.channels() != 1) {
    throw ShapeError("source pre-training needs single-channel segments, got " +
                     std::to_string(source.channels()) + " channels");
  }
  if (cfg.epochs == 0) return {};
  const auto split = stratified_split(source.labels(), cfg.seed, 0.2, 0.0);
  return train(single, source.subset(split.train), source.subset(split.test), cfg);
}

void transfer_weights(Network& single, Network& multi, const TransferPlan& plan) {
  auto hidden = single.hidden_blocks();
  const std::size_t branches = multi.branch_count();
  if (hidden.empty()) throw TransferError("source network has no hidden residual layers");
  if (branches == 0) throw TransferError("destination network has no branches");
  plan.validate(hidden.size(), branches);

  for (const auto& m : plan.mappings) {
    auto branch = multi.branch_blocks(m.branch);
    if (branch.size() != hidden.size()) {
      throw TransferError("branch " + std::to_string(m.branch + 1) + " has " +
                          std::to_string(branch.size()) + " hidden layers, source has " +
                          std::to_string(hidden.size()));
    }
    std::vector<ParamSlot> from, to;
    hidden[m.source_block]->collect("", from);
    branch[m.branch_block]->collect("", to);
    if (from.size() != to.size()) {
      throw TransferError("hidden layer " + std::to_string(m.source_block + 1) +
                          " does not match branch layer structure");
    }
    for (std::size_t i = 0; i < from.size(); ++i) {
      if (from[i].name != to[i].name || from[i].value->shape() != to[i].value->shape()) {
        throw TransferError("cannot transfer '" + from[i].name + "' " +
                            shape_string(from[i].value->shape()) + " into '" + to[i].name + "' " +
                            shape_string(to[i].value->shape()));
      }
      *to[i].value = *from[i].value;
    }
  }
}

History fine_tune(Network& multi, const Domain& target_train, const Domain& target_val,
                  const TransferPlan& plan, const TrainConfig& cfg) {
  const std::size_t branches = multi.branch_count();
  if (branches == 0) throw TransferError("fine-tuning needs a multi-channel network");
  if (target_train.channels() != branches) {
    throw ShapeError("target has " + std::to_string(target_train.channels()) + " channels but the network has " +
                     std::to_string(branches) + " branches");
  }
  Sequential& root = multi.root();
  switch (plan.policy) {
    case FreezePolicy::fine_tune_all:
      root.set_frozen(false);
      break;
    case FreezePolicy::frozen:
      root.set_frozen(true);
      break;
    case FreezePolicy::head_only:
      root.set_frozen(false);
      for (std::size_t i = 0; i < root.size(); ++i) {
        if (auto* b = dynamic_cast<BranchConcat*>(&root.at(i))) b->set_frozen(true);
      }
      break;
  }
  History h = train(multi, target_train, target_val, cfg);
  root.set_frozen(false);
  return h;
}

double mmd(const Tensor& source_features, const Tensor& target_features) {
  expect_rank(source_features, 2, "mmd source features");
  expect_rank(target_features, 2, "mmd target features");
  const std::size_t n = source_features.dim(0), m = target_features.dim(0);
  const std::size_t d = source_features.dim(1);
  if (target_features.dim(1) != d) throw ShapeError("mmd: feature dimensions differ");
  std::vector<double> mean_s(d, 0.0), mean_t(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) mean_s[k] += source_features.at(i, k);
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < d; ++k) mean_t[k] += target_features.at(i, k);
  }
  double dist = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double diff = mean_s[k] / static_cast<double>(n) - mean_t[k] / static_cast<double>(m);
    dist += diff * diff;
  }
  return dist;
}

double mmd(const Domain& source, const Domain& target) {
  if (source.empty() || target.empty()) throw EmptyDomainError("mmd needs two non-empty domains");
  const Tensor& xs = source.x();
  const Tensor& xt = target.x();
  return mmd(xs.reshaped({xs.dim(0), xs.dim(1) * xs.dim(2)}),
             xt.reshaped({xt.dim(0), xt.dim(1) * xt.dim(2)}));
}

Tensor pooled_features(Network& net, const Tensor& batch) {
  if (batch.rank() != 3 || batch.dim(1) != net.spec().channels || batch.dim(2) != net.spec().window) {
    throw ShapeError("pooled_features: batch " + shape_string(batch.shape()) +
                     " does not match the network input");
  }
  Sequential& root = net.root();
  Tensor x = batch;
  for (std::size_t i = 0; i < root.size(); ++i) {
    Layer& layer = root.at(i);
    x = layer.forward(x, Mode::infer);
    if (dynamic_cast<GlobalAveragePoolLayer*>(&layer) || dynamic_cast<BranchConcat*>(&layer)) {
      return x;
    }
  }
  throw ShapeError("network has no pooling layer");
}

double mmd(const Domain& source, const Domain& target, Network& feature_net) {
  if (source.empty() || target.empty()) throw EmptyDomainError("mmd needs two non-empty domains");
  return mmd(pooled_features(feature_net, source.x()), pooled_features(feature_net, target.x()));
}

}  // namespace dtids
