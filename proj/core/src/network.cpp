#include "dtids/network.hpp"

#include "dtids/error.hpp"
#include "dtids/text.hpp"

namespace dtids {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::presnet: return "presnet";
    case ModelKind::single_channel: return "single";
    case ModelKind::multi_channel: return "multi";
    case ModelKind::mlp: return "mlp";
    case ModelKind::fcn: return "fcn";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "presnet") return ModelKind::presnet;
  if (name == "single") return ModelKind::single_channel;
  if (name == "multi") return ModelKind::multi_channel;
  if (name == "mlp") return ModelKind::mlp;
  if (name == "fcn") return ModelKind::fcn;
  throw ConfigError("unknown model kind '" + std::string(name) + "'");
}

std::string ArchSpec::to_text() const {
  KeyValueFile kv;
  kv.add("kind", std::string(to_string(kind)));
  kv.add("channels", std::to_string(channels));
  kv.add("window", std::to_string(window));
  kv.add("classes", std::to_string(classes));
  kv.add("head_units", std::to_string(head_units));
  kv.add("seed", std::to_string(seed));
  return kv.to_text();
}

ArchSpec ArchSpec::from_text(std::string_view text) {
  const auto kv = KeyValueFile::parse(text, "architecture");
  auto positive = [&](const char* key) {
    const auto v = kv.get_int(key, -1);
    if (v < 1) throw FormatError(std::string("architecture: invalid ") + key);
    return static_cast<std::size_t>(v);
  };
  ArchSpec s;
  s.kind = parse_model_kind(kv.require("kind"));
  s.channels = positive("channels");
  s.window = positive("window");
  s.classes = positive("classes");
  s.head_units = positive("head_units");
  const auto seed = kv.require("seed");
  try {
    s.seed = std::stoull(seed);
  } catch (const std::exception&) {
    throw FormatError("architecture: invalid seed " + seed);
  }
  return s;
}

namespace {

void check_common(std::size_t window, std::size_t classes, bool convolutional) {
  if (classes < 2) throw ConfigError("a classifier needs at least 2 classes");
  if (window < 1) throw ConfigError("window must be positive");
  if (convolutional && window < kMaxKernel) {
    throw ConfigError("window " + std::to_string(window) + " is shorter than the largest kernel (" +
                      std::to_string(kMaxKernel) + ")");
  }
}

void add_residual_stack(Sequential& seq, std::size_t in_channels, Rng& rng) {
  std::size_t c = in_channels;
  for (std::size_t j = 0; j < kResidualBlocks.size(); ++j) {
    const auto [filters, kernel] = kResidualBlocks[j];
    seq.add("block" + std::to_string(j + 1), std::make_unique<ResidualBlock>(c, filters, kernel, rng));
    c = filters;
  }
}

}  // namespace

Network::Network(ArchSpec spec, Sequential root) : spec_(spec), root_(std::move(root)) {
  const Shape out = root_.output_shape(input_shape());
  if (out != Shape{spec_.classes}) {
    throw ConfigError("network output " + shape_string(out) + " does not match " +
                      std::to_string(spec_.classes) + " classes");
  }
}

Network::Network(const Network& other) : spec_(other.spec_), root_(other.root_) {}

Network& Network::operator=(const Network& other) {
  if (this != &other) {
    Network copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void Network::check_input(const Tensor& batch) const {
  if (batch.rank() != 3 || batch.dim(1) != spec_.channels || batch.dim(2) != spec_.window) {
    throw ShapeError("network expects [N, " + std::to_string(spec_.channels) + ", " +
                     std::to_string(spec_.window) + "], got " + shape_string(batch.shape()));
  }
}

Tensor Network::logits(const Tensor& batch, Mode mode) {
  check_input(batch);
  return root_.forward(batch, mode);
}

Tensor Network::forward(const Tensor& batch, Mode mode) {
  return kernels::softmax(logits(batch, mode));
}

Tensor Network::backward(const Tensor& grad_logits) { return root_.backward(grad_logits); }

std::vector<ParamSlot> Network::params() {
  std::vector<ParamSlot> out;
  root_.collect("", out);
  return out;
}

std::vector<std::string> Network::layer_specs() const {
  std::vector<std::string> lines;
  root_.describe(lines);
  lines.push_back("softmax classes=" + std::to_string(spec_.classes));
  return lines;
}

std::vector<Tensor> Network::snapshot() {
  std::vector<Tensor> values;
  for (const auto& p : params()) values.push_back(*p.value);
  return values;
}

void Network::restore(const std::vector<Tensor>& values) {
  auto slots = params();
  if (slots.size() != values.size()) throw StateError("snapshot does not match network");
  for (std::size_t i = 0; i < slots.size(); ++i) {
    expect_same_shape(*slots[i].value, values[i], "restore");
    *slots[i].value = values[i];
  }
}

std::vector<ResidualBlock*> Network::hidden_blocks() {
  std::vector<ResidualBlock*> blocks;
  for (std::size_t i = 0; i < root_.size(); ++i) {
    if (auto* b = dynamic_cast<ResidualBlock*>(&root_.at(i))) blocks.push_back(b);
  }
  return blocks;
}

std::size_t Network::branch_count() {
  for (std::size_t i = 0; i < root_.size(); ++i) {
    if (auto* b = dynamic_cast<BranchConcat*>(&root_.at(i))) return b->branch_count();
  }
  return 0;
}

std::vector<ResidualBlock*> Network::branch_blocks(std::size_t k) {
  for (std::size_t i = 0; i < root_.size(); ++i) {
    if (auto* b = dynamic_cast<BranchConcat*>(&root_.at(i))) {
      if (k >= b->branch_count()) throw ShapeError("branch index out of range");
      Sequential& branch = b->branch(k);
      std::vector<ResidualBlock*> blocks;
      for (std::size_t j = 0; j < branch.size(); ++j) {
        if (auto* rb = dynamic_cast<ResidualBlock*>(&branch.at(j))) blocks.push_back(rb);
      }
      return blocks;
    }
  }
  throw ShapeError("network has no branches");
}

std::vector<Layer*> Network::head_layers() {
  std::vector<Layer*> head;
  bool after = false;
  for (std::size_t i = 0; i < root_.size(); ++i) {
    Layer& layer = root_.at(i);
    if (after) head.push_back(&layer);
    if (dynamic_cast<BranchConcat*>(&layer) || dynamic_cast<GlobalAveragePoolLayer*>(&layer)) {
      after = true;
    }
  }
  return head;
}

Network build_presnet(std::size_t channels, std::size_t window, std::size_t classes,
                      std::uint64_t seed) {
  if (channels < 1) throw ConfigError("presnet needs at least one input channel");
  check_common(window, classes, true);
  Rng rng(seed);
  Sequential root;
  add_residual_stack(root, channels, rng);
  root.add("gap", std::make_unique<GlobalAveragePoolLayer>());
  root.add("softmax", std::make_unique<DenseLayer>(kResidualBlocks.back().filters, classes, rng));
  return Network({ModelKind::presnet, channels, window, classes, 128, seed}, std::move(root));
}

Network build_single_channel_dnn(std::size_t window, std::size_t classes, std::uint64_t seed) {
  check_common(window, classes, true);
  Rng rng(seed);
  Sequential root;
  root.add("input_bn", std::make_unique<BatchNormLayer>(1));
  add_residual_stack(root, 1, rng);
  root.add("gap", std::make_unique<GlobalAveragePoolLayer>());
  root.add("softmax", std::make_unique<DenseLayer>(kResidualBlocks.back().filters, classes, rng));
  return Network({ModelKind::single_channel, 1, window, classes, 128, seed}, std::move(root));
}

Network build_multi_channel_dnn(std::size_t branches, std::size_t window, std::size_t classes,
                                std::uint64_t seed, std::size_t head_units) {
  if (branches < 1) throw ConfigError("multi-channel network needs at least one branch");
  if (head_units < 1) throw ConfigError("head needs at least one unit");
  check_common(window, classes, true);
  Rng rng(seed);
  Sequential root;
  root.add("input_bn", std::make_unique<BatchNormLayer>(branches));
  std::vector<Sequential> stacks;
  for (std::size_t k = 0; k < branches; ++k) {
    Sequential branch;
    add_residual_stack(branch, 1, rng);
    branch.add("gap", std::make_unique<GlobalAveragePoolLayer>());
    stacks.push_back(std::move(branch));
  }
  root.add("branches", std::make_unique<BranchConcat>(std::move(stacks)));
  const std::size_t features = kResidualBlocks.back().filters * branches;
  root.add("fc", std::make_unique<DenseLayer>(features, head_units, rng));
  root.add("fc_relu", std::make_unique<ReluLayer>());
  root.add("softmax", std::make_unique<DenseLayer>(head_units, classes, rng));
  return Network({ModelKind::multi_channel, branches, window, classes, head_units, seed},
                 std::move(root));
}

Network build_baseline(ModelKind kind, std::size_t channels, std::size_t window,
                       std::size_t classes, std::uint64_t seed) {
  if (channels < 1) throw ConfigError("baseline needs at least one input channel");
  Rng rng(seed);
  Sequential root;
  if (kind == ModelKind::mlp) {
    check_common(window, classes, false);
    root.add("flatten", std::make_unique<FlattenLayer>());
    std::size_t in = channels * window;
    for (int i = 1; i <= 3; ++i) {
      root.add("dense" + std::to_string(i), std::make_unique<DenseLayer>(in, kMlpUnits, rng));
      root.add("relu" + std::to_string(i), std::make_unique<ReluLayer>());
      in = kMlpUnits;
    }
    root.add("softmax", std::make_unique<DenseLayer>(in, classes, rng));
  } else if (kind == ModelKind::fcn) {
    check_common(window, classes, true);
    std::size_t c = channels;
    for (std::size_t j = 0; j < kFcnBlocks.size(); ++j) {
      const auto [filters, kernel] = kFcnBlocks[j];
      const std::string id = std::to_string(j + 1);
      root.add("conv" + id, std::make_unique<Conv1dLayer>(c, filters, kernel, rng));
      root.add("bn" + id, std::make_unique<BatchNormLayer>(filters));
      root.add("relu" + id, std::make_unique<ReluLayer>());
      c = filters;
    }
    root.add("gap", std::make_unique<GlobalAveragePoolLayer>());
    root.add("softmax", std::make_unique<DenseLayer>(c, classes, rng));
  } else {
    throw ConfigError("unknown baseline kind '" + std::string(to_string(kind)) + "'");
  }
  return Network({kind, channels, window, classes, 128, seed}, std::move(root));
}

Network build_network(const ArchSpec& spec) {
  switch (spec.kind) {
    case ModelKind::presnet: return build_presnet(spec.channels, spec.window, spec.classes, spec.seed);
    case ModelKind::single_channel: {
      if (spec.channels != 1) throw ConfigError("single-channel network must have one channel");
      return build_single_channel_dnn(spec.window, spec.classes, spec.seed);
    }
    case ModelKind::multi_channel:
      return build_multi_channel_dnn(spec.channels, spec.window, spec.classes, spec.seed,
                                     spec.head_units);
    case ModelKind::mlp:
    case ModelKind::fcn:
      return build_baseline(spec.kind, spec.channels, spec.window, spec.classes, spec.seed);
  }
  throw ConfigError("unknown model kind");
}

}  // namespace dtids
