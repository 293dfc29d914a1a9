#include "dtids/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dtids/error.hpp"
#include "dtids/rng.hpp"

namespace dtids {

void TrainConfig::set_learning_rate(double lr) {
  adam.learning_rate = lr;
  adadelta.learning_rate = lr;
}

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (patience) {
    if (*patience < 1) throw ConfigError("patience must be >= 1");
    if (epochs > 0 && *patience > epochs) {
      throw ConfigError("patience (" + std::to_string(*patience) + ") exceeds epochs (" +
                        std::to_string(epochs) + ")");
    }
  }
  if (adam.learning_rate < 0 || adadelta.learning_rate < 0) {
    throw ConfigError("learning rate must be >= 0");
  }
  if (!(adam.beta1 >= 0 && adam.beta1 < 1 && adam.beta2 >= 0 && adam.beta2 < 1)) {
    throw ConfigError("adam betas must lie in [0, 1)");
  }
  if (!(adadelta.rho >= 0 && adadelta.rho < 1)) throw ConfigError("adadelta rho must lie in [0, 1)");
  if (adam.epsilon <= 0 || adadelta.epsilon <= 0) throw ConfigError("epsilon must be positive");
  for (double w : class_weights) {
    if (!(w >= 0) || !std::isfinite(w)) throw ConfigError("class weights must be finite and >= 0");
  }
}

namespace {

void check_geometry(const Network& net, const Domain& d, const char* what) {
  if (d.empty()) throw EmptyDomainError(std::string(what) + " set is empty");
  if (d.channels() != net.spec().channels || d.length() != net.spec().window) {
    throw ShapeError(std::string(what) + " segments are [" + std::to_string(d.channels()) + ", " +
                     std::to_string(d.length()) + "] but the network expects [" +
                     std::to_string(net.spec().channels) + ", " +
                     std::to_string(net.spec().window) + "]");
  }
  if (d.classes() > net.classes()) {
    throw ShapeError(std::string(what) + " set has more classes than the network outputs");
  }
}

std::size_t count_hits(const Tensor& probs, std::span<const int> labels) {
  const auto predicted = argmax_rows(probs);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predicted[i] == labels[i] ? 1 : 0;
  return hits;
}

}  // namespace

History train(Network& net, const Domain& train_set, const Domain& val_set,
              const TrainConfig& cfg) {
  cfg.validate();
  History history;
  if (cfg.epochs == 0) return history;
  check_geometry(net, train_set, "training");
  check_geometry(net, val_set, "validation");
  if (!cfg.class_weights.empty() && cfg.class_weights.size() != net.classes()) {
    throw ConfigError("class weight count must equal the class count");
  }

  Optimizer optimizer(cfg.optimizer, cfg.adam, cfg.adadelta);
  const auto slots = net.params();
  const std::size_t n = train_set.size();
  std::vector<std::size_t> order(n);

  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<Tensor> best_params;
  int since_best = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = Rng::derive(cfg.seed, static_cast<std::uint64_t>(epoch));
    rng.shuffle(std::span<std::size_t>(order));

    double loss_sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t begin = 0; begin < n; begin += cfg.batch_size) {
      const std::size_t end = std::min(n, begin + cfg.batch_size);
      const std::span<const std::size_t> idx(order.data() + begin, end - begin);
      const Tensor x = train_set.batch(idx);
      const auto y = train_set.batch_labels(idx);
      const Tensor logits = net.logits(x, Mode::train);
      auto result = kernels::softmax_cross_entropy(logits, y, cfg.class_weights);
      if (!std::isfinite(result.loss)) {
        throw DivergedError("training diverged at epoch " + std::to_string(epoch) +
                            " (loss is not finite)");
      }
      net.backward(result.grad_logits);
      optimizer.step(slots);
      loss_sum += result.loss * static_cast<double>(idx.size());
      hits += count_hits(result.probs, y);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(n);
    rec.train_accuracy = static_cast<double>(hits) / static_cast<double>(n);
    std::tie(rec.val_loss, rec.val_accuracy) = loss_and_accuracy(net, val_set);
    if (!std::isfinite(rec.val_loss)) {
      throw DivergedError("training diverged at epoch " + std::to_string(epoch) +
                          " (validation loss is not finite)");
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    rec.seconds = elapsed.count();
    history.epochs.push_back(rec);
    if (cfg.on_epoch) cfg.on_epoch(rec);

    if (cfg.patience) {
      if (rec.val_loss < best_loss) {
        best_loss = rec.val_loss;
        best_params = net.snapshot();
        history.best_epoch = epoch;
        since_best = 0;
      } else if (++since_best >= *cfg.patience) {
        history.stopped_early = true;
        break;
      }
    }
  }

  if (cfg.patience && !best_params.empty()) {
    net.restore(best_params);
  } else {
    history.best_epoch = history.epochs.back().epoch;
  }
  return history;
}

Tensor predict(Network& net, const Domain& data, std::size_t batch_size) {
  if (data.empty()) throw EvalError("cannot predict on an empty set");
  const std::size_t n = data.size(), classes = net.classes();
  Tensor probs({n, classes});
  std::vector<std::size_t> idx;
  for (std::size_t begin = 0; begin < n; begin += batch_size) {
    const std::size_t end = std::min(n, begin + batch_size);
    idx.resize(end - begin);
    std::iota(idx.begin(), idx.end(), begin);
    const Tensor p = net.forward(data.batch(idx), Mode::infer);
    std::copy(p.raw(), p.raw() + p.size(), probs.raw() + begin * classes);
  }
  return probs;
}

std::pair<double, double> loss_and_accuracy(Network& net, const Domain& data,
                                            std::size_t batch_size) {
  if (data.empty()) throw EvalError("cannot score an empty set");
  const std::size_t n = data.size();
  double loss_sum = 0.0;
  std::size_t hits = 0;
  std::vector<std::size_t> idx;
  for (std::size_t begin = 0; begin < n; begin += batch_size) {
    const std::size_t end = std::min(n, begin + batch_size);
    idx.resize(end - begin);
    std::iota(idx.begin(), idx.end(), begin);
    const auto y = data.batch_labels(idx);
    const auto result = kernels::softmax_cross_entropy(net.logits(data.batch(idx), Mode::infer), y);
    loss_sum += result.loss * static_cast<double>(idx.size());
    hits += count_hits(result.probs, y);
  }
  return {loss_sum / static_cast<double>(n), static_cast<double>(hits) / static_cast<double>(n)};
}

MetricsReport evaluate(Network& net, const Domain& test_set) {
  if (test_set.empty()) throw EvalError("cannot evaluate an empty test set");
  check_geometry(net, test_set, "test");
  auto [probs, seconds] = time_block([&] { return predict(net, test_set); });
  MetricsReport report = compute_metrics(probs, test_set.labels());
  report.params = count_params(net);
  report.testing_seconds = seconds;
  return report;
}

std::size_t count_params(const Network& net) { return net.param_count(); }

}  // namespace dtids
