#include "dtids/experiment.hpp"

#include <algorithm>

#include "dtids/error.hpp"
#include "dtids/split.hpp"

namespace dtids {

std::vector<double> minmax_series(std::vector<double> values) {
  if (values.empty()) return values;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double a = *lo, b = *hi;
  for (double& v : values) v = b > a ? (v - a) / (b - a) : 0.0;
  return values;
}

void TransferExperimentConfig::validate() const {
  if (channels.empty()) throw ConfigError("transfer experiment needs at least one channel");
  SegmentationConfig{window, source_stride}.validate();
  SegmentationConfig{window, target_stride}.validate();
  if (source_epochs < 0 || target_epochs < 0) throw ConfigError("epochs must be >= 0");
  if (batch_size == 0) throw ConfigError("batch size must be >= 1");
}

TransferOutcome run_transfer_experiment(const TabularDataset& source, const TabularDataset& target,
                                        const TransferExperimentConfig& cfg) {
  cfg.validate();
  std::vector<LabeledSeries> source_series;
  MultiChannelSeries target_series;
  for (const auto& name : cfg.channels) {
    source_series.push_back({minmax_series(source.column(name).values), source.labels});
    target_series.channels.push_back(minmax_series(target.column(name).values));
  }
  target_series.labels = target.labels;
  const Domain source_domain = build_source_domain(source_series, {cfg.window, cfg.source_stride});
  const Domain target_domain = build_target_domain(target_series, {cfg.window, cfg.target_stride});
  const auto split = stratified_split(target_domain.labels(), cfg.seed, 0.2, 0.0);
  const Domain target_train = target_domain.subset(split.train);
  const Domain target_val = target_domain.subset(split.test);

  TrainConfig tc;
  tc.batch_size = cfg.batch_size;
  tc.optimizer = cfg.optimizer;
  tc.patience = std::nullopt;
  tc.seed = cfg.seed;

  const std::size_t branches = cfg.channels.size();
  TransferOutcome out{cfg.seed,
                      {},
                      {},
                      {},
                      build_single_channel_dnn(cfg.window, 2, cfg.seed),
                      build_multi_channel_dnn(branches, cfg.window, 2, cfg.seed + 1),
                      build_multi_channel_dnn(branches, cfg.window, 2, cfg.seed + 1)};
  tc.epochs = cfg.source_epochs;
  out.source = train_source(out.single, source_domain, tc);

  const auto plan = TransferPlan::one_to_one(out.single.hidden_blocks().size(), branches, cfg.policy);
  transfer_weights(out.single, out.transferred_net, plan);
  tc.epochs = cfg.target_epochs;
  out.transferred = fine_tune(out.transferred_net, target_train, target_val, plan, tc);
  out.scratch = train(out.scratch_net, target_train, target_val, tc);
  return out;
}

}  // namespace dtids
