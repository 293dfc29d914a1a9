#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dtids/metrics.hpp"
#include "dtids/text.hpp"
#include "dtids/training.hpp"

namespace dtids {

/// Printed in every summary and report header.
inline constexpr std::string_view kLabelConvention = "normal=1 attack=0";

/// One row per epoch: epoch, train_acc, val_acc, train_loss, val_loss.
/// Wall-clock times are kept out so the file is reproducible.
std::string history_csv(const History& history);
History parse_history_csv(std::string_view text, const std::string& source = "<history>");
/// epoch, seconds.
std::string epoch_timing_csv(const History& history);

/// accuracy, precision, recall, f1, roc_auc and params as key-value text.
/// Timings are left to a separate file for the same reason as above.
KeyValueFile metrics_to_kv(const MetricsReport& report);
/// Reads the metric keys back; the confusion matrix is not part of it.
MetricsReport metrics_from_kv(const KeyValueFile& kv);

/// Header `truth,pred_0,...`, one row per true class.
std::string confusion_csv(const ConfusionMatrix& confusion);

struct ComparisonRow {
  std::string model;
  MetricsReport metrics;
  std::optional<double> training_seconds;
  std::optional<double> testing_seconds;
};

/// Model,Accuracy,Precision,Recall,F1Score,ROC AUC
std::string comparison_csv(const std::vector<ComparisonRow>& rows);
/// Model,Params,Training Time (s),Testing Time (s); unknown times are empty.
std::string resources_csv(const std::vector<ComparisonRow>& rows);
/// Fixed-width text version of both tables for the terminal.
std::string comparison_table(const std::vector<ComparisonRow>& rows);

}  // namespace dtids
