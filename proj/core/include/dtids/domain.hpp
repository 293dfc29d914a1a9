#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dtids/tensor.hpp"

namespace dtids {

/// Label polarity used throughout the toolkit.
inline constexpr int kNormalLabel = 1;
inline constexpr int kAttackLabel = 0;

enum class DomainRole { source, target };

/// Labelled segments X [S, channels, L] with labels in [0, classes).
/// Immutable after construction.
class Domain {
 public:
  Domain() = default;
  /// Throws ShapeError / DataError when the invariants do not hold.
  Domain(DomainRole role, Tensor x, std::vector<int> labels, std::size_t classes,
         std::vector<std::size_t> provenance = {});

  DomainRole role() const noexcept { return role_; }
  const Tensor& x() const noexcept { return x_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  /// Index of the dataset each segment came from.
  const std::vector<std::size_t>& provenance() const noexcept { return provenance_; }
  std::size_t classes() const noexcept { return classes_; }
  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  std::size_t channels() const { return x_.dim(1); }
  std::size_t length() const { return x_.dim(2); }

  /// Gathers the given segments into [idx.size(), channels, L].
  Tensor batch(std::span<const std::size_t> idx) const;
  std::vector<int> batch_labels(std::span<const std::size_t> idx) const;
  Domain subset(std::span<const std::size_t> idx) const;

 private:
  DomainRole role_ = DomainRole::source;
  Tensor x_;
  std::vector<int> labels_;
  std::size_t classes_ = 0;
  std::vector<std::size_t> provenance_;
};

}  // namespace dtids
