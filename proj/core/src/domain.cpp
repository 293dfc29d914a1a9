#include "dtids/domain.hpp"

#include <algorithm>
#include <string>

#include "dtids/error.hpp"

namespace dtids {

Domain::Domain(DomainRole role, Tensor x, std::vector<int> labels, std::size_t classes,
               std::vector<std::size_t> provenance)
    : role_(role),
      x_(std::move(x)),
      labels_(std::move(labels)),
      classes_(classes),
      provenance_(std::move(provenance)) {
  if (labels_.empty()) throw EmptyDomainError("domain has no segments");
  expect_rank(x_, 3, "domain segments");
  if (x_.dim(0) != labels_.size()) {
    throw ShapeError("domain has " + std::to_string(x_.dim(0)) + " segments but " +
                     std::to_string(labels_.size()) + " labels");
  }
  if (classes_ < 2) throw DataError("domain needs at least 2 classes");
  for (int y : labels_) {
    if (y < 0 || static_cast<std::size_t>(y) >= classes_) {
      throw DataError("label " + std::to_string(y) + " outside [0, " + std::to_string(classes_) + ")");
    }
  }
  if (provenance_.empty()) {
    provenance_.assign(labels_.size(), 0);
  } else if (provenance_.size() != labels_.size()) {
    throw ShapeError("provenance tags must cover every segment");
  }
}

Tensor Domain::batch(std::span<const std::size_t> idx) const {
  const std::size_t stride = channels() * length();
  Tensor out({idx.size(), channels(), length()});
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const double* src = x_.raw() + idx[i] * stride;
    std::copy(src, src + stride, out.raw() + i * stride);
  }
  return out;
}

std::vector<int> Domain::batch_labels(std::span<const std::size_t> idx) const {
  std::vector<int> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = labels_[idx[i]];
  return out;
}

Domain Domain::subset(std::span<const std::size_t> idx) const {
  std::vector<std::size_t> prov(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) prov[i] = provenance_[idx[i]];
  return Domain(role_, batch(idx), batch_labels(idx), classes_, std::move(prov));
}

}  // namespace dtids
