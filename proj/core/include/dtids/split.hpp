#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dtids {

struct SplitIndices {
  std::vector<std::size_t> train, val, test;
};

/// Stratified three-way split: test_share of every class goes to test, then
/// val_share of the remainder to validation (defaults give 64/16/20). Each
/// part's total, and each class's count within each part, is the floor or
/// the ceiling of its exact share. Indices within each part are ascending.
/// val_share = 0 gives a two-way split with an empty val part.
/// Throws StratificationError when a class has fewer than 3 members.
SplitIndices stratified_split(std::span<const int> labels, std::uint64_t seed,
                              double test_share = 0.2, double val_share = 0.2);

}  // namespace dtids
