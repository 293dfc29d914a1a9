#include "dtids/split.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>

#include "dtids/error.hpp"
#include "dtids/rng.hpp"

namespace dtids {

namespace {

using Parts = std::array<std::size_t, 3>;

// Floor or ceiling of n * share for each part, summing to n (largest remainder).
Parts apportion(std::size_t n, const std::array<double, 3>& shares) {
  Parts counts{};
  std::array<double, 3> remainders{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double exact = shares[k] * static_cast<double>(n);
    counts[k] = static_cast<std::size_t>(std::floor(exact));
    remainders[k] = exact - static_cast<double>(counts[k]);
    assigned += counts[k];
  }
  for (; assigned < n; ++assigned) {
    const auto best = static_cast<std::size_t>(std::max_element(remainders.begin(), remainders.end()) - remainders.begin());
    ++counts[best];
    remainders[best] = -1.0;
  }
  return counts;
}

// Per-class part sizes whose row sums are the class sizes and whose column
// sums are the apportioned part totals, every cell the floor or ceiling of
// its exact share. Starting from the floors, each class hands its leftover
// rows to the parts still furthest below their totals; serving the classes
// with the most leftovers first always completes (Gale-Ryser).
std::vector<Parts> allocate(const std::vector<std::size_t>& sizes, const std::array<double, 3>& shares) {
  std::size_t total = 0;
  for (std::size_t n : sizes) total += n;
  Parts demand = apportion(total, shares);
  std::vector<Parts> cells(sizes.size());
  std::vector<std::array<double, 3>> remainders(sizes.size());
  std::vector<std::size_t> leftover(sizes.size());
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      const double exact = shares[k] * static_cast<double>(sizes[j]);
      cells[j][k] = static_cast<std::size_t>(std::floor(exact));
      remainders[j][k] = exact - static_cast<double>(cells[j][k]);
      assigned += cells[j][k];
      demand[k] -= cells[j][k];
    }
    leftover[j] = sizes[j] - assigned;
  }
  std::vector<std::size_t> order(sizes.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return leftover[a] > leftover[b]; });
  for (std::size_t j : order) {
    std::array<std::size_t, 3> parts{0, 1, 2};
    std::stable_sort(parts.begin(), parts.end(), [&](std::size_t a, std::size_t b) {
      if (demand[a] != demand[b]) return demand[a] > demand[b];
      return remainders[j][a] > remainders[j][b];
    });
    for (std::size_t u = 0; u < leftover[j]; ++u) {
      ++cells[j][parts[u]];
      --demand[parts[u]];
    }
  }
  return cells;
}

}  // namespace

SplitIndices stratified_split(std::span<const int> labels, std::uint64_t seed, double test_share,
                              double val_share) {
  if (!(test_share > 0 && test_share < 1 && val_share >= 0 && val_share < 1)) {
    throw ConfigError("split shares must satisfy 0 < test < 1 and 0 <= val < 1");
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  std::vector<std::size_t> sizes;
  for (const auto& [label, members] : by_class) {
    if (members.size() < 3) {
      throw StratificationError("class " + std::to_string(label) + " has only " +
                                std::to_string(members.size()) + " rows; stratified splitting needs at least 3");
    }
    sizes.push_back(members.size());
  }

  // Order of parts: test, val, train.
  const std::array<double, 3> shares{test_share, (1.0 - test_share) * val_share,
                                     (1.0 - test_share) * (1.0 - val_share)};
  const std::vector<Parts> cells = allocate(sizes, shares);
  SplitIndices out;
  std::size_t j = 0;
  for (auto& [label, members] : by_class) {
    const Parts& counts = cells[j++];
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(static_cast<std::uint32_t>(label)));
    rng.shuffle(std::span<std::size_t>(members));
    auto it = members.begin();
    out.test.insert(out.test.end(), it, it + static_cast<std::ptrdiff_t>(counts[0]));
    it += static_cast<std::ptrdiff_t>(counts[0]);
    out.val.insert(out.val.end(), it, it + static_cast<std::ptrdiff_t>(counts[1]));
    it += static_cast<std::ptrdiff_t>(counts[1]);
    out.train.insert(out.train.end(), it, members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.val.begin(), out.val.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace dtids
