#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace autostpp::autoint {

using IndexPartition = std::vector<std::vector<std::size_t>>;

/// All partitions of {0, ..., n-1} into exactly k nonempty blocks.
///
/// Enumerated iteratively over restricted-growth strings in lexicographic
/// order, so blocks come out ordered by their smallest element and the
/// partition order is deterministic. Throws std::out_of_range unless
/// 1 <= k <= n.
std::vector<IndexPartition> index_partitions(std::size_t n, std::size_t k);

/// Partitions of `items` into exactly k blocks, in index_partitions order.
template <class T>
std::vector<std::vector<std::vector<T>>> set_partitions(std::span<const T> items, std::size_t k) {
  std::vector<std::vector<std::vector<T>>> out;
  for (const auto& p : index_partitions(items.size(), k)) {
    auto& part = out.emplace_back();
    for (const auto& block : p) {
      auto& b = part.emplace_back();
      for (auto i : block) b.push_back(items[i]);
    }
  }
  return out;
}

}  // namespace autostpp::autoint
