#include "autostpp/autoint/partitions.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace autostpp::autoint {

std::vector<IndexPartition> index_partitions(std::size_t n, std::size_t k) {
  if (k < 1 || k > n) {
    throw std::out_of_range("cannot partition " + std::to_string(n) + " items into " +
                            std::to_string(k) + " blocks");
  }
  std::vector<IndexPartition> out;
  // a[i] is the block of item i; prefix_max[i] = max(a[0..i]).
  std::vector<std::size_t> a(n, 0), prefix_max(n, 0);
  while (true) {
    if (prefix_max[n - 1] + 1 == k) {
      IndexPartition p(k);
      for (std::size_t i = 0; i < n; ++i) p[a[i]].push_back(i);
      out.push_back(std::move(p));
    }
    // Rightmost position that can still grow.
    std::size_t i = n;
    while (--i > 0) {
      if (a[i] <= prefix_max[i - 1] && a[i] + 1 < k) break;
    }
    if (i == 0) break;
    ++a[i];
    prefix_max[i] = std::max(prefix_max[i - 1], a[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      a[j] = 0;
      prefix_max[j] = prefix_max[j - 1];
    }
  }
  return out;
}

}  // namespace autostpp::autoint
