#pragma once

// Benjamini-Hochberg and order-statistic thresholds, straight from their definitions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace oracle {

struct Bh {
  std::optional<double> cutoff;
  std::vector<bool> reject;
};

// Largest k with p_(k) <= k q / m; reject every p <= p_(k).
inline Bh benjamini_hochberg(const std::vector<double>& p, double q) {
  const std::size_t m = p.size();
  Bh out;
  out.reject.assign(m, false);
  for (std::size_t k = m; k >= 1; --k) {
    // p_(k): the value with exactly k-1 smaller-or-tied entries before it in sorted order.
    std::vector<double> sorted = p;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(k - 1), sorted.end());
    const double pk = sorted[k - 1];
    if (pk <= static_cast<double>(k) * q / static_cast<double>(m)) {
      out.cutoff = pk;
      for (std::size_t i = 0; i < m; ++i) out.reject[i] = p[i] <= pk;
      return out;
    }
  }
  return out;
}

// Smallest sample value v such that at least (1 - alpha) n samples are <= v.
inline double percentile_by_scan(std::vector<double> samples, double alpha) {
  std::sort(samples.begin(), samples.end());
  const double need = (1.0 - alpha) * static_cast<double>(samples.size());
  std::size_t covered = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    covered = i + 1;
    const bool last_of_value = i + 1 == samples.size() || samples[i + 1] != samples[i];
    if (last_of_value && static_cast<double>(covered) >= need - 1e-9) return samples[i];
  }
  return samples.back();
}

}  // namespace oracle
