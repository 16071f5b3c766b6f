#pragma once

// Textbook two-sample pooled-variance t, one voxel at a time, two-pass moments.

#include <cmath>
#include <limits>
#include <vector>

#include "vlsm/volume.hpp"

namespace oracle {

struct DirectT {
  std::vector<double> t;          // NaN when not analyzable
  std::vector<bool> analyzable;
  std::size_t degenerate = 0;
};

inline DirectT direct_t(const vlsm::Cohort& cohort, int min_lesion) {
  const std::size_t n = cohort.size();
  const std::size_t voxels = cohort.geometry().voxel_count();
  const auto scores = cohort.scores();
  DirectT out;
  out.t.assign(voxels, std::numeric_limits<double>::quiet_NaN());
  out.analyzable.assign(voxels, false);
  for (std::size_t v = 0; v < voxels; ++v) {
    std::vector<double> les, intact;
    for (std::size_t j = 0; j < n; ++j) {
      (cohort.subjects()[j].mask[v] ? les : intact).push_back(scores[j]);
    }
    const auto n1 = static_cast<int>(les.size()), n0 = static_cast<int>(intact.size());
    if (n1 < min_lesion || n0 < min_lesion) continue;
    auto mean = [](const std::vector<double>& xs) {
      double s = 0;
      for (double x : xs) s += x;
      return s / static_cast<double>(xs.size());
    };
    auto ss = [](const std::vector<double>& xs, double m) {
      double s = 0;
      for (double x : xs) s += (x - m) * (x - m);
      return s;
    };
    const double m1 = mean(les), m0 = mean(intact);
    const double pooled = (ss(les, m1) + ss(intact, m0)) / static_cast<double>(n1 + n0 - 2);
    // Scale for deciding an exact zero in floating point.
    double scale = 0;
    for (double x : les) scale = std::max(scale, std::abs(x));
    for (double x : intact) scale = std::max(scale, std::abs(x));
    if (pooled <= 1e-24 * (scale * scale + 1e-300)) {
      if (std::abs(m1 - m0) <= 1e-12 * (scale + 1e-300)) {
        out.t[v] = 0.0;
        out.analyzable[v] = true;
      } else {
        ++out.degenerate;
      }
      continue;
    }
    out.t[v] = (m1 - m0) / std::sqrt(pooled * (1.0 / n1 + 1.0 / n0));
    out.analyzable[v] = true;
  }
  return out;
}

}  // namespace oracle
