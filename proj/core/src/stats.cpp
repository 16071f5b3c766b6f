#include "vlsm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "vlsm/error.hpp"

namespace vlsm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Within-group sum of squares at or below this fraction of the total is treated as zero.
constexpr double kZeroVarianceFraction = 1e-12;

double t_statistic_value(double t, Tail tail) { return tail == Tail::kTwoSided ? std::abs(t) : t; }

}  // namespace

LesionDesign::LesionDesign(const Cohort& cohort, int min_lesion)
    : geometry_(cohort.geometry()), subject_count_(cohort.size()), min_lesion_(min_lesion) {
  if (subject_count_ < 4) {
    throw InputError("voxelwise_t: need at least 4 subjects, got " + std::to_string(subject_count_));
  }
  if (min_lesion < 1) throw InputError("voxelwise_t: min_lesion must be >= 1");

  const CountMap counts = overlap_map(cohort);
  const auto n = static_cast<std::int32_t>(subject_count_);
  analyzable_ = BinaryMask(geometry_);
  std::vector<std::int64_t> compact(geometry_.voxel_count(), -1);
  for (std::size_t v = 0; v < counts.counts.size(); ++v) {
    const std::int32_t lesioned = counts.counts[v];
    if (lesioned >= min_lesion && n - lesioned >= min_lesion) {
      analyzable_.set(v, true);
      compact[v] = static_cast<std::int64_t>(analyzable_voxels_.size());
      analyzable_voxels_.push_back(v);
      lesioned_count_.push_back(static_cast<std::uint32_t>(lesioned));
    }
  }
  subject_voxels_.resize(subject_count_);
  for (std::size_t j = 0; j < subject_count_; ++j) {
    const auto voxels = cohort.subjects()[j].mask.voxels();
    for (std::size_t v = 0; v < voxels.size(); ++v) {
      if (voxels[v] && compact[v] >= 0) subject_voxels_[j].push_back(static_cast<std::uint32_t>(compact[v]));
    }
  }
}

std::size_t LesionDesign::compact_t(std::span<const double> scores, std::vector<double>& sum,
                                    std::vector<double>& sum_sq, std::vector<double>& t_out) const {
  if (scores.size() != subject_count_) {
    throw InputError("voxelwise_t: " + std::to_string(scores.size()) + " scores for " +
                     std::to_string(subject_count_) + " subjects");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw NumericError("voxelwise_t: scores contain non-finite values");
  }

  // Center on the first score so constant score vectors give exact zeros.
  const double pivot = scores.front();
  double total = 0.0;
  double total_sq = 0.0;
  double scale = 0.0;
  for (double s : scores) {
    const double c = s - pivot;
    total += c;
    total_sq += c * c;
    scale = std::max(scale, std::abs(c));
  }
  const double n = static_cast<double>(subject_count_);
  const double total_ss = std::max(0.0, total_sq - total * total / n);

  const std::size_t m = analyzable_voxels_.size();
  sum.assign(m, 0.0);
  sum_sq.assign(m, 0.0);
  for (std::size_t j = 0; j < subject_count_; ++j) {
    const double c = scores[j] - pivot;
    if (c == 0.0) continue;
    const double c2 = c * c;
    for (std::uint32_t idx : subject_voxels_[j]) {
      sum[idx] += c;
      sum_sq[idx] += c2;
    }
  }

  t_out.resize(m);
  std::size_t degenerate = 0;
  const double df = n - 2.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double n1 = lesioned_count_[i];
    const double n0 = n - n1;
    const double s1 = sum[i];
    const double s0 = total - s1;
    const double mean1 = s1 / n1;
    const double mean0 = s0 / n0;
    const double ss1 = sum_sq[i] - s1 * mean1;
    const double ss0 = (total_sq - sum_sq[i]) - s0 * mean0;
    const double within = ss1 + ss0;
    const double diff = mean1 - mean0;
    if (within <= kZeroVarianceFraction * total_ss) {
      if (std::abs(diff) <= 1e-12 * scale) {
        t_out[i] = 0.0;
      } else {
        t_out[i] = kNaN;
        ++degenerate;
      }
      continue;
    }
    const double pooled = within / df;
    t_out[i] = diff / std::sqrt(pooled * (1.0 / n1 + 1.0 / n0));
  }
  return degenerate;
}

StatMap LesionDesign::stat_map(std::span<const double> scores) const {
  std::vector<double> sum, sum_sq, compact;
  StatMap map;
  map.geometry = geometry_;
  map.df = df();
  map.degenerate_voxels = compact_t(scores, sum, sum_sq, compact);
  map.t.assign(geometry_.voxel_count(), kNaN);
  map.analyzable = BinaryMask(geometry_);
  for (std::size_t i = 0; i < analyzable_voxels_.size(); ++i) {
    if (std::isnan(compact[i])) continue;
    map.t[analyzable_voxels_[i]] = compact[i];
    map.analyzable.set(analyzable_voxels_[i], true);
  }
  return map;
}

StatMap voxelwise_t(const Cohort& cohort, int min_lesion) {
  return LesionDesign(cohort, min_lesion).stat_map(cohort.scores());
}

SuprathresholdMask apply_p_threshold(const StatMap& map, double p_threshold, Tail tail) {
  SuprathresholdMask out{BinaryMask(map.geometry), p_threshold, tail};
  for (std::size_t v = 0; v < map.t.size(); ++v) {
    if (map.analyzable[v] && t_to_p(map.t[v], map.df, tail) < p_threshold) out.mask.set(v, true);
  }
  return out;
}

PThresholdCutoff::PThresholdCutoff(double p_threshold, int df, Tail tail)
    : p_threshold_(p_threshold), df_(df), tail_(tail), critical_(critical_t(p_threshold, df, tail)) {
  // Outside the band the decision follows from monotonicity of t_to_p.
  if (!std::isfinite(critical_)) {
    band_lo_ = band_hi_ = critical_;
    return;
  }
  const double width = 1e-7 * (1.0 + std::abs(critical_));
  band_lo_ = critical_ - width;
  band_hi_ = critical_ + width;
}

bool PThresholdCutoff::passes(double t) const {
  const double stat = t_statistic_value(t, tail_);
  if (stat > band_hi_) return true;
  if (stat < band_lo_) return false;
  return t_to_p(t, df_, tail_) < p_threshold_;
}

FdrResult fdr_bh(std::span<const double> p_values, double q) {
  const std::size_t m = p_values.size();
  FdrResult result{std::nullopt, std::vector<bool>(m, false)};
  if (m == 0) return result;
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });
  std::optional<std::size_t> k;
  for (std::size_t i = 0; i < m; ++i) {
    const double bound = static_cast<double>(i + 1) * q / static_cast<double>(m);
    if (p_values[order[i]] <= bound) k = i;
  }
  if (!k) return result;
  result.cutoff = p_values[order[*k]];
  for (std::size_t j = 0; j < m; ++j) result.reject[j] = p_values[j] <= *result.cutoff;
  return result;
}

}  // namespace vlsm
