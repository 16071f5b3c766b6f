#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vlsm/tdist.hpp"
#include "vlsm/volume.hpp"

namespace vlsm {

/// Pooled-variance t per voxel. Positive t: lesioned subjects score higher.
/// `t` is NaN outside `analyzable`.
struct StatMap {
  VolumeGeometry geometry;
  std::vector<double> t;
  int df = 0;
  BinaryMask analyzable;
  /// Voxels with zero pooled variance but unequal group means; excluded from `analyzable`.
  std::size_t degenerate_voxels = 0;
};

struct SuprathresholdMask {
  BinaryMask mask;
  double p_threshold = 0.0;
  Tail tail = Tail::kGreater;
};

/// Lesion structure of a cohort, fixed across score permutations: which
/// voxels are analyzable (min_lesion <= lesioned count <= N - min_lesion)
/// and, per subject, which analyzable voxels it covers.
class LesionDesign {
 public:
  /// Throws InputError when N < 4 or min_lesion < 1.
  LesionDesign(const Cohort& cohort, int min_lesion);

  const VolumeGeometry& geometry() const { return geometry_; }
  std::size_t subject_count() const { return subject_count_; }
  int df() const { return static_cast<int>(subject_count_) - 2; }
  int min_lesion() const { return min_lesion_; }
  /// Analyzable voxels by lesion counts alone (before degenerate-variance exclusion).
  const BinaryMask& analyzable() const { return analyzable_; }
  /// Linear voxel index of each analyzable voxel, ascending.
  std::span<const std::size_t> analyzable_voxels() const { return analyzable_voxels_; }

  /// t for every analyzable voxel in `analyzable_voxels()` order; NaN marks a
  /// degenerate voxel. `sum`/`sum_sq` are caller-owned scratch. Returns the
  /// number of degenerate voxels. Throws NumericError on non-finite scores.
  std::size_t compact_t(std::span<const double> scores, std::vector<double>& sum, std::vector<double>& sum_sq,
                        std::vector<double>& t_out) const;

  StatMap stat_map(std::span<const double> scores) const;

 private:
  VolumeGeometry geometry_;
  std::size_t subject_count_ = 0;
  int min_lesion_ = 1;
  BinaryMask analyzable_;
  std::vector<std::size_t> analyzable_voxels_;
  std::vector<std::uint32_t> lesioned_count_;             // per analyzable voxel
  std::vector<std::vector<std::uint32_t>> subject_voxels_;  // compact indices per subject
};

/// Throws InputError when N < 4 or min_lesion < 1, NumericError on non-finite scores.
StatMap voxelwise_t(const Cohort& cohort, int min_lesion = 2);

/// Mask of analyzable voxels with t_to_p(t, df, tail) < p_threshold.
SuprathresholdMask apply_p_threshold(const StatMap& map, double p_threshold, Tail tail);

/// Decides t_to_p(t, df, tail) < p_threshold without evaluating the
/// incomplete beta except within a narrow band around the critical t.
class PThresholdCutoff {
 public:
  PThresholdCutoff(double p_threshold, int df, Tail tail);
  bool passes(double t) const;
  double critical() const { return critical_; }

 private:
  double p_threshold_;
  int df_;
  Tail tail_;
  double critical_;
  double band_lo_;
  double band_hi_;
};

struct FdrResult {
  std::optional<double> cutoff;
  std::vector<bool> reject;
};

/// Benjamini-Hochberg step-up at level q.
FdrResult fdr_bh(std::span<const double> p_values, double q);

}  // namespace vlsm
