#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "vlsm/rng.hpp"
#include "vlsm/volume.hpp"

namespace vlsm {

/// Voxels whose center lies inside the axis-aligned ellipsoid (voxel units).
BinaryMask make_ellipsoid(const VolumeGeometry& geometry, std::array<double, 3> center, std::array<double, 3> radii);
/// Inclusive voxel box [lo, hi], clipped to the grid.
BinaryMask make_box(const VolumeGeometry& geometry, std::array<std::int32_t, 3> lo, std::array<std::int32_t, 3> hi);

struct SyntheticCohortSpec {
  VolumeGeometry geometry;
  BinaryMask brain_mask;
  std::size_t n_subjects = 60;
  std::size_t min_lesion_voxels = 50;
  std::size_t max_lesion_voxels = 800;
  double growth_bias = 1.0;
  BinaryMask roi;
  double score_noise_sd = 0.0;
  std::uint64_t seed = 0;

  /// Throws ConfigError naming the violated constraint (roi ⊆ brain_mask,
  /// max_voxels <= |brain_mask|, ...).
  void validate() const;
};

/// Grows a face-6-connected lesion of exactly `target_size` voxels inside
/// `brain_mask`. Starting from a uniformly drawn brain voxel, each step adds a
/// frontier voxel chosen with weight exp(growth_bias * occupied face
/// neighbors). A stalled growth restarts from a new seed voxel; after 100
/// restarts ConfigError is thrown.
BinaryMask grow_lesion(const BinaryMask& brain_mask, std::size_t target_size, double growth_bias, RngStream& rng);

struct GroundTruth {
  BinaryMask roi;
  SyntheticCohortSpec spec;
  std::vector<double> true_damage;  // percent damage per subject, before noise
};

struct SyntheticCohort {
  Cohort cohort;
  GroundTruth truth;
};

/// Subject j (0-based) draws its lesion size, lesion and score noise from
/// stream (seed, j); subjects are independent of generation order.
SyntheticCohort generate_cohort(const SyntheticCohortSpec& spec);

}  // namespace vlsm
