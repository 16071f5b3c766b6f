#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vlsm {

/// Voxel grid shared by every map in an analysis. Voxels are linearized
/// x-fastest: index = x + nx * (y + ny * z).
struct VolumeGeometry {
  std::array<std::int32_t, 3> dims{1, 1, 1};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::array<double, 3> origin{0.0, 0.0, 0.0};

  static constexpr double kTolerance = 1e-6;

  VolumeGeometry() = default;
  /// Throws InputError when a dimension is < 1 or a spacing is not > 0.
  VolumeGeometry(std::array<std::int32_t, 3> dims, std::array<double, 3> spacing,
                 std::array<double, 3> origin = {0.0, 0.0, 0.0});

  std::size_t voxel_count() const {
    return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) *
           static_cast<std::size_t>(dims[2]);
  }
  std::size_t index(std::int32_t x, std::int32_t y, std::int32_t z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(y) + static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(z));
  }
  std::array<std::int32_t, 3> coords(std::size_t index) const;
  bool contains(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return x >= 0 && y >= 0 && z >= 0 && x < dims[0] && y < dims[1] && z < dims[2];
  }

  /// Exact dims, spacing and origin within kTolerance mm.
  bool compatible(const VolumeGeometry& other) const;
  std::string describe() const;
};

/// Throws InputError naming both geometries when they are not compatible.
void require_compatible(const VolumeGeometry& a, const VolumeGeometry& b, const std::string& what);

/// Boolean field on a geometry. Storage is one byte per voxel holding 0 or 1.
class BinaryMask {
 public:
  BinaryMask() = default;
  explicit BinaryMask(VolumeGeometry geometry);
  /// Any nonzero byte is stored as 1. Throws InputError on a length mismatch.
  BinaryMask(VolumeGeometry geometry, std::vector<std::uint8_t> voxels);

  const VolumeGeometry& geometry() const { return geometry_; }
  std::size_t voxel_count() const { return voxels_.size(); }
  /// Number of true voxels.
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  bool operator[](std::size_t i) const { return voxels_[i] != 0; }
  bool at(std::int32_t x, std::int32_t y, std::int32_t z) const { return voxels_[geometry_.index(x, y, z)] != 0; }
  void set(std::size_t i, bool value) { voxels_[i] = value ? 1 : 0; }
  void set(std::int32_t x, std::int32_t y, std::int32_t z, bool value) { set(geometry_.index(x, y, z), value); }

  std::span<const std::uint8_t> voxels() const { return voxels_; }
  /// Linear indices of the true voxels, ascending.
  std::vector<std::size_t> true_indices() const;

  friend bool operator==(const BinaryMask& a, const BinaryMask& b) {
    return a.geometry_.compatible(b.geometry_) && a.voxels_ == b.voxels_;
  }

 private:
  VolumeGeometry geometry_;
  std::vector<std::uint8_t> voxels_;
};

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b);
std::size_t intersection_size(const BinaryMask& a, const BinaryMask& b);
/// True when every voxel of `inner` is set in `outer`.
bool is_subset(const BinaryMask& inner, const BinaryMask& outer);

struct CountMap {
  VolumeGeometry geometry;
  std::vector<std::int32_t> counts;
};

struct Subject {
  std::string id;
  BinaryMask mask;
};

/// Subjects with their lesion masks and one deficit score each, in matching order.
class Cohort {
 public:
  /// Validates: >= 2 subjects, unique ids, one score per subject, shared geometry.
  /// Throws InputError otherwise.
  Cohort(std::vector<Subject> subjects, std::vector<double> scores);

  std::size_t size() const { return subjects_.size(); }
  const VolumeGeometry& geometry() const { return subjects_.front().mask.geometry(); }
  const std::vector<Subject>& subjects() const { return subjects_; }
  std::span<const double> scores() const { return scores_; }

  /// Same lesions with replacement scores (used for constant/shifted-score scenarios).
  Cohort with_scores(std::vector<double> scores) const;

 private:
  std::vector<Subject> subjects_;
  std::vector<double> scores_;
};

/// Per-voxel number of subjects whose lesion covers the voxel.
CountMap overlap_map(const Cohort& cohort);

/// |mask ∩ roi| / |roi|. Throws InputError on an empty roi or a geometry mismatch.
double percent_damage(const BinaryMask& mask, const BinaryMask& roi);

}  // namespace vlsm
